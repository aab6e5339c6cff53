"""
Grid search and a (kappa, mu) slice
===================================

Sweeps a small grid on a synthetic task, prints the best cell and writes a
heatmap CSV of accuracy over kappa and mu at fixed d and lambda. The CSV
can be plotted with any external tool.
"""

import sys
import tempfile
from pathlib import Path

import numpy as np

from driftlens import dataio, harness

drift = np.zeros(8)
drift[:2] = 4.0
source, target = dataio.synth_two_domain(seed=4, n_per_class=25, classes=3, dim=8,
                                         drift=drift, spread=1.5, separation=2.5)

grids = {"d": (1, 2, 3), "lambda": (0.1, 1.0),
         "kappa": (0.01, 0.1, 1.0, 10.0, 100.0), "mu": (0.01, 0.1, 1.0, 10.0, 100.0)}
surface, best = harness.grid_search(source, target, "ddrca", grids)
print(f"{len(surface.records)} cells, best {best.accuracy:.2f}% at {best.param_values()}")

out = Path(tempfile.mkdtemp()) / "surface.json"
surface.write_json(out)
print("surface written to", out)

# accuracy over (kappa, mu) at the best d and lambda
fixed = {"d": best.params.d, "lambda": best.params.lam}
harness.write_heatmap(sys.stdout, surface, fixed, "mu", "kappa")
