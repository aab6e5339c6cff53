"""
The UCSD gas-sensor drift benchmark
===================================

Batch 1 is the labeled source; batches 2 to 10 are drifted targets. With
``$DRIFTLENS_DATA`` pointing at ``batch1.dat`` .. ``batch10.dat`` this script
validates the files, emits the 2-D PCA view of all batches and runs the
tuned comparison. The full D-DRCA sweep is 1000 cells per target, so pass
``--quick`` for a reduced grid.
"""

import sys
from pathlib import Path

from driftlens import dataio, harness

if not dataio.ucsd_available():
    sys.exit(f"set ${dataio.DATA_ENV} to the directory holding batch1.dat .. batch10.dat")

batches = dataio.load_ucsd()
report = dataio.validate_batches(batches)
print(report)
if not report.passed:
    sys.exit(1)

out = Path("ucsd_report")
out.mkdir(exist_ok=True)
harness.emit_projection_2d(batches, out / "projection2d.csv")

grids = None
if "--quick" in sys.argv:
    # per-method grids; methods left out keep their full defaults
    small = {"d": (8, 16, 32), "lambda": (0.1, 1.0), "kappa": (0.1, 1.0), "mu": (1.0, 10.0)}
    grids = {"pca": small, "drca": small, "ddrca": small}


def progress(method, target, best):
    print(f"{method:>5} batch1 -> {target}: "
          f"{'error' if best is None else f'{best.accuracy:.2f}'}")


table = harness.reproduce_ucsd(methods=("pca", "lda", "drca", "ddrca"), grids=grids,
                               workers=4, out_dir=out, progress=progress)
print((out / "summary.csv").read_text())
