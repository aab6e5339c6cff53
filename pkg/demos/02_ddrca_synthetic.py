"""
Drift correction on synthetic data
==================================

A labeled source domain and a target domain shifted along one direction.
The shift is large compared with the class spread, so a classifier trained
on the source does poorly on raw target features. D-DRCA looks for a
subspace where the two domain means coincide while the classes stay apart.
"""

import numpy as np

from driftlens import HyperParams, dataio, harness
from driftlens.subspace import fit_ddrca, transform

classes, dim = 4, 10
drift = np.zeros(dim)
drift[:3] = 8.0 / np.sqrt(3)
source, target = dataio.synth_two_domain(seed=1, n_per_class=40, classes=classes,
                                         dim=dim, drift=drift, separation=1.5)

# each method at d = number of classes, LDA limited to classes - 1
params = HyperParams(d=classes, lam=1.0, kappa=1.0, mu=1.0)
for method in ("pca", "lda", "drca", "ddrca"):
    p = params if method != "lda" else HyperParams(d=classes - 1)
    r = harness.run_task(source, target, method, p)
    print(f"{method:>5}: {r.accuracy:6.2f}%")

# the projected mean gap is what the denominator keeps small
src, Xt = harness._prepare(source, target, "zscore")
model = fit_ddrca(src, Xt, params)
gap_before = np.linalg.norm(src.features.mean(axis=1) - Xt.mean(axis=1))
gap_after = np.linalg.norm(transform(model, src.features).mean(axis=1)
                           - transform(model, Xt).mean(axis=1))
print(f"\nmean gap: {gap_before:.3f} in feature space, {gap_after:.3f} after projection")

# models round-trip through JSON exactly
again = type(model).from_json(model.to_json())
print("JSON round trip exact:", np.array_equal(again.projection, model.projection))
