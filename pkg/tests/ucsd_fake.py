"""Writes a directory shaped like the public UCSD release (counts only).

Feature values are synthetic; only the per-batch, per-gas sample counts
follow the expected registry.
"""

import numpy as np

from driftlens.dataio import UCSD_REGISTRY


def write_fake_ucsd(root, drop_last_of=None, seed=0):
    rng = np.random.default_rng(seed)
    for k, counts in enumerate(UCSD_REGISTRY.per_gas, start=1):
        lines = []
        for gas, n in enumerate(counts, start=1):
            for _ in range(n - (1 if drop_last_of == k and gas == 1 else 0)):
                feats = [float(v) for v in rng.standard_normal(3) + gas + 0.1 * k]
                conc = rng.choice([10.0, 50.0, 100.0])
                lines.append(f"{gas};{conc:.6f} 1:{feats[0]!r} 64:{feats[1]!r} 128:{feats[2]!r}")
        rng.shuffle(lines)
        (root / f"batch{k}.dat").write_text("\n".join(lines) + "\n")
    return root
