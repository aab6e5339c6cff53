"""Reading the gas-sensor drift batches, normalization and synthetic data.

The public UCSD distribution stores one sample per line in svmlight form,
``label idx:val idx:val ...`` with 1-based feature indices. Some copies
annotate the label with a concentration (``1;10.000000``); the part after
the semicolon is dropped.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyDataset,
    IndexOutOfRange,
    MalformedLine,
    NonFiniteValue,
)
from .scatter import LabeledDataset

DATA_ENV = "DRIFTLENS_DATA"
UCSD_DIM = 128
STD_FLOOR = 1e-12


@dataclass(frozen=True)
class BatchRegistry:
    """Expected sample counts per batch and per gas."""

    gases: tuple
    months: tuple
    per_gas: tuple  # one row per batch, columns follow ``gases``

    @property
    def totals(self):
        return tuple(sum(row) for row in self.per_gas)

    @property
    def grand_total(self):
        return sum(self.totals)

    @property
    def n_batches(self):
        return len(self.per_gas)


# Gas ids 1..6 in the data files follow the column order below.
UCSD_REGISTRY = BatchRegistry(
    gases=("Ethanol", "Ethylene", "Ammonia", "Acetaldehyde", "Acetone", "Toluene"),
    months=("1, 2", "3, 4, 8-10", "11-13", "14, 15", "16", "17-20", "21",
            "22, 23", "24, 30", "36"),
    per_gas=(
        (90, 98, 83, 30, 70, 74),
        (164, 334, 100, 109, 532, 5),
        (365, 490, 216, 240, 275, 0),
        (64, 43, 12, 30, 12, 0),
        (28, 40, 20, 46, 63, 0),
        (514, 574, 110, 29, 606, 467),
        (649, 662, 360, 744, 630, 568),
        (30, 30, 40, 33, 143, 18),
        (61, 55, 100, 75, 78, 101),
        (600, 600, 600, 600, 600, 600),
    ),
)

UCSD_CLASS_IDS = (1, 2, 3, 4, 5, 6)


def _parse_label(token, lineno, line):
    head = token.split(";", 1)[0]
    try:
        value = float(head)
    except ValueError:
        raise MalformedLine(lineno, line, "label is not a number") from None
    if not math.isfinite(value) or value != int(value):
        raise MalformedLine(lineno, line, "label is not an integer")
    return int(value)


def parse_svmlight(path, dim=UCSD_DIM, label_map=None, name=None):
    """Read an svmlight-style file into a dense (dim x N) dataset.

    Parameters
    ----------
    path : str or Path
    dim : int
        Feature dimension; indices must lie in ``1..dim``.
    label_map : dict, optional
        Maps raw label values to dense class ids ``1..c``. By default raw
        labels are numbered in order of first appearance.

    Raises
    ------
    MalformedLine, IndexOutOfRange, NonFiniteValue, EmptyDataset
    """
    path = Path(path)
    raw_labels = []
    columns = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            tokens = text.split()
            raw_labels.append(_parse_label(tokens[0], lineno, text))
            col = np.zeros(dim)
            seen = set()
            for tok in tokens[1:]:
                idx_s, sep, val_s = tok.partition(":")
                if not sep:
                    raise MalformedLine(lineno, text, f"field {tok!r} lacks ':'")
                try:
                    idx = int(idx_s)
                    val = float(val_s)
                except ValueError:
                    raise MalformedLine(lineno, text, f"bad field {tok!r}") from None
                if not 1 <= idx <= dim:
                    raise IndexOutOfRange(
                        f"{path.name} line {lineno}: index {idx} outside 1..{dim}"
                    )
                if not math.isfinite(val):
                    raise NonFiniteValue(f"{path.name} line {lineno}: value {val_s!r}")
                if idx in seen:
                    raise MalformedLine(lineno, text, f"index {idx} repeated")
                seen.add(idx)
                col[idx - 1] = val
            columns.append(col)
    if not columns:
        raise EmptyDataset(f"{path} holds no samples")

    if label_map is None:
        label_map = {}
        for raw in raw_labels:
            label_map.setdefault(raw, len(label_map) + 1)
    unknown = sorted(set(raw_labels) - set(label_map))
    if unknown:
        raise MalformedLine(0, str(unknown[0]), f"label {unknown[0]} not in label map")
    class_ids = [None] * max(label_map.values())
    for raw, dense in label_map.items():
        class_ids[dense - 1] = raw
    labels = np.array([label_map[raw] for raw in raw_labels], dtype=np.int64)
    return LabeledDataset(
        np.stack(columns, axis=1), labels, name or path.stem,
        n_classes=len(class_ids), class_ids=tuple(class_ids),
    )


def write_svmlight(dataset, path):
    """Write ``dataset`` in the format :func:`parse_svmlight` reads.

    Zero entries are omitted; values use ``repr`` so they parse back exactly.
    """
    labels = dataset.original_labels()
    X = dataset.features
    with open(path, "w") as fh:
        for i in range(dataset.n_samples):
            fields = [str(int(labels[i]))]
            for j in np.flatnonzero(X[:, i]):
                fields.append(f"{j + 1}:{float(X[j, i])!r}")
            fh.write(" ".join(fields) + "\n")


def data_dir(path=None):
    """Resolve the dataset directory from ``path`` or ``$DRIFTLENS_DATA``."""
    if path is None:
        path = os.environ.get(DATA_ENV)
    return None if path is None else Path(path)


def ucsd_available(path=None):
    root = data_dir(path)
    return root is not None and all(
        (root / f"batch{k}.dat").is_file() for k in range(1, UCSD_REGISTRY.n_batches + 1)
    )


def load_ucsd(path=None):
    """Parse ``batch1.dat`` .. ``batch10.dat``; gas ids are kept as class ids 1..6."""
    root = data_dir(path)
    if root is None:
        raise FileNotFoundError(f"no data directory given and ${DATA_ENV} is unset")
    label_map = {gas: gas for gas in UCSD_CLASS_IDS}
    batches = []
    for k in range(1, UCSD_REGISTRY.n_batches + 1):
        ds = parse_svmlight(root / f"batch{k}.dat", UCSD_DIM, label_map, f"batch{k}")
        batches.append(LabeledDataset(
            ds.features, ds.labels, ds.name, np.full(ds.n_samples, k),
            ds.n_classes, ds.class_ids,
        ))
    return batches


@dataclass
class BatchCheck:
    batch: int
    expected_total: int
    found_total: int
    expected_per_gas: tuple
    found_per_gas: tuple

    @property
    def total_ok(self):
        return self.expected_total == self.found_total

    @property
    def per_gas_ok(self):
        return self.expected_per_gas == self.found_per_gas


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)
    expected_grand_total: int = 0
    found_grand_total: int = 0

    @property
    def passed(self):
        return bool(self.checks) and all(c.total_ok for c in self.checks) and (
            self.expected_grand_total == self.found_grand_total
        )

    def mismatches(self):
        return [c for c in self.checks if not c.total_ok]

    def to_dict(self):
        return {
            "passed": self.passed,
            "expected_grand_total": self.expected_grand_total,
            "found_grand_total": self.found_grand_total,
            "batches": [
                {
                    "batch": c.batch,
                    "expected_total": c.expected_total,
                    "found_total": c.found_total,
                    "total_ok": c.total_ok,
                    "expected_per_gas": list(c.expected_per_gas),
                    "found_per_gas": list(c.found_per_gas),
                    "per_gas_ok": c.per_gas_ok,
                }
                for c in self.checks
            ],
        }

    def __str__(self):
        lines = ["batch  expected  found  per-gas"]
        for c in self.checks:
            flag = "ok" if c.total_ok else "MISMATCH"
            gas = "ok" if c.per_gas_ok else f"{list(c.found_per_gas)} != {list(c.expected_per_gas)}"
            lines.append(f"{c.batch:>5}  {c.expected_total:>8}  {c.found_total:>5}  {gas}  {flag}")
        lines.append(
            f"total  {self.expected_grand_total:>8}  {self.found_grand_total:>5}  "
            f"{'PASS' if self.passed else 'FAIL'}"
        )
        return "\n".join(lines)


def validate_batches(datasets, registry=UCSD_REGISTRY):
    """Compare per-batch totals and per-gas counts against ``registry``.

    Mismatches are recorded in the report; nothing is raised. Per-gas
    counts are informative only, the pass flag depends on totals.
    """
    datasets = list(datasets)
    report = ValidationReport(expected_grand_total=registry.grand_total)
    n_gas = len(registry.gases)
    for k, expected in enumerate(registry.per_gas):
        if k < len(datasets):
            ds = datasets[k]
            raw = ds.original_labels()
            found = tuple(int(np.count_nonzero(raw == g)) for g in range(1, n_gas + 1))
            total = ds.n_samples
        else:
            found, total = (0,) * n_gas, 0
        report.checks.append(BatchCheck(k + 1, sum(expected), total, tuple(expected), found))
    report.found_grand_total = sum(ds.n_samples for ds in datasets)
    return report


@dataclass(frozen=True, eq=False)
class NormStats:
    """Per-feature mean and population standard deviation (floored)."""

    mean: np.ndarray
    std: np.ndarray
    floored: np.ndarray  # features whose raw std fell below the floor


def zscore_fit(source, floor=STD_FLOOR):
    X = np.asarray(source, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] == 0:
        raise EmptyDataset("z-score statistics need at least one sample")
    mean = X.mean(axis=1)
    std = X.std(axis=1)
    floored = std < floor
    return NormStats(mean, np.where(floored, floor, std), floored)


def zscore_apply(stats, X):
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] != stats.mean.size:
        raise DimensionMismatch(f"stats for D={stats.mean.size}, data has {X.shape[0]} rows")
    Z = (X - stats.mean[:, None]) / stats.std[:, None]
    Z[stats.floored] = 0.0
    return Z


def zscore_inverse(stats, Z):
    Z = np.asarray(Z, dtype=np.float64)
    return Z * stats.std[:, None] + stats.mean[:, None]


def synth_two_domain(seed, n_per_class, classes, dim, drift, spread=1.0, separation=4.0):
    """Gaussian class blobs in a source domain and a drifted copy as target.

    Class centres are drawn once with scale ``separation``; both domains
    sample ``n_per_class`` points per class with isotropic noise ``spread``.
    Target samples are additionally shifted by ``drift``. Both datasets are
    labeled; the target labels are meant for scoring only.
    """
    if min(n_per_class, classes, dim) < 1:
        raise ValueError("n_per_class, classes and dim must all be >= 1")
    drift = np.asarray(drift, dtype=np.float64).ravel()
    if drift.size != dim:
        raise DimensionMismatch(f"drift has length {drift.size}, expected {dim}")
    rng = np.random.default_rng(seed)
    centres = separation * rng.standard_normal((dim, classes))
    labels = np.repeat(np.arange(1, classes + 1), n_per_class)
    base = centres[:, labels - 1]
    Xs = base + spread * rng.standard_normal(base.shape)
    Xt = base + drift[:, None] + spread * rng.standard_normal(base.shape)
    source = LabeledDataset(Xs, labels, "source", np.full(labels.size, 1), classes)
    target = LabeledDataset(Xt, labels.copy(), "target", np.full(labels.size, 2), classes)
    return source, target
