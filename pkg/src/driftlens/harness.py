"""Experiment runner: single drift tasks, parameter sweeps and report files.

A task normalizes both domains with statistics fitted on the source,
fits a projection on the labeled source and the *features* of the target,
projects both, classifies the target against the source and scores the
prediction. Target labels only enter at the scoring step.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import dataio
from .classify import CLASSIFIERS, accuracy
from .errors import AxisNotInSurface, DataInvalid, DriftLensError, MissingLabels
from .scatter import concat_datasets
from .subspace import METHODS, HyperParams, fit, fit_pca, transform

PARAM_FIELDS = {"d": "d", "lambda": "lam", "kappa": "kappa", "mu": "mu"}
METHOD_AXES = {
    "pca": ("d",),
    "lda": ("d",),
    "drca": ("d", "lambda"),
    "ddrca": ("d", "lambda", "kappa", "mu"),
}
NORMS = ("zscore", "none")

_POW10 = (0.01, 0.1, 1.0, 10.0, 100.0)
UCSD_GRIDS = {
    "d": (1, 2, 4, 8, 16, 32, 64, 128),
    "lambda": _POW10,
    "kappa": _POW10,
    "mu": _POW10,
}
# LDA has at most c - 1 = 5 useful directions on the six-gas data.
UCSD_LDA_GRIDS = {"d": (1, 2, 3, 4, 5)}

# Published accuracies for the methods built here (batches 2..10, average).
PUBLISHED_RESULTS = {
    "pca": ((82.40, 84.80, 80.12, 75.13, 73.57, 56.16, 48.64, 67.45, 49.14), 68.60),
    "lda": ((47.27, 57.76, 50.93, 62.44, 41.48, 37.42, 68.37, 52.34, 31.17), 49.91),
    "drca": ((66.24, 71.82, 48.45, 85.28, 69.87, 50.18, 53.74, 69.15, 44.61), 62.15),
    "ddrca": ((84.32, 90.10, 67.08, 91.37, 84.48, 60.89, 65.65, 70.85, 49.50), 73.80),
}


@dataclass
class TaskResult:
    source: str
    target: str
    method: str
    params: HyperParams
    accuracy: float | None
    wall_time: float = 0.0
    error: str | None = None

    @property
    def ok(self):
        return self.error is None

    def param_values(self):
        return {name: getattr(self.params, f) for name, f in PARAM_FIELDS.items()}


def _check_method(method):
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def _prepare(source, target, norm):
    """Normalize both domains with source statistics; returns (source, X_t)."""
    if norm not in NORMS:
        raise ValueError(f"norm must be one of {NORMS}, got {norm!r}")
    if norm == "none":
        return source, target.features
    stats = dataio.zscore_fit(source.features)
    return (
        source.with_features(dataio.zscore_apply(stats, source.features)),
        dataio.zscore_apply(stats, target.features),
    )


def _score(model, source, X_t, y_t, classifier):
    predict = CLASSIFIERS[classifier]
    Ys = transform(model, source.features)
    Yt = transform(model, X_t)
    return accuracy(predict(Ys, source.labels, Yt), y_t)


def _check_task(source, target, classifier):
    if source.labels is None:
        raise MissingLabels(f"source {source.name!r} has no labels")
    if target.labels is None:
        raise MissingLabels(f"target {target.name!r} needs labels for scoring")
    if classifier not in CLASSIFIERS:
        raise ValueError(f"classifier must be one of {tuple(CLASSIFIERS)}")


def _annotate(exc, context):
    exc.task = context
    head = exc.args[0] if exc.args else ""
    exc.args = (f"{head} [{context}]", *exc.args[1:])


def run_task(source, target, method, params, classifier="1nn", norm="zscore"):
    """Fit, project, classify and score one source -> target task."""
    _check_method(method)
    _check_task(source, target, classifier)
    start = time.perf_counter()
    try:
        src, X_t = _prepare(source, target, norm)
        model = fit(method, src, X_t, params)
        acc = _score(model, src, X_t, target.labels, classifier)
    except DriftLensError as exc:
        _annotate(exc, f"task {source.name} -> {target.name}, method {method}, {params}")
        raise
    return TaskResult(
        source.name, target.name, method, params, acc, time.perf_counter() - start
    )


def _axis_values(method, grids):
    axes = {}
    for name in METHOD_AXES[method]:
        values = tuple(grids.get(name, ()))
        if not values:
            if name == "d":
                raise ValueError("the d grid must not be empty")
            values = (getattr(HyperParams(), PARAM_FIELDS[name]),)
        cast = int if name == "d" else float
        axes[name] = tuple(cast(v) for v in values)
    return axes


@dataclass
class GridSurface:
    """Every cell of a Cartesian parameter sweep for one task and method."""

    method: str
    source: str
    target: str
    axes: dict
    records: list = field(default_factory=list)

    def __post_init__(self):
        expected = math.prod(len(v) for v in self.axes.values())
        if len(self.records) != expected:
            raise ValueError(f"{len(self.records)} records for {expected} grid cells")

    def best(self):
        """Highest accuracy; ties go to the smallest ``(d, lambda, kappa, mu)``."""
        scored = [r for r in self.records if r.ok]
        if not scored:
            return None
        return min(scored, key=lambda r: (-r.accuracy, r.params.key()))

    def lookup(self, **values):
        for r in self.records:
            pv = r.param_values()
            if all(pv[k] == v for k, v in values.items()):
                return r
        return None

    # -- serialization -------------------------------------------------
    _CSV_FIELDS = ("source", "target", "method", "d", "lambda", "kappa", "mu",
                   "ridge_tau", "accuracy", "error")

    def to_dict(self):
        return {
            "method": self.method,
            "source": self.source,
            "target": self.target,
            "axes": {k: list(v) for k, v in self.axes.items()},
            "records": [
                {**r.param_values(), "ridge_tau": r.params.ridge_tau,
                 "accuracy": r.accuracy, "error": r.error}
                for r in self.records
            ],
        }

    @classmethod
    def from_dict(cls, doc):
        records = []
        for row in doc["records"]:
            params = HyperParams(
                d=int(row["d"]), lam=row["lambda"], kappa=row["kappa"], mu=row["mu"],
                ridge_tau=row["ridge_tau"],
            )
            records.append(TaskResult(
                doc["source"], doc["target"], doc["method"], params,
                row["accuracy"], error=row["error"],
            ))
        axes = {k: tuple(int(x) if k == "d" else float(x) for x in v)
                for k, v in doc["axes"].items()}
        return cls(doc["method"], doc["source"], doc["target"], axes, records)

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self._CSV_FIELDS)
            for r in self.records:
                pv = r.param_values()
                w.writerow([
                    r.source, r.target, r.method, pv["d"], repr(pv["lambda"]),
                    repr(pv["kappa"]), repr(pv["mu"]), repr(r.params.ridge_tau),
                    "" if r.accuracy is None else f"{r.accuracy:.2f}",
                    r.error or "",
                ])

    @classmethod
    def read(cls, path):
        """Load a surface written by :meth:`write_json` or :meth:`write_csv`."""
        path = Path(path)
        if path.suffix.lower() == ".json":
            with open(path) as fh:
                return cls.from_dict(json.load(fh))
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        if not rows:
            raise ValueError(f"{path} holds no grid records")
        method = rows[0]["method"]
        axes = {}
        records = []
        for row in rows:
            params = HyperParams(
                d=int(row["d"]), lam=float(row["lambda"]), kappa=float(row["kappa"]),
                mu=float(row["mu"]), ridge_tau=float(row["ridge_tau"]),
            )
            acc = float(row["accuracy"]) if row["accuracy"] else None
            records.append(TaskResult(row["source"], row["target"], method, params,
                                      acc, error=row["error"] or None))
            for name in METHOD_AXES[method]:
                value = getattr(params, PARAM_FIELDS[name])
                seen = axes.setdefault(name, [])
                if value not in seen:
                    seen.append(value)
        return cls(method, rows[0]["source"], rows[0]["target"],
                   {k: tuple(v) for k, v in axes.items()}, records)


def _fit_limit(method, source):
    if method == "lda":
        return source.classes().size - 1
    return source.dim


def _sweep_group(method, src, X_t, y_t, classifier, base, d_values):
    """Fit once at the largest usable d and score every requested d by truncation."""
    limit = _fit_limit(method, src)
    usable = [d for d in d_values if 1 <= d <= limit]
    out = {}
    model = None
    fit_time = 0.0
    if usable:
        start = time.perf_counter()
        try:
            model = fit(method, src, X_t, replace(base, d=max(usable)))
        except DriftLensError as exc:
            for d in d_values:
                out[d] = (None, f"{type(exc).__name__}: {exc}", 0.0)
            return out
        fit_time = time.perf_counter() - start
    for d in d_values:
        if d not in usable:
            out[d] = (None, f"DimensionTooLarge: d={d} must lie in 1..{limit}", 0.0)
            continue
        start = time.perf_counter()
        try:
            acc = _score(model.truncate(d), src, X_t, y_t, classifier)
            out[d] = (acc, None, fit_time + time.perf_counter() - start)
        except DriftLensError as exc:
            out[d] = (None, f"{type(exc).__name__}: {exc}", 0.0)
    return out


def grid_search(source, target, method, grids, classifier="1nn", norm="zscore",
                ridge_tau=1e-3, workers=1):
    """Evaluate every combination of the method's parameter grids.

    ``grids`` maps ``d``, ``lambda``, ``kappa`` and ``mu`` to value
    sequences; axes the method does not use are ignored, and a missing
    non-``d`` axis is held at its default. A failing cell is recorded with
    its error message and does not stop the sweep. Cells sharing all
    parameters except ``d`` share one fit. Results come back in
    Cartesian-product order whatever ``workers`` is.

    Returns
    -------
    (GridSurface, TaskResult or None)
    """
    _check_method(method)
    _check_task(source, target, classifier)
    axes = _axis_values(method, grids)
    src, X_t = _prepare(source, target, norm)
    other = [name for name in axes if name != "d"]
    groups = list(itertools.product(*(axes[n] for n in other)))

    def run(combo):
        base = HyperParams(d=1, ridge_tau=ridge_tau,
                           **{PARAM_FIELDS[n]: v for n, v in zip(other, combo)})
        return base, _sweep_group(method, src, X_t, target.labels, classifier,
                                  base, axes["d"])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, groups))
    else:
        results = [run(g) for g in groups]
    by_combo = dict(zip(groups, results))

    records = []
    for cell in itertools.product(*axes.values()):
        values = dict(zip(axes, cell))
        base, per_d = by_combo[tuple(values[n] for n in other)]
        acc, err, wall = per_d[values["d"]]
        records.append(TaskResult(source.name, target.name, method,
                                  replace(base, d=values["d"]), acc, wall, err))
    surface = GridSurface(method, source.name, target.name, axes, records)
    return surface, surface.best()


def default_grids(method):
    return UCSD_LDA_GRIDS if method == "lda" else UCSD_GRIDS


@dataclass
class UCSDReport:
    """Per-batch accuracies for batches 2..10 plus averages."""

    methods: tuple
    per_task: dict      # method -> list of best TaskResult per target batch
    global_best: dict   # method -> (HyperParams, list of accuracies)
    surfaces: dict = field(default_factory=dict)
    targets: tuple = tuple(range(2, 11))

    def rows(self):
        """(method, setting, accuracies, average) in fixed order."""
        out = []
        for m in self.methods:
            tuned = [r.accuracy if r is not None else None for r in self.per_task[m]]
            out.append((m, "per-task best", tuned, _mean(tuned)))
            params, accs = self.global_best[m]
            label = "global best" if params is None else (
                "global best " + _fmt_params(m, params))
            out.append((m, label, accs, _mean(accs)))
            published, avg = PUBLISHED_RESULTS[m]
            out.append((m, "published", list(published), avg))
        return out

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["method", "setting", *[f"batch{k}" for k in self.targets], "Average"])
            for method, setting, accs, avg in self.rows():
                w.writerow([method, setting, *[_fmt_acc(a) for a in accs], _fmt_acc(avg)])

    def to_dict(self):
        doc = {"targets": list(self.targets), "rows": []}
        for method, setting, accs, avg in self.rows():
            doc["rows"].append({"method": method, "setting": setting,
                                "accuracy": accs, "average": avg})
        doc["best_params"] = {
            m: [None if r is None else r.param_values() for r in self.per_task[m]]
            for m in self.methods
        }
        return doc

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")

    def average(self, method):
        return _mean([r.accuracy if r else None for r in self.per_task[method]])


def _mean(values):
    if not values or any(v is None for v in values):
        return None
    return float(np.mean(values))


def _fmt_acc(value):
    return "" if value is None else f"{value:.2f}"


def _fmt_params(method, params):
    return " ".join(
        f"{name}={getattr(params, PARAM_FIELDS[name]):g}" for name in METHOD_AXES[method]
    )


def _global_best(surfaces):
    """Single parameter setting with the best average over all tasks."""
    n_cells = len(surfaces[0].records)
    best = None
    for i in range(n_cells):
        cells = [s.records[i] for s in surfaces]
        if not all(c.ok for c in cells):
            continue
        avg = float(np.mean([c.accuracy for c in cells]))
        key = (-avg, cells[0].params.key())
        if best is None or key < best[0]:
            best = (key, cells[0].params, [c.accuracy for c in cells])
    if best is None:
        return None, [None] * len(surfaces)
    return best[1], best[2]


def reproduce_ucsd(data_dir=None, methods=("ddrca",), classifier="1nn", norm="zscore",
                   grids=None, workers=1, out_dir=None, progress=None):
    """Batch 1 -> batch k (k = 2..10) sweeps for each method.

    ``grids`` optionally maps a method name to its grid dictionary (see
    :func:`grid_search`); methods missing from it use :func:`default_grids`.

    Raises
    ------
    DataInvalid
        If the batch files do not match the expected sample counts.
    """
    batches = dataio.load_ucsd(data_dir)
    report = dataio.validate_batches(batches)
    if not report.passed:
        raise DataInvalid(report)
    methods = tuple(methods)
    for m in methods:
        _check_method(m)
    source = batches[0]
    per_task, global_best, surfaces = {}, {}, {}
    for m in methods:
        g = grids.get(m, default_grids(m)) if grids else default_grids(m)
        surfs = []
        for target in batches[1:]:
            surface, best = grid_search(source, target, m, g, classifier, norm,
                                        workers=workers)
            surfs.append(surface)
            if progress:
                progress(m, target.name, best)
        surfaces[m] = surfs
        per_task[m] = [s.best() for s in surfs]
        global_best[m] = _global_best(surfs)
    result = UCSDReport(methods, per_task, global_best, surfaces)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        result.write_csv(out / "summary.csv")
        result.write_json(out / "summary.json")
        for m, surfs in surfaces.items():
            for s in surfs:
                s.write_json(out / f"grid_{m}_{s.target}.json")
    return result


def emit_projection_2d(dataset, out, norm="zscore"):
    """Write the first two principal coordinates of every sample as CSV.

    Columns are ``batch,label,pc1,pc2``; the PCA is fitted on the whole
    dataset after optional z-scoring.
    """
    if isinstance(dataset, (list, tuple)):
        dataset = concat_datasets(dataset)
    if dataset.n_samples == 0:
        raise dataio.EmptyDataset("nothing to project")
    X = dataset.features
    if norm == "zscore":
        X = dataio.zscore_apply(dataio.zscore_fit(X), X)
    elif norm != "none":
        raise ValueError(f"norm must be one of {NORMS}, got {norm!r}")
    model = fit_pca(X, min(2, dataset.dim))
    Y = transform(model, X)
    if Y.shape[0] < 2:
        Y = np.vstack([Y, np.zeros_like(Y)])
    batch = dataset.batch if dataset.batch is not None else np.ones(dataset.n_samples, int)
    labels = dataset.original_labels() if dataset.labels is not None else None
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["batch", "label", "pc1", "pc2"])
        for i in range(dataset.n_samples):
            w.writerow([
                int(batch[i]), "" if labels is None else int(labels[i]),
                repr(float(Y[0, i])), repr(float(Y[1, i])),
            ])
    return Path(out)


def heatmap_matrix(surface, fixed, x_axis, y_axis):
    """Accuracy matrix (rows follow ``y_axis``, columns ``x_axis``)."""
    fixed = {_axis_name(k): v for k, v in dict(fixed).items()}
    x_axis, y_axis = _axis_name(x_axis), _axis_name(y_axis)
    for name in (x_axis, y_axis, *fixed):
        if name not in surface.axes:
            raise AxisNotInSurface(f"axis {name!r} not in surface axes {list(surface.axes)}")
    if x_axis == y_axis:
        raise ValueError("x and y axes must differ")
    pinned = {}
    for name, values in surface.axes.items():
        if name in (x_axis, y_axis):
            continue
        if name in fixed:
            value = fixed[name]
            match = [v for v in values if v == value or (name != "d" and math.isclose(v, value))]
            if not match:
                raise ValueError(f"{name}={value} is not on the grid {list(values)}")
            pinned[name] = match[0]
        elif len(values) == 1:
            pinned[name] = values[0]
        else:
            raise ValueError(f"swept axis {name!r} needs a fixed value")
    xs, ys = surface.axes[x_axis], surface.axes[y_axis]
    M = np.full((len(ys), len(xs)), np.nan)
    for i, yv in enumerate(ys):
        for j, xv in enumerate(xs):
            r = surface.lookup(**pinned, **{x_axis: xv, y_axis: yv})
            if r is not None and r.ok:
                M[i, j] = r.accuracy
    return xs, ys, M


def _axis_name(name):
    return "lambda" if name == "lam" else name


def write_heatmap(fh, surface, fixed, x_axis, y_axis):
    xs, ys, M = heatmap_matrix(surface, fixed, x_axis, y_axis)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow([f"{_axis_name(y_axis)}\\{_axis_name(x_axis)}", *[_fmt_axis(x) for x in xs]])
    for yv, row in zip(ys, M):
        w.writerow([_fmt_axis(yv), *["" if np.isnan(a) else f"{a:.2f}" for a in row]])


def emit_heatmap(surface, fixed, x_axis, y_axis, out):
    """Write a 2-D slice of ``surface`` as CSV with axis values as headers.

    The first row holds the x-axis values, the first column the y-axis
    values; empty cells mark failed grid points.
    """
    heatmap_matrix(surface, fixed, x_axis, y_axis)  # validate before touching ``out``
    with open(out, "w", newline="") as fh:
        write_heatmap(fh, surface, fixed, x_axis, y_axis)
    return Path(out)


def _fmt_axis(value):
    return str(value) if isinstance(value, (int, np.integer)) else repr(float(value))
