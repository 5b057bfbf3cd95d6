"""k-means, nearest-centroid classification and the alpha sweep.

Class centers are CCCP centroids in the positive orthant; they are not
projected back to the simplex, since projecting would move them off the
minimizer of the average divergence.
"""
from __future__ import annotations

import csv
import io as _io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import _backend
from .centroids import DEFAULT_MAX_ITER, DEFAULT_TOL, CentroidProblem, CentroidResult, solve_centroid
from .divergences import as_histogram, check_alpha, sym_skew_jensen
from .errors import ConfigurationError
from .generators import GeneratorLike, as_vector_generator
from .io import IngestionConfig, fmt, smooth

DEFAULT_ALPHAS = (0.01, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5)


def divergence_matrix(X, C, alpha, generator: GeneratorLike = "shannon",
                      use_kernels: bool = True) -> np.ndarray:
    """``D[i, j] = sym_skew_jensen(X[i], C[j])``, shape ``(n, k)``."""
    alpha = check_alpha(alpha)
    F = as_vector_generator(generator)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    C = np.atleast_2d(np.asarray(C, dtype=float))
    closed = getattr(F, "closed_lower", False)
    F.check(X, closed=closed)
    F.check(C, closed=closed)
    kid = getattr(F, "kernel_id", None)
    if use_kernels and kid is not None:
        return _backend.kernels.sym_jensen_matrix(X, C, alpha, kid)
    return sym_skew_jensen(F, X[:, None, :], C[None, :, :], alpha)


@dataclass
class LabeledDataset:
    """Histograms ``X`` (one per row) with integer class labels."""

    X: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        labels = np.asarray(self.labels, dtype=int)
        if X.ndim != 2 or X.shape[0] != labels.shape[0]:
            raise ConfigurationError("need one label per histogram row")
        if X.shape[0] == 0:
            raise ConfigurationError("empty dataset")
        for row in X:
            as_histogram(row)
        if np.any(X <= 0):
            raise ConfigurationError("dataset histograms must have strictly positive bins")
        self.X, self.labels = X, labels

    @property
    def classes(self) -> List[int]:
        return sorted(int(c) for c in np.unique(self.labels))

    @property
    def items(self):
        return list(zip(self.X, self.labels.tolist()))

    def __len__(self):
        return self.X.shape[0]


def synth_dataset(prototypes: Sequence[Sequence[float]], concentration: float,
                  n_per_class: int, seed: int = 0,
                  config: IngestionConfig = IngestionConfig()) -> LabeledDataset:
    """Dirichlet samples around each prototype; class ``i`` gets label ``i + 1``.

    Each draw is ``Dirichlet(concentration * prototype)`` and is smoothed
    like ingested data.
    """
    if not concentration > 0 or not np.isfinite(concentration):
        raise ConfigurationError("concentration must be a positive real")
    if n_per_class < 1:
        raise ConfigurationError("each class needs at least one item")
    protos = [as_histogram(p, f"prototype {i + 1}") for i, p in enumerate(prototypes)]
    if not protos or any(p.shape != protos[0].shape for p in protos):
        raise ConfigurationError("prototypes must share one bin count")
    if any(np.any(p <= 0) for p in protos):
        raise ConfigurationError("prototype bins must be positive")
    rng = np.random.default_rng(seed)
    X, labels = [], []
    for i, p in enumerate(protos):
        draws = rng.dirichlet(concentration * p, size=n_per_class)
        X.extend(smooth(d, config) for d in draws)
        labels.extend([i + 1] * n_per_class)
    return LabeledDataset(np.asarray(X), np.asarray(labels))


# --------------------------------------------------------------------------
# k-means

@dataclass
class KMeansResult:
    assignments: np.ndarray
    centers: np.ndarray
    objective_trace: List[float] = field(repr=False)
    rounds: int
    converged: bool

    def __iter__(self):
        return iter((self.assignments, self.centers))


def _seed_centers(X, k, alpha, gen, rng):
    # k-means++ with the divergence in place of the squared distance
    idx = [int(rng.integers(X.shape[0]))]
    dmin = divergence_matrix(X, X[idx], alpha, gen)[:, 0]
    for _ in range(1, k):
        weights = np.clip(dmin, 0.0, None)
        weights[idx] = 0.0
        total = weights.sum()
        if total > 0:
            nxt = int(rng.choice(X.shape[0], p=weights / total))
        else:
            free = np.setdiff1d(np.arange(X.shape[0]), idx)
            nxt = int(free[rng.integers(free.size)])
        idx.append(nxt)
        dmin = np.minimum(dmin, divergence_matrix(X, X[[nxt]], alpha, gen)[:, 0])
    return X[idx].copy()


def kmeans(points, k: int, alpha=0.5, generator: GeneratorLike = "shannon", seed: int = 0,
           max_rounds: int = 100, tol: float = DEFAULT_TOL,
           max_iter: int = DEFAULT_MAX_ITER) -> KMeansResult:
    """Lloyd iterations with CCCP centroid updates.

    The update step warm-starts CCCP from the previous center, so the total
    divergence to assigned centers never increases.  An empty cluster is
    re-seeded at the point farthest from its own center.
    """
    X = np.atleast_2d(np.asarray(points, dtype=float))
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ConfigurationError(f"need 1 <= k <= n, got k={k}, n={n}")
    alpha = check_alpha(alpha)
    gen = as_vector_generator(generator)
    gen.check(X, closed=getattr(gen, "closed_lower", False))
    rng = np.random.default_rng(seed)
    centers = _seed_centers(X, k, alpha, gen, rng)
    assign = None
    trace: List[float] = []
    converged = False
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        D = divergence_matrix(X, centers, alpha, gen)
        new = np.argmin(D, axis=1)
        for j in range(k):
            if not np.any(new == j):
                own = D[np.arange(n), new]
                # never steal the last member of another cluster
                counts = np.bincount(new, minlength=k)
                own = np.where(counts[new] > 1, own, -np.inf)
                far = int(np.argmax(own))
                centers[j] = X[far]
                new[far] = j
                D = divergence_matrix(X, centers, alpha, gen)
        trace.append(float(np.sum(D[np.arange(n), new])))
        if assign is not None and np.array_equal(new, assign):
            converged = True
            break
        assign = new
        for j in range(k):
            members = X[assign == j]
            prob = CentroidProblem(members, None, alpha, gen)
            start = centers[j] if members.shape[0] > 1 else "arithmetic"
            centers[j] = solve_centroid(prob, tol=tol, max_iter=max_iter, init=start).center
        D = divergence_matrix(X, centers, alpha, gen)
        trace.append(float(np.sum(D[np.arange(n), assign])))
    return KMeansResult(assign if assign is not None else new, centers, trace, rounds, converged)


# --------------------------------------------------------------------------
# nearest-centroid classification

def class_centroids(data: LabeledDataset, alpha=0.5, generator: GeneratorLike = "shannon",
                    tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                    init="arithmetic") -> Dict[int, CentroidResult]:
    """One uniform-weight centroid per class, keyed by label."""
    out = {}
    for c in data.classes:
        members = data.X[data.labels == c]
        out[c] = solve_centroid(CentroidProblem(members, None, alpha, generator),
                                tol=tol, max_iter=max_iter, init=init)
    return out


def _center_table(centers):
    labels = sorted(centers)
    C = np.stack([np.asarray(getattr(centers[c], "center", centers[c]), dtype=float)
                  for c in labels])
    return labels, C


def classify(queries, centers, alpha=0.5, generator: GeneratorLike = "shannon") -> np.ndarray:
    """Vectorized :func:`nn_classify` over the rows of ``queries``."""
    if not centers:
        raise ConfigurationError("no class centers given")
    labels, C = _center_table(centers)
    D = divergence_matrix(np.atleast_2d(queries), C, alpha, generator)
    # argmin returns the first minimum; labels are sorted, so ties go to the smallest id
    return np.asarray(labels)[np.argmin(D, axis=1)]


def nn_classify(query, centers, alpha=0.5, generator: GeneratorLike = "shannon") -> int:
    """Label of the center closest to ``query``; ties go to the smallest label."""
    return int(classify(np.asarray(query, dtype=float)[None, :], centers, alpha, generator)[0])


# --------------------------------------------------------------------------
# alpha sweep

@dataclass
class SweepRow:
    alpha: float
    accuracy: float
    per_class: Dict[int, float]
    iterations: Dict[int, int]
    converged: bool = True

    @property
    def mean_iterations(self) -> float:
        return float(np.mean(list(self.iterations.values())))


@dataclass
class SweepReport:
    rows: List[SweepRow]
    classes: List[int]

    def best(self) -> SweepRow:
        return max(self.rows, key=lambda r: r.accuracy)

    def to_csv(self) -> str:
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "accuracy", *[f"acc_class_{c}" for c in self.classes], "mean_cccp_iters"])
        for r in self.rows:
            w.writerow([fmt(r.alpha), fmt(r.accuracy),
                        *[fmt(r.per_class[c]) for c in self.classes], fmt(r.mean_iterations)])
        return buf.getvalue()


def stratified_split(labels, train_fraction: float, seed: int):
    """Index arrays ``(train, test)``, the same fraction taken from every class."""
    if not 0.0 < train_fraction < 1.0:
        raise ConfigurationError("train fraction must lie in (0, 1)")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for c in sorted(np.unique(labels)):
        idx = np.nonzero(labels == c)[0]
        idx = idx[rng.permutation(idx.size)]
        cut = int(round(train_fraction * idx.size))
        if cut == 0 or cut == idx.size:
            raise ConfigurationError(f"class {c}: split leaves the train or test part empty")
        train.append(idx[:cut])
        test.append(idx[cut:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def alpha_sweep(data: LabeledDataset, alphas: Sequence[float] = DEFAULT_ALPHAS,
                generator: GeneratorLike = "shannon", split: float = 0.5, seed: int = 0,
                insample: bool = False, tol: float = DEFAULT_TOL,
                max_iter: int = DEFAULT_MAX_ITER, workers: int = 1) -> SweepReport:
    """Nearest-centroid accuracy for every ``alpha`` in the grid.

    Centroids come from a stratified train split and are scored on the
    held-out part; ``insample`` scores on the full data with centroids from
    the full data instead.  The result does not depend on ``workers``.
    """
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise ConfigurationError("empty alpha grid")
    if any(not 0.0 <= a <= 0.5 for a in alphas):
        raise ConfigurationError("sweep alphas must lie in [0, 1/2]")
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ConfigurationError("sweep alphas must be strictly increasing")
    if len(data.classes) < 2:
        raise ConfigurationError("a sweep needs at least two classes")
    if insample:
        train = test = np.arange(len(data))
    else:
        train, test = stratified_split(data.labels, split, seed)
    train_set = LabeledDataset(data.X[train], data.labels[train])
    Xt, yt = data.X[test], data.labels[test]
    classes = data.classes

    def cell(a):
        cents = class_centroids(train_set, a, generator, tol=tol, max_iter=max_iter)
        pred = classify(Xt, cents, a, generator)
        per_class = {c: float(np.mean(pred[yt == c] == c)) for c in classes}
        return SweepRow(a, float(np.mean(pred == yt)), per_class,
                        {c: r.iterations for c, r in cents.items()},
                        all(r.converged for r in cents.values()))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(cell, alphas))
    else:
        rows = [cell(a) for a in alphas]
    return SweepReport(rows, classes)
