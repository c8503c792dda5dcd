"""Spearman rank correlation with tie correction, significance, and matrices.

The p-value uses the two-tailed t approximation t = rho*sqrt((n-2)/(1-rho^2))
with n-2 degrees of freedom, evaluated through a regularized incomplete beta
function computed by continued-fraction expansion (relative tolerance 1e-12).
A seeded permutation test is available for small samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, lgamma, log, log1p, sqrt

import numpy as np

from .errors import StatError

DEFAULT_ALPHA = 0.05
DEFAULT_TAU = 0.4

_TINY = 1e-300
_REL_TOL = 1e-12
_MAX_ITER = 500


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz iteration)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _REL_TOL:
            return h
    raise StatError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ValueError("shape parameters must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * log1p(-x)
    front = exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_two_tailed_p(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with df degrees of freedom."""
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))


def average_ranks(values) -> np.ndarray:
    """1-based ranks; tied values receive the mean of their rank positions."""
    a = np.asarray(values, dtype=float)
    order = np.argsort(a, kind="mergesort")
    ranks = np.empty(a.shape[0], dtype=float)
    sorted_vals = a[order]
    i = 0
    n = a.shape[0]
    while i < n:
        j = i
        while j + 1 < n and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    denom = sqrt(float(xc @ xc) * float(yc @ yc))
    if denom == 0.0:
        raise StatError("zero rank variance (constant input)")
    return float(xc @ yc) / denom


@dataclass(frozen=True)
class CorrelationResult:
    rho: float
    n: int
    p_value: float
    significant: bool
    strength: str  # "weak" or "moderate_strong"
    alpha: float
    tau: float

    @property
    def strong(self) -> bool:
        return self.strength == "moderate_strong"


def spearman(
    x,
    y,
    alpha: float = DEFAULT_ALPHA,
    tau: float = DEFAULT_TAU,
    exact_p: bool = False,
    seed: int | None = None,
    permutations: int = 10000,
) -> CorrelationResult:
    """Spearman's rank correlation between two equal-length sequences.

    Requires n >= 3 and at least two distinct values on each side; constant
    input raises StatError rather than returning NaN. With ``exact_p`` the
    p-value comes from a seeded permutation test instead of the t approximation.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise StatError(f"length mismatch: {xa.shape} vs {ya.shape}")
    n = xa.shape[0]
    if n < 3:
        raise StatError(f"need at least 3 paired observations, got {n}")
    if np.unique(xa).size < 2 or np.unique(ya).size < 2:
        raise StatError("constant input: fewer than 2 distinct values")
    rx = average_ranks(xa)
    ry = average_ranks(ya)
    rho = _pearson(rx, ry)
    rho = max(-1.0, min(1.0, rho))

    if exact_p:
        if seed is None:
            raise StatError("the permutation test requires a seed")
        rng = np.random.default_rng(seed)
        hits = 0
        observed = abs(rho)
        for _ in range(permutations):
            perm = rng.permutation(ry)
            if abs(_pearson(rx, perm)) >= observed - 1e-12:
                hits += 1
        p = (1 + hits) / (permutations + 1)
    elif abs(rho) == 1.0:
        p = 0.0
    else:
        df = n - 2
        t = rho * sqrt(df / (1.0 - rho * rho))
        p = t_two_tailed_p(t, df)

    return CorrelationResult(
        rho=rho,
        n=n,
        p_value=p,
        significant=p < alpha,
        strength="moderate_strong" if abs(rho) >= tau else "weak",
        alpha=alpha,
        tau=tau,
    )


# ---------------------------------------------------------------------------
# Correlation tables (property x metric score) and metric-by-metric matrices
# ---------------------------------------------------------------------------

INSUFFICIENT_N = "insufficient-n"


@dataclass(frozen=True)
class ProfileCell:
    """One (source, metric) cell of a property-vs-score correlation table."""

    source: str
    metric: str
    property_name: str
    n_used: int
    n_dropped: int
    result: CorrelationResult | None
    reason: str | None = None


def correlate_profiles(
    scores,
    profile: dict[str, float],
    property_name: str = "property",
    alpha: float = DEFAULT_ALPHA,
    tau: float = DEFAULT_TAU,
    exact_p: bool = False,
    seed: int | None = None,
) -> list[ProfileCell]:
    """Correlate a per-prompt property with metric scores per (source, metric).

    Prompts missing either value (or carrying NaN) are dropped pairwise and
    counted; groups with fewer than 3 usable pairs are marked insufficient
    rather than silently skipped.
    """
    groups: dict[tuple[str, str], list] = {}
    for s in scores:
        groups.setdefault((s.source, s.metric), []).append(s)
    cells: list[ProfileCell] = []
    for (source, metric), group in sorted(groups.items()):
        xs: list[float] = []
        ys: list[float] = []
        dropped = 0
        for s in sorted(group, key=lambda r: r.prompt_id):
            value = profile.get(s.prompt_id)
            if value is None or np.isnan(value) or np.isnan(s.value):
                dropped += 1
                continue
            xs.append(float(value))
            ys.append(float(s.value))
        if len(xs) < 3:
            cells.append(ProfileCell(source, metric, property_name, len(xs), dropped, None, INSUFFICIENT_N))
            continue
        try:
            result = spearman(xs, ys, alpha=alpha, tau=tau, exact_p=exact_p, seed=seed)
        except StatError as exc:
            cells.append(ProfileCell(source, metric, property_name, len(xs), dropped, None, str(exc)))
            continue
        cells.append(ProfileCell(source, metric, property_name, len(xs), dropped, result))
    return cells


@dataclass(frozen=True)
class CorrelationMatrix:
    labels: tuple[str, ...]
    rho: np.ndarray
    p: np.ndarray

    def to_rows(self) -> list[list]:
        rows = []
        for i, label in enumerate(self.labels):
            rows.append([label] + [self.rho[i, j] for j in range(len(self.labels))])
        return rows


def metric_matrix(
    scores,
    source: str,
    alpha: float = DEFAULT_ALPHA,
    tau: float = DEFAULT_TAU,
) -> CorrelationMatrix:
    """Pairwise Spearman correlation between metrics for one image source.

    Prompts missing a metric are deleted pairwise. Each unordered pair is
    computed once, so the matrix is exactly symmetric with a unit diagonal.
    Pairs with fewer than 3 shared prompts (or constant values) get NaN.
    """
    from .corpus import SCORE_METRICS

    per_metric: dict[str, dict[str, float]] = {}
    for s in scores:
        if s.source != source:
            continue
        per_metric.setdefault(s.metric, {})[s.prompt_id] = s.value
    labels = tuple(m for m in SCORE_METRICS if m in per_metric)
    if len(labels) < 2:
        raise StatError(
            f"need at least 2 metrics with scores for source {source!r}, got {len(labels)}"
        )
    k = len(labels)
    rho = np.eye(k)
    p = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            a, b = per_metric[labels[i]], per_metric[labels[j]]
            shared = sorted(set(a) & set(b))
            if len(shared) < 3:
                rho[i, j] = rho[j, i] = np.nan
                p[i, j] = p[j, i] = np.nan
                continue
            try:
                res = spearman([a[pid] for pid in shared], [b[pid] for pid in shared],
                               alpha=alpha, tau=tau)
            except StatError:
                rho[i, j] = rho[j, i] = np.nan
                p[i, j] = p[j, i] = np.nan
                continue
            rho[i, j] = rho[j, i] = res.rho
            p[i, j] = p[j, i] = res.p_value
    return CorrelationMatrix(labels=labels, rho=rho, p=p)
