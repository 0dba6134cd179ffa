"""Normalized Haar integration on SO(n)/SU(n): quadrature, Monte Carlo, averaging.

Integrands are *vectorised*: they receive a stack of matrices of shape
``(B, n, n)`` (``complex128``; SO(n) stacks have zero imaginary part) and
return an array whose leading axis has length ``B``.  Trailing axes are
allowed, so vector- and matrix-valued integrands work unchanged.

Every chart map is an ordered product of independent factors, each depending
on its own parameters, and the density factorises the same way.  Quadrature
is therefore a tensor-product rule over the factors, evaluated in chunks, and
the polynomial moments ``int R^{(x)d} dR`` factor exactly into products of
one-dimensional integrals (:func:`moment_tensor`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import betainc

from .charts import Chart, ChartSpec, Param, get_chart
from .errors import CostCapExceeded, NonFiniteIntegrandError
from .matgroup import Group, GroupElement

__all__ = [
    "QuadratureSpec",
    "default_quadrature",
    "Grid",
    "haar_grid",
    "grid_size",
    "box_volume",
    "integrate",
    "moment_tensor",
    "integrate_trace_power",
    "HaarSampler",
    "sample",
    "monte_carlo",
    "conjugation_average",
    "MeanAxiomsReport",
    "polynomial_battery",
    "mean_axioms_report",
    "GRID_CAP",
]

GRID_CAP = 2 * 10**7
_CHUNK = 1 << 16


@dataclass(frozen=True)
class QuadratureSpec:
    """Per-angle rule.  ``periodic_nodes`` is used for full-period angles with
    constant weight (trapezoid rule); it defaults to ``nodes_per_angle``."""

    nodes_per_angle: int = 16
    rule: str = "gauss-legendre"
    periodic_nodes: int | None = None

    def __post_init__(self):
        if self.rule not in ("gauss-legendre", "midpoint"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if self.nodes_per_angle < 2 or (self.periodic_nodes is not None and self.periodic_nodes < 2):
            raise ValueError("need at least 2 nodes per angle")

    @property
    def nodes_periodic(self) -> int:
        return self.periodic_nodes or self.nodes_per_angle


_DEFAULTS = {
    ("SO", 2, "hurwitz"): QuadratureSpec(32, periodic_nodes=32),
    ("SO", 3, "hurwitz"): QuadratureSpec(20, periodic_nodes=12),
    ("SO", 4, "hurwitz"): QuadratureSpec(16, periodic_nodes=8),
    ("SO", 2, "alt"): QuadratureSpec(32, periodic_nodes=32),
    ("SO", 3, "alt"): QuadratureSpec(20, periodic_nodes=12),
    ("SO", 4, "alt"): QuadratureSpec(12, periodic_nodes=8),
    ("SU", 2, "hurwitz"): QuadratureSpec(20, periodic_nodes=12),
    ("SU", 3, "hurwitz"): QuadratureSpec(8, periodic_nodes=6),
}


def default_quadrature(chart) -> QuadratureSpec:
    """Resolution that keeps the product grid near 10^6 points or below.

    Exact (to rounding) for entry polynomials of degree <= 4 on every chart
    listed in the table; larger groups fall back to a coarse rule and are
    better served by :func:`moment_tensor`.
    """
    spec = _as_spec(chart)
    key = (spec.group.kind, spec.group.n, spec.kind)
    return _DEFAULTS.get(key, QuadratureSpec(8, periodic_nodes=6))


def _as_spec(chart) -> ChartSpec:
    if isinstance(chart, ChartSpec):
        return chart
    if isinstance(chart, Chart):
        return chart.spec
    if isinstance(chart, Group):
        return ChartSpec(chart)
    if isinstance(chart, str):
        return ChartSpec(Group.parse(chart))
    raise TypeError(f"expected a ChartSpec or Group, got {type(chart).__name__}")


# ---------------------------------------------------------------------------
# one-dimensional rules


def _rule_1d(p: Param, q: QuadratureSpec, weighted: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights (density factor included unless ``weighted=False``)."""
    if p.periodic:
        n = q.nodes_periodic
        h = (p.hi - p.lo) / n
        offset = 0.5 if q.rule == "midpoint" else 0.0
        t = p.lo + h * (np.arange(n) + offset)
        return t, np.full(n, h)
    # |sin|^k on a full period has kinks at multiples of pi: one panel per half
    if p.weight[0] == "sin" and p.weight[1] > 0 and p.hi - p.lo > math.pi + 1e-12:
        panels = [(p.lo, p.lo + math.pi), (p.lo + math.pi, p.hi)]
    else:
        panels = [(p.lo, p.hi)]
    ts, ws = [], []
    n = q.nodes_per_angle
    for a, b in panels:
        if q.rule == "gauss-legendre":
            x, w = np.polynomial.legendre.leggauss(n)
        else:
            x = -1 + (2 * np.arange(n) + 1) / n
            w = np.full(n, 2.0 / n)
        t = 0.5 * (b - a) * x + 0.5 * (b + a)
        ts.append(t)
        ws.append(0.5 * (b - a) * w * (p.weight_values(t) if weighted else 1.0))
    return np.concatenate(ts), np.concatenate(ws)


@dataclass(frozen=True)
class _FactorRule:
    mats: np.ndarray      # (G, n, n)
    weights: np.ndarray   # (G,), normalised to sum 1
    points: np.ndarray    # (G, len(params)) parameter values
    params: tuple[int, ...]


@lru_cache(maxsize=64)
def _factor_rules(spec: ChartSpec, q: QuadratureSpec) -> tuple[_FactorRule, ...]:
    chart = get_chart(spec)
    rules_1d = [_rule_1d(p, q) for p in chart.params]
    out = []
    for f in chart.factors:
        grids = np.meshgrid(*(rules_1d[i][0] for i in f.params), indexing="ij")
        wgrids = np.meshgrid(*(rules_1d[i][1] for i in f.params), indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=-1)
        w = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
        mats = f.build(*(pts[:, k] for k in range(pts.shape[1])))
        mats.flags.writeable = False
        out.append(_FactorRule(mats, w / w.sum(), pts, f.params))
    return tuple(out)


def _stack_product(rules: Sequence[_FactorRule], n: int):
    mats = np.eye(n, dtype=np.complex128)[None]
    w = np.ones(1)
    for r in rules:
        mats = (mats[:, None] @ r.mats[None]).reshape(-1, n, n)
        w = np.outer(w, r.weights).ravel()
    return mats, w


def grid_size(chart, q: QuadratureSpec | None = None) -> int:
    spec = _as_spec(chart)
    q = q or default_quadrature(spec)
    return math.prod(len(r.weights) for r in _factor_rules(spec, q))


def _iter_grid(spec: ChartSpec, q: QuadratureSpec, chunk: int = _CHUNK):
    """Yield ``(matrices, weights)`` blocks covering the full product grid."""
    rules = _factor_rules(spec, q)
    total = math.prod(len(r.weights) for r in rules)
    if total > GRID_CAP:
        raise CostCapExceeded(
            f"{total} quadrature points for {spec.group} exceeds the cap {GRID_CAP}; "
            "lower the node counts or use moment_tensor for polynomial integrands"
        )
    n = spec.group.n
    split = len(rules)
    inner = 1
    while split > 0 and inner * len(rules[split - 1].weights) <= chunk:
        split -= 1
        inner *= len(rules[split].weights)
    a_mats, a_w = _stack_product(rules[:split], n)
    b_mats, b_w = _stack_product(rules[split:], n)
    rows = max(1, chunk // len(b_w))
    for start in range(0, len(a_w), rows):
        am = a_mats[start:start + rows]
        mats = (am[:, None] @ b_mats[None]).reshape(-1, n, n)
        w = np.outer(a_w[start:start + rows], b_w).ravel()
        yield mats, w


def box_volume(chart, q: QuadratureSpec | None = None) -> float:
    """Quadrature of the closed-form chart density over the whole parameter box.

    Unlike :meth:`Chart.total_volume` this evaluates ``Chart.density`` at every
    node of the product grid, so it is an independent check of the volume.
    """
    spec = _as_spec(chart)
    q = q or default_quadrature(spec)
    ch = get_chart(spec)
    rules = [_rule_1d(p, q, weighted=False) for p in ch.params]
    size = math.prod(len(r[0]) for r in rules)
    if size > GRID_CAP:
        raise CostCapExceeded(f"{size} quadrature points exceeds the cap {GRID_CAP}")
    # split off the first parameter to bound memory
    rest_t = np.meshgrid(*(r[0] for r in rules[1:]), indexing="ij")
    rest_w = np.meshgrid(*(r[1] for r in rules[1:]), indexing="ij")
    rest_t = np.stack([g.ravel() for g in rest_t], axis=-1) if rules[1:] else np.zeros((1, 0))
    rest_w = np.prod(np.stack([g.ravel() for g in rest_w], axis=-1), axis=-1) if rules[1:] else np.ones(1)
    total = 0.0
    for t0, w0 in zip(*rules[0]):
        pts = np.column_stack([np.full(len(rest_t), t0), rest_t])
        total += w0 * float(np.dot(rest_w, ch.density(pts)))
    return total


@dataclass(frozen=True, eq=False)
class Grid:
    """A materialised quadrature grid: points ``(G, n, n)`` and weights summing to 1."""

    group: Group
    points: np.ndarray
    weights: np.ndarray

    def integrate(self, values) -> np.ndarray:
        v = np.asarray(values)
        return np.tensordot(self.weights, v, axes=(0, 0))


def haar_grid(chart, q: QuadratureSpec | None = None, cap: int = 1 << 20) -> Grid:
    spec = _as_spec(chart)
    q = q or default_quadrature(spec)
    size = grid_size(spec, q)
    if size > cap:
        raise CostCapExceeded(f"grid of {size} points exceeds materialisation cap {cap}")
    mats, w = _stack_product(_factor_rules(spec, q), spec.group.n)
    mats.flags.writeable = False
    return Grid(spec.group, mats, w)


def _call(f, mats, group, vectorized):
    if vectorized:
        v = f(mats)
    else:
        v = np.array([f(GroupElement(m, group)) for m in mats])
    v = np.asarray(v)
    if v.ndim == 0 or v.shape[0] != mats.shape[0]:
        raise ValueError(
            f"vectorised integrand must return a leading axis of length {mats.shape[0]}, "
            f"got shape {v.shape}"
        )
    return v


def integrate(f: Callable, chart, q: QuadratureSpec | None = None, *, vectorized: bool = True):
    """Normalised Haar integral ``int f(g) dg`` by product quadrature on a chart.

    The weights are normalised to total mass one, so ``f = 1`` returns exactly 1.
    Raises :class:`NonFiniteIntegrandError` if ``f`` is not finite at a node.
    """
    spec = _as_spec(chart)
    q = q or default_quadrature(spec)
    acc = None
    for mats, w in _iter_grid(spec, q):
        v = _call(f, mats, spec.group, vectorized)
        if not np.all(np.isfinite(v)):
            raise NonFiniteIntegrandError("integrand is not finite at a quadrature node")
        part = np.tensordot(w, v, axes=(0, 0))
        acc = part if acc is None else acc + part
    return _tidy(acc)


def _tidy(x):
    x = np.asarray(x)
    if np.iscomplexobj(x) and np.all(x.imag == 0):
        x = x.real
    return x.item() if x.ndim == 0 else x


def _kron_power(m: np.ndarray, d: int, e: int = 0) -> np.ndarray:
    """``m^{(x)d} (x) conj(m)^{(x)e}`` for a stack of matrices."""
    b, n, _ = m.shape
    out = np.ones((b, 1, 1), dtype=np.complex128)
    for factor in [m] * d + [m.conj()] * e:
        k = out.shape[1]
        out = np.einsum("bij,bkl->bikjl", out, factor).reshape(b, k * n, k * n)
    return out


def moment_tensor(chart, degree: int, q: QuadratureSpec | None = None, conj_degree: int = 0) -> np.ndarray:
    """``int g^{(x)degree} (x) conj(g)^{(x)conj_degree} dg`` as an ``n^D x n^D`` matrix.

    Because the chart map is an ordered product of independent factors and the
    density factorises, the integral is the ordered product of the per-factor
    averages.  With the default rule (``nodes_per_angle = 24`` and enough
    periodic nodes for the total degree) this is exact to rounding.
    """
    spec = _as_spec(chart)
    total = degree + conj_degree
    if q is None:
        q = QuadratureSpec(24, periodic_nodes=max(8, total + 2))
    n = spec.group.n
    out = None
    for r in _factor_rules(spec, q):
        avg = np.zeros((n**total, n**total), dtype=np.complex128)
        for start in range(0, len(r.weights), 8):
            kp = _kron_power(r.mats[start:start + 8], degree, conj_degree)
            avg += np.tensordot(r.weights[start:start + 8], kp, axes=(0, 0))
        out = avg if out is None else out @ avg
    return out


def integrate_trace_power(chart, k: int, q: QuadratureSpec | None = None) -> float:
    """``int (tr g)^k dg`` via :func:`moment_tensor` (``tr(A^{(x)k}) = (tr A)^k``)."""
    if k == 0:
        return 1.0
    return _tidy(np.trace(moment_tensor(chart, k, q)))


# ---------------------------------------------------------------------------
# sampling


def _sin_power_cdf(t, k):
    """Normalised CDF of |sin|^k on [0, pi]."""
    t = np.asarray(t, dtype=float)
    if k == 0:
        return t / math.pi
    half = 0.5 * betainc((k + 1) / 2, 0.5, np.sin(t) ** 2)
    return np.where(t <= math.pi / 2, half, 1.0 - half)


def _marginal_cdf(p: Param):
    kind, k = p.weight
    if kind == "cossin":
        return lambda t: np.sin(t) ** (k + 1)
    if p.hi - p.lo > math.pi + 1e-12:
        def cdf(t):
            t = np.asarray(t, dtype=float) - p.lo
            upper = t >= math.pi
            return 0.5 * (_sin_power_cdf(np.where(upper, t - math.pi, t), k) + upper)
        return cdf
    return lambda t: _sin_power_cdf(np.asarray(t, dtype=float) - p.lo, k)


def _bisect(cdf, u, lo, hi, tol=1e-12):
    a = np.full_like(u, lo)
    b = np.full_like(u, hi)
    while np.max(b - a) > tol:
        mid = 0.5 * (a + b)
        below = cdf(mid) < u
        a = np.where(below, mid, a)
        b = np.where(below, b, mid)
    return 0.5 * (a + b)


class HaarSampler:
    """Deterministic Haar sampler on a chart.

    Each chart parameter is drawn independently from its density factor by
    inverse-CDF bisection (tolerance 1e-12); uniform parameters are scaled
    directly.  The stream depends only on ``seed``.  For parallel use,
    :meth:`spawn` derives child seeds with ``numpy.random.SeedSequence(seed).spawn``,
    child ``i`` using the first 64-bit word of its generated state.
    """

    def __init__(self, chart, seed: int = 0):
        self.spec = _as_spec(chart)
        self.chart = get_chart(self.spec)
        self.seed = int(seed)
        self._rng = np.random.default_rng(self.seed)
        self._cdfs = [None if p.uniform else _marginal_cdf(p) for p in self.chart.params]

    @property
    def group(self) -> Group:
        return self.spec.group

    def angles(self, count: int) -> np.ndarray:
        u = self._rng.random((count, self.chart.num_params))
        x = np.empty_like(u)
        for i, (p, cdf) in enumerate(zip(self.chart.params, self._cdfs)):
            if cdf is None:
                x[:, i] = p.lo + u[:, i] * (p.hi - p.lo)
            else:
                x[:, i] = _bisect(cdf, u[:, i], p.lo, p.hi)
        return x

    def sample_batch(self, count: int) -> np.ndarray:
        return self.chart.matrices(self.angles(count))

    def sample(self) -> GroupElement:
        return GroupElement(self.sample_batch(1)[0], self.group)

    def spawn(self, k: int) -> list["HaarSampler"]:
        children = np.random.SeedSequence(self.seed).spawn(k)
        return [HaarSampler(self.spec, int(c.generate_state(1, np.uint64)[0])) for c in children]


def sample(s: HaarSampler) -> GroupElement:
    return s.sample()


def monte_carlo(f: Callable, sampler: HaarSampler, count: int, batch: int = 1 << 16):
    """Monte Carlo mean of ``f`` and its standard error (elementwise)."""
    s1 = s2 = None
    done = 0
    while done < count:
        b = min(batch, count - done)
        v = np.asarray(f(sampler.sample_batch(b)))
        part1 = v.sum(axis=0)
        part2 = (np.abs(v) ** 2).sum(axis=0)
        s1 = part1 if s1 is None else s1 + part1
        s2 = part2 if s2 is None else s2 + part2
        done += b
    mean = s1 / count
    var = np.maximum(s2 / count - np.abs(mean) ** 2, 0.0) * count / max(count - 1, 1)
    return _tidy(mean), _tidy(np.sqrt(var / count))


# ---------------------------------------------------------------------------
# averaging


def conjugation_average(f: Callable, g, chart=None, q: QuadratureSpec | None = None):
    """``f°(g) = int f(v g v^{-1}) dv``; ``g`` is a GroupElement or an ``n x n`` array."""
    if isinstance(g, GroupElement):
        group, m = g.group, g.entries
    else:
        m = np.asarray(g, dtype=np.complex128)
        group = None
    spec = _as_spec(chart if chart is not None else group)
    return integrate(lambda v: f(v @ m @ np.conj(np.swapaxes(v, -1, -2))), spec, q)


# ---------------------------------------------------------------------------
# mean axioms


@dataclass
class MeanAxiomsReport:
    """Residuals of the seven mean axioms plus cross-chart agreement.

    ``residuals`` maps axiom number (1..7) to the largest absolute residual
    over the test battery.  ``chart_agreement`` maps a comparison name to
    its largest absolute discrepancy (``"monte_carlo"`` is in units of the
    standard error).
    """

    group: Group
    residuals: dict[int, float]
    chart_agreement: dict[str, float] = field(default_factory=dict)

    NAMES = {
        1: "homogeneity",
        2: "additivity",
        3: "positivity",
        4: "normalization",
        5: "right invariance",
        6: "left invariance",
        7: "inversion invariance",
    }

    def passed(self, tol: float = 1e-8, chart_tol: float = 1e-7, sigma: float = 3.0) -> bool:
        ok = all(r < tol for r in self.residuals.values())
        for name, v in self.chart_agreement.items():
            ok &= v < (sigma if name == "monte_carlo" else chart_tol)
        return ok


def mean_axioms_report(
    chart,
    q: QuadratureSpec | None = None,
    functions: Sequence[Callable] | None = None,
    *,
    seed: int = 0,
    translations: int = 3,
    compare_alt: bool = True,
    mc_samples: int = 0,
) -> MeanAxiomsReport:
    """Check axioms 1)-7) of a mean on the quadrature functional ``integrate``.

    ``functions`` are real-valued vectorised test functions (default: the
    entry-polynomial battery of :func:`polynomial_battery`).
    """
    spec = _as_spec(chart)
    q = q or default_quadrature(spec)
    fs = list(functions) if functions is not None else polynomial_battery(spec.group)

    def stacked(transform=lambda m: m):
        return lambda m: np.stack([np.real(f(transform(m))) for f in fs], axis=-1)

    def herm(m):
        return np.conj(np.swapaxes(m, -1, -2))

    base = np.atleast_1d(integrate(stacked(), spec, q))
    rng = np.random.default_rng(seed)
    alpha, beta = rng.normal(size=2)
    res: dict[int, float] = {}

    both = lambda m: np.stack([np.real(f(m)) for f in fs], axis=-1)
    lin = np.atleast_1d(integrate(lambda m: alpha * both(m) + beta * both(m) ** 2, spec, q))
    sq = np.atleast_1d(integrate(lambda m: both(m) ** 2, spec, q))
    scaled = np.atleast_1d(integrate(lambda m: alpha * both(m), spec, q))
    res[1] = float(np.max(np.abs(scaled - alpha * base)))
    res[2] = float(np.max(np.abs(lin - (alpha * base + beta * sq))))
    res[3] = float(max(0.0, -np.min(sq)))
    res[4] = abs(integrate(lambda m: np.ones(m.shape[0]), spec, q) - 1.0)

    sampler = HaarSampler(spec, seed)
    right = left = 0.0
    for a in sampler.sample_batch(translations):
        r_val = np.atleast_1d(integrate(stacked(lambda m: m @ a), spec, q))
        l_val = np.atleast_1d(integrate(stacked(lambda m: a @ m), spec, q))
        right = max(right, float(np.max(np.abs(r_val - base))))
        left = max(left, float(np.max(np.abs(l_val - base))))
    res[5] = right
    res[6] = left
    inv = np.atleast_1d(integrate(stacked(herm), spec, q))
    res[7] = float(np.max(np.abs(inv - base)))

    agreement: dict[str, float] = {}
    if compare_alt and spec.group.kind == "SO" and spec.kind == "hurwitz":
        alt = ChartSpec(spec.group, "alt")
        alt_val = np.atleast_1d(integrate(stacked(), alt, default_quadrature(alt)))
        agreement["alt"] = float(np.max(np.abs(alt_val - base)))
    if mc_samples:
        mean, err = monte_carlo(stacked(), HaarSampler(spec, seed + 1), mc_samples)
        mean, err = np.atleast_1d(mean), np.atleast_1d(err)
        agreement["monte_carlo"] = float(np.max(np.abs(mean - base) / np.maximum(err, 1e-300)))
    return MeanAxiomsReport(spec.group, res, agreement)


def polynomial_battery(group: Group) -> list[Callable]:
    """Ten real entry polynomials of degree 1..4 used as mean-axiom test functions."""
    n = group.n

    def tr(m):
        return np.trace(m, axis1=-2, axis2=-1)

    j = 1 if n > 1 else 0
    k = 2 if n > 2 else j
    return [
        lambda m: m[:, 0, 0].real,
        lambda m: (m[:, 0, j] * m[:, j, 0]).real,
        lambda m: np.abs(m[:, 0, 0]) ** 2,
        lambda m: tr(m).real ** 2,
        lambda m: (m[:, 0, 0] * m[:, j, j] * m[:, k, k]).real,
        lambda m: tr(m).real ** 3,
        lambda m: np.abs(tr(m)) ** 4,
        lambda m: (m[:, 0, 0] ** 2 * m[:, j, 0] ** 2).real,
        lambda m: np.abs(m[:, 0, j]) ** 2 * np.abs(m[:, j, k]) ** 2,
        lambda m: (m[:, 0, 0] + m[:, j, k]).real ** 4,
    ]
