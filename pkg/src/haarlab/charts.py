"""Global angle charts on SO(n) and SU(n) with their invariant densities.

Three charts are provided:

``hurwitz`` on SO(n)
    ``R = E_1 E_2 ... E_{n-1}`` with ``E_s = E_{n-s}(phi_{s-1,s}) ... E_{n-1}(phi_{0,s})``.
    ``E_a(phi)`` acts on the coordinate pair (a, a+1) and is read as the
    substitution ``x = E x'``, i.e. its block is ``[[cos, sin], [-sin, cos]]``
    (a planar rotation by ``-phi``).  Box: ``0 <= phi_{0s} < 2pi``,
    ``0 <= phi_{rs} < pi`` for ``r >= 1``.  Density
    ``2^{n(n-1)/4} prod (sin phi_{rs})^r``.

``alt`` on SO(n)
    ``u = r_{n-1} ... r_1`` with ``r_j = r_{12}(phi_{1j}) r_{23}(phi_{2j}) ... r_{j,j+1}(phi_{jj})``
    and ``r_{ij}`` the rotation with block ``[[cos, -sin], [sin, cos]]``.
    Box: ``0 <= phi_{ij} <= pi`` (i < j), ``0 <= phi_{jj} < 2pi``.  Each ``r_j e_{j+1}``
    is a spherical coordinate system on ``S^j``; the density is
    ``2^{n(n-1)/4} prod |sin phi_{ij}|^{i-1}`` (checked against :func:`metric_density`).

``hurwitz`` on SU(n)
    Same block ordering with the SU(2) blocks
    ``[[a, b], [-conj b, conj a]]``, ``a = cos(phi) e^{i psi}``, ``b = sin(phi) e^{i chi}``,
    where ``chi`` only enters the last factor of each ``E_s``.  Box:
    ``0 <= phi < pi/2``, ``0 <= psi, chi < 2pi``.  Density
    ``sqrt(n) 2^{n(n-1)/2} prod cos(phi_{rs}) (sin phi_{rs})^{2r+1}``.

    The classical statement of this density carries the prefactor ``sqrt(n!)``
    instead of ``sqrt(n)``.  For the line element ``ds^2 = sum dc dc-bar`` the
    Gram-determinant oracle gives ``sqrt(n)``; the two agree only for n = 2.
    :func:`su_density_classical_prefactor` exposes that classical constant so the
    discrepancy (a factor ``sqrt((n-1)!)``) stays testable.

Any global orientation flip of the blocks leaves densities and integrals unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .errors import AngleRangeError, SingularChartPointError
from .matgroup import Group, GroupElement, SO, SU

__all__ = [
    "ChartSpec",
    "AngleVectorSO",
    "AngleVectorSU",
    "AngleVectorAlt",
    "Param",
    "Chart",
    "get_chart",
    "so_angle_keys",
    "alt_angle_keys",
    "so_from_angles",
    "so_from_angles_alt",
    "su_from_angles",
    "so_density",
    "su_density",
    "alt_density",
    "su_density_classical_prefactor",
    "so_total_volume",
    "su_total_volume",
    "metric_density",
    "FD_STEP",
]

TWO_PI = 2.0 * math.pi
FD_STEP = 1e-5


@dataclass(frozen=True)
class ChartSpec:
    group: Group
    kind: str = "hurwitz"

    def __post_init__(self):
        if self.kind not in ("hurwitz", "alt"):
            raise ValueError(f"unknown chart kind {self.kind!r}")
        if self.group.kind not in ("SO", "SU"):
            raise ValueError("charts exist for SO(n) and SU(n) only")
        if self.kind == "alt" and self.group.kind != "SO":
            raise ValueError("the alternate chart is defined for SO(n) only")
        if self.group.n < 2:
            raise ValueError("charts need n >= 2")


def so_angle_keys(n: int) -> list[tuple[int, int]]:
    """Index pairs (r, s), 0 <= r < s < n, in the order phi_01; phi_02, phi_12; ..."""
    return [(r, s) for s in range(1, n) for r in range(s)]


def alt_angle_keys(n: int) -> list[tuple[int, int]]:
    """Index pairs (i, j), 1 <= i <= j < n, grouped by j."""
    return [(i, j) for j in range(1, n) for i in range(1, j + 1)]


def _as_table(n, values, keys, what):
    if isinstance(values, dict):
        try:
            arr = np.array([values[k] for k in keys], dtype=float)
        except KeyError as exc:
            raise ValueError(f"missing {what} angle {exc.args[0]}") from None
    else:
        arr = np.asarray(values, dtype=float).ravel()
    if arr.shape != (len(keys),):
        raise ValueError(f"{what} needs {len(keys)} angles for n={n}, got {arr.size}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class AngleVectorSO:
    """Hurwitz angles on SO(n); ``phi`` may be a flat sequence in
    :func:`so_angle_keys` order or a dict keyed by (r, s)."""

    n: int
    phi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "phi", _as_table(self.n, self.phi, so_angle_keys(self.n), "SO"))

    def angle(self, r, s):
        return float(self.phi[so_angle_keys(self.n).index((r, s))])

    def flat(self) -> np.ndarray:
        return self.phi


@dataclass(frozen=True, eq=False)
class AngleVectorSU:
    n: int
    phi: np.ndarray
    psi: np.ndarray
    chi: np.ndarray

    def __post_init__(self):
        keys = so_angle_keys(self.n)
        object.__setattr__(self, "phi", _as_table(self.n, self.phi, keys, "SU phi"))
        object.__setattr__(self, "psi", _as_table(self.n, self.psi, keys, "SU psi"))
        chi = np.asarray(self.chi, dtype=float).ravel()
        if chi.shape != (self.n - 1,):
            raise ValueError(f"SU chi needs {self.n - 1} values, got {chi.size}")
        chi.flags.writeable = False
        object.__setattr__(self, "chi", chi)

    def flat(self) -> np.ndarray:
        return np.concatenate([self.phi, self.psi, self.chi])


@dataclass(frozen=True, eq=False)
class AngleVectorAlt:
    n: int
    phi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "phi", _as_table(self.n, self.phi, alt_angle_keys(self.n), "alt"))

    def flat(self) -> np.ndarray:
        return self.phi


# ---------------------------------------------------------------------------
# chart machinery


@dataclass(frozen=True)
class Param:
    """One chart coordinate with its range and one-dimensional density factor.

    ``weight`` is ``("sin", k)`` for ``|sin t|^k`` or ``("cossin", k)`` for
    ``cos t (sin t)^k``.  ``closed`` marks ranges that include the upper end.
    """

    name: str
    lo: float
    hi: float
    weight: tuple[str, int]
    closed: bool = False

    @property
    def uniform(self) -> bool:
        return self.weight == ("sin", 0)

    @property
    def periodic(self) -> bool:
        """Full-period range with constant weight: trapezoid rule is spectral."""
        return self.uniform and math.isclose(self.hi - self.lo, TWO_PI)

    def weight_values(self, t):
        kind, k = self.weight
        t = np.asarray(t, dtype=float)
        if kind == "sin":
            return np.abs(np.sin(t)) ** k if k else np.ones_like(t)
        return np.cos(t) * np.sin(t) ** k

    def contains(self, t, slack=1e-12) -> bool:
        if self.closed:
            return self.lo - slack <= t <= self.hi + slack
        return self.lo - slack <= t < self.hi


@dataclass(frozen=True)
class Factor:
    """One matrix factor of a chart: its block builder and parameter indices."""

    build: Callable[..., np.ndarray]
    params: tuple[int, ...]


def _so_block(n, a):
    """E_a(phi) on (a, a+1), 1-based a, as ``x = E x'``."""

    def build(phi):
        phi = np.asarray(phi, dtype=float)
        m = np.zeros(phi.shape + (n, n), dtype=np.complex128)
        m[..., range(n), range(n)] = 1.0
        c, s = np.cos(phi), np.sin(phi)
        i = a - 1
        m[..., i, i] = c
        m[..., i, i + 1] = s
        m[..., i + 1, i] = -s
        m[..., i + 1, i + 1] = c
        return m

    return build


def _rot_block(n, i, j):
    """r_{ij}(phi), 1-based, block [[cos, -sin], [sin, cos]]."""

    def build(phi):
        phi = np.asarray(phi, dtype=float)
        m = np.zeros(phi.shape + (n, n), dtype=np.complex128)
        m[..., range(n), range(n)] = 1.0
        c, s = np.cos(phi), np.sin(phi)
        m[..., i - 1, i - 1] = c
        m[..., i - 1, j - 1] = -s
        m[..., j - 1, i - 1] = s
        m[..., j - 1, j - 1] = c
        return m

    return build


def _su_block(n, a, with_chi):
    def build(phi, psi, chi=None):
        phi = np.asarray(phi, dtype=float)
        psi = np.asarray(psi, dtype=float)
        chi = np.zeros_like(phi) if chi is None else np.asarray(chi, dtype=float)
        m = np.zeros(phi.shape + (n, n), dtype=np.complex128)
        m[..., range(n), range(n)] = 1.0
        av = np.cos(phi) * np.exp(1j * psi)
        bv = np.sin(phi) * np.exp(1j * chi)
        i = a - 1
        m[..., i, i] = av
        m[..., i, i + 1] = bv
        m[..., i + 1, i] = -np.conj(bv)
        m[..., i + 1, i + 1] = np.conj(av)
        return m

    return build


class Chart:
    """Concrete chart: parameters, matrix factors, and the density constant."""

    def __init__(self, spec: ChartSpec):
        self.spec = spec
        self.group = spec.group
        self.n = n = spec.group.n
        params: list[Param] = []
        factors: list[Factor] = []
        if spec.group.kind == "SO" and spec.kind == "hurwitz":
            keys = so_angle_keys(n)
            for r, s in keys:
                if r == 0:
                    params.append(Param(f"phi_{r}{s}", 0.0, TWO_PI, ("sin", 0)))
                else:
                    params.append(Param(f"phi_{r}{s}", 0.0, math.pi, ("sin", r)))
            for s in range(1, n):
                for r in range(s - 1, -1, -1):
                    factors.append(Factor(_so_block(n, n - 1 - r), (keys.index((r, s)),)))
            self.log_constant = n * (n - 1) / 4 * math.log(2)
        elif spec.group.kind == "SO":
            keys = alt_angle_keys(n)
            for i, j in keys:
                if i == j:
                    params.append(Param(f"phi_{i}{j}", 0.0, TWO_PI, ("sin", i - 1)))
                else:
                    params.append(Param(f"phi_{i}{j}", 0.0, math.pi, ("sin", i - 1), closed=True))
            for j in range(n - 1, 0, -1):
                for i in range(1, j + 1):
                    factors.append(Factor(_rot_block(n, i, i + 1), (keys.index((i, j)),)))
            self.log_constant = n * (n - 1) / 4 * math.log(2)
        else:
            keys = so_angle_keys(n)
            m = len(keys)
            for r, s in keys:
                params.append(Param(f"phi_{r}{s}", 0.0, math.pi / 2, ("cossin", 2 * r + 1)))
            for r, s in keys:
                params.append(Param(f"psi_{r}{s}", 0.0, TWO_PI, ("sin", 0)))
            for s in range(1, n):
                params.append(Param(f"chi_{s}", 0.0, TWO_PI, ("sin", 0)))
            for s in range(1, n):
                for r in range(s - 1, -1, -1):
                    k = keys.index((r, s))
                    if r == 0:
                        idx = (k, m + k, 2 * m + s - 1)
                    else:
                        idx = (k, m + k)
                    factors.append(Factor(_su_block(n, n - 1 - r, r == 0), idx))
            self.log_constant = 0.5 * math.log(n) + n * (n - 1) / 2 * math.log(2)
        self.params = tuple(params)
        self.factors = tuple(factors)

    @property
    def constant(self) -> float:
        return math.exp(self.log_constant)

    @property
    def num_params(self) -> int:
        return len(self.params)

    def check_ranges(self, x):
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.num_params:
            raise ValueError(f"{self.spec} takes {self.num_params} parameters, got {x.size}")
        for p, t in zip(self.params, x):
            if not np.isfinite(t) or not p.contains(t):
                bracket = "]" if p.closed else ")"
                raise AngleRangeError(
                    f"{p.name}={t!r} outside [{p.lo:.6g}, {p.hi:.6g}{bracket}"
                )

    def factor_matrices(self, k, *param_values):
        return self.factors[k].build(*param_values)

    def matrices(self, x) -> np.ndarray:
        """Chart map for a batch of parameter rows ``(..., p) -> (..., n, n)``."""
        x = np.asarray(x, dtype=float)
        out = None
        for f in self.factors:
            m = f.build(*(x[..., i] for i in f.params))
            out = m if out is None else out @ m
        return out

    def density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        d = np.full(x.shape[:-1], self.constant)
        for i, p in enumerate(self.params):
            if not p.uniform:
                d = d * p.weight_values(x[..., i])
        return d

    def total_volume(self) -> float:
        """Integral of the density over the box, from the 1-D factor integrals."""
        return math.exp(self.log_constant + sum(math.log(_weight_integral(p)) for p in self.params))


def _weight_integral(p: Param) -> float:
    kind, k = p.weight
    if kind == "cossin":
        # int_0^{pi/2} cos t sin^k t dt
        return 1.0 / (k + 1)
    # int |sin t|^k over [0, pi] is B((k+1)/2, 1/2)
    half = math.exp(gammaln((k + 1) / 2) + gammaln(0.5) - gammaln(k / 2 + 1))
    return half * (p.hi - p.lo) / math.pi


@lru_cache(maxsize=None)
def get_chart(spec: ChartSpec) -> Chart:
    return Chart(spec)


# ---------------------------------------------------------------------------
# public operations


def _element(chart: Chart, x) -> GroupElement:
    chart.check_ranges(x)
    return GroupElement(chart.matrices(np.asarray(x, dtype=float)), chart.group)


def so_from_angles(a: AngleVectorSO) -> GroupElement:
    return _element(get_chart(ChartSpec(SO(a.n), "hurwitz")), a.flat())


def so_from_angles_alt(a: AngleVectorAlt) -> GroupElement:
    return _element(get_chart(ChartSpec(SO(a.n), "alt")), a.flat())


def su_from_angles(a: AngleVectorSU) -> GroupElement:
    return _element(get_chart(ChartSpec(SU(a.n), "hurwitz")), a.flat())


def _density(spec, x):
    chart = get_chart(spec)
    chart.check_ranges(x)
    return float(chart.density(np.asarray(x, dtype=float)))


def so_density(a: AngleVectorSO) -> float:
    return _density(ChartSpec(SO(a.n), "hurwitz"), a.flat())


def alt_density(a: AngleVectorAlt) -> float:
    return _density(ChartSpec(SO(a.n), "alt"), a.flat())


def su_density(a: AngleVectorSU) -> float:
    return _density(ChartSpec(SU(a.n), "hurwitz"), a.flat())


def su_density_classical_prefactor(n: int) -> float:
    """The classical constant ``sqrt(n!) 2^{n(n-1)/2}`` (see module docs)."""
    return math.sqrt(math.factorial(n)) * 2.0 ** (n * (n - 1) / 2)


def so_total_volume(n: int) -> float:
    """Closed-form volume of SO(n) for ``ds^2 = sum dr_ab^2``:
    ``2^{(n-1)(n+4)/4} pi^{n(n+1)/4} / (Gamma(1/2) Gamma(2/2) ... Gamma(n/2))``."""
    if n < 2:
        raise ValueError("so_total_volume needs n >= 2")
    log_v = (n - 1) * (n + 4) / 4 * math.log(2) + n * (n + 1) / 4 * math.log(math.pi)
    log_v -= sum(gammaln(k / 2) for k in range(1, n + 1))
    return math.exp(log_v)


def su_total_volume(n: int) -> float:
    """Volume of SU(n) for ``ds^2 = sum dc dc-bar``:
    ``sqrt(n) (2 pi)^{(n^2+n-2)/2} / prod_{k<n} k!``."""
    if n < 2:
        raise ValueError("su_total_volume needs n >= 2")
    log_v = 0.5 * math.log(n) + (n * n + n - 2) / 2 * math.log(TWO_PI)
    log_v -= sum(math.lgamma(k + 1) for k in range(1, n))
    return math.exp(log_v)


def metric_density(chart: ChartSpec, a, h: float = FD_STEP) -> float:
    """sqrt(det B) for the Gram matrix B of the embedding Jacobian.

    The Jacobian columns are central differences of the real embedding
    ``(Re c_ab, Im c_ab)`` with step ``h``.  Independent of the closed forms.
    """
    c = get_chart(chart)
    if isinstance(a, (AngleVectorSO, AngleVectorSU, AngleVectorAlt)):
        a = a.flat()
    x = np.asarray(a, dtype=float).ravel()
    c.check_ranges(x)
    p = c.num_params
    steps = np.eye(p) * h
    plus = c.matrices(x + steps).reshape(p, -1)
    minus = c.matrices(x - steps).reshape(p, -1)
    d = (plus - minus) / (2 * h)
    jac = np.concatenate([d.real, d.imag], axis=1)
    gram = jac @ jac.T
    det = np.linalg.det(gram)
    # rounding floor relative to the Hadamard bound
    if not det > 1e-12 * np.prod(np.diag(gram)):
        raise SingularChartPointError(f"Gram determinant {det:.3e} at a singular chart point")
    return math.sqrt(det)
