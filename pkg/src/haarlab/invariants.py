"""Invariants of forms under SO(n)/SU(n) by Haar averaging.

A form of degree ``p`` in ``n`` variables is ``Phi(a; x) = sum_j a_j p_j(x)``
where ``p_j`` runs over the degree-``p`` monomials in graded lexicographic
order (``x1^2, x1 x2, x1 x3, x2^2, ...``).  The substitution ``x -> g x`` acts
on monomials through the matrix ``P_g`` of :func:`symmetric_power_action`
and, dually, on coefficient vectors.  Polynomials in the coefficients ``a``
are :class:`Poly` objects stored as one coefficient vector per homogeneous
degree, in the same monomial order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np
import scipy.linalg

from .errors import NumericalResolutionError
from .haar import QuadratureSpec, integrate, _as_spec
from .matgroup import GroupElement

__all__ = [
    "monomials",
    "num_monomials",
    "multinomials",
    "symmetric_power_action",
    "unitary_symmetric_power_action",
    "PolyForm",
    "Poly",
    "coefficient_action",
    "invariant_project",
    "InvariantCount",
    "invariant_dimension",
    "invariant_basis",
    "DIMENSION_TOL",
]

DIMENSION_TOL = 1e-3


@lru_cache(maxsize=None)
def monomials(n: int, p: int) -> tuple[tuple[int, ...], ...]:
    """Degree-``p`` monomials in ``n`` variables as sorted variable-index tuples.

    ``(0, 0)`` is ``x1^2``, ``(0, 1)`` is ``x1 x2``; the tuple order is the
    graded lexicographic monomial order.
    """
    return tuple(combinations_with_replacement(range(n), p))


def num_monomials(n: int, p: int) -> int:
    return math.comb(n + p - 1, p)


@lru_cache(maxsize=None)
def _index(n: int, p: int) -> dict[tuple[int, ...], int]:
    return {m: k for k, m in enumerate(monomials(n, p))}


@lru_cache(maxsize=None)
def _up_table(n: int, d: int) -> np.ndarray:
    """``U[m, c, q] = 1`` iff monomial ``m`` of degree d times ``x_c`` is monomial ``q``."""
    src, dst = monomials(n, d), _index(n, d + 1)
    u = np.zeros((len(src), n, len(dst)))
    for k, m in enumerate(src):
        for c in range(n):
            u[k, c, dst[tuple(sorted(m + (c,)))]] = 1.0
    return u


def multinomials(n: int, p: int) -> np.ndarray:
    """``p! / prod(e_i!)`` for each monomial, in monomial order."""
    out = []
    for m in monomials(n, p):
        counts = np.bincount(m, minlength=n) if m else np.zeros(n, int)
        out.append(math.factorial(p) // math.prod(math.factorial(int(e)) for e in counts))
    return np.array(out, dtype=float)


def symmetric_power_action(g, p: int) -> np.ndarray:
    """Matrix ``P_g`` with ``p_j(g x) = sum_k P_g[j, k] p_k(x)``.

    ``g`` may be a GroupElement, an ``n x n`` array or a stack ``(B, n, n)``;
    it need not be invertible, which lets the same routine act on coefficient
    spaces.  ``P_g P_h = P_{gh}``.
    """
    mats = g.entries if isinstance(g, GroupElement) else np.asarray(g)
    single = mats.ndim == 2
    mats = np.atleast_3d(mats) if not single else mats[None]
    b, n, _ = mats.shape
    mons = monomials(n, p)
    dtype = np.result_type(mats.dtype, float)
    if p == 0:
        out = np.ones((b, 1, 1), dtype=dtype)
        return out[0] if single else out
    idx = np.array(mons)  # (M, p)
    coef = np.ones((b, len(mons), 1), dtype=dtype)
    for t in range(p):
        rows = mats[:, idx[:, t], :]  # (B, M, n): the linear form (g x)_{i_t}
        coef = np.einsum("bjm,bjc,mcq->bjq", coef, rows, _up_table(n, t))
    return coef[0] if single else coef


def unitary_symmetric_power_action(g, p: int) -> np.ndarray:
    """``P_g`` in the orthonormal basis ``sqrt(multinomial) * monomial``.

    Unitary whenever ``g`` is, so it serves as a unitary representation of
    SO(n)/SU(n) on degree-``p`` polynomials.
    """
    mats = g.entries if isinstance(g, GroupElement) else np.asarray(g)
    n = mats.shape[-1]
    s = np.sqrt(multinomials(n, p))
    return symmetric_power_action(mats, p) * s[:, None] / s[None, :]


@dataclass(frozen=True)
class PolyForm:
    """``Phi(a; x) = sum_j a_j p_j(x)``, homogeneous of degree ``p`` in ``n`` variables."""

    n: int
    p: int
    a: tuple = ()

    def __post_init__(self):
        if self.n < 1 or self.p < 0:
            raise ValueError("need n >= 1 and p >= 0")
        a = tuple(self.a) if len(self.a) else (0.0,) * self.m
        if len(a) != self.m:
            raise ValueError(f"expected {self.m} coefficients, got {len(a)}")
        object.__setattr__(self, "a", a)

    @property
    def m(self) -> int:
        return num_monomials(self.n, self.p)

    def __call__(self, x) -> complex:
        x = np.asarray(x)
        return sum(c * np.prod(x[list(mon)]) for c, mon in zip(self.a, monomials(self.n, self.p)))

    def transformed(self, g) -> "PolyForm":
        """Coefficients of ``x -> Phi(a; g^{-1} x)``, i.e. ``(P_g^T)^{-1} a``."""
        a = coefficient_action(g, self.p) @ np.asarray(self.a)
        return PolyForm(self.n, self.p, tuple(a))


def coefficient_action(g, p: int) -> np.ndarray:
    """``(P_g^T)^{-1}``, computed as ``P_{g^{-1}}^T`` (no matrix inversion)."""
    mats = g.entries if isinstance(g, GroupElement) else np.asarray(g)
    inv = np.conj(np.swapaxes(mats, -1, -2))
    return np.swapaxes(symmetric_power_action(inv, p), -1, -2)


class Poly:
    """Polynomial in ``nvars`` variables, one coefficient vector per degree."""

    def __init__(self, nvars: int, parts: dict[int, np.ndarray] | None = None):
        self.nvars = nvars
        self.parts: dict[int, np.ndarray] = {}
        for r, c in (parts or {}).items():
            c = np.asarray(c, dtype=complex)
            if c.shape != (num_monomials(nvars, r),):
                raise ValueError(f"degree-{r} part needs {num_monomials(nvars, r)} coefficients")
            self.parts[r] = c

    @classmethod
    def constant(cls, nvars: int, value) -> "Poly":
        return cls(nvars, {0: [value]})

    @classmethod
    def variable(cls, nvars: int, j: int) -> "Poly":
        c = np.zeros(nvars, dtype=complex)
        c[j] = 1
        return cls(nvars, {1: c})

    @property
    def degree(self) -> int:
        return max(self.parts, default=0)

    def part(self, r: int) -> np.ndarray:
        return self.parts.get(r, np.zeros(num_monomials(self.nvars, r), dtype=complex))

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(self.nvars, other)
        keys = set(self.parts) | set(other.parts)
        return Poly(self.nvars, {r: self.part(r) + other.part(r) for r in keys})

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(self.nvars, {r: c * other for r, c in self.parts.items()})
        out: dict[int, np.ndarray] = {}
        for r1, c1 in self.parts.items():
            for r2, c2 in other.parts.items():
                r = r1 + r2
                acc = out.setdefault(r, np.zeros(num_monomials(self.nvars, r), dtype=complex))
                idx = _index(self.nvars, r)
                for m1, a in zip(monomials(self.nvars, r1), c1):
                    if a == 0:
                        continue
                    for m2, b in zip(monomials(self.nvars, r2), c2):
                        if b != 0:
                            acc[idx[tuple(sorted(m1 + m2))]] += a * b
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __call__(self, a) -> complex:
        a = np.asarray(a)
        return sum(
            sum(c * np.prod(a[list(m)]) for c, m in zip(coeffs, monomials(self.nvars, r)))
            for r, coeffs in self.parts.items()
        )

    def allclose(self, other: "Poly", atol: float = 1e-8) -> bool:
        keys = set(self.parts) | set(other.parts)
        return all(np.allclose(self.part(r), other.part(r), rtol=0, atol=atol) for r in keys)

    def max_abs_diff(self, other: "Poly") -> float:
        keys = set(self.parts) | set(other.parts)
        return max((float(np.max(np.abs(self.part(r) - other.part(r)))) for r in keys), default=0.0)

    def substitute(self, mat) -> "Poly":
        """``F(A a)`` as a polynomial in ``a`` for a square matrix ``A``."""
        mat = np.asarray(mat)
        return Poly(self.nvars, {r: symmetric_power_action(mat, r).T @ c for r, c in self.parts.items()})

    def __repr__(self):
        return f"Poly({self.nvars}, {self.format()})"

    def format(self, names=None, digits: int = 10) -> str:
        names = names or [f"a{j + 1}" for j in range(self.nvars)]
        terms = []
        for r in sorted(self.parts):
            for c, m in zip(self.parts[r], monomials(self.nvars, r)):
                c = complex(round(c.real, digits), round(c.imag, digits))
                if c == 0:
                    continue
                coeff = f"{c.real:g}" if c.imag == 0 else f"({c.real:g}{c.imag:+g}j)"
                mono = "*".join(
                    names[v] + (f"^{e}" if e > 1 else "")
                    for v, e in sorted({v: m.count(v) for v in m}.items())
                )
                terms.append(coeff if not mono else (mono if coeff == "1" else f"{coeff}*{mono}"))
        return " + ".join(terms) if terms else "0"


def _averaged_substitution(n, p, r, chart, q):
    """``int S^r(A_g) dg`` for the coefficient action ``A_g`` on degree-p forms."""
    spec = _as_spec(chart)
    if spec.group.n != n:
        raise ValueError(f"form in {n} variables but chart is on {spec.group}")
    return integrate(lambda mats: symmetric_power_action(coefficient_action(mats, p), r), spec, q)


def invariant_project(F: Poly, form: PolyForm, chart, q: QuadratureSpec | None = None) -> Poly:
    """``J(a) = int F(a') dg`` with ``a' = (P_g^T)^{-1} a``; ``J`` is an invariant."""
    if F.nvars != form.m:
        raise ValueError(f"F has {F.nvars} variables, the form has {form.m} coefficients")
    parts = {}
    for r, c in F.parts.items():
        avg = _averaged_substitution(form.n, form.p, r, chart, q)
        parts[r] = np.asarray(avg).T @ c
    return Poly(F.nvars, parts)


@dataclass(frozen=True)
class InvariantCount:
    value: float
    count: int
    distance: float


def _complete_homogeneous_trace(mats: np.ndarray, r: int) -> np.ndarray:
    """``h_r`` of the eigenvalues (the character of ``S^r``) via Newton's identities."""
    b, m, _ = mats.shape
    power_sums = []
    acc = np.broadcast_to(np.eye(m), mats.shape).astype(mats.dtype)
    for _ in range(r):
        acc = acc @ mats
        power_sums.append(np.trace(acc, axis1=-2, axis2=-1))
    h = [np.ones(b, dtype=mats.dtype)]
    for k in range(1, r + 1):
        h.append(sum(power_sums[i - 1] * h[k - i] for i in range(1, k + 1)) / k)
    return h[r]


def invariant_dimension(n: int, p: int, r: int, chart, q: QuadratureSpec | None = None,
                        tol: float = DIMENSION_TOL) -> InvariantCount:
    """Number of linearly independent degree-``r`` invariants of degree-``p`` forms.

    Computed as the Haar average of the character of the degree-``r`` action
    on coefficient space.
    """
    spec = _as_spec(chart)
    if spec.group.n != n:
        raise ValueError(f"form in {n} variables but chart is on {spec.group}")
    value = integrate(lambda mats: _complete_homogeneous_trace(coefficient_action(mats, p), r), spec, q)
    value = float(np.real(value))
    count = round(value)
    dist = abs(value - count)
    if dist > tol:
        raise NumericalResolutionError(
            f"invariant count {value:.6g} is {dist:.2e} from an integer (tolerance {tol}); "
            "increase the quadrature resolution"
        )
    return InvariantCount(value, int(count), dist)


def invariant_basis(n: int, p: int, r: int, chart, q: QuadratureSpec | None = None,
                    rank_tol: float = 1e-7) -> list[Poly]:
    """A basis of degree-``r`` invariants in reduced row-echelon form."""
    m = num_monomials(n, p)
    avg = np.asarray(_averaged_substitution(n, p, r, chart, q))
    # rows of avg.T span the projected monomials; their span is the invariant space
    proj = avg.T
    u, s, vh = np.linalg.svd(proj)
    rank = int(np.sum(s > rank_tol * max(1.0, s[0] if len(s) else 1.0)))
    if rank == 0:
        return []
    rows = u[:, :rank].T  # coefficient vectors spanning the invariant space
    _, _, piv = scipy.linalg.qr(rows, pivoting=True)
    piv = np.sort(piv[:rank])
    rref = np.linalg.solve(rows[:, piv], rows)
    rref[np.abs(rref) < rank_tol] = 0
    return [Poly(m, {r: row}) for row in rref]
