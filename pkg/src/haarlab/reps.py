"""Representations, characters, Schur orthogonality and the convolution calculus.

Every averaging operation takes a *domain*: either a compact group (a
:class:`~haarlab.matgroup.Group`, a :class:`~haarlab.charts.ChartSpec` or a
``"so:3"`` style string), integrated by quadrature, or a
:class:`~haarlab.finite.FiniteGroup`, averaged exactly over its elements.
On a compact domain functions are vectorised callables on ``(B, n, n)``
stacks; on a finite domain they are arrays of length ``h`` (or callables on
index arrays).  Finite-domain results stay exact when the inputs are
``Fraction``/:class:`~haarlab.finite.Cyclotomic` object arrays.

Normalisation: all averages use the probability measure, so convolution is
``(x * y)(s) = (1/h) sum_r x(s r^-1) y(r)``, the Fourier matrix is
``A(x) = mean_s x(s) conj(E(s))``, and ``A(x * y) = A(x) A(y)`` holds with
constant 1.  For irreducible characters ``chi_i * chi_j = delta_ij chi_i / f_i``
and the isotypic projection is ``P_chi f = f_chi (chi * f)``.  Integral
operators use the kernel ``K(u, v) = x(u v^-1)``, which commutes with right
translations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import GroupMismatchError, SingularGramError
from .finite.group import FiniteGroup
from .haar import _CHUNK, QuadratureSpec, _as_spec, default_quadrature, grid_size, integrate
from .invariants import num_monomials, symmetric_power_action, unitary_symmetric_power_action
from .matgroup import Group, GroupElement

__all__ = [
    "Representation",
    "FiniteRepresentation",
    "Character",
    "defining_rep",
    "sym_power_rep",
    "trivial_rep",
    "regular_rep",
    "permutation_rep",
    "multiplicativity_residual",
    "unitarize",
    "SchurAverage",
    "schur_average",
    "matrix_element_inner",
    "matrix_element_gram",
    "schur_pattern",
    "character_inner",
    "convolve",
    "involution",
    "convolution_operator",
    "fourier_matrix",
    "fourier_coefficient",
    "bessel_check",
    "character_projection",
]


class Representation:
    """``dim``-dimensional matrix representation of a compact group.

    ``evaluate`` maps a stack ``(B, n, n)`` to ``(B, dim, dim)``.  Calling the
    representation accepts a GroupElement, a single matrix, or a stack with
    any number of leading axes.
    """

    def __init__(self, dim: int, evaluate: Callable, label: str = "", group: Group | None = None):
        self.dim = dim
        self._evaluate = evaluate
        self.label = label
        self.group = group

    def evaluate(self, pts):
        return self._evaluate(pts)

    def __call__(self, g):
        if isinstance(g, GroupElement):
            if self.group is not None and g.group != self.group:
                raise GroupMismatchError(f"{self.label} is a representation of {self.group}, not {g.group}")
            return self.evaluate(g.entries[None])[0]
        a = np.asarray(g)
        if a.ndim == 2:
            return self.evaluate(a[None])[0]
        lead = a.shape[:-2]
        out = self.evaluate(a.reshape((-1,) + a.shape[-2:]))
        return out.reshape(lead + out.shape[-2:])

    @property
    def character(self) -> "Character":
        return Character(self)

    def direct_sum(self, *others: "Representation") -> "Representation":
        reps = (self,) + others
        dim = sum(r.dim for r in reps)

        def evaluate(pts):
            blocks = [r.evaluate(pts) for r in reps]
            out = np.zeros((blocks[0].shape[0], dim, dim), dtype=np.result_type(*blocks))
            o = 0
            for b in blocks:
                d = b.shape[-1]
                out[:, o:o + d, o:o + d] = b
                o += d
            return out

        return Representation(dim, evaluate, " + ".join(r.label for r in reps), self.group)

    def conjugate_by(self, S) -> "Representation":
        """``g -> S rho(g) S^-1``."""
        S = np.asarray(S)
        Sinv = np.linalg.inv(S)
        return Representation(self.dim, lambda pts: S @ self.evaluate(pts) @ Sinv,
                              f"conj({self.label})", self.group)

    def __repr__(self):
        return f"Representation({self.label!r}, dim={self.dim})"


class FiniteRepresentation(Representation):
    """Representation of a finite group stored as one matrix per element."""

    def __init__(self, group: FiniteGroup, matrices, label: str = ""):
        mats = np.asarray(matrices)
        if mats.shape[0] != group.h or mats.ndim != 3:
            raise ValueError(f"need {group.h} square matrices, got shape {mats.shape}")
        self.matrices = mats
        super().__init__(mats.shape[1], lambda idx: mats[np.asarray(idx)], label, None)
        self.finite_group = group

    def __call__(self, g):
        return self.matrices[g]


class Character:
    """``g -> tr rho(g)``."""

    def __init__(self, parent: Representation):
        self.parent = parent

    @property
    def dim(self) -> int:
        return self.parent.dim

    def evaluate(self, pts):
        m = self.parent.evaluate(pts)
        return np.trace(m, axis1=-2, axis2=-1) if m.dtype != object else _obj_trace(m)

    def __call__(self, g):
        m = self.parent(g)
        if isinstance(m, np.ndarray) and m.dtype == object:
            return _obj_trace(m)
        return np.trace(m, axis1=-2, axis2=-1)

    def __repr__(self):
        return f"Character({self.parent.label!r})"


def _obj_trace(m):
    return np.sum(np.diagonal(m, axis1=-2, axis2=-1), axis=-1)


def defining_rep(group: Group) -> Representation:
    return Representation(group.n, lambda pts: np.asarray(pts, dtype=np.complex128),
                          f"defining {group}", group)


def sym_power_rep(group: Group, p: int, basis: str = "orthonormal") -> Representation:
    """Action on degree-``p`` polynomials.

    ``basis="orthonormal"`` rescales monomials by ``sqrt(multinomial)`` so the
    matrices are unitary; ``basis="monomial"`` is the raw ``P_g``.
    """
    if p < 0:
        raise ValueError("degree must be nonnegative")
    fn = {"orthonormal": unitary_symmetric_power_action, "monomial": symmetric_power_action}[basis]
    return Representation(num_monomials(group.n, p), lambda pts: fn(np.asarray(pts), p),
                          f"sym^{p} {group}", group)


def trivial_rep(group: Group) -> Representation:
    return sym_power_rep(group, 0)


def regular_rep(G: FiniteGroup) -> FiniteRepresentation:
    """Left-regular representation with exact integer matrices."""
    h = G.h
    L = np.zeros((h, h, h), dtype=np.int64)
    idx = np.arange(h)
    for g in range(h):
        L[g, G.mult[g], idx] = 1
    return FiniteRepresentation(G, L, f"regular {G.name}")


def permutation_rep(G: FiniteGroup) -> FiniteRepresentation:
    """The natural permutation representation of a group built from generators."""
    if G.perms is None:
        raise ValueError("group carries no permutation action")
    h, d = G.perms.shape
    P = np.zeros((h, d, d), dtype=np.int64)
    for g in range(h):
        P[g, G.perms[g], np.arange(d)] = 1
    return FiniteRepresentation(G, P, f"permutation {G.name}")


# ---------------------------------------------------------------------------
# domain plumbing


def _is_finite(domain) -> bool:
    return isinstance(domain, FiniteGroup)


def _points_inverse(domain, pts):
    if _is_finite(domain):
        return domain.inverse[pts]
    return np.conj(np.swapaxes(pts, -1, -2))


def _as_function(x, domain):
    if callable(x) and not isinstance(x, np.ndarray):
        if isinstance(x, (Character, Representation)):
            return x.evaluate
        return x
    arr = np.asarray(x)
    if not _is_finite(domain):
        raise TypeError("functions on a compact group must be vectorised callables")
    if arr.shape != (domain.h,):
        raise ValueError(f"function on {domain} needs {domain.h} values, got shape {arr.shape}")
    return lambda idx: arr[idx]


def _mean(fn: Callable, domain, q: QuadratureSpec | None = None):
    """Normalised Haar mean of a vectorised function on either kind of domain."""
    if _is_finite(domain):
        v = np.asarray(fn(np.arange(domain.h)))
        if v.dtype == object:
            return np.sum(v, axis=0) * Fraction(1, domain.h)
        return v.mean(axis=0)
    return integrate(fn, _as_spec(domain), q)


def _values(x, domain) -> np.ndarray:
    return np.asarray(_as_function(x, domain)(np.arange(domain.h)))


def multiplicativity_residual(rep: Representation, a, b) -> float:
    """``max |rho(ab) - rho(a) rho(b)|`` over stacks of pairs."""
    a, b = np.asarray(a), np.asarray(b)
    if isinstance(rep, FiniteRepresentation):
        G = rep.finite_group
        lhs = np.asarray(rep.matrices[G.mult[a, b]], dtype=complex)
        rhs = np.asarray(rep.matrices[a], dtype=complex) @ np.asarray(rep.matrices[b], dtype=complex)
    else:
        lhs = rep(a @ b)
        rhs = rep(a) @ rep(b)
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# Schur


def unitarize(rep: Representation, domain, q: QuadratureSpec | None = None,
              cond_max: float = 1e12) -> Representation:
    """Conjugate ``rep`` to a unitary representation.

    With ``G = mean rho(g)^* rho(g) = S^* S`` (Cholesky), ``S rho S^-1`` is unitary.
    """
    gram = _mean(lambda p: (lambda m: np.conj(np.swapaxes(m, -1, -2)) @ m)(
        np.asarray(rep.evaluate(p), dtype=complex)), domain, q)
    gram = np.asarray(gram, dtype=complex)
    gram = 0.5 * (gram + gram.conj().T)
    w = np.linalg.eigvalsh(gram)
    if w[0] <= 0 or w[-1] / w[0] > cond_max:
        raise SingularGramError(f"averaged Gram matrix is numerically singular (eigenvalues {w[0]:.3g}..{w[-1]:.3g})")
    S = np.linalg.cholesky(gram).conj().T
    Sinv = np.linalg.inv(S)
    out = Representation(rep.dim, lambda pts: S @ np.asarray(rep.evaluate(pts), dtype=complex) @ Sinv,
                         f"unitarized({rep.label})", rep.group)
    out.intertwiner = S
    return out


@dataclass(frozen=True)
class SchurAverage:
    """``V = mean rho(g^-1) U rho(g)`` and its distance from ``(tr U / dim) I``."""

    matrix: np.ndarray
    scalar: complex
    deviation: float

    def is_scalar(self, tol: float = 1e-7) -> bool:
        return self.deviation < tol


def schur_average(rep: Representation, U, domain, q: QuadratureSpec | None = None) -> SchurAverage:
    U = np.asarray(U, dtype=complex)
    if U.shape != (rep.dim, rep.dim):
        raise ValueError(f"U must be {rep.dim}x{rep.dim}")

    def fn(pts):
        m = np.asarray(rep.evaluate(pts), dtype=complex)
        minv = np.asarray(rep.evaluate(_points_inverse(domain, pts)), dtype=complex)
        return minv @ U @ m

    V = np.asarray(_mean(fn, domain, q), dtype=complex)
    s = np.trace(U) / rep.dim
    return SchurAverage(V, complex(s), float(np.max(np.abs(V - s * np.eye(rep.dim)))))


def matrix_element_inner(rep1: Representation, ab: tuple[int, int], rep2: Representation,
                         cd: tuple[int, int], domain, q: QuadratureSpec | None = None):
    """``mean t1_ab(g) conj(t2_cd(g))`` (0-based indices)."""
    (a, b), (c, d) = ab, cd

    def fn(pts):
        return np.asarray(rep1.evaluate(pts))[:, a, b] * np.conj(np.asarray(rep2.evaluate(pts))[:, c, d])

    return _mean(fn, domain, q)


def matrix_element_gram(reps: Sequence[Representation], domain, q: QuadratureSpec | None = None) -> np.ndarray:
    """Gram matrix of all matrix elements of ``reps`` (row-major within each rep)."""

    def fn(pts):
        v = np.concatenate([np.asarray(r.evaluate(pts), dtype=complex).reshape(len(pts), -1) for r in reps], axis=1)
        return v[:, :, None] * np.conj(v[:, None, :])

    return np.asarray(_mean(fn, domain, q))


def schur_pattern(dims: Sequence[int]) -> np.ndarray:
    """The orthogonality pattern ``delta_ij delta_ac delta_bd / d_i``."""
    return np.diag(np.concatenate([np.full(d * d, 1.0 / d) for d in dims]))


def character_inner(chi1, chi2, domain, q: QuadratureSpec | None = None):
    """``mean chi1(g) conj(chi2(g))``."""
    f1, f2 = _as_function(chi1, domain), _as_function(chi2, domain)
    return _mean(lambda pts: np.asarray(f1(pts)) * np.conj(np.asarray(f2(pts))), domain, q)


# ---------------------------------------------------------------------------
# convolution calculus (finite groups exact, compact groups by quadrature)


def _check_len(x, G: FiniteGroup) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (G.h,):
        raise GroupMismatchError(f"function has {x.shape} values but {G} has order {G.h}")
    return x


def _scale(v: np.ndarray, h: int):
    return v * Fraction(1, h) if v.dtype == object else v / h


def convolve(x, y, G: FiniteGroup) -> np.ndarray:
    """``(x * y)(s) = (1/h) sum_r x(s r^-1) y(r)``."""
    x, y = _check_len(x, G), _check_len(y, G)
    k = x[G.mult[:, G.inverse]]  # k[s, r] = x(s r^-1)
    return _scale(np.sum(k * y[None, :], axis=1), G.h)


def involution(x, G: FiniteGroup) -> np.ndarray:
    """``x~(s) = conj(x(s^-1))``."""
    return np.conj(_check_len(x, G)[G.inverse])


def convolution_operator(x, G: FiniteGroup) -> np.ndarray:
    """Matrix of ``f -> x * f``: ``K[s, r] = x(s r^-1) / h``; its trace is ``x(E)``."""
    x = _check_len(x, G)
    return _scale(x[G.mult[:, G.inverse]], G.h)


def fourier_matrix(x, rep: Representation, domain, q: QuadratureSpec | None = None):
    """``A(x) = mean_s x(s) conj(E(s))``."""
    fx = _as_function(x, domain)

    def fn(pts):
        v = np.asarray(fx(pts))
        return v[:, None, None] * np.conj(np.asarray(rep.evaluate(pts)))

    return np.asarray(_mean(fn, domain, q))


def fourier_coefficient(x, rep: Representation, i: int, k: int, domain, q: QuadratureSpec | None = None):
    """``alpha_ik(x) = mean x conj(e_ik)``."""
    return fourier_matrix(x, rep, domain, q)[i, k]


def bessel_check(x, reps: Sequence[Representation], domain, q: QuadratureSpec | None = None):
    """``(sum_E dim E sum_ik |alpha_ik(x)|^2, mean |x|^2)``; the first never exceeds the second."""
    lhs = 0
    for rep in reps:
        A = fourier_matrix(x, rep, domain, q)
        lhs = lhs + rep.dim * np.sum(A * np.conj(A))
    fx = _as_function(x, domain)
    rhs = _mean(lambda pts: (lambda v: v * np.conj(v))(np.asarray(fx(pts))), domain, q)
    return _real(lhs), _real(rhs)


def _real(v):
    if isinstance(v, np.ndarray) and v.ndim == 0:
        v = v.item()
    if isinstance(v, complex) or isinstance(v, np.complexfloating):
        return float(np.real(v))
    return v


def character_projection(chi, f, domain, q: QuadratureSpec | None = None, dim: int | None = None):
    """``(P_chi f)(u) = dim * mean_s chi(u s^-1) f(s)``.

    Finite domain: returns the projected function as an array (exact for
    exact inputs).  Compact domain: returns a vectorised callable.
    """
    if isinstance(chi, Character):
        dim = chi.dim if dim is None else dim
    if _is_finite(domain):
        cv = _values(chi, domain)
        fv = _values(f, domain)
        d = dim if dim is not None else cv[0]
        return d * convolve(cv, fv, domain)
    if dim is None:
        raise ValueError("dim is required for a plain character callable")
    cfun, ffun = _as_function(chi, domain), _as_function(f, domain)
    spec = _as_spec(domain)
    q = q or default_quadrature(spec)
    n = spec.group.n
    # keep the (nodes x u-block x n x n) product stack near 2^22 entries
    block = max(1, (1 << 22) // (min(grid_size(spec, q), _CHUNK) * n * n))

    def projected(u):
        u = np.asarray(u, dtype=np.complex128)
        single = u.ndim == 2
        u = u[None] if single else u
        out = []
        for start in range(0, len(u), block):
            uu = u[start:start + block]

            def fn(s):
                prod = uu[None, :] @ np.conj(np.swapaxes(s, -1, -2))[:, None]
                c = np.asarray(cfun(prod.reshape(-1, *prod.shape[-2:]))).reshape(prod.shape[:2])
                return c * np.asarray(ffun(s))[:, None]

            out.append(dim * np.atleast_1d(integrate(fn, spec, q)))
        res = np.concatenate(out)
        return res[0] if single else res

    return projected
