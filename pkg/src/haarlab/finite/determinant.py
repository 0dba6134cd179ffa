"""The group determinant and its factorisation over the irreducibles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import sympy

from .characters import OracleResult, regular_rep_oracle, class_matrices
from .group import FiniteGroup

__all__ = ["group_matrix", "group_determinant", "FactorizationReport", "verify_factorization"]


def group_matrix(G: FiniteGroup, x) -> np.ndarray:
    """``X[P, Q] = x_{P Q^-1}``."""
    x = np.asarray(x)
    if x.shape != (G.h,):
        raise ValueError(f"need one variable per element ({G.h}), got shape {x.shape}")
    return x[G.mult[:, G.inverse]]


def group_determinant(G: FiniteGroup, x):
    """``Theta(x) = det(x_{P Q^-1})``.

    Numeric input uses LAPACK; sympy symbols (or any object entries) give an
    expanded symbolic polynomial.
    """
    x = np.asarray(x)
    if x.dtype == object:
        return sympy.expand(sympy.Matrix(group_matrix(G, x)).det(method="berkowitz"))
    return complex(np.linalg.det(group_matrix(G, x.astype(complex))))


@dataclass
class FactorizationReport:
    """Residuals of ``Theta = prod det(sum_R pi(R) x_R)^f`` and its class-constant forms.

    ``max_residual`` covers generic random ``x``; ``class_residual`` compares
    ``Theta`` with ``prod xi^(f^2)`` for class-constant ``x``; ``reduced_residual``
    compares it with the same product built from eigenvalues of a ``k x k``
    class-algebra matrix; ``scalar_residual`` measures how far each
    ``sum_R pi(R) x_R`` is from the scalar ``xi I`` in that case.
    ``exponents`` are measured, not assumed: the multiplicity of each ``xi``
    among the eigenvalues of the group matrix at class-constant ``x``.
    """

    group: str
    trials: int
    degrees: tuple[int, ...] = ()
    exponents: tuple[int, ...] = ()
    max_residual: float = 0.0
    class_residual: float = 0.0
    reduced_residual: float = 0.0
    scalar_residual: float = 0.0
    samples: list[dict] = field(default_factory=list)

    def passed(self, tol: float = 1e-8) -> bool:
        return max(self.max_residual, self.class_residual,
                   self.reduced_residual, self.scalar_residual) < tol


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def _multiplicities(M: np.ndarray, xi: np.ndarray) -> tuple[int, ...]:
    """How often each ``xi`` occurs among the eigenvalues of ``M`` (nearest match)."""
    eig = np.linalg.eigvals(M)
    nearest = np.argmin(np.abs(eig[:, None] - xi[None, :]), axis=1)
    return tuple(int(c) for c in np.bincount(nearest, minlength=len(xi)))


def verify_factorization(G: FiniteGroup, trials: int = 20, seed: int = 0,
                         oracle: OracleResult | None = None) -> FactorizationReport:
    """Check the factorisation of ``Theta`` at ``trials`` random complex points."""
    if trials <= 0:
        return FactorizationReport(G.name, 0)
    oracle = oracle or regular_rep_oracle(G)
    table = oracle.table
    degrees = table.degrees
    chars = table.values[:, G.classes.class_of]  # (k, h) characters on elements
    cl = G.classes
    mats = [np.array(m, dtype=float) for m in class_matrices(G, cl)]
    sizes = np.array(cl.sizes)
    rng = np.random.default_rng(seed)
    rep = FactorizationReport(G.name, trials, degrees)
    for t in range(trials):
        x = rng.normal(size=G.h) + 1j * rng.normal(size=G.h)
        theta = group_determinant(G, x)
        rhs = np.prod([
            np.linalg.det(np.tensordot(x, pi, axes=(0, 0))) ** f
            for pi, f in zip(oracle.irreps, degrees)
        ])
        r1 = _rel(theta, rhs)
        # class-constant specialisation
        xc = rng.normal(size=cl.k) + 1j * rng.normal(size=cl.k)
        xe = xc[cl.class_of]
        theta_c = group_determinant(G, xe)
        xi = chars @ xe / np.array(degrees)
        counts = _multiplicities(group_matrix(G, xe), xi)
        if t == 0:
            rep.exponents = counts
        elif counts != rep.exponents:
            rep.class_residual = math.inf
        r2 = _rel(theta_c, np.prod(xi ** np.array(rep.exponents)))
        scal = max(
            float(np.max(np.abs(np.tensordot(xe, pi, axes=(0, 0)) - xi_l * np.eye(f))))
            for pi, f, xi_l in zip(oracle.irreps, degrees, xi)
        )
        # k x k reduction: multiplication by sum_a x_a X_a on the class algebra
        red = sum(xc[a] * sizes[a] * mats[a] for a in range(cl.k))
        eig = np.linalg.eigvals(red)
        # pair each eigenvalue with its xi to attach the exponent f^2
        used, prod = set(), 1.0 + 0j
        for xi_l, e in zip(xi, rep.exponents):
            j = min((j for j in range(len(eig)) if j not in used), key=lambda j: abs(eig[j] - xi_l))
            used.add(j)
            prod *= eig[j] ** e
        r3 = _rel(theta_c, prod)
        rep.max_residual = max(rep.max_residual, r1)
        rep.class_residual = max(rep.class_residual, r2)
        rep.reduced_residual = max(rep.reduced_residual, r3)
        rep.scalar_residual = max(rep.scalar_residual, scal / max(1.0, float(np.max(np.abs(xi)))))
        rep.samples.append({"trial": t, "theta": theta, "product": complex(rhs), "residual": r1})
    return rep
