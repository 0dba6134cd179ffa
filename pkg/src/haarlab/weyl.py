"""Cartan torus of SO(n), root systems of type B/D, and Weyl integration.

The maximal torus is ``h(phi) = r_12(phi_1) r_34(phi_2) ...`` with
``nu = floor(n/2)`` angles.  For a class function ``f``

    int_G f dg = (1/|W|) int_T f(h) |D(h)|^2 dh

with normalised ``dh`` and ``D(h) = prod_{alpha > 0} 2i sin(<alpha, phi>/2)``.
``|W|`` is obtained by calibrating this identity at ``f = 1`` rather than
from a closed formula; the known values ``2^nu nu!`` (type B) and
``2^(nu-1) nu!`` (type D) are only used as a secondary check in the tests.
Only ``|D|^2`` enters the integral, so the sign ambiguity of the half-root
factors for odd ``n`` never matters.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import CalibrationError
from .haar import HaarSampler
from .matgroup import SO, GroupElement

__all__ = [
    "CartanAngles",
    "cartan_element",
    "cartan_matrices",
    "xi",
    "RootSystem",
    "positive_roots",
    "weyl_denominator",
    "WeylData",
    "weyl_group_order",
    "weyl_integrate",
    "ClassFunctionWarning",
    "TORUS_NODES",
]

TORUS_NODES = 128


class ClassFunctionWarning(UserWarning):
    """The integrand failed the conjugation-invariance spot check."""


@dataclass(frozen=True)
class CartanAngles:
    n: int
    phi: tuple[float, ...]

    def __post_init__(self):
        phi = tuple(float(p) for p in np.atleast_1d(self.phi))
        if len(phi) != self.n // 2:
            raise ValueError(f"SO({self.n}) torus has {self.n // 2} angles, got {len(phi)}")
        object.__setattr__(self, "phi", phi)

    @property
    def rank(self) -> int:
        return self.n // 2


def cartan_matrices(phi, n: int) -> np.ndarray:
    """Torus elements for a batch of angle vectors ``(B, nu)``."""
    phi = np.atleast_2d(np.asarray(phi, dtype=float))
    b, nu = phi.shape
    if nu != n // 2:
        raise ValueError(f"SO({n}) torus has {n // 2} angles, got {nu}")
    out = np.zeros((b, n, n), dtype=np.complex128)
    if n % 2:
        out[:, n - 1, n - 1] = 1.0
    c, s = np.cos(phi), np.sin(phi)
    for j in range(nu):
        i = 2 * j
        out[:, i, i] = c[:, j]
        out[:, i, i + 1] = -s[:, j]
        out[:, i + 1, i] = s[:, j]
        out[:, i + 1, i + 1] = c[:, j]
    return out


def cartan_element(a: CartanAngles, n: int | None = None) -> GroupElement:
    n = a.n if n is None else n
    return GroupElement(cartan_matrices([a.phi], n)[0], SO(n))


def _phi(a):
    return np.asarray(a.phi if isinstance(a, CartanAngles) else a, dtype=float)


def xi(alpha, a) -> complex:
    """``exp(i <alpha, phi>)``; ``a`` is CartanAngles or an array ``(..., nu)``."""
    return np.exp(1j * (_phi(a) @ np.asarray(alpha, dtype=float)))


@dataclass(frozen=True)
class RootSystem:
    type: str
    rank: int
    positive: np.ndarray      # (N, nu) integer entries
    rho: tuple[Fraction, ...]

    def rho_consistent(self) -> bool:
        total = self.positive.sum(axis=0)
        return all(2 * r == int(t) for r, t in zip(self.rho, total))


@lru_cache(maxsize=None)
def positive_roots(n: int) -> RootSystem:
    """Type B_nu for ``n = 2 nu + 1``, type D_nu for ``n = 2 nu``.

    Rank 1 (B_1) and D_2 are accepted although they are degenerate cases of
    the classical families.
    """
    if n < 3:
        raise ValueError("root data needs n >= 3")
    nu = n // 2
    roots = []
    for j in range(nu):
        for k in range(j + 1, nu):
            for sign in (-1, 1):
                r = [0] * nu
                r[j], r[k] = 1, sign
                roots.append(r)
    if n % 2:
        for j in range(nu):
            r = [0] * nu
            r[j] = 1
            roots.append(r)
        rho = tuple(Fraction(2 * (nu - j) - 1, 2) for j in range(nu))
        kind = "B"
    else:
        rho = tuple(Fraction(nu - 1 - j) for j in range(nu))
        kind = "D"
    arr = np.array(roots, dtype=np.int64).reshape(-1, nu)
    arr.flags.writeable = False
    return RootSystem(kind, nu, arr, rho)


def weyl_denominator(a, n: int):
    """``prod_{alpha > 0} (xi(alpha/2) - xi(-alpha/2)) = prod 2i sin(<alpha, phi>/2)``."""
    phi = _phi(a)
    pairing = phi @ positive_roots(n).positive.T.astype(float)
    return np.prod(2j * np.sin(pairing / 2), axis=-1)


def _torus_grid(n: int, nodes: int) -> np.ndarray:
    nu = n // 2
    t = 2 * math.pi * np.arange(nodes) / nodes
    grids = np.meshgrid(*([t] * nu), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def _density(phi: np.ndarray, n: int) -> np.ndarray:
    pairing = phi @ positive_roots(n).positive.T.astype(float)
    return np.prod(4 * np.sin(pairing / 2) ** 2, axis=-1)


@dataclass(frozen=True)
class WeylData:
    order: int
    calibration: float
    distance: float


@lru_cache(maxsize=None)
def weyl_group_order(n: int, nodes: int = TORUS_NODES, tol: float = 1e-6) -> WeylData:
    """``|W|`` from ``int_T |D|^2 dh``, which must be an integer within ``tol``."""
    value = float(np.mean(_density(_torus_grid(n, nodes), n)))
    order = round(value)
    dist = abs(value - order)
    if dist > tol or order < 1:
        raise CalibrationError(f"torus calibration gave {value!r}, not an integer within {tol}")
    return WeylData(int(order), value, dist)


def _spot_check(f: Callable, n: int, seed: int, count: int = 10, tol: float = 1e-8) -> float:
    rng = np.random.default_rng(seed)
    v = HaarSampler(SO(n), seed).sample_batch(count)
    h = cartan_matrices(rng.uniform(0, 2 * math.pi, size=(count, n // 2)), n)
    conj = v @ h @ np.conj(np.swapaxes(v, -1, -2))
    dev = float(np.max(np.abs(np.asarray(f(conj)) - np.asarray(f(h)))))
    if dev > tol:
        warnings.warn(
            f"integrand is not conjugation invariant (deviation {dev:.2e}); "
            "the torus integral will not match the group integral",
            ClassFunctionWarning,
            stacklevel=3,
        )
    return dev


def weyl_integrate(f: Callable, n: int, nodes: int = TORUS_NODES, *, check: bool = True,
                   seed: int = 0, chunk: int = 1 << 16):
    """``(1/|W|) int_T f(h) |D(h)|^2 dh`` for a vectorised class function ``f``."""
    if check:
        _spot_check(f, n, seed)
    order = weyl_group_order(n, nodes).order
    phi = _torus_grid(n, nodes)
    acc = 0.0
    for start in range(0, len(phi), chunk):
        p = phi[start:start + chunk]
        vals = np.asarray(f(cartan_matrices(p, n)))
        acc = acc + np.tensordot(_density(p, n), vals, axes=(0, 0))
    out = acc / (len(phi) * order)
    out = np.asarray(out)
    if np.iscomplexobj(out) and np.all(out.imag == 0):
        out = out.real
    return out.item() if out.ndim == 0 else out
