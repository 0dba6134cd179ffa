"""Matrix groups SO(n) and SU(n): element type, validators, group operations.

Entries are always stored as ``complex128``; SO(n) elements simply carry zero
imaginary parts so that both families share one code path.  Elements are
immutable (the backing array is marked read-only).

Indices in :func:`planar_rotation` are 1-based, following the usual
``r_{ij}`` notation; everything else in the package is 0-based.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import GroupMismatchError

__all__ = [
    "Group",
    "SO",
    "SU",
    "Tolerance",
    "GroupElement",
    "identity",
    "validate",
    "validate_matrices",
    "planar_rotation",
    "multiply",
    "inverse",
    "conjugate",
    "invariant_metric",
]


@dataclass(frozen=True)
class Group:
    """Group tag: ``kind`` is ``"SO"``, ``"SU"`` or ``"finite"``."""

    kind: str
    n: int
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("SO", "SU", "finite"):
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("group dimension must be positive")

    @property
    def is_real(self) -> bool:
        return self.kind == "SO"

    @property
    def dimension(self) -> int:
        """Dimension of the manifold (number of chart parameters)."""
        if self.kind == "SO":
            return self.n * (self.n - 1) // 2
        if self.kind == "SU":
            return self.n * self.n - 1
        return 0

    def __str__(self):
        if self.kind == "finite":
            return f"finite({self.name or self.n})"
        return f"{self.kind}({self.n})"

    @classmethod
    def parse(cls, text: str) -> "Group":
        """Parse ``so:3`` / ``su:2`` / ``SO(3)`` style specifications."""
        m = re.fullmatch(r"\s*(so|su)\s*[:(]\s*(\d+)\s*\)?\s*", text, flags=re.I)
        if not m:
            raise ValueError(f"cannot parse group spec {text!r} (expected so:N or su:N)")
        return cls(m.group(1).upper(), int(m.group(2)))


def SO(n: int) -> Group:
    return Group("SO", n)


def SU(n: int) -> Group:
    return Group("SU", n)


@dataclass(frozen=True)
class Tolerance:
    eps_validate: float = 1e-10
    eps_compare: float = 1e-8

    def __post_init__(self):
        if not (self.eps_validate > 0 and self.eps_compare > 0):
            raise ValueError("tolerances must be strictly positive")
        if self.eps_validate > self.eps_compare:
            raise ValueError("eps_validate must not exceed eps_compare")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True, eq=False)
class GroupElement:
    entries: np.ndarray
    group: Group
    tol: Tolerance = field(default=DEFAULT_TOL)

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"entries must be a square matrix, got shape {a.shape}")
        if self.group.kind != "finite" and a.shape[0] != self.group.n:
            raise ValueError(
                f"dimension mismatch: {a.shape[0]}x{a.shape[1]} entries for {self.group}"
            )
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        """The entries as a real array for SO(n), complex otherwise."""
        if self.group.is_real:
            return self.entries.real
        return self.entries

    def __matmul__(self, other):
        return multiply(self, other)

    def __repr__(self):
        return f"GroupElement({self.group}, {np.array2string(self.matrix, precision=6)})"


def identity(group: Group) -> GroupElement:
    return GroupElement(np.eye(group.n), group)


def validate_matrices(mats, group: Group, eps: float = DEFAULT_TOL.eps_validate) -> np.ndarray:
    """Vectorised defining-relation check for a stack ``(..., n, n)``."""
    a = np.asarray(mats, dtype=np.complex128)
    n = group.n
    if a.shape[-2:] != (n, n):
        raise ValueError(f"dimension mismatch: {a.shape[-2:]} for {group}")
    if not np.all(np.isfinite(a)):
        raise ValueError("entries must be finite")
    eye = np.eye(n)
    if group.kind == "SO":
        # sum_c r_ac r_bc = delta_ab
        gram = a @ np.swapaxes(a, -1, -2)
        ok = np.all(np.abs(a.imag) <= eps, axis=(-1, -2))
    elif group.kind == "SU":
        # sum_c c_ca conj(c_cb) = delta_ab
        gram = np.swapaxes(a, -1, -2) @ np.conj(a)
        ok = np.ones(a.shape[:-2], dtype=bool)
    else:
        raise ValueError("matrix validation applies to SO(n)/SU(n) only")
    ok &= np.max(np.abs(gram - eye), axis=(-1, -2)) <= eps
    ok &= np.abs(np.linalg.det(a) - 1.0) <= eps
    return ok


def validate(g: GroupElement, tol: Tolerance | None = None) -> bool:
    """True iff ``g`` satisfies the defining relations of its group tag."""
    tol = tol or g.tol
    return bool(validate_matrices(g.entries, g.group, tol.eps_validate))


def planar_rotation(i: int, j: int, phi: float, n: int) -> GroupElement:
    """Rotation by ``phi`` in the (x_i, x_j) plane, 1-based ``i < j``.

    The (i, j) block is ``[[cos, -sin], [sin, cos]]``.
    """
    if not (1 <= i < j <= n):
        raise ValueError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")
    m = np.eye(n)
    c, s = math.cos(phi), math.sin(phi)
    m[i - 1, i - 1] = c
    m[i - 1, j - 1] = -s
    m[j - 1, i - 1] = s
    m[j - 1, j - 1] = c
    return GroupElement(m, SO(n))


def _check_same(a: GroupElement, b: GroupElement):
    if a.group != b.group or a.n != b.n:
        raise GroupMismatchError(f"cannot combine elements of {a.group} and {b.group}")


def multiply(a: GroupElement, b: GroupElement) -> GroupElement:
    _check_same(a, b)
    return GroupElement(a.entries @ b.entries, a.group, a.tol)


def inverse(a: GroupElement) -> GroupElement:
    # conjugate transpose; never a general inversion
    return GroupElement(a.entries.conj().T, a.group, a.tol)


def conjugate(v: GroupElement, g: GroupElement) -> GroupElement:
    """``v g v^{-1}``."""
    _check_same(v, g)
    return GroupElement(v.entries @ g.entries @ v.entries.conj().T, g.group, g.tol)


def invariant_metric(x: GroupElement, y: GroupElement) -> float:
    """Left-invariant distance ``||x^{-1} y - I||_F``."""
    _check_same(x, y)
    d = x.entries.conj().T @ y.entries - np.eye(x.n)
    return float(np.sqrt(np.sum(np.abs(d) ** 2)))
