"""Exact arithmetic in cyclotomic fields Q(zeta_N).

Elements are coefficient vectors over the power basis ``1, z, ..., z^{phi(N)-1}``
reduced modulo the N-th cyclotomic polynomial, with ``Fraction`` entries.
Operands from different fields are lifted to Q(zeta_lcm) automatically, and
``int``/``Fraction`` operands are treated as rationals.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import sympy

__all__ = ["Cyclotomic", "zeta", "as_exact", "minimal_polynomial", "format_exact"]


@lru_cache(maxsize=None)
def _phi_coeffs(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, constant term first."""
    x = sympy.Symbol("x")
    return tuple(int(c) for c in reversed(sympy.Poly(sympy.cyclotomic_poly(n, x), x).all_coeffs()))


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Reduced coefficients of z^j for j = 0 .. 2n-1."""
    phi = _phi_coeffs(n)
    d = len(phi) - 1
    rows = []
    cur = [0] * d
    cur[0] = 1
    for _ in range(2 * n):
        rows.append(tuple(cur))
        # multiply by z and reduce with z^d = -sum phi_i z^i
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * p for c, p in zip(cur, phi[:-1])]
    return tuple(rows)


class Cyclotomic:
    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs):
        d = len(_phi_coeffs(n)) - 1
        c = [Fraction(v) for v in coeffs]
        if len(c) > d:
            red = [Fraction(0)] * d
            table = _power_table(n)
            for j, v in enumerate(c):
                if v:
                    row = table[j % n]
                    for i in range(d):
                        red[i] += v * row[i]
            c = red
        c += [Fraction(0)] * (d - len(c))
        self.n = n
        self.coeffs = tuple(c)

    # -- construction -----------------------------------------------------
    @classmethod
    def rational(cls, q, n: int = 1) -> "Cyclotomic":
        return cls(n, [q])

    def lift(self, m: int) -> "Cyclotomic":
        """The same number viewed in Q(zeta_m); ``n`` must divide ``m``."""
        if m == self.n:
            return self
        if m % self.n:
            raise ValueError(f"Q(zeta_{self.n}) does not embed in Q(zeta_{m})")
        step = m // self.n
        c = [Fraction(0)] * (step * len(self.coeffs))
        for j, v in enumerate(self.coeffs):
            c[j * step] = v
        return Cyclotomic(m, c)

    def _coerce(self, other):
        if isinstance(other, Cyclotomic):
            m = math.lcm(self.n, other.n)
            return self.lift(m), other.lift(m)
        if isinstance(other, (int, Rational)):
            return self, Cyclotomic(self.n, [other])
        return None

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return complex(self) + other
        a, b = pair
        return Cyclotomic(a.n, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.n, [-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return complex(self) * other
        a, b = pair
        prod = [Fraction(0)] * (len(a.coeffs) + len(b.coeffs))
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        prod[i + j] += x * y
        return Cyclotomic(a.n, prod)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            q = Fraction(other)
            return Cyclotomic(self.n, [x / q for x in self.coeffs])
        if isinstance(other, Cyclotomic) and other.is_rational():
            return self / other.coeffs[0]
        if isinstance(other, Cyclotomic):
            # a / b = a * conj-product / norm; the Galois norm is rational
            others = [other.galois(k) for k in _units(other.n) if k != 1]
            num = self
            for o in others:
                num = num * o
            return num / (other * math.prod(others, start=Cyclotomic(other.n, [1])))
        return complex(self) / other

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = Cyclotomic(self.n, [1])
        for _ in range(k):
            out = out * self
        return out

    def galois(self, k: int) -> "Cyclotomic":
        """Image under ``zeta -> zeta^k`` (``gcd(k, n) = 1``)."""
        c = [Fraction(0)] * (self.n * 2)
        for j, v in enumerate(self.coeffs):
            c[(j * k) % self.n] += v
        return Cyclotomic(self.n, c)

    def conjugate(self) -> "Cyclotomic":
        return self.galois(-1 % self.n if self.n > 1 else 1)

    # -- comparison / conversion -----------------------------------------
    def __eq__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a.coeffs == b.coeffs

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash(complex(round(complex(self).real, 9), round(complex(self).imag, 9)))

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def __complex__(self):
        z = cmath.exp(2j * cmath.pi / self.n)
        return complex(sum(float(c) * z**j for j, c in enumerate(self.coeffs)))

    def __abs__(self):
        return abs(complex(self))

    def __repr__(self):
        return f"Cyclotomic({self.n}, {format_exact(self)})"


@lru_cache(maxsize=None)
def _units(n: int) -> tuple[int, ...]:
    return tuple(k for k in range(1, max(n, 2)) if math.gcd(k, n) == 1)


def zeta(n: int, k: int = 1) -> Cyclotomic:
    """``exp(2 pi i k / n)`` as an exact element of Q(zeta_n)."""
    return Cyclotomic(n, [0] * (k % n) + [1])


def as_exact(x):
    """Normalise rational-valued Cyclotomic numbers to ``Fraction``."""
    if isinstance(x, Cyclotomic) and x.is_rational():
        return x.coeffs[0]
    return x


def minimal_polynomial(x) -> list[Fraction]:
    """Monic minimal polynomial over Q, coefficients from the leading term down."""
    if not isinstance(x, Cyclotomic):
        return [Fraction(1), -Fraction(x)]
    orbit = []
    for k in _units(x.n):
        y = x.galois(k)
        if y not in orbit:
            orbit.append(y)
    poly = [Cyclotomic(x.n, [1])]
    for root in orbit:
        # multiply by (X - root)
        shifted = poly + [Cyclotomic(x.n, [0])]
        for i in range(1, len(shifted)):
            shifted[i] = shifted[i] - root * poly[i - 1]
        poly = shifted
    if not all(c.is_rational() for c in poly):
        raise ArithmeticError("Galois orbit product is not rational")
    return [c.coeffs[0] for c in poly]


def _format_poly(coeffs: list[Fraction]) -> str:
    deg = len(coeffs) - 1
    terms = []
    for i, c in enumerate(coeffs):
        p = deg - i
        if c == 0:
            continue
        mag = abs(c)
        mono = "" if p == 0 else ("x" if p == 1 else f"x^{p}")
        body = str(mag) if (mag != 1 or p == 0) else ""
        if body and mono:
            body += "*"
        sign = "-" if c < 0 else "+"
        terms.append((sign, body + mono))
    text = "".join(f" {s} {t}" for s, t in terms).strip()
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


def format_exact(x, digits: int = 12) -> str:
    """``a/b`` for rationals; otherwise a 12-digit decimal with its minimal polynomial."""
    if isinstance(x, Cyclotomic) and x.is_rational():
        x = x.coeffs[0]
    if isinstance(x, (int, Rational)):
        return str(Fraction(x))
    if isinstance(x, Cyclotomic):
        z = complex(x)
        re, im = round(z.real, digits), round(z.imag, digits)
        num = f"{re + 0.0:.{digits}f}{im + 0.0:+.{digits}f}i" if im else f"{re + 0.0:.{digits}f}"
        return f"{num} [{_format_poly(minimal_polynomial(x))}]"
    z = complex(x)
    return f"{z.real:.{digits}f}{z.imag:+.{digits}f}i" if z.imag else f"{z.real:.{digits}f}"
