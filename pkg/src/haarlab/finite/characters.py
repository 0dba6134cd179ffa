"""Class algebra, the Frobenius character equation, and character tables.

The solver works on the class algebra: multiplication by the normalised
class sums ``e_a = X_a / h_a`` is a family of commuting rational ``k x k``
matrices whose common eigenvectors are the normalised characters
``F_a = chi_a / f``.  Eigenvectors are found in floating point, then every
value is rebuilt exactly in Q(zeta_e) (``e`` the exponent) from eigenvalue
multiplicities along power maps, and the character equation is verified in
exact arithmetic before a table is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import CharacterSolveError, CostCapExceeded
from .cyclotomic import Cyclotomic, as_exact, format_exact, zeta
from .group import ConjClasses, FiniteGroup

__all__ = [
    "structure_constants",
    "structure_constants_bruteforce",
    "class_matrices",
    "CharacterTable",
    "solve_character_equation",
    "OracleResult",
    "regular_rep_oracle",
    "regular_matrices",
    "tables_match",
    "AxiomReport",
    "frobenius_axiom_check",
    "check_character_equation",
    "ORACLE_CAP",
]

ORACLE_CAP = 64


def structure_constants(G: FiniteGroup, classes: ConjClasses | None = None) -> np.ndarray:
    """``h[a, b, c] = #{(A, B, C) in a x b x c : ABC = E}``."""
    cl = classes or G.classes
    k = cl.k
    out = np.zeros((k, k, k), dtype=np.int64)
    for a, ca in enumerate(cl.classes):
        for b, cb in enumerate(cl.classes):
            prod = G.mult[np.ix_(ca, cb)].ravel()
            out[a, b] = np.bincount(cl.class_of[G.inverse[prod]], minlength=k)
    return out


def structure_constants_bruteforce(G: FiniteGroup, classes: ConjClasses | None = None) -> np.ndarray:
    """Triple enumeration over ``G^3``; an independent check on :func:`structure_constants`."""
    cl = classes or G.classes
    k, h = cl.k, G.h
    out = np.zeros((k, k, k), dtype=np.int64)
    co = cl.class_of
    for a in range(h):
        for b in range(h):
            ab = G.mult[a, b]
            for c in range(h):
                if G.mult[ab, c] == 0:
                    out[co[a], co[b], co[c]] += 1
    return out


def class_matrices(G: FiniteGroup, classes: ConjClasses | None = None,
                   sc: np.ndarray | None = None) -> list[np.ndarray]:
    """``M_a[b, c] = h_{c' a b} / (h_a h_b)``: ``e_a e_b = sum_c M_a[b, c] e_c``.

    Entries are ``Fraction`` objects.  A normalised character ``F`` satisfies
    ``M_a F = F_a F`` for every ``a``.
    """
    cl = classes or G.classes
    sc = structure_constants(G, cl) if sc is None else sc
    sizes, inv = cl.sizes, cl.inverse_class
    k = cl.k
    mats = []
    for a in range(k):
        m = np.empty((k, k), dtype=object)
        for b in range(k):
            for c in range(k):
                m[b, c] = Fraction(int(sc[inv[c], a, b]), sizes[a] * sizes[b])
        mats.append(m)
    return mats


def _float(m) -> np.ndarray:
    return np.array(m, dtype=float)


# ---------------------------------------------------------------------------
# character tables


@dataclass(frozen=True, eq=False)
class CharacterTable:
    """Rows are irreducible characters, columns conjugacy classes.

    ``rows`` holds exact values (``Fraction`` or :class:`Cyclotomic`) when the
    table came from the exact solver, complex numbers otherwise.
    """

    group: FiniteGroup
    classes: ConjClasses
    degrees: tuple[int, ...]
    rows: np.ndarray
    exact: bool = True

    @property
    def k(self) -> int:
        return len(self.degrees)

    @property
    def values(self) -> np.ndarray:
        return np.array([[complex(v) for v in row] for row in self.rows])

    def on_elements(self, i: int) -> np.ndarray:
        """Row ``i`` as a function on group elements (object array)."""
        return self.rows[i][self.classes.class_of]

    def to_dict(self) -> dict:
        return {
            "classes": {
                "sizes": list(self.classes.sizes),
                "representatives": list(self.classes.representatives),
            },
            "degrees": list(self.degrees),
            "rows": [[format_exact(v) for v in row] for row in self.rows],
        }

    def format_text(self) -> str:
        cells = [[format_exact(v) for v in row] for row in self.rows]
        header = [f"C{a}({s})" for a, s in enumerate(self.classes.sizes)]
        widths = [max(len(header[a]), *(len(r[a]) for r in cells)) for a in range(len(header))]
        lines = ["     " + "  ".join(c.rjust(w) for c, w in zip(header, widths))]
        for i, row in enumerate(cells):
            lines.append(f"X{i:<3} " + "  ".join(c.rjust(w) for c, w in zip(row, widths)))
        return "\n".join(lines)


def _canonical_order(values: np.ndarray, degrees) -> list[int]:
    def key(i):
        vals = np.round(values[i], 9) + 0.0
        return (degrees[i], tuple((-v.real, -v.imag) for v in vals))
    return sorted(range(len(degrees)), key=key)


def _split(vecs: np.ndarray, mats: list[np.ndarray], rng) -> list[np.ndarray]:
    """Split an invariant subspace into common 1-d eigenspaces."""
    if vecs.shape[1] == 1:
        return [vecs]
    coeffs = rng.integers(1, 1000, size=len(mats))
    comb = sum(c * m for c, m in zip(coeffs, mats))
    restricted = np.linalg.lstsq(vecs, comb @ vecs, rcond=None)[0]
    w, v = np.linalg.eig(restricted)
    groups = _cluster(w)
    if len(groups) == 1:
        for m in mats:
            r = np.linalg.lstsq(vecs, m @ vecs, rcond=None)[0]
            w, v = np.linalg.eig(r)
            groups = _cluster(w)
            if len(groups) > 1:
                break
        else:
            raise CharacterSolveError("common eigenspace could not be split by any class matrix")
    out = []
    for idx in groups:
        sub = vecs @ v[:, idx]
        out.extend(_split(sub, mats, rng))
    return out


def _cluster(w: np.ndarray, tol: float = 1e-7) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, x in enumerate(w):
        for g in groups:
            if abs(w[g[0]] - x) < tol * max(1.0, abs(x)):
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def _exactify(G: FiniteGroup, cl: ConjClasses, chi: np.ndarray, f: int):
    """Rebuild a numerically known character exactly in Q(zeta_e)."""
    e = G.exponent
    out = []
    for a, rep in enumerate(cl.representatives):
        o = G.element_order(rep)
        powers = [chi[cl.class_of[G.power(rep, t)]] for t in range(o)]
        value = Cyclotomic(e, [0])
        total = 0
        for j in range(o):
            m = sum(powers[t] * np.exp(-2j * np.pi * j * t / o) for t in range(o)) / o
            mj = round(m.real)
            if abs(m - mj) > 1e-6 or mj < 0:
                raise CharacterSolveError(
                    f"eigenvalue multiplicity {m:.6g} on class {a} is not a nonnegative integer"
                )
            total += mj
            if mj:
                value = value + mj * zeta(e, j * (e // o))
        if total != f:
            raise CharacterSolveError("eigenvalue multiplicities do not add up to the degree")
        out.append(as_exact(value))
    return out


def check_character_equation(table: CharacterTable, sc: np.ndarray | None = None) -> list[tuple]:
    """Exact check of ``h_b h_c chi_b chi_c = f sum_a h_{a' b c} chi_a``.

    Returns the list of ``(row, b, c)`` triples that fail (empty when exact).
    """
    cl = table.classes
    sc = structure_constants(table.group, cl) if sc is None else sc
    sizes, inv = cl.sizes, cl.inverse_class
    bad = []
    for i, (f, row) in enumerate(zip(table.degrees, table.rows)):
        for b in range(cl.k):
            for c in range(cl.k):
                lhs = sizes[b] * sizes[c] * row[b] * row[c]
                rhs = f * sum(int(sc[inv[a], b, c]) * row[a] for a in range(cl.k))
                if lhs != rhs:
                    bad.append((i, b, c))
    return bad


def solve_character_equation(G: FiniteGroup, seed: int = 0) -> CharacterTable:
    """Full character table from common eigenvectors of the class matrices."""
    cl = G.classes
    k, h = cl.k, G.h
    sizes = np.array(cl.sizes)
    inv = list(cl.inverse_class)
    sc = structure_constants(G, cl)
    mats = [_float(m) for m in class_matrices(G, cl, sc)]
    rng = np.random.default_rng(seed)
    vecs = _split(np.eye(k, dtype=complex), mats, rng)
    if len(vecs) != k:
        raise CharacterSolveError(f"found {len(vecs)} common eigenvectors, expected {k}")
    rows, degrees = [], []
    for v in vecs:
        F = v[:, 0] / v[0, 0]
        norm = np.sum(sizes * F * F[inv])
        f_float = math.sqrt(h / norm.real)
        f = round(f_float)
        if abs(f_float - f) > 1e-6 or abs(norm.imag) > 1e-6:
            raise CharacterSolveError(f"degree {f_float:.6g} is not an integer")
        degrees.append(f)
        rows.append(_exactify(G, cl, f * F, f))
    values = np.array([[complex(v) for v in r] for r in rows])
    order = _canonical_order(values, degrees)
    table = CharacterTable(
        G, cl, tuple(degrees[i] for i in order),
        np.array([rows[i] for i in order], dtype=object),
    )
    bad = check_character_equation(table, sc)
    if bad:
        raise CharacterSolveError(f"character equation fails exactly at {bad[:3]}")
    return table


# ---------------------------------------------------------------------------
# regular-representation oracle


@dataclass(frozen=True, eq=False)
class OracleResult:
    table: CharacterTable
    irreps: tuple[np.ndarray, ...]  # irreps[i][g] is the (f_i x f_i) unitary matrix of element g


def regular_matrices(G: FiniteGroup) -> np.ndarray:
    """Left-regular permutation matrices ``L[g] e_x = e_{g x}``, shape (h, h, h)."""
    h = G.h
    L = np.zeros((h, h, h))
    idx = np.arange(h)
    for g in range(h):
        L[g, G.mult[g], idx] = 1.0
    return L


def regular_rep_oracle(G: FiniteGroup, seed: int = 0, cap: int = ORACLE_CAP) -> OracleResult:
    """Decompose the left-regular representation numerically.

    A random Hermitian element of the right-regular commutant is
    diagonalised; each eigenspace carries one irreducible constituent.
    """
    h = G.h
    if h > cap:
        raise CostCapExceeded(f"regular-representation oracle limited to order {cap}, got {h}")
    rng = np.random.default_rng(seed)
    c = rng.normal(size=h) + 1j * rng.normal(size=h)
    c = c + np.conj(c[G.inverse])  # c_{g^-1} = conj(c_g) makes H Hermitian
    H = np.zeros((h, h), dtype=complex)
    idx = np.arange(h)
    for g in range(h):
        H[G.mult[idx, G.inverse[g]], idx] += c[g]  # right translation x -> x g^-1
    w, V = np.linalg.eigh(H)
    L = regular_matrices(G)
    cl = G.classes
    reps = {}
    for group in _cluster(w, 1e-8):
        Q = V[:, group]
        mats = np.einsum("ai,gab,bj->gij", Q.conj(), L, Q)
        chars = np.trace(mats, axis1=1, axis2=2)[list(cl.representatives)]
        key = tuple(np.round(chars, 6))
        reps.setdefault(key, (chars, mats))
    if len(reps) != cl.k:
        raise CharacterSolveError(f"oracle found {len(reps)} constituents, expected {cl.k}")
    chars = [v[0] for v in reps.values()]
    irreps = [v[1] for v in reps.values()]
    degrees = [round(ch[0].real) for ch in chars]
    values = np.array(chars)
    order = _canonical_order(values, degrees)
    table = CharacterTable(
        G, cl, tuple(degrees[i] for i in order),
        np.array([values[i] for i in order]), exact=False,
    )
    return OracleResult(table, tuple(irreps[i] for i in order))


def tables_match(a: CharacterTable, b: CharacterTable, tol: float = 1e-8) -> bool:
    """Equal up to a permutation of rows."""
    va, vb = a.values, b.values
    if va.shape != vb.shape:
        return False
    used = set()
    for row in va:
        hit = next((j for j in range(len(vb)) if j not in used and np.max(np.abs(vb[j] - row)) < tol), None)
        if hit is None:
            return False
        used.add(hit)
    return True


# ---------------------------------------------------------------------------
# axioms


@dataclass
class AxiomReport:
    """Per-character residuals of the four defining identities.

    ``residuals[i]`` maps ``"degree"``, ``"class_function"``, ``"functional"``
    and ``"norm"`` to the largest absolute deviation (0 means exact).
    """

    residuals: list[dict[str, float]]
    exact: bool

    @property
    def max_residual(self) -> float:
        return max((max(r.values()) for r in self.residuals), default=0.0)

    def passed(self, tol: float = 1e-10) -> bool:
        if self.exact:
            return self.max_residual == 0.0
        return self.max_residual <= tol


def _dev(x, y) -> float:
    d = x - y
    if isinstance(d, (Fraction, int)) or (isinstance(d, Cyclotomic)):
        return 0.0 if d == 0 else max(abs(complex(d)), 1e-300)
    return abs(complex(d))


def frobenius_axiom_check(G: FiniteGroup, table: CharacterTable) -> AxiomReport:
    """Check, for every row ``chi`` with degree ``f``:

    * ``chi(E) = f``;
    * ``chi(AB) = chi(BA)`` for all ``A, B``;
    * ``h chi(A) chi(B) = f sum_R chi(A R^-1 B R)`` for all ``A, B``;
    * ``h = sum_R chi(R) chi(R^-1)``.
    """
    cl = table.classes
    h, k = G.h, cl.k
    co = cl.class_of
    ab = co[G.mult]          # class of AB
    ba = co[G.mult.T]        # class of BA
    # T[A, b, c] = #{B' in class b : A B' in class c}; sum_R chi(A R^-1 B R) = (h/h_b) sum_c T chi_c
    T = np.zeros((h, k, k), dtype=np.int64)
    for b, members in enumerate(cl.classes):
        for A in range(h):
            T[A, b] = np.bincount(co[G.mult[A, list(members)]], minlength=k)
    sizes = cl.sizes
    out = []
    for f, row in zip(table.degrees, table.rows):
        r = {"degree": _dev(row[0], f)}
        cf = 0.0
        for A in range(h):
            for B in range(h):
                if ab[A, B] != ba[A, B]:
                    cf = max(cf, _dev(row[ab[A, B]], row[ba[A, B]]))
        r["class_function"] = cf
        fn = 0.0
        for A in range(h):
            a = co[A]
            for b in range(k):
                rhs = Fraction(h, sizes[b]) * sum(int(T[A, b, c]) * row[c] for c in range(k) if T[A, b, c])
                fn = max(fn, _dev(h * row[a] * row[b], f * rhs))
        r["functional"] = fn
        norm = sum(sizes[a] * row[a] * row[cl.inverse_class[a]] for a in range(k))
        r["norm"] = _dev(norm, h)
        out.append(r)
    return AxiomReport(out, table.exact)
