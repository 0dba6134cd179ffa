"""Finite groups given by multiplication tables or permutation generators.

Element 0 is always the identity.  Permutations act on ``{0, .., d-1}``
internally (1-based in cycle notation) and compose right to left:
``(a * b)(x) = a(b(x))``.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from ..errors import CostCapExceeded, GroupFileError

__all__ = [
    "FiniteGroup",
    "ConjClasses",
    "conjugacy_classes",
    "from_table",
    "from_permutations",
    "parse_cycles",
    "load_group",
    "read_table",
    "read_generators",
    "named_group",
    "CORPUS",
    "CLOSURE_CAP",
]

CLOSURE_CAP = 5000
_ASSOC_FULL = 64


@dataclass(frozen=True)
class ConjClasses:
    classes: tuple[tuple[int, ...], ...]
    class_of: np.ndarray
    inverse_class: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.classes)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    @property
    def representatives(self) -> tuple[int, ...]:
        return tuple(c[0] for c in self.classes)


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    mult: np.ndarray
    name: str = ""
    perms: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        m = np.array(self.mult, dtype=np.int64)
        m.flags.writeable = False
        object.__setattr__(self, "mult", m)
        _check_table(m)

    @property
    def h(self) -> int:
        return self.mult.shape[0]

    @property
    def identity(self) -> int:
        return 0

    @cached_property
    def inverse(self) -> np.ndarray:
        inv = np.argmin(self.mult, axis=1)  # the column holding 0
        inv.flags.writeable = False
        return inv

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.mult[x, a]
            k += 1
        return k

    def power(self, a: int, t: int) -> int:
        x = 0
        for _ in range(t % self.element_order(a)):
            x = self.mult[x, a]
        return int(x)

    @cached_property
    def exponent(self) -> int:
        return int(np.lcm.reduce([self.element_order(a) for a in range(self.h)]))

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mult, self.mult.T))

    @cached_property
    def classes(self) -> ConjClasses:
        """Conjugacy classes ordered by size, then by smallest element."""
        h = self.h
        class_id = np.full(h, -1)
        found = []
        for x in range(h):
            if class_id[x] >= 0:
                continue
            orbit = np.unique(self.mult[self.mult[:, x], self.inverse])
            class_id[orbit] = len(found)
            found.append(tuple(int(v) for v in orbit))
        order = sorted(range(len(found)), key=lambda i: (len(found[i]), found[i][0]))
        classes = tuple(found[i] for i in order)
        class_of = np.empty(h, dtype=np.int64)
        for i, c in enumerate(classes):
            class_of[list(c)] = i
        class_of.flags.writeable = False
        inv_class = tuple(int(class_of[self.inverse[c[0]]]) for c in classes)
        return ConjClasses(classes, class_of, inv_class)

    def __repr__(self):
        return f"FiniteGroup({self.name or '?'}, order={self.h})"


def _check_table(m: np.ndarray, lines: list[int] | None = None):
    def err(msg, row=None):
        raise GroupFileError(msg, lines[row] if lines is not None and row is not None else None)

    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise GroupFileError("multiplication table must be square and non-empty")
    h = m.shape[0]
    if m.min() < 0 or m.max() >= h:
        bad = int(np.argmax(np.any((m < 0) | (m >= h), axis=1)))
        err(f"entry out of range 0..{h - 1}", bad)
    target = np.arange(h)
    for i in range(h):
        if not np.array_equal(np.sort(m[i]), target):
            err(f"row {i} is not a permutation of 0..{h - 1}", i)
    for j in range(h):
        if not np.array_equal(np.sort(m[:, j]), target):
            raise GroupFileError(f"column {j} is not a permutation of 0..{h - 1}")
    if not (np.array_equal(m[0], target) and np.array_equal(m[:, 0], target)):
        err("element 0 must be the identity", 0)
    if h <= _ASSOC_FULL:
        left = m[m[:, :, None], np.arange(h)[None, None, :]]      # (ab)c
        right = m[np.arange(h)[:, None, None], m[None, :, :]]     # a(bc)
        if not np.array_equal(left, right):
            raise GroupFileError("table is not associative")
    else:
        rng = np.random.default_rng(0)
        a, b, c = rng.integers(0, h, size=(3, 100_000))
        if not np.array_equal(m[m[a, b], c], m[a, m[b, c]]):
            raise GroupFileError("table is not associative")


def conjugacy_classes(G: FiniteGroup) -> ConjClasses:
    """Classes ordered by size, then by smallest element index."""
    return G.classes


def from_table(table, name: str = "") -> FiniteGroup:
    return FiniteGroup(np.asarray(table), name)


def from_permutations(gens, name: str = "", cap: int = CLOSURE_CAP) -> FiniteGroup:
    """Close a set of permutations (0-based image arrays) under composition."""
    gens = [np.asarray(g, dtype=np.int64) for g in gens]
    degree = max((len(g) for g in gens), default=1)
    gens = [np.concatenate([g, np.arange(len(g), degree)]) for g in gens]
    ident = np.arange(degree)
    elements = [ident]
    index = {ident.tobytes(): 0}
    queue = deque([0])
    while queue:
        e = elements[queue.popleft()]
        for g in gens:
            new = e[g]  # e * g: apply g first
            key = new.tobytes()
            if key not in index:
                if len(elements) >= cap:
                    raise CostCapExceeded(f"generated group exceeds the closure cap of {cap} elements")
                index[key] = len(elements)
                elements.append(new)
                queue.append(index[key])
    perms = np.array(elements)
    h = len(perms)
    mult = np.empty((h, h), dtype=np.int64)
    for i in range(h):
        composed = perms[i][perms]  # row j: perms[i] o perms[j]
        mult[i] = [index[row.tobytes()] for row in composed]
    perms.flags.writeable = False
    return FiniteGroup(mult, name, perms)


_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, lineno: int | None = None) -> dict[int, int]:
    """Parse disjoint-cycle notation (1-based) into a 0-based point map."""
    s = text.strip()
    if not s:
        raise GroupFileError("empty generator", lineno)
    if _CYCLE.sub("", s).strip():
        raise GroupFileError(f"malformed cycle notation {s!r}", lineno)
    mapping: dict[int, int] = {}
    for body in _CYCLE.findall(s):
        try:
            pts = [int(t) for t in body.replace(",", " ").split()]
        except ValueError:
            raise GroupFileError(f"non-integer point in cycle ({body})", lineno) from None
        if any(p < 1 for p in pts):
            raise GroupFileError("cycle points must be positive integers", lineno)
        if len(set(pts)) != len(pts) or any(p - 1 in mapping for p in pts):
            raise GroupFileError("cycles must be disjoint with distinct points", lineno)
        for a, b in zip(pts, pts[1:] + pts[:1]):
            mapping[a - 1] = b - 1
    return mapping


def _perm_array(mapping: dict[int, int], degree: int) -> np.ndarray:
    p = np.arange(degree)
    for a, b in mapping.items():
        p[a] = b
    return p


def _content_lines(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield i, line


def read_generators(text: str, name: str = "", cap: int = CLOSURE_CAP) -> FiniteGroup:
    maps = [parse_cycles(line, i) for i, line in _content_lines(text)]
    if not maps:
        raise GroupFileError("no generators given")
    degree = max((max(max(m), max(m.values())) + 1 for m in maps if m), default=1)
    return from_permutations([_perm_array(m, degree) for m in maps], name, cap)


def read_table(text: str, name: str = "") -> FiniteGroup:
    lines = list(_content_lines(text))
    if not lines:
        raise GroupFileError("empty table file")
    first_no, first = lines[0]
    try:
        h = int(first)
    except ValueError:
        raise GroupFileError(f"expected the group order, got {first!r}", first_no) from None
    if h < 1:
        raise GroupFileError("group order must be positive", first_no)
    rows, line_of_row = [], []
    for no, line in lines[1:]:
        try:
            row = [int(t) for t in line.split()]
        except ValueError:
            raise GroupFileError("non-integer entry", no) from None
        if len(row) != h:
            raise GroupFileError(f"expected {h} entries, found {len(row)}", no)
        rows.append(row)
        line_of_row.append(no)
    if len(rows) != h:
        last = lines[-1][0]
        raise GroupFileError(f"expected {h} table rows, found {len(rows)}", last)
    m = np.array(rows, dtype=np.int64)
    _check_table(m, line_of_row)
    return FiniteGroup(m, name)


def load_group(source) -> FiniteGroup:
    """Load from a path or literal text; format detected from the first content line.

    A line starting with ``(`` marks a permutation-generator file, otherwise
    a multiplication table is expected.  Names from :data:`CORPUS` are also
    accepted.
    """
    if isinstance(source, str) and source in CORPUS:
        return named_group(source)
    path = Path(source) if not (isinstance(source, str) and "\n" in source) else None
    if path is not None and path.exists():
        text, name = path.read_text(), path.stem
    elif path is not None and not isinstance(source, str):
        raise FileNotFoundError(source)
    elif path is not None and "(" not in str(source) and not str(source).strip()[:1].isdigit():
        raise FileNotFoundError(f"no such group file or named group: {source}")
    else:
        text, name = str(source), ""
    first = next(_content_lines(text), (None, ""))[1]
    if first.startswith("("):
        return read_generators(text, name)
    return read_table(text, name)


CORPUS = {
    "Z2": ["(1 2)"],
    "Z3": ["(1 2 3)"],
    "Z4": ["(1 2 3 4)"],
    "Z2xZ2": ["(1 2)", "(3 4)"],
    "S3": ["(1 2)", "(1 2 3)"],
    "Q8": ["(1 2 4 7)(3 6 8 5)", "(1 3 4 8)(2 5 7 6)"],
    "D4": ["(1 2 3 4)", "(1 3)"],
    "A4": ["(1 2 3)", "(1 2)(3 4)"],
    "S4": ["(1 2 3 4)", "(1 2)"],
    "S5": ["(1 2 3 4 5)", "(1 2)"],
}


def _psl2_generators(p: int) -> list[str]:
    """PSL(2, p) acting on the projective line {0..p-1, inf} (inf = point p)."""
    pts = list(range(p + 1))
    inf = p

    def t(z):
        return inf if z == inf else (z + 1) % p

    def s(z):
        if z == inf:
            return 0
        if z == 0:
            return inf
        return (-pow(z, -1, p)) % p

    out = []
    for f in (t, s):
        seen, cycles = set(), []
        for z in pts:
            if z in seen:
                continue
            cyc = [z]
            seen.add(z)
            w = f(z)
            while w != z:
                cyc.append(w)
                seen.add(w)
                w = f(w)
            if len(cyc) > 1:
                cycles.append("(" + " ".join(str(v + 1) for v in cyc) + ")")
        out.append("".join(cycles))
    return out


def named_group(name: str) -> FiniteGroup:
    """Corpus groups by name, plus ``PSL2_p`` for an odd prime ``p``."""
    if name in CORPUS:
        return read_generators("\n".join(CORPUS[name]), name)
    m = re.fullmatch(r"PSL2_(\d+)", name)
    if m:
        return read_generators("\n".join(_psl2_generators(int(m.group(1)))), name)
    raise KeyError(f"unknown group {name!r}")
