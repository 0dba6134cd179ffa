"""Acceptance suite: one check per numbered criterion.

Run with ``pytest tests/test_acceptance.py -v`` (the PASS/FAIL lines are
repeated in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import sys
import time
from fractions import Fraction

import numpy as np
import pytest
import sympy

from haarlab import (
    SO,
    SU,
    ChartSpec,
    PolyForm,
    Poly,
    get_chart,
    integrate,
    integrate_trace_power,
    invariant_dimension,
    invariant_project,
    mean_axioms_report,
    metric_density,
    so_total_volume,
    su_total_volume,
)
from haarlab.finite import (
    check_character_equation,
    frobenius_axiom_check,
    named_group,
    regular_rep_oracle,
    solve_character_equation,
    structure_constants,
    tables_match,
    verify_factorization,
)
from haarlab.haar import box_volume
from haarlab.reps import character_inner, matrix_element_gram, schur_pattern, sym_power_rep
from haarlab.weyl import weyl_group_order, weyl_integrate

RESULTS: dict[int, str] = {}

CORPUS = ["Z2", "Z3", "Z4", "Z2xZ2", "S3", "Q8", "D4", "A4", "S4"]


def _record(num: int, ok: bool, detail: str) -> None:
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[num] = line
    print(line)


# -- 1 ---------------------------------------------------------------------

def criterion_1():
    worst = 0.0
    parts = []
    # independent geometric values: circle of radius sqrt2, SO(3) as a
    # quotient of the radius-sqrt2 3-sphere, SU(2) as that 3-sphere itself
    oracle = {2: 2 * math.sqrt(2) * math.pi, 3: 2 ** 4.5 * math.pi ** 2}
    for n in (2, 3, 4):
        got = box_volume(ChartSpec(SO(n)))
        ref = oracle.get(n, so_total_volume(n))
        rel = abs(got - ref) / ref
        worst = max(worst, rel)
        parts.append(f"SO({n}) rel {rel:.1e}")
    su2 = box_volume(ChartSpec(SU(2)))
    ref = 4 * math.sqrt(2) * math.pi ** 2
    su_rel = abs(su2 - ref) / ref
    ok = worst < 1e-6 and su_rel < 1e-8 and abs(su_total_volume(2) - ref) / ref < 1e-12
    return ok, ", ".join(parts) + f", SU(2) rel {su_rel:.1e}"


# -- 2 ---------------------------------------------------------------------

def _interior_points(chart, count, rng, margin=0.05):
    lo = np.array([p.lo for p in chart.params])
    hi = np.array([p.hi for p in chart.params])
    span = hi - lo
    return lo + span * rng.uniform(margin, 1 - margin, size=(count, len(lo)))


def criterion_2():
    rng = np.random.default_rng(2024)
    worst = 0.0
    parts = []
    for g in (SO(3), SO(4), SU(2), SU(3)):
        spec = ChartSpec(g)
        chart = get_chart(spec)
        pts = _interior_points(chart, 100, rng)
        closed = chart.density(pts)
        fd = np.array([metric_density(spec, x) for x in pts])
        rel = float(np.max(np.abs(closed - fd) / fd))
        worst = max(worst, rel)
        parts.append(f"{g} {rel:.1e}")
    return worst < 1e-6, "max rel " + ", ".join(parts)


# -- 3 ---------------------------------------------------------------------

def criterion_3():
    spec = ChartSpec(SU(2))
    reps = [sym_power_rep(SU(2), p) for p in (0, 1, 2)]
    gram = matrix_element_gram(reps, spec)
    pattern = schur_pattern([r.dim for r in reps])
    dev = float(np.max(np.abs(gram - pattern)))
    norm_dev = cross_dev = 0.0
    for i, a in enumerate(reps):
        for j, b in enumerate(reps):
            v = complex(character_inner(a.character, b.character, spec))
            if i == j:
                norm_dev = max(norm_dev, abs(v - 1))
            else:
                cross_dev = max(cross_dev, abs(v))
    ok = gram.shape == (14, 14) and dev < 1e-6 and norm_dev < 1e-8 and cross_dev < 1e-8
    return ok, f"gram dev {dev:.1e}, norm dev {norm_dev:.1e}, cross {cross_dev:.1e}"


# -- 4 ---------------------------------------------------------------------

def so3_closed_form() -> sympy.Expr:
    t = sympy.symbols("theta", real=True)
    integrand = (1 + 2 * sympy.cos(t)) ** 2 * 4 * sympy.sin(t / 2) ** 2
    return sympy.simplify(sympy.integrate(integrand, (t, 0, 2 * sympy.pi)) / (2 * sympy.pi) / 2)


def criterion_4():
    worst = 0.0
    orders = []
    for n in (3, 4, 5):
        wd = weyl_group_order(n)
        orders.append(wd.order)
        if wd.distance >= 1e-6:
            return False, f"calibration for SO({n}) off by {wd.distance:.1e}"
        spec = ChartSpec(SO(n))
        for k in range(5):
            def f(m, k=k):
                return np.trace(m, axis1=-2, axis2=-1).real ** k

            torus = weyl_integrate(f, n)
            full = integrate(f, spec) if n <= 4 else integrate_trace_power(spec, k)
            worst = max(worst, abs(torus - full))
    closed = so3_closed_form()
    ok = worst < 1e-6 and orders == [2, 4, 8] and closed == 1
    return ok, f"|W| = {orders}, max diff {worst:.1e}, SO(3) closed form = {closed}"


# -- 5 ---------------------------------------------------------------------

def _exact_orthogonality(table) -> bool:
    h = table.group.h
    sizes = table.classes.sizes
    rows = table.rows
    k = len(sizes)
    zero = Fraction(0)
    for i in range(k):
        for j in range(k):
            s = sum((sizes[a] * rows[i, a] * rows[j, a].conjugate() for a in range(k)), zero)
            if s != (h if i == j else 0):
                return False
    for a in range(k):
        for b in range(k):
            s = sum((rows[i, a] * rows[i, b].conjugate() for i in range(k)), zero)
            target = Fraction(h, sizes[a]) if a == b else 0
            if s != target:
                return False
    return True


def criterion_5():
    failures = []
    for name in CORPUS:
        G = named_group(name)
        table = solve_character_equation(G)
        checks = {
            "equation": not check_character_equation(table, structure_constants(G, table.classes)),
            "axioms": frobenius_axiom_check(G, table).passed(),
            "sum f^2": sum(f * f for f in table.degrees) == G.h,
            "orthogonality": _exact_orthogonality(table),
            "oracle": tables_match(table, regular_rep_oracle(G).table, 1e-8),
            "f | h": all(G.h % f == 0 for f in table.degrees),
        }
        failures += [f"{name}:{k}" for k, v in checks.items() if not v]
    return not failures, "all groups exact" if not failures else "failed " + ", ".join(failures)


# -- 6 ---------------------------------------------------------------------

def criterion_6():
    parts = []
    ok = True
    for name in ("S3", "Q8"):
        G = named_group(name)
        rep = verify_factorization(G, trials=20, seed=6)
        squares = tuple(f * f for f in rep.degrees)
        good = rep.trials == 20 and rep.passed(1e-8) and tuple(rep.exponents) == squares
        ok &= good
        parts.append(f"{name} rel {rep.max_residual:.1e} exponents {tuple(rep.exponents)}")
    return ok, "; ".join(parts)


# -- 7 ---------------------------------------------------------------------

MC_SAMPLES = 10 ** 6


def criterion_7():
    parts = []
    ok = True
    for g in (SO(3), SU(2)):
        rep = mean_axioms_report(ChartSpec(g), seed=7, compare_alt=True, mc_samples=MC_SAMPLES)
        axioms = max(rep.residuals.values())
        good = axioms < 1e-8 and "monte_carlo" in rep.chart_agreement
        if g.kind == "SO":
            good &= "alt" in rep.chart_agreement
        good &= rep.passed(tol=1e-8, chart_tol=1e-7, sigma=3.0)
        ok &= good
        agree = ", ".join(f"{k} {v:.2g}" for k, v in rep.chart_agreement.items())
        parts.append(f"{g} axioms {axioms:.1e} ({agree})")
    return ok, "; ".join(parts)


# -- 8 ---------------------------------------------------------------------

def criterion_8():
    spec = ChartSpec(SO(3))
    form = PolyForm(3, 2)
    a11 = Poly.variable(form.m, 0)
    got = invariant_project(a11, form, spec)
    # coefficient order a11 a12 a13 a22 a23 a33
    expected = (Poly.variable(form.m, 0) + Poly.variable(form.m, 3) + Poly.variable(form.m, 5)) * (1 / 3)
    proj_dev = got.max_abs_diff(expected)
    counts = [invariant_dimension(3, p, r, spec) for p, r in ((2, 1), (1, 1), (1, 2))]
    values = [c.count for c in counts]
    dist = max(c.distance for c in counts)
    ok = proj_dev < 1e-8 and values == [1, 0, 1] and dist < 1e-3
    return ok, f"projection dev {proj_dev:.1e}, counts {values}, integrality {dist:.1e}"


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
    5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8,
}


@pytest.mark.parametrize("num", sorted(CRITERIA))
def test_criterion(num):
    start = time.perf_counter()
    ok, detail = CRITERIA[num]()
    _record(num, ok, f"{detail} [{time.perf_counter() - start:.1f}s]")
    assert ok, detail


def test_so3_weyl_closed_form():
    assert so3_closed_form() == 1


if __name__ == "__main__":
    failed = 0
    for num, fn in CRITERIA.items():
        start = time.perf_counter()
        ok, detail = fn()
        failed += not ok
        _record(num, ok, f"{detail} [{time.perf_counter() - start:.1f}s]")
    sys.exit(1 if failed else 0)
