import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haarlab import SO, ChartSpec, GroupElement, integrate, integrate_trace_power, validate
from haarlab.weyl import (
    CartanAngles,
    ClassFunctionWarning,
    cartan_element,
    cartan_matrices,
    positive_roots,
    weyl_denominator,
    weyl_group_order,
    weyl_integrate,
    xi,
)


def tr(m):
    return np.trace(m, axis1=-2, axis2=-1).real


def test_cartan_element_structure():
    h = cartan_element(CartanAngles(5, (0.3, 1.2))).matrix
    assert validate(GroupElement(h, SO(5)))
    assert h[4, 4] == 1
    assert h[0, 1] == pytest.approx(-math.sin(0.3))
    assert h[3, 2] == pytest.approx(math.sin(1.2))


def test_angle_count_checked():
    with pytest.raises(ValueError):
        CartanAngles(4, (0.1,))
    with pytest.raises(ValueError):
        cartan_matrices([[0.1, 0.2]], 3)


def test_xi_carries_imaginary_unit():
    a = CartanAngles(4, (0.5, 0.25))
    assert xi((1, 1), a) == pytest.approx(np.exp(0.75j))


@pytest.mark.parametrize("n, count, kind", [(3, 1, "B"), (4, 2, "D"), (5, 4, "B"), (6, 6, "D"), (7, 9, "B")])
def test_root_counts(n, count, kind):
    rs = positive_roots(n)
    assert len(rs.positive) == count
    assert rs.type == kind
    assert rs.rho_consistent()


def test_rho_values():
    assert positive_roots(5).rho == (Fraction(3, 2), Fraction(1, 2))
    assert positive_roots(6).rho == (Fraction(2), Fraction(1), Fraction(0))


def test_denominator_identity():
    # D = prod (xi(alpha/2) - xi(-alpha/2)) = prod 2i sin(<alpha,phi>/2)
    phi = np.array([0.4, 1.3])
    direct = np.prod([np.exp(0.5j * a @ phi) - np.exp(-0.5j * a @ phi) for a in positive_roots(5).positive])
    assert weyl_denominator(phi, 5) == pytest.approx(direct)


@pytest.mark.parametrize("n, order", [(3, 2), (4, 4), (5, 8), (6, 24), (7, 48)])
def test_weyl_group_order(n, order):
    wd = weyl_group_order(n)
    assert wd.order == order
    assert wd.distance < 1e-6
    nu = n // 2
    closed = 2 ** nu * math.factorial(nu) if n % 2 else 2 ** (nu - 1) * math.factorial(nu)
    assert wd.order == closed


def test_so3_closed_form_numerically():
    # (1/2) mean over theta of (1 + 2 cos)^2 * 4 sin^2(theta/2) = 1
    assert weyl_integrate(lambda m: tr(m) ** 2, 3) == pytest.approx(1.0, abs=1e-13)


@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("k", range(5))
def test_torus_matches_group_quadrature(n, k):
    f = lambda m: tr(m) ** k
    assert weyl_integrate(f, n) == pytest.approx(integrate(f, ChartSpec(SO(n))), abs=1e-10)


@pytest.mark.parametrize("k", range(5))
def test_so5_against_moment_tensor(k):
    assert weyl_integrate(lambda m: tr(m) ** k, 5) == pytest.approx(
        integrate_trace_power(ChartSpec(SO(5)), k), abs=1e-10)


def test_class_function_check_warns():
    with pytest.warns(ClassFunctionWarning):
        weyl_integrate(lambda m: m[:, 0, 1].real, 3)


def test_class_function_check_silent_for_class_functions():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        weyl_integrate(lambda m: tr(m) ** 2, 4)


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 6), st.integers(0, 10**6))
def test_denominator_modulus_is_even(n, seed):
    # |D|^2 is invariant under phi -> -phi
    phi = np.random.default_rng(seed).uniform(0, 2 * math.pi, n // 2)
    assert abs(weyl_denominator(phi, n)) == pytest.approx(abs(weyl_denominator(-phi, n)), rel=1e-10, abs=1e-14)


def test_denominator_examples():
    theta = 1.1
    assert weyl_denominator([theta], 3) == pytest.approx(2j * math.sin(theta / 2))
    assert weyl_denominator([0.0, 0.0, 0.0], 7) == 0
    t1, t2 = 0.7, 2.0
    d = weyl_denominator([t1, t2], 4)
    assert abs(d) ** 2 == pytest.approx(16 * math.sin((t1 + t2) / 2) ** 2 * math.sin((t1 - t2) / 2) ** 2)


def test_xi_examples():
    a = CartanAngles(3, (math.pi,))
    assert xi((0,), a) == 1
    assert xi((1,), a) == pytest.approx(-1)
    b = CartanAngles(6, (0.3, 0.9, 2.0))
    assert xi((1, -2, 1), b) * xi((-1, 2, -1), b) == pytest.approx(1, abs=1e-15)


def test_unit_function():
    assert weyl_integrate(lambda m: np.ones(len(m)), 6) == pytest.approx(1.0, abs=1e-12)
