import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haarlab import (
    SO,
    SU,
    ChartSpec,
    HaarSampler,
    NumericalResolutionError,
    Poly,
    PolyForm,
    QuadratureSpec,
    invariant_basis,
    invariant_dimension,
    invariant_project,
    planar_rotation,
    symmetric_power_action,
)
from haarlab.invariants import (
    coefficient_action,
    monomials,
    multinomials,
    num_monomials,
    unitary_symmetric_power_action,
)

SO3 = ChartSpec(SO(3))


def test_monomial_order():
    assert monomials(3, 2) == ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
    assert num_monomials(4, 3) == math.comb(6, 3)
    assert multinomials(2, 2).tolist() == [1, 2, 1]


def test_power_action_on_monomials():
    # x -> g x substituted into x_1 x_2 for g = diag(2, 3)
    p = symmetric_power_action(np.diag([2.0, 3.0]), 2)
    assert np.allclose(np.diag(p), [4, 6, 9])


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["so:3", "su:2", "su:3"]), st.integers(1, 3), st.integers(0, 10**6))
def test_power_action_is_homomorphism(group, p, seed):
    g, h = HaarSampler(group, seed).sample_batch(2)
    lhs = symmetric_power_action(g @ h, p)
    rhs = symmetric_power_action(g, p) @ symmetric_power_action(h, p)
    assert np.allclose(lhs, rhs, atol=1e-12)
    u = unitary_symmetric_power_action(g, p)
    assert np.allclose(u @ u.conj().T, np.eye(len(u)), atol=1e-12)


def test_batch_action_matches_single():
    mats = HaarSampler("so:3", 1).sample_batch(4)
    batch = symmetric_power_action(mats, 2)
    assert np.allclose(batch[2], symmetric_power_action(mats[2], 2))


def test_transformed_form():
    rng = np.random.default_rng(0)
    g = HaarSampler("so:3", 2).sample()
    form = PolyForm(3, 2, tuple(rng.normal(size=6)))
    x = rng.normal(size=3)
    moved = form.transformed(g)
    assert moved(x) == pytest.approx(form(np.linalg.inv(g.matrix) @ x))


def test_coefficient_action_inverse_transpose():
    g = HaarSampler("su:2", 5).sample()
    a = coefficient_action(g, 3)
    p = symmetric_power_action(g.entries, 3)
    assert np.allclose(a, np.linalg.inv(p.T))


def test_poly_arithmetic():
    a = [Poly.variable(2, j) for j in range(2)]
    f = (a[0] + a[1]) * (a[0] - a[1])
    assert f(np.array([3.0, 2.0])) == pytest.approx(5.0)
    assert f.format() == "a1^2 + -1*a2^2"
    assert (f - f).format() == "0"
    assert (2 + a[0]).degree == 1


def test_substitute():
    f = Poly.variable(2, 0) * Poly.variable(2, 1)
    swapped = f.substitute(np.array([[0, 1], [1, 0]]))
    assert swapped.allclose(f)
    doubled = f.substitute(2 * np.eye(2))
    assert doubled.allclose(4 * f)


def test_project_first_coefficient():
    form = PolyForm(3, 2)
    got = invariant_project(Poly.variable(6, 0), form, SO3)
    want = (Poly.variable(6, 0) + Poly.variable(6, 3) + Poly.variable(6, 5)) * (1 / 3)
    assert got.max_abs_diff(want) < 1e-8


def test_projection_is_idempotent_and_invariant():
    form = PolyForm(3, 2)
    a = [Poly.variable(6, j) for j in range(6)]
    f = a[0] * a[1] + a[4] * a[4] + a[2]
    once = invariant_project(f, form, SO3)
    twice = invariant_project(once, form, SO3)
    assert once.max_abs_diff(twice) < 1e-10
    g = HaarSampler("so:3", 8).sample()
    assert once.substitute(coefficient_action(g, 2)).max_abs_diff(once) < 1e-10


@pytest.mark.parametrize(
    "spec, n, p, r, want",
    [
        (SO3, 3, 2, 1, 1),
        (SO3, 3, 1, 1, 0),
        (SO3, 3, 1, 2, 1),
        (SO3, 3, 2, 2, 2),
        (SO3, 3, 2, 3, 3),
        (SO3, 3, 1, 3, 0),
        (SO3, 3, 1, 4, 1),
        (ChartSpec(SU(2)), 2, 2, 1, 0),
        (ChartSpec(SU(2)), 2, 2, 2, 1),
        (ChartSpec(SU(2)), 2, 4, 2, 1),
    ],
)
def test_invariant_dimension(spec, n, p, r, want):
    c = invariant_dimension(n, p, r, spec)
    assert c.count == want
    assert c.distance < 1e-3


def test_su2_quartic_cubic_invariant():
    # degree 12 in the entries needs more than the default 12 periodic nodes
    spec = ChartSpec(SU(2))
    with pytest.raises(NumericalResolutionError):
        invariant_dimension(2, 4, 3, spec)
    assert invariant_dimension(2, 4, 3, spec, QuadratureSpec(20, periodic_nodes=16)).count == 1


def test_resolution_error_on_coarse_rule():
    with pytest.raises(NumericalResolutionError):
        invariant_dimension(3, 2, 3, SO3, QuadratureSpec(2, periodic_nodes=2))


def test_basis_quadratic():
    basis = invariant_basis(3, 2, 1, SO3)
    assert len(basis) == 1
    assert basis[0].format() == "a1 + a4 + a6"


def test_basis_vectors_are_invariant():
    basis = invariant_basis(3, 2, 2, SO3)
    assert len(basis) == 2
    g = HaarSampler("so:3", 4).sample()
    for b in basis:
        assert b.substitute(coefficient_action(g, 2)).max_abs_diff(b) < 1e-9


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        invariant_dimension(2, 2, 1, SO3)


def test_quarter_turn_substitution():
    # (x, y) -> (-y, x): x^2 -> y^2, xy -> -xy, y^2 -> x^2
    g = planar_rotation(1, 2, math.pi / 2, 2)
    p = symmetric_power_action(g, 2)
    assert np.allclose(p, [[0, 0, 1], [0, -1, 0], [1, 0, 0]], atol=1e-15)


def test_identity_action():
    assert np.allclose(symmetric_power_action(np.eye(3), 3), np.eye(10))


def test_constant_projects_to_itself():
    out = invariant_project(Poly.constant(6, 2.5), PolyForm(3, 2), SO3)
    assert out.max_abs_diff(Poly.constant(6, 2.5)) < 1e-12


def test_linear_functionals_project_to_trace():
    form = PolyForm(3, 2)
    trace = Poly.variable(6, 0) + Poly.variable(6, 3) + Poly.variable(6, 5)
    for j in range(6):
        out = invariant_project(Poly.variable(6, j), form, SO3)
        c = out.part(1)
        scale = c[0]
        assert out.max_abs_diff(trace * scale) < 1e-10
