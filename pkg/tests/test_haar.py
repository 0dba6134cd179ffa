import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from haarlab import (
    SO,
    SU,
    ChartSpec,
    CostCapExceeded,
    GroupElement,
    HaarSampler,
    NonFiniteIntegrandError,
    QuadratureSpec,
    conjugation_average,
    integrate,
    integrate_trace_power,
    mean_axioms_report,
    moment_tensor,
    monte_carlo,
    sample,
    so_total_volume,
    validate,
)
from haarlab.haar import box_volume, grid_size, haar_grid, polynomial_battery


def tr(m):
    return np.trace(m, axis1=-2, axis2=-1)


@pytest.mark.parametrize("group", ["so:2", "so:3", "so:4", "su:2", "su:3"])
def test_normalised(group):
    assert integrate(lambda m: np.ones(len(m)), group) == pytest.approx(1.0, abs=1e-12)


# Known trace moments: SO(2) gives central binomials, SO(3) counts
# trivial summands of tensor powers of the vector rep.
@pytest.mark.parametrize(
    "n, expected",
    [(2, [1, 0, 2, 0, 6]), (3, [1, 0, 1, 1, 3]), (4, [1, 0, 1, 0, 4])],
)
def test_so_trace_moments(n, expected):
    for k, want in enumerate(expected):
        assert integrate(lambda m: tr(m).real ** k, ChartSpec(SO(n))) == pytest.approx(want, abs=1e-10)


def test_su2_catalan_moments():
    for k, catalan in [(1, 1), (2, 2), (3, 5)]:
        assert integrate(lambda m: np.abs(tr(m)) ** (2 * k), "su:2") == pytest.approx(catalan, abs=1e-10)


def test_su3_trace_norm():
    assert integrate(lambda m: np.abs(tr(m)) ** 2, "su:3") == pytest.approx(1.0, abs=1e-6)


def test_alt_chart_agrees():
    f = lambda m: (m[:, 0, 0] * m[:, 1, 1] + m[:, 0, 2] ** 2).real ** 2
    a = integrate(f, ChartSpec(SO(3)))
    b = integrate(f, ChartSpec(SO(3), "alt"))
    assert a == pytest.approx(b, abs=1e-12)


def test_moment_tensor_charts_agree():
    a = moment_tensor(ChartSpec(SO(4)), 2)
    b = moment_tensor(ChartSpec(SO(4), "alt"), 2)
    assert np.max(np.abs(a - b)) < 1e-12


def test_moment_tensor_second_order():
    # int r_ab r_cd = delta_ac delta_bd / n, rows (a, c) and columns (b, d)
    n = 3
    t = moment_tensor(ChartSpec(SO(n)), 2)
    eye = np.eye(n)
    want = np.einsum("ac,bd->acbd", eye, eye) / n
    assert np.allclose(t.reshape(n, n, n, n), want, atol=1e-13)


def test_trace_power_so5():
    # SO(5): E tr^2 = 1, E tr^4 = 3 (Gaussian range)
    spec = ChartSpec(SO(5))
    assert integrate_trace_power(spec, 2) == pytest.approx(1.0, abs=1e-10)
    assert integrate_trace_power(spec, 4) == pytest.approx(3.0, abs=1e-10)


def test_box_volume():
    assert box_volume("so:3") == pytest.approx(so_total_volume(3), rel=1e-12)


def test_non_finite_integrand():
    with pytest.raises(NonFiniteIntegrandError):
        integrate(lambda m: np.full(len(m), np.nan), "so:3")


def test_cost_cap():
    q = QuadratureSpec(32)
    assert grid_size("so:6", q) == 32 ** 15
    with pytest.raises(CostCapExceeded):
        integrate(lambda m: m[:, 0, 0].real, "so:6", q)
    with pytest.raises(CostCapExceeded):
        haar_grid("so:4", q)


def test_grid_weights():
    g = haar_grid("so:3", QuadratureSpec(6, periodic_nodes=4))
    assert g.weights.sum() == pytest.approx(1.0)
    assert g.points.shape == (len(g.weights), 3, 3)


def test_scalar_integrand_path():
    v = integrate(lambda g: float(np.trace(g.matrix) ** 2), "so:3", QuadratureSpec(8, periodic_nodes=6), vectorized=False)
    assert v == pytest.approx(1.0, abs=1e-6)


def test_vector_valued_integrand():
    out = integrate(lambda m: np.stack([np.ones(len(m)), tr(m).real ** 2], axis=-1), "so:3")
    assert np.allclose(out, [1.0, 1.0])


def test_conjugation_average_is_class_average():
    # averaging r_11 over conjugates of g gives tr(g)/n
    g = GroupElement(np.diag([1.0, -1.0, -1.0]), SO(3))
    assert conjugation_average(lambda m: m[:, 0, 0].real, g, "so:3") == pytest.approx(-1 / 3, abs=1e-12)


class TestSampler:
    def test_deterministic(self):
        a = HaarSampler("so:3", 11).sample_batch(50)
        b = HaarSampler("so:3", 11).sample_batch(50)
        c = HaarSampler("so:3", 12).sample_batch(50)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_spawn_is_reproducible_and_distinct(self):
        kids1 = HaarSampler("su:2", 3).spawn(3)
        kids2 = HaarSampler("su:2", 3).spawn(3)
        draws = [k.sample_batch(4) for k in kids1]
        assert all(np.array_equal(d, k.sample_batch(4)) for d, k in zip(draws, kids2))
        assert not np.array_equal(draws[0], draws[1])

    @pytest.mark.parametrize("group", ["so:3", "so:4", "su:2", "su:3"])
    def test_samples_are_members(self, group):
        s = HaarSampler(group, 0)
        assert validate(sample(s))
        for m in s.sample_batch(20):
            assert validate(GroupElement(m, s.group))

    def test_angles_in_range(self):
        s = HaarSampler("so:4", 1)
        x = s.angles(1000)
        for i, p in enumerate(s.chart.params):
            assert np.all((x[:, i] >= p.lo) & (x[:, i] <= p.hi))

    @pytest.mark.parametrize("group, want", [("so:3", 1 / 3), ("su:2", 1 / 2), ("so:4", 1 / 4)])
    def test_first_entry_second_moment(self, group, want):
        mean, err = monte_carlo(lambda m: np.abs(m[:, 0, 0]) ** 2, HaarSampler(group, 4), 200_000)
        assert abs(mean - want) < 4 * err

    def test_entry_distribution(self):
        # for SO(3), r_11 is uniform on [-1, 1] (Archimedes)
        m = HaarSampler("so:3", 9).sample_batch(20_000)
        assert stats.kstest(m[:, 0, 0].real, stats.uniform(-1, 2).cdf).pvalue > 1e-3

    def test_su2_trace_distribution(self):
        # tr/2 = cos(theta) with density (2/pi) sin^2 on [0, pi]
        t = np.arccos(np.clip(HaarSampler("su:2", 2).sample_batch(20_000).trace(axis1=1, axis2=2).real / 2, -1, 1))
        cdf = lambda x: (x - np.sin(x) * np.cos(x)) / math.pi
        assert stats.kstest(t, cdf).pvalue > 1e-3


@pytest.mark.parametrize("group", ["so:3", "su:2"])
def test_mean_axioms(group):
    rep = mean_axioms_report(group, seed=3)
    assert set(rep.residuals) == set(range(1, 8))
    assert rep.passed()


def test_battery_size():
    assert len(polynomial_battery(SO(3))) == 10


def test_mean_axioms_detect_bad_functional():
    # a non-invariant quadrature (too few nodes) must break translation invariance
    rep = mean_axioms_report("so:3", QuadratureSpec(2, periodic_nodes=2), seed=1, compare_alt=False)
    assert not rep.passed()


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_left_translation_invariance(seed):
    a = HaarSampler("so:3", seed).sample()
    f = lambda m: (m[:, 0, 1] * m[:, 2, 2]).real ** 2 + m[:, 1, 0].real
    base = integrate(f, "so:3")
    moved = integrate(lambda m: f(a.entries @ m), "so:3")
    assert moved == pytest.approx(base, abs=1e-10)


def test_entry_mean_vanishes():
    assert abs(integrate(lambda m: m[:, 0, 0].real, "so:3")) < 1e-10


def test_conjugation_average_fixes_class_functions():
    g = HaarSampler("so:3", 21).sample()
    f = lambda m: tr(m).real ** 2
    assert conjugation_average(f, g, "so:3") == pytest.approx(float(np.trace(g.matrix) ** 2), abs=1e-8)


def test_conjugation_average_su2_against_monte_carlo():
    g = HaarSampler("su:2", 22).sample().entries
    f = lambda m: np.abs(m[:, 0, 0]) ** 2
    exact = conjugation_average(f, GroupElement(g, SU(2)), "su:2")
    mean, err = monte_carlo(lambda v: f(v @ g @ np.conj(np.swapaxes(v, -1, -2))), HaarSampler("su:2", 23), 10**6)
    assert abs(exact - mean) < 3 * err
