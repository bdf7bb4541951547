import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riikit import holomorphic as hol


def _root_oracle(a):
    """Inner radius by mpmath bisection at 50 digits."""
    with mpmath.workdps(50):
        a = mpmath.mpf(a)
        lo, hi = mpmath.mpf(0), mpmath.mpf(1)
        for _ in range(200):
            mid = (lo + hi) / 2
            if a * a * mid ** 6 + mid ** 4 - a * a < 0:
                lo = mid
            else:
                hi = mid
        return lo


def test_inner_radius_at_one():
    assert hol.solve_inner_radius(1.0) == pytest.approx(0.8688369618327093, abs=1e-14)
    assert hol.solve_inner_radius(1.0) == pytest.approx(float(_root_oracle(1)), abs=1e-14)


@pytest.mark.parametrize("a", [1e-3, 0.1, 1.0, 10.0, 1e3, 1e6])
def test_inner_radius_matches_high_precision(a):
    m = hol.AnnulusMap(a)
    exact = _root_oracle(a)
    assert m.r_inner == pytest.approx(float(exact), abs=2e-16)
    assert m.gap == pytest.approx(float(1 - exact), rel=1e-10)


@pytest.mark.parametrize("a", [0.1, 1.0, 10.0])
def test_defining_equation_residual(a):
    assert abs(hol.AnnulusMap(a).residual) < 1e-12


def test_inner_radius_tends_to_one():
    assert hol.solve_inner_radius(1000.0) > 0.999
    assert hol.solve_inner_radius(1e6) > 1 - 1e-3


def test_nonpositive_a_rejected():
    for bad in (0.0, -1.0, math.nan, math.inf):
        with pytest.raises(ValueError):
            hol.AnnulusMap(bad)


@pytest.mark.parametrize("a", [0.5, 1.0, 5.0, 50.0])
def test_area_is_two_pi(a):
    m = hol.AnnulusMap(a)
    assert hol.area(m) == pytest.approx(2 * math.pi, abs=1e-8)
    assert hol.area_closed_form(m) == pytest.approx(2 * math.pi, abs=1e-8)


@pytest.mark.parametrize("a", [1e-2, 1e-4, 1e-6])
def test_area_as_a_vanishes(a):
    assert hol.area(hol.AnnulusMap(a)) == pytest.approx(2 * math.pi, abs=1e-6)


def test_area_against_independent_quadrature():
    m = hol.AnnulusMap(2.0)
    with mpmath.workdps(30):
        a2 = mpmath.mpf(4)
        inner = mpmath.mpf(m.r_inner)
        radial = mpmath.quad(lambda r: (2 * a2 + 4 * a2 / r ** 6) * r, [inner, 1])
    assert hol.area(m) == pytest.approx(float(2 * mpmath.pi * radial), abs=1e-10)


def test_boundary_lengths():
    m = hol.AnnulusMap(1.0)
    lens = hol.boundary_length(m)
    closed = hol.boundary_length_closed_form(m)
    assert lens["outer"] == pytest.approx(2 * math.pi * math.sqrt(6), abs=1e-10)
    assert lens["outer"] == pytest.approx(15.3906, abs=1e-4)
    assert lens["inner"] == pytest.approx(closed["inner"], abs=1e-10)
    assert hol.boundary_length(hol.AnnulusMap(2.0))["outer"] == pytest.approx(2 * lens["outer"], rel=1e-14)


def test_length_over_area_is_unbounded():
    ratios = []
    for a in (1.0, 10.0, 100.0, 1000.0):
        m = hol.AnnulusMap(a)
        lens = hol.boundary_length(m)
        ratios.append((lens["outer"] + lens["inner"]) / hol.area(m))
        assert ratios[-1] >= a * math.sqrt(6) / (2 * math.pi) * 2 * math.pi / (2 * math.pi) * 0.99
    assert all(x < y for x, y in zip(ratios, ratios[1:]))
    assert ratios[-1] > 1000


@pytest.mark.parametrize("a", [0.5, 1.0, 5.0, 50.0, 500.0])
def test_fiber_residuals(a):
    m = hol.AnnulusMap(a)
    assert hol.fiber_residual(m, "outer") < 1e-9
    assert hol.fiber_residual(m, "inner") < 1e-9


@pytest.mark.parametrize("a", [0.5, 1.0, 5.0])
def test_fiber_residuals_tight(a):
    m = hol.AnnulusMap(a)
    assert hol.fiber_residual(m, "outer") < 1e-12
    assert hol.fiber_residual(m, "inner") < 1e-10


def test_perturbation_is_detected():
    m = hol.AnnulusMap(1.0)
    assert hol.fiber_residual(m, "outer", coefficients=(1.0, 1.0 + 1e-6, 1.0)) > 1e-7


def test_float_moment_map_agrees_at_moderate_a():
    m = hol.AnnulusMap(1.0)
    z = np.exp(1j * np.linspace(0, 2 * np.pi, 50))
    assert np.max(hol.OUTER_FIBER.residual(m(z))) < 1e-13


def test_cauchy_riemann():
    for a in (0.5, 1.0, 50.0):
        assert hol.cauchy_riemann_residual(hol.AnnulusMap(a)) < 1e-12


def test_cauchy_riemann_against_finite_differences():
    m = hol.AnnulusMap(1.0)
    z0 = 0.93 * np.exp(0.4j)
    h = 1e-6
    du_dx = (m(z0 + h) - m(z0 - h)) / (2 * h)
    du_dy = (m(z0 + 1j * h) - m(z0 - 1j * h)) / (2 * h)
    assert np.max(np.abs(du_dy - 1j * du_dx)) < 1e-8
    assert np.max(np.abs(du_dx - m.derivative(z0))) < 1e-8


def test_log_density_field():
    m = hol.AnnulusMap(10.0)
    f = hol.boundary_log_density(m, 32)
    assert f.n_components == 2
    assert set(f.values(0)) == {f.values(0)[0]}
    assert set(f.values(1)) == {f.values(1)[0]}
    assert f.values(0)[0] == pytest.approx(math.log(10 * math.sqrt(6)), abs=1e-14)
    assert float(f.component(1).length) == pytest.approx(2 * math.pi * m.r_inner)


def test_log_density_partition_is_one_class_per_circle():
    from riikit.hypograph import PartitionParams, thick_thin_partition
    f = hol.boundary_log_density(hol.AnnulusMap(10.0), 16)
    p = thick_thin_partition(f, PartitionParams(t_min=float(f.xi)))
    assert len(p.classes) == 2 and p.thin_necks == ()


def test_uniform_density_gives_one_over_pi():
    f = hol.EnergyDensityField(np.full((200, 200), 2.0), 0.01, 0.01, periodic=False)
    r = hol.check_thick_thin(f, delta1=10.0)
    assert r.disks_tested > 0
    assert r.empirical_c1 == pytest.approx(1 / math.pi, rel=0.05)


def test_zero_density():
    f = hol.EnergyDensityField(np.zeros((100, 100)), 0.01, 0.01)
    r = hol.check_thick_thin(f, c1=1.0)
    assert r.empirical_c1 == 0 and r.gradient_violations == 0


def test_coarse_grid_rejected():
    with pytest.raises(ValueError):
        hol.check_thick_thin(hol.EnergyDensityField(np.ones((6, 6)), 1.0, 1.0))


def test_annulus_density_report_is_finite():
    m = hol.AnnulusMap(1.0)
    field = hol.annulus_density_field(m)
    assert field.total == pytest.approx(2 * math.pi, rel=1e-4)
    r = hol.check_thick_thin(field)
    assert math.isfinite(r.empirical_c1) and r.empirical_c1 > 0


def test_cylinder_decay_is_fitted_for_long_light_cylinders():
    # exponential profile along a long cylinder: decay rate is known
    rows, cols = 400, 64
    s = (np.arange(rows) + 0.5) * 0.05
    dens = 1e-4 * np.exp(-np.minimum(s, s[-1] - s))[:, None] * np.ones((1, cols))
    f = hol.EnergyDensityField(dens, 0.05, 2 * np.pi / cols)
    r = hol.check_thick_thin(f, cylinder_splits=4, c2=1.0)
    assert r.decay and all(d.modulus > 2 for d in r.decay)
    assert all(d.exponent > 0 for d in r.decay)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 50.0), st.floats(0.0, 1.0), st.floats(0.0, 2 * math.pi))
def test_density_times_area_is_conformally_invariant(a, frac, theta):
    m = hol.AnnulusMap(a)
    rho = math.exp(frac * math.log(m.r_inner))
    z = rho * complex(math.cos(theta), math.sin(theta))
    planar = float(np.sum(np.abs(m.derivative(z)) ** 2))
    # z = exp(-s + i theta) has |dz/dw| = |z|; the cell area shrinks by |z|^2
    cylinder = float(m.speed_squared(rho)) * rho ** 2
    assert cylinder == pytest.approx(planar * abs(z) ** 2, rel=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-3, 1e3))
def test_area_is_constant_property(a):
    assert hol.area(hol.AnnulusMap(a)) == pytest.approx(2 * math.pi, abs=1e-6)


def test_density_json_round_trip(tmp_path):
    f = hol.annulus_density_field(hol.AnnulusMap(1.0), rows=8, cols=16)
    path = tmp_path / "d.json"
    f.dump(path)
    import json
    g = hol.EnergyDensityField.from_dict(json.loads(path.read_text()))
    assert np.array_equal(g.values, f.values) and g.dr == f.dr
