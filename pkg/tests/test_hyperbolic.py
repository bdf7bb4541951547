import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riikit import hyperbolic as hyp

mpmath.mp.dps = 40


def _width_oracle(ell):
    return mpmath.asinh(1 / mpmath.sinh(mpmath.mpf(ell) / 2))


def _injrad_oracle(ell, d):
    ell, d = mpmath.mpf(ell), mpmath.mpf(d)
    return mpmath.asinh(mpmath.cosh(ell / 2) * mpmath.cosh(d) - mpmath.sinh(d))


def test_collar_width_against_high_precision():
    rng = np.random.default_rng(0)
    for ell in np.exp(rng.uniform(math.log(1e-3), math.log(20), 100)):
        assert hyp.collar_width(ell) == pytest.approx(float(_width_oracle(ell)), rel=1e-12, abs=1e-12)


def test_injrad_against_high_precision():
    rng = np.random.default_rng(1)
    for ell in np.exp(rng.uniform(math.log(1e-2), math.log(10), 100)):
        d = rng.uniform(0, 1) * hyp.collar_width(ell)
        assert hyp.injrad_in_collar(ell, d) == pytest.approx(float(_injrad_oracle(ell, d)), rel=1e-12, abs=1e-12)


def test_collar_width_example():
    assert hyp.collar_width(2 * math.asinh(1)) == pytest.approx(math.asinh(1), rel=1e-14)
    assert hyp.collar_width(2.0) == pytest.approx(0.7719368329, abs=1e-10)


@pytest.mark.parametrize("ell", [0.01, 0.5, 1.0, 3.0])
def test_injrad_at_core_is_half_length(ell):
    assert hyp.injrad_in_collar(ell, hyp.collar_width(ell)) == pytest.approx(ell / 2, rel=1e-10)


def test_injrad_at_boundary():
    ell = 1.0
    assert hyp.injrad_in_collar(ell, 0.0) == pytest.approx(math.asinh(math.cosh(0.5)), rel=1e-14)


def test_injrad_derivative():
    ell, d, h = 0.7, 0.9, 1e-6
    x = math.cosh(ell / 2) * math.cosh(d) - math.sinh(d)
    exact = (math.cosh(ell / 2) * math.sinh(d) - math.cosh(d)) / math.sqrt(1 + x * x)
    fd = (hyp.injrad_in_collar(ell, d + h) - hyp.injrad_in_collar(ell, d - h)) / (2 * h)
    assert fd == pytest.approx(exact, abs=1e-8)


def test_injrad_domain():
    with pytest.raises(ValueError):
        hyp.injrad_in_collar(1.0, -0.1)
    with pytest.raises(ValueError):
        hyp.injrad_in_collar(1.0, hyp.collar_width(1.0) + 0.1)
    with pytest.raises(ValueError):
        hyp.collar_width(0.0)


def test_cylinder_modulus():
    assert hyp.modulus(hyp.MetricProfile("cylinder"), 0, 3) == pytest.approx(3.0, abs=1e-12)


@pytest.mark.parametrize("ell", [0.1, 1.0, 4.0])
def test_collar_modulus(ell):
    w = hyp.collar_width(ell)
    got = hyp.modulus(hyp.MetricProfile("collar", ell), -w, w)
    assert got == pytest.approx(hyp.collar_modulus_closed_form(ell), rel=1e-10)


def test_flat_modulus_is_log():
    assert hyp.modulus(hyp.MetricProfile("flat"), 0.25, 1.0) == pytest.approx(math.log(4), rel=1e-12)


def test_curved_moduli():
    a, b = 0.3, 1.7
    hyperbolic = math.log(math.tanh(b / 2) / math.tanh(a / 2))
    spherical = math.log(math.tan(b / 2) / math.tan(a / 2))
    assert hyp.modulus(hyp.MetricProfile("hyperbolic"), a, b) == pytest.approx(hyperbolic, rel=1e-12)
    assert hyp.modulus(hyp.MetricProfile("spherical"), a, b) == pytest.approx(spherical, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(["flat", "spherical", "hyperbolic", "cylinder"]),
       st.floats(0.05, 2.5), st.floats(0.0, 1.0), st.floats(0.05, 2.5))
def test_modulus_is_additive(kind, a, frac, width):
    b = a + width
    if kind == "spherical" and b >= 3.0:
        b = 3.0
    m = a + frac * (b - a)
    p = hyp.MetricProfile(kind)
    assert hyp.modulus(p, a, b) == pytest.approx(hyp.modulus(p, a, m) + hyp.modulus(p, m, b), rel=1e-10)


def test_modulus_errors():
    with pytest.raises(ValueError):
        hyp.modulus(hyp.MetricProfile("flat"), 0.0, 1.0)
    with pytest.raises(ValueError):
        hyp.modulus(hyp.MetricProfile("spherical"), 1.0, 4.0)
    with pytest.raises(ValueError):
        hyp.MetricProfile("collar")
    with pytest.raises(ValueError):
        hyp.MetricProfile("torus")


@pytest.mark.parametrize("K", [-1, 0, 1])
@pytest.mark.parametrize("r", [1e-6, 1e-3, 0.1, 0.5, 1.0, 2.0, 3.0])
def test_conformal_radius_closed_forms(K, r):
    assert hyp.conformal_radius(K, r) == pytest.approx(hyp.conformal_radius_closed_form(K, r), rel=1e-10)


def test_conformal_radius_examples():
    assert hyp.conformal_radius(1, math.pi / 2) == pytest.approx(2.0, rel=1e-12)
    assert hyp.conformal_radius(-1, 2 * math.atanh(0.25)) == pytest.approx(0.5, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-5, 3.1))
def test_conformal_radius_comparison(r):
    assert hyp.conformal_radius(1, r) >= r * (1 - 1e-13)
    assert hyp.conformal_radius(-1, r) <= r * (1 + 1e-13)


@pytest.mark.parametrize("kappa", [0.1, 1.0, 5.0])
def test_hyperbolic_constant_is_attained_at_kappa(kappa):
    c = hyp.hyperbolic_radius_constant(kappa)
    rs = np.linspace(1e-3, kappa, 200)
    assert min(hyp.conformal_radius(-1, float(r)) / r for r in rs) == pytest.approx(c, rel=1e-10)
    assert c == pytest.approx(2 * math.tanh(kappa / 2) / kappa, rel=1e-10)


def test_conformal_radius_domain():
    for K, r in [(1, math.pi), (0, 0.0), (2, 1.0), (-1, -1.0)]:
        with pytest.raises(ValueError):
            hyp.conformal_radius(K, r)


def test_ratio_at_collar_centre():
    # the core injectivity radius is computed through a cancelling difference
    for ell in (0.01, 1.0, 10.0):
        assert hyp.collar_ratio(ell, 0.0) == pytest.approx(1 / math.pi, rel=1e-10)


def test_ratio_scan_lower_bound():
    ells = np.geomspace(1e-3, 2 * math.asinh(1), 200)
    fracs = np.linspace(-1, 1, 201)
    scan = hyp.injrad_ratio_scan(ells, fracs)
    assert scan.min_ratio >= 1 / math.pi - 1e-9
    assert scan.max_ratio >= scan.min_ratio


def test_ratio_scan_rows_and_errors():
    scan = hyp.injrad_ratio_scan([1.0], [0.0, 0.5], keep_rows=True)
    assert len(scan.rows) == 2
    with pytest.raises(ValueError):
        hyp.injrad_ratio_scan([1.0], [1.5])
    with pytest.raises(ValueError):
        hyp.injrad_ratio_scan([], [0.0])


def test_straight_geodesic_is_tame():
    res = hyp.is_k_tame([(0.0, 0.0), (5.0, 0.0)], 1.0, 5.0)
    assert res.tame and res.worst_ratio == pytest.approx(1 / (2 * math.pi))


@pytest.mark.parametrize("m", [1, 3, 6])
def test_helix_tameness(m):
    pts = hyp.helix(m, length=1.0)
    res = hyp.is_k_tame(pts, m + 1, 1.0)
    assert res.tame
    assert not hyp.is_k_tame(pts, m - 0.5, 1.0).tame
    assert res.worst_ratio == pytest.approx(math.hypot(1, 2 * math.pi * m) / (2 * math.pi), rel=1e-9)


def test_geodesic_leaving_cylinder():
    with pytest.raises(ValueError):
        hyp.is_k_tame([(0.0, 0.0), (2.0, 0.0)], 1.0, 1.0)


def _graph(lengths):
    return hyp.BridgeGraph(tuple(range(len(lengths))), np.asarray(lengths, dtype=float))


def _random_complete(seed, n=5):
    rng = np.random.default_rng(seed)
    L = rng.uniform(0.1, 5.0, (n, n))
    L = np.triu(L, 1)
    return L + L.T


def _spanning(n, edges):
    ds = list(range(n))

    def find(x):
        while ds[x] != x:
            x = ds[x]
        return x

    for i, j in edges:
        ri, rj = find(i), find(j)
        if ri == rj:
            return False
        ds[ri] = rj
    return True


def _brute_force_minimum(L):
    n = len(L)
    pairs = list(itertools.combinations(range(n), 2))
    trees = [t for t in itertools.combinations(pairs, n - 1) if _spanning(n, t)]
    return trees, min(sum(L[i, j] for i, j in t) for t in trees)


def test_triangle():
    g = _graph([[0, 1, 3], [1, 0, 2], [3, 2, 0]])
    res = hyp.admissible_chain(g, 0, 2)
    assert res.tree == ((0, 1), (1, 2)) and res.path == (0, 1, 2)


def test_k5_brute_force():
    for seed in range(20):
        L = _random_complete(seed)
        trees, best = _brute_force_minimum(L)
        assert len(trees) == 125
        tree = hyp.minimum_spanning_tree(_graph(L))
        assert sum(L[i, j] for i, j in tree) == pytest.approx(best, rel=1e-14)


def test_ties_are_broken_by_index():
    L = np.ones((4, 4))
    assert hyp.minimum_spanning_tree(_graph(L)) == [(0, 1), (0, 2), (0, 3)]


def test_disconnected():
    inf = math.inf
    g = _graph([[0, 1, inf], [1, 0, inf], [inf, inf, 0]])
    with pytest.raises(hyp.DisconnectedGraph):
        hyp.admissible_chain(g, 0, 2)


def test_bad_graphs():
    with pytest.raises(ValueError):
        _graph([[0, 1], [2, 0]])
    with pytest.raises(ValueError):
        _graph([[0, -1], [-1, 0]])
    g = _graph(_random_complete(0, 3))
    with pytest.raises(ValueError):
        hyp.admissible_chain(g, 0, 0)
    with pytest.raises(ValueError):
        hyp.admissible_chain(g, 0, 9)


def test_exchange_oracle_detects_bad_trees():
    g = _graph(_random_complete(3))
    assert hyp.admissible_chain(g, 0, 4, hyp.shorter_bridge_oracle(g)).exchange_ok
    assert not hyp.admissible_chain(g, 0, 4, lambda e, f: True).exchange_ok


def test_named_vertices():
    g = hyp.BridgeGraph(("a", "b", "c"), np.array([[0, 2, 1], [2, 0, 1], [1, 1, 0.0]]))
    assert hyp.admissible_chain(g, "a", "b").path == ("a", "c", "b")


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 9))
def test_cut_property(seed, n):
    L = _random_complete(seed, n)
    g = _graph(L)
    tree = hyp.minimum_spanning_tree(g)
    res = hyp.admissible_chain(g, 0, n - 1, hyp.shorter_bridge_oracle(g))
    assert res.exchange_ok and len(tree) == n - 1 and _spanning(n, tree)
    assert res.path[0] == 0 and res.path[-1] == n - 1
    on_path = set(zip(res.path[:-1], res.path[1:]))
    assert all((min(e), max(e)) in set(tree) for e in on_path)
