import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riikit import integral_geometry as ig


def _random_rotation(seed, dim=3):
    q, r = np.linalg.qr(np.random.default_rng(seed).standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def test_line_meets_generic_hyperplane_once():
    line = ig.line()
    rng = np.random.default_rng(1)
    for _ in range(200):
        v = rng.standard_normal(3)
        assert ig.count_intersections(line, v / np.linalg.norm(v)) == 1


def test_curve_away_from_hyperplane_has_no_crossings():
    small = ig.conic(256, t=0.01)  # circle of angular radius ~0.1 about e2
    assert ig.count_intersections(small, np.array([0.0, 0.0, 1.0])) == 0


def test_vertex_on_hyperplane_is_degenerate():
    with pytest.raises(ig.DegenerateIncidence):
        ig.count_intersections(ig.line(), np.array([0.0, 0.0, 1.0]))


def test_line_length_is_one():
    assert ig.normalized_length(ig.line(360)) == pytest.approx(1.0, abs=1e-4)


def test_half_line_length_is_half():
    assert ig.normalized_length(ig.line(180, fraction=0.5)) == pytest.approx(0.5, abs=1e-4)


def test_conic_length_matches_quadrature():
    def speed(theta):
        p = mpmath.matrix([mpmath.cos(theta), mpmath.sin(theta), 1]) / mpmath.sqrt(2)
        dp = mpmath.matrix([mpmath.diff(lambda s: p_i(s, k), theta) for k in range(3)])
        return mpmath.norm(dp)

    def p_i(s, k):
        return [mpmath.cos(s), mpmath.sin(s), 1][k] / mpmath.sqrt(2)

    exact = mpmath.quad(speed, [0, mpmath.pi, 2 * mpmath.pi]) / mpmath.pi
    assert ig.normalized_length(ig.conic()) == pytest.approx(float(exact), abs=1e-6)


@pytest.mark.parametrize("t", [1e-4, 0.01, 0.5, 1.0, 4.0])
def test_conic_family_length(t):
    assert ig.normalized_length(ig.conic(4096, t)) == pytest.approx(2 * math.sqrt(t / (1 + t)), abs=1e-6)


def test_conic_counts_never_exceed_two():
    est = ig.crofton_length(ig.conic(), 10_000, seed=3)
    assert est.counts.max() <= 2


def test_cubic_counts_never_exceed_three():
    est = ig.crofton_length(ig.rational_cubic(), 10_000, seed=4)
    assert est.counts.max() <= 3
    assert est.mean <= 3 + 3 * est.std_error


def test_line_estimate_is_exact():
    est = ig.crofton_length(ig.line(), 10_000, seed=0)
    assert est.mean == 1.0 and est.std_error == 0.0


def test_conic_estimate_agrees_with_length():
    est = ig.crofton_length(ig.conic(), 100_000, seed=11)
    assert abs(est.mean - est.exact_length) <= 3 * est.std_error


def test_determinism():
    a = ig.crofton_length(ig.conic(512), 5000, seed=42)
    b = ig.crofton_length(ig.conic(512), 5000, seed=42)
    assert a == b and np.array_equal(a.counts, b.counts)


def test_rotation_invariance():
    c = ig.conic(1024)
    a = ig.crofton_length(c, 50_000, seed=5)
    b = ig.crofton_length(c.transformed(_random_rotation(9)), 50_000, seed=6)
    assert abs(a.mean - b.mean) < 3 * math.hypot(a.std_error, b.std_error)


def test_standard_error_scales_like_inverse_root():
    c = ig.conic(1024)
    errs = [ig.crofton_length(c, n, seed=1).std_error for n in (1_000, 10_000, 100_000)]
    for small, big in zip(errs, errs[1:]):
        assert 0.5 < (small / big) / math.sqrt(10) < 2


def test_too_few_samples():
    with pytest.raises(ValueError):
        ig.crofton_length(ig.line(), 99, seed=0)


def test_line_disk_is_equality_case():
    r = ig.verify_projective_rii(ig.line(), 1)
    assert r.lhs == 1 and r.rhs == pytest.approx(1.0, abs=1e-4) and r.passed


def test_shrinking_conics_keep_degree_but_lose_length():
    for t in (1.0, 1e-2, 1e-4):
        r = ig.verify_projective_rii(ig.conic(4096, t), 2)
        assert r.lhs == 2 and r.passed
    assert ig.verify_projective_rii(ig.conic(4096, 1e-6), 2).rhs < 1e-2


def test_cubic_passes():
    assert ig.verify_projective_rii(ig.rational_cubic(), 3).passed


def test_nonpositive_degree():
    with pytest.raises(ValueError):
        ig.verify_projective_rii(ig.line(), 0)


def test_curve_validation():
    with pytest.raises(ig.CurveError):
        ig.ProjectiveCurve(np.array([[1.0, 0, 0], [0, 2.0, 0]]))
    with pytest.raises(ig.CurveError):
        ig.ProjectiveCurve(np.array([[1.0, 0, 0], [np.nan, 0, 0]]))
    with pytest.raises(ig.CurveError):
        ig.ProjectiveCurve(np.array([[1.0, 0, 0], [0, 1.0, 0]]), closed=False)


def test_sign_alignment():
    pts = np.array([[1.0, 0, 0], [-math.cos(0.1), -math.sin(0.1), 0]])
    c = ig.ProjectiveCurve(pts, closed=False)
    assert c.points[1] @ c.points[0] > 0
    assert ig.normalized_length(c) == pytest.approx(0.1 / math.pi)


def test_json_round_trip(tmp_path):
    c = ig.conic(64)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(c.to_dict()))
    back = ig.load_curve(path)
    assert np.array_equal(back.points, c.points) and back.closed


def test_unknown_builtin():
    with pytest.raises(ig.CurveError):
        ig.builtin("quartic")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_length_is_rotation_invariant(seed):
    c = ig.rational_cubic(512)
    assert ig.normalized_length(c.transformed(_random_rotation(seed))) == pytest.approx(ig.normalized_length(c),
                                                                                        abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(3, 40))
def test_closed_curves_in_plane_cross_lines_evenly(seed, n):
    # a small closed loop around a point never winds around RP^2, so crossings come in pairs
    rng = np.random.default_rng(seed)
    theta = np.sort(rng.uniform(0, 2 * np.pi, n))
    rad = rng.uniform(0.05, 0.4, n)
    pts = np.column_stack([rad * np.cos(theta), rad * np.sin(theta), np.ones(n)])
    c = ig.ProjectiveCurve(pts / np.linalg.norm(pts, axis=1, keepdims=True))
    v = rng.standard_normal(3)
    assert ig.count_intersections(c, v / np.linalg.norm(v)) % 2 == 0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_single_count_matches_batch(seed):
    c = ig.conic(300)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    dots = c.points @ v
    signs = np.sign(np.append(dots, c.closing_sign * dots[0]))
    assert ig.count_intersections(c, v) == int(np.sum(signs[:-1] != signs[1:]))
