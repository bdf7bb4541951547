"""Randomized checks of the order, slice and counting properties on one field."""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .field import ESegment, Order, PiecewiseScalarField, compare_segments, e_segment, segment_leq
from .forest import induced_forest, is_stable, leaves, stable_forest_reduce
from .levels import StepThreshold
from .thick import EXACT, PartitionParams, thick_thin_partition, verify_cardinality_bounds
from .tree import HypographPartition


def step_exp_threshold(coef: int, base: Fraction, top: Fraction, step: Fraction = Fraction(1, 8)) -> StepThreshold:
    """Rational staircase below ``coef * exp(-t)`` with steps every ``step`` from ``base`` to ``top``."""
    def below(t):
        return Fraction(coef * math.exp(-float(t))).limit_denominator(10 ** 6)

    steps = []
    t = base + step
    prev = below(base + step)
    w0 = prev
    while t <= top:
        val = min(prev, below(t + step))
        steps.append((t, val))
        prev = val
        t += step
    return StepThreshold(w0, tuple(steps))


def exact_params(field: PiecewiseScalarField) -> PartitionParams:
    top = max(field.max_value(), field.xi) + 1
    return PartitionParams(
        width_E=step_exp_threshold(4, field.xi, top),
        width_N=step_exp_threshold(24, field.xi, top),
        exceptional_gap=Fraction(1098612, 1000000),
        mode=EXACT,
        t_min=field.xi,
    )


def _random_point(rng: random.Random, f: PiecewiseScalarField):
    i = rng.randrange(f.n_components)
    comp = f.component(i)
    x = comp.length * Fraction(rng.randrange(0, 997), 997)
    fx = f.value(i, x)
    t = f.xi + (fx - f.xi) * Fraction(rng.randrange(0, 1001), 1000)
    return i, x, t


def top_slices(p: HypographPartition) -> list[ESegment]:
    return [p.slice(c.id, c.top) for c in p.classes]


def geometric_leq(tops: list[ESegment], c1: int, c2: int) -> bool:
    """Order on classes read off the segments: the top slice of c1 lies below the top slice of c2."""
    return segment_leq(tops[c1], tops[c2])


def check_field(f: PiecewiseScalarField, seed: int, n_points: int = 10, n_subsets: int = 3) -> list[str]:
    rng = random.Random(seed)
    bad: list[str] = []
    pts = [_random_point(rng, f) for _ in range(n_points)]
    segs: list[ESegment] = [e_segment(f, i, x, t) for i, x, t in pts]
    for e in segs:
        if compare_segments(e, e) is not Order.EQUAL:
            bad.append("reflexivity")
    for a in segs:
        for b in segs:
            ab = segment_leq(a, b)
            if ab and segment_leq(b, a) and a != b:
                bad.append("antisymmetry")
            if ab:
                for c in segs:
                    if segment_leq(b, c) and not segment_leq(a, c):
                        bad.append("transitivity")
    # monotone nesting along a vertical line
    for i, x, t in pts:
        lower = f.xi + (t - f.xi) / 2
        if not segment_leq(e_segment(f, i, x, lower), e_segment(f, i, x, t)):
            bad.append("monotone nesting")

    p = thick_thin_partition(f, exact_params(f))
    n = len(p.classes)
    tops = top_slices(p)
    for c1 in range(n):
        for c2 in range(n):
            if geometric_leq(tops, c1, c2) != p.class_leq(c1, c2):
                bad.append("class order disagrees with segment order")
    for c in range(n):
        below = [d for d in range(n) if geometric_leq(tops, d, c)]
        for d1 in below:
            for d2 in below:
                if not (geometric_leq(tops, d1, d2) or geometric_leq(tops, d2, d1)):
                    bad.append("order not tree-like")
    for i, x, t in pts:
        cid = p.class_at(i, x, t)
        sl = p.slice(cid, t)
        if not sl.arc.contains(x, f.component(i)):
            bad.append("slice connectivity")
        top = min(p[cid].top, f.value(i, x))
        if p.class_at(i, x, top) != cid:
            bad.append("closed from above")
        if p.label(i, x, t) not in ("N", "K"):
            bad.append("labelling")

    report = verify_cardinality_bounds(p, 1.0, 1.0)
    if not report.combinatorial_pass:
        bad.append("combinatorial bound")

    ambient = p.parent_map()
    for _ in range(n_subsets):
        chosen = [c for c in range(n) if rng.random() < 0.5] or [0]
        sub = induced_forest(ambient, chosen)
        out = stable_forest_reduce(sub, ambient)
        if not set(sub) <= set(out) or not is_stable(out) or len(out) > 2 * len(leaves(out)):
            bad.append("stable forest")
    return sorted(set(bad))
