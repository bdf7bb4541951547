"""Seeded random piecewise-linear fields on a rational lattice."""

from __future__ import annotations

import random
from fractions import Fraction

from .field import CIRCLE, INTERVAL, Component, Domain1D, PiecewiseScalarField


def random_field(seed: int, max_breakpoints: int = 20, xi: Fraction = Fraction(1),
                 value_span: int = 48, value_step: Fraction = Fraction(1, 8),
                 position_grid: int = 64, max_components: int = 2) -> PiecewiseScalarField:
    """A field with at most ``max_breakpoints`` breakpoints in total.

    Values are ``xi + k * value_step`` with ``0 <= k <= value_span``; positions are
    multiples of ``length / position_grid``; lengths are multiples of 1/4 in [1, 8].
    """
    rng = random.Random(seed)
    n_comp = rng.randint(1, max_components)
    budget = max_breakpoints
    comps, rows = [], []
    for c in range(n_comp):
        kind = rng.choice((CIRCLE, INTERVAL))
        length = Fraction(rng.randint(4, 32), 4)
        share = budget if c == n_comp - 1 else rng.randint(2, max(2, budget - 2 * (n_comp - 1 - c)))
        share = max(2, min(share, budget - 2 * (n_comp - 1 - c)))
        budget -= share
        step = length / position_grid
        if kind == CIRCLE:
            n = rng.randint(1, share)
            ks = sorted(rng.sample(range(position_grid), n))
        else:
            n = rng.randint(2, share)
            inner = sorted(rng.sample(range(1, position_grid), n - 2))
            ks = [0] + inner + [position_grid]
        pts = tuple((k * step, xi + rng.randint(0, value_span) * value_step) for k in ks)
        comps.append(Component(kind, length))
        rows.append(pts)
    return PiecewiseScalarField(Domain1D(tuple(comps)), tuple(rows), xi)
