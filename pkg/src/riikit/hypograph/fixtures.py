"""Small named fields used by the CLI, the tests and the experiment scripts."""

from __future__ import annotations

from fractions import Fraction as Q

from .field import CIRCLE, INTERVAL, PiecewiseScalarField


def w_shape() -> PiecewiseScalarField:
    """Two peaks at 1 on a circle of length 1, both minima at 2/5, base 0."""
    pts = ((Q(0), Q(2, 5)), (Q(1, 4), Q(1)), (Q(1, 2), Q(2, 5)), (Q(3, 4), Q(1)))
    return PiecewiseScalarField.build([(CIRCLE, Q(1), pts)], Q(0))


def tent() -> PiecewiseScalarField:
    """Unimodal tent on [0, 1] with peak 1 at 1/2, base 0."""
    return PiecewiseScalarField.build([(INTERVAL, Q(1), ((Q(0), Q(0)), (Q(1, 2), Q(1)), (Q(1), Q(0))))], Q(0))


def constant(value=Q(1), length=Q(16)) -> PiecewiseScalarField:
    return PiecewiseScalarField.build([(CIRCLE, Q(length), ((Q(0), Q(value)),))], Q(value))


FIXTURES = {"w-shape": w_shape, "tent": tent, "constant": constant}
