"""Level intervals and the threshold functions used by the thick/thin machinery."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from scipy.optimize import brentq

from .field import Number, as_number


@dataclass(frozen=True)
class LevelInterval:
    lo: Number
    hi: Number
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if self.hi < self.lo or (self.hi == self.lo and not (self.lo_closed and self.hi_closed)):
            raise ValueError(f"empty level interval {self}")

    def contains(self, t) -> bool:
        above = t > self.lo or (self.lo_closed and t == self.lo)
        below = t < self.hi or (self.hi_closed and t == self.hi)
        return above and below

    @property
    def height(self) -> Number:
        return self.hi - self.lo

    def __str__(self) -> str:
        return f"{'[' if self.lo_closed else '('}{float(self.lo):.6g}, {float(self.hi):.6g}{']' if self.hi_closed else ')'}"


def make_interval(lo, hi, lo_closed: bool, hi_closed: bool) -> LevelInterval | None:
    if hi < lo or (hi == lo and not (lo_closed and hi_closed)):
        return None
    return LevelInterval(lo, hi, lo_closed, hi_closed)


def merge_intervals(items: Iterable[LevelInterval]) -> list[LevelInterval]:
    """Union of level intervals as a sorted list of maximal intervals."""
    out: list[LevelInterval] = []
    for it in sorted(items, key=lambda i: (i.lo, not i.lo_closed)):
        if out:
            last = out[-1]
            touches = it.lo < last.hi or (it.lo == last.hi and (last.hi_closed or it.lo_closed))
            if touches:
                if it.hi > last.hi or (it.hi == last.hi and it.hi_closed):
                    out[-1] = LevelInterval(last.lo, it.hi, last.lo_closed, it.hi_closed)
                continue
        out.append(it)
    return out


def subtract_intervals(base: LevelInterval, holes: Sequence[LevelInterval]) -> list[LevelInterval]:
    """``base`` minus a sorted list of disjoint sub-intervals."""
    out = []
    lo, lo_closed = base.lo, base.lo_closed
    for h in holes:
        piece = make_interval(lo, h.lo, lo_closed, not h.lo_closed)
        if piece is not None:
            out.append(piece)
        lo, lo_closed = h.hi, not h.hi_closed
    piece = make_interval(lo, base.hi, lo_closed, base.hi_closed)
    if piece is not None:
        out.append(piece)
    return out


class Threshold(ABC):
    """A positive non-increasing width threshold ``t -> w(t)``."""

    exact: bool = False

    @abstractmethod
    def __call__(self, t) -> Number: ...

    @abstractmethod
    def below_set(self, alpha, beta, lo, hi) -> list[LevelInterval]:
        """``{t in (lo, hi] : alpha + beta * t <= w(t)}`` as disjoint intervals.

        ``hi`` may be ``math.inf`` (the set is then returned open-ended only when
        it is unbounded, which happens only for degenerate zero lengths).
        """

    def crossing_sup(self, alpha, beta, lo, hi):
        """Supremum of the below-set when ``beta >= 0`` (the set is then an initial segment)."""
        parts = self.below_set(alpha, beta, lo, hi)
        if not parts:
            return None
        return parts[-1].hi


@dataclass(frozen=True)
class ExpThreshold(Threshold):
    """``w(t) = coef * exp(-t)``, evaluated in floating point."""

    coef: float
    xtol: float = 1e-14

    exact = False

    def __call__(self, t) -> float:
        return self.coef * math.exp(-float(t))

    def below_set(self, alpha, beta, lo, hi) -> list[LevelInterval]:
        a, b, c = float(alpha), float(beta), float(self.coef)
        phi = lambda t: a + b * t - c * math.exp(-t)
        flo = float(lo)
        fhi = float(hi)
        if math.isinf(fhi):
            if b < 0:
                raise ValueError("unbounded band with shrinking length")
            fhi = max(flo + 1.0, 1.0)
            while phi(fhi) <= 0:
                fhi = 2 * fhi + 1.0
                if fhi > 1e6:
                    return [LevelInterval(lo, math.inf, False, False)]
        # phi is strictly concave: its maximum on [lo, hi] sits at tm
        tm = math.log(c / -b) if b < 0 else fhi
        tm = min(max(tm, flo), fhi)
        if phi(tm) <= 0:
            return [LevelInterval(lo, hi, False, True)] if math.isfinite(float(hi)) else [LevelInterval(lo, math.inf, False, False)]
        out = []
        if phi(flo) < 0 and tm > flo:
            r = brentq(phi, flo, tm, xtol=self.xtol, rtol=4 * 2.220446049250313e-16)
            if r > flo:
                out.append(LevelInterval(lo, r, False, True))
        if phi(fhi) <= 0 and tm < fhi:
            r = brentq(phi, tm, fhi, xtol=self.xtol, rtol=4 * 2.220446049250313e-16)
            out.append(LevelInterval(r, hi, True, True))
        return out


@dataclass(frozen=True)
class StepThreshold(Threshold):
    """Exact right-continuous step function.

    ``steps = ((s1, w1), (s2, w2), ...)`` with ``w(t) = w0`` for ``t < s1`` and
    ``w(t) = wk`` on ``[sk, s(k+1))``.
    """

    w0: Fraction
    steps: tuple[tuple[Fraction, Fraction], ...] = ()

    exact = True

    def __post_init__(self):
        object.__setattr__(self, "w0", as_number(self.w0))
        object.__setattr__(self, "steps", tuple((as_number(s), as_number(w)) for s, w in self.steps))
        vals = [self.w0] + [w for _, w in self.steps]
        if any(v < 0 for v in vals):
            raise ValueError("thresholds must be nonnegative")
        if any(b > a for a, b in zip(vals, vals[1:])):
            raise ValueError("thresholds must be non-increasing")
        if any(not isinstance(v, Fraction) for v in vals) or any(not isinstance(s, Fraction) for s, _ in self.steps):
            raise ValueError("step thresholds must be rational")
        levels = [s for s, _ in self.steps]
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError("step levels must increase")

    @classmethod
    def constant(cls, value) -> "StepThreshold":
        return cls(Fraction(value))

    def __call__(self, t) -> Fraction:
        w = self.w0
        for s, v in self.steps:
            if t >= s:
                w = v
        return w

    def _pieces(self, lo, hi):
        """Constant pieces of ``w`` over ``(lo, hi]`` as (a, a_closed, b, b_closed, value)."""
        unbounded = isinstance(hi, float) and math.isinf(hi)
        cuts = [s for s, _ in self.steps if lo < s and (unbounded or s <= hi)]
        bounds = [lo] + cuts + [hi]
        out = []
        for k, (a, b) in enumerate(zip(bounds, bounds[1:])):
            last = k == len(bounds) - 2
            b_closed = last and not unbounded
            if a == b and not b_closed:
                continue
            # right-continuity: the value at a also holds just to the right of a
            out.append((a, k > 0, b, b_closed, self(a)))
        return out

    def below_set(self, alpha, beta, lo, hi) -> list[LevelInterval]:
        alpha, beta = as_number(alpha), as_number(beta)
        found = []
        for a, a_closed, b, b_closed, w in self._pieces(lo, hi):
            # alpha + beta t <= w on the piece
            if beta == 0:
                if alpha <= w:
                    iv = make_interval(a, b, a_closed, b_closed)
                else:
                    iv = None
            else:
                root = (w - alpha) / beta
                if beta > 0:
                    if root > b or (root == b):
                        iv = make_interval(a, b, a_closed, b_closed)
                    else:
                        iv = make_interval(a, root, a_closed, True) if root > a or (root == a and a_closed) else None
                else:
                    if root < a or (root == a):
                        iv = make_interval(a, b, a_closed, b_closed)
                    else:
                        iv = make_interval(root, b, True, b_closed) if root < b or (root == b and b_closed) else None
            if iv is not None:
                found.append(iv)
        return merge_intervals(found)


def exp_threshold(coef: float) -> ExpThreshold:
    return ExpThreshold(float(coef))
