"""Piecewise-linear scalar fields on compact 1-manifolds and their E-segments.

Positions are arclength in the normalized boundary metric.  Breakpoint data are
kept as given: ``Fraction`` for the exact path, ``float`` when a field comes out
of a transcendental computation.  Arcs on circles are stored unrolled
(``start <= end``) with ``start`` reduced into ``[0, length)``.
"""

from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property
import math
from typing import Iterable, Sequence, Union

Number = Union[Fraction, float]

CIRCLE = "circle"
INTERVAL = "interval"


class FieldError(ValueError):
    """Invalid field or domain data."""


class PointNotInHypograph(FieldError):
    pass


class MixedFieldError(FieldError):
    pass


def as_number(x) -> Number:
    if isinstance(x, bool):
        raise FieldError("booleans are not numbers")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise FieldError(f"non-finite value {x!r}")
        return x
    if isinstance(x, str):
        return Fraction(x)
    try:
        return float(x)
    except (TypeError, ValueError) as exc:
        raise FieldError(f"not a number: {x!r}") from exc


@dataclass(frozen=True)
class Component:
    kind: str
    length: Number

    def __post_init__(self):
        if self.kind not in (CIRCLE, INTERVAL):
            raise FieldError(f"unknown component kind {self.kind!r}")
        object.__setattr__(self, "length", as_number(self.length))
        if not self.length > 0:
            raise FieldError("component length must be positive")

    @property
    def is_circle(self) -> bool:
        return self.kind == CIRCLE


@dataclass(frozen=True)
class Domain1D:
    components: tuple[Component, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise FieldError("a domain needs at least one component")
        object.__setattr__(self, "components", comps)

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, i: int) -> Component:
        return self.components[i]


@dataclass(frozen=True)
class Arc:
    """A closed arc (or, for gaps, the closure of an open one)."""

    component: int
    start: Number
    end: Number
    full: bool = False

    @property
    def length(self) -> Number:
        return self.end - self.start

    def contains(self, x: Number, comp: Component) -> bool:
        if self.full:
            return True
        if not comp.is_circle:
            return self.start <= x <= self.end
        period = comp.length
        y = self.start + (x - self.start) % period
        return y <= self.end

    def contains_arc(self, other: "Arc", comp: Component) -> bool:
        if self.component != other.component:
            return False
        if self.full:
            return True
        if other.full:
            return False
        if not comp.is_circle:
            return self.start <= other.start and other.end <= self.end
        off = (other.start - self.start) % comp.length
        return off + other.length <= self.length

    def distance(self, other: "Arc", comp: Component) -> Number:
        """Arclength distance between two arcs of the same component (0 if they meet)."""
        if self.component != other.component:
            raise FieldError("arcs on different components")
        if self.full or other.full:
            return Fraction(0) if not isinstance(comp.length, float) else 0.0
        if not comp.is_circle:
            return max(other.start - self.end, self.start - other.end, 0)
        period = comp.length
        off = (other.start - self.start) % period
        if off <= self.length:
            return off * 0
        gap_after = off - self.length
        gap_before = period - off - other.length
        return max(min(gap_after, gap_before), off * 0)

    def midpoint(self) -> Number:
        return self.start + (self.end - self.start) / 2

    def key(self) -> tuple:
        return (self.component, self.start, self.end, self.full)


def _normalized(component: int, comp: Component, start: Number, end: Number) -> Arc:
    if comp.is_circle:
        if end - start >= comp.length:
            zero = comp.length * 0
            return Arc(component, zero, comp.length, True)
        k = start // comp.length
        start, end = start - k * comp.length, end - k * comp.length
        return Arc(component, start, end, False)
    full = start == 0 and end == comp.length
    return Arc(component, start, end, full)


def _crossing(x0: Number, v0: Number, x1: Number, v1: Number, t: Number) -> Number:
    if v0 == t:
        return x0
    if v1 == t:
        return x1
    return x0 + (t - v0) * (x1 - x0) / (v1 - v0)


@dataclass(frozen=True, eq=False)
class PiecewiseScalarField:
    """Continuous piecewise-linear ``f`` on a union of circles and intervals.

    ``breakpoints[i]`` lists ``(position, value)`` pairs for component ``i``.
    Interval components must start at 0 and end at the component length;
    circle breakpoints lie in ``[0, length)`` and wrap around.
    """

    domain: Domain1D
    breakpoints: tuple[tuple[tuple[Number, Number], ...], ...]
    xi: Number
    check_base: bool = True

    def __post_init__(self):
        object.__setattr__(self, "xi", as_number(self.xi))
        if len(self.breakpoints) != len(self.domain):
            raise FieldError("one breakpoint list per component is required")
        bps = []
        for comp, pts in zip(self.domain.components, self.breakpoints):
            pts = tuple((as_number(p), as_number(v)) for p, v in pts)
            if not pts:
                raise FieldError("empty breakpoint list")
            pos = [p for p, _ in pts]
            if any(b <= a for a, b in zip(pos, pos[1:])):
                raise FieldError("breakpoint positions must be strictly increasing")
            if comp.is_circle:
                if pos[0] < 0 or pos[-1] >= comp.length:
                    raise FieldError("circle breakpoints must lie in [0, length)")
            else:
                if len(pts) < 2 or pos[0] != 0 or pos[-1] != comp.length:
                    raise FieldError("interval breakpoints must start at 0 and end at the length")
            if self.check_base and any(v < self.xi for _, v in pts):
                raise FieldError("field values must be >= the base level")
            bps.append(pts)
        object.__setattr__(self, "breakpoints", tuple(bps))

    @classmethod
    def build(cls, components: Iterable[tuple[str, object, Sequence[tuple[object, object]]]], xi) -> "PiecewiseScalarField":
        comps, pts = [], []
        for kind, length, bp in components:
            comps.append(Component(kind, length))
            pts.append(tuple(bp))
        return cls(Domain1D(tuple(comps)), tuple(pts), xi)

    def component(self, i: int) -> Component:
        return self.domain.components[i]

    @property
    def n_components(self) -> int:
        return len(self.domain)

    @cached_property
    def _pieces(self) -> tuple[tuple[tuple[Number, Number, Number, Number], ...], ...]:
        out = []
        for comp, pts in zip(self.domain.components, self.breakpoints):
            seq = list(pts)
            if comp.is_circle:
                seq.append((pts[0][0] + comp.length, pts[0][1]))
            out.append(tuple((x0, v0, x1, v1) for (x0, v0), (x1, v1) in zip(seq, seq[1:])))
        return tuple(out)

    def pieces(self, i: int):
        return self._pieces[i]

    def values(self, i: int | None = None) -> list[Number]:
        rows = self.breakpoints if i is None else (self.breakpoints[i],)
        return [v for pts in rows for _, v in pts]

    def max_value(self, i: int | None = None) -> Number:
        return max(self.values(i))

    def min_value(self, i: int | None = None) -> Number:
        return min(self.values(i))

    def _reduce(self, i: int, x: Number) -> Number:
        comp = self.component(i)
        if comp.is_circle:
            p0 = self.breakpoints[i][0][0]
            return p0 + (x - p0) % comp.length
        if not 0 <= x <= comp.length:
            raise FieldError(f"position {x} outside interval component")
        return x

    def value(self, i: int, x) -> Number:
        x = self._reduce(i, as_number(x))
        pieces = self._pieces[i]
        starts = [p[0] for p in pieces]
        k = max(bisect.bisect_right(starts, x) - 1, 0)
        x0, v0, x1, v1 = pieces[k]
        if x == x1:
            return v1
        return v0 + (v1 - v0) * (x - x0) / (x1 - x0)

    def superlevel_arcs(self, i: int, t) -> list[Arc]:
        """Connected components of ``{f >= t}`` on component ``i``."""
        return self._runs(i, as_number(t), closed=True)

    def gap_arcs(self, i: int, t) -> list[Arc]:
        """Connected components of ``{f < t}`` (returned as their closures)."""
        return self._runs(i, as_number(t), closed=False)

    def _runs(self, i: int, t: Number, closed: bool) -> list[Arc]:
        comp = self.component(i)
        runs: list[list[Number]] = []
        for x0, v0, x1, v1 in self._pieces[i]:
            if closed:
                in0, in1 = v0 >= t, v1 >= t
            else:
                in0, in1 = v0 < t, v1 < t
            if in0 and in1:
                a, b = x0, x1
            elif in0:
                a, b = x0, _crossing(x0, v0, x1, v1, t)
            elif in1:
                a, b = _crossing(x0, v0, x1, v1, t), x1
            else:
                continue
            # open gaps touching at a point where f == t stay separate
            if runs and runs[-1][1] == a and (closed or in0):
                runs[-1][1] = b
            else:
                runs.append([a, b])
        if not runs:
            return []
        if comp.is_circle:
            p0 = self._pieces[i][0][0]
            end_all = p0 + comp.length
            if len(runs) > 1 and runs[0][0] == p0 and runs[-1][1] == end_all:
                first = runs.pop(0)
                runs[-1][1] = first[1] + comp.length
            elif len(runs) == 1 and runs[0][0] == p0 and runs[0][1] == end_all:
                if closed or self._pieces[i][0][1] < t:
                    return [_normalized(i, comp, p0, end_all)]
        return [_normalized(i, comp, a, b) for a, b in runs]

    def in_hypograph(self, i: int, x, t) -> bool:
        t = as_number(t)
        return t >= self.xi and self.value(i, x) >= t

    def to_float(self) -> "PiecewiseScalarField":
        comps = tuple(Component(c.kind, float(c.length)) for c in self.domain.components)
        pts = tuple(tuple((float(p), float(v)) for p, v in row) for row in self.breakpoints)
        return PiecewiseScalarField(Domain1D(comps), pts, float(self.xi), self.check_base)


@dataclass(frozen=True)
class ESegment:
    component: int
    arc: Arc
    level: Number
    field: PiecewiseScalarField = dc_field(compare=False, repr=False, default=None)

    @property
    def length(self) -> Number:
        return self.arc.length


def e_segment(field: PiecewiseScalarField, component: int, x, t) -> ESegment:
    """The maximal closed arc through ``x`` on which ``f >= t``, at level ``t``."""
    x, t = as_number(x), as_number(t)
    if t < field.xi:
        raise PointNotInHypograph(f"level {t} below the base level {field.xi}")
    if field.value(component, x) < t:
        raise PointNotInHypograph(f"f({x}) < {t}")
    comp = field.component(component)
    for arc in field.superlevel_arcs(component, t):
        if arc.contains(x, comp):
            return ESegment(component, arc, t, field)
    raise AssertionError("superlevel arcs do not cover a point of the hypograph")


class Order(enum.Enum):
    LESS_EQ = "LessEq"
    GREATER_EQ = "GreaterEq"
    EQUAL = "Equal"
    INCOMPARABLE = "Incomparable"


def segment_leq(e1: ESegment, e2: ESegment) -> bool:
    """``e1 <= e2``: e2 sits above e1 and its arc lies inside e1's arc."""
    if e1.component != e2.component:
        return False
    comp = e1.field.component(e1.component)
    return e1.level <= e2.level and e1.arc.contains_arc(e2.arc, comp)


def compare_segments(e1: ESegment, e2: ESegment) -> Order:
    if e1.field is not e2.field:
        raise MixedFieldError("segments come from different fields")
    le, ge = segment_leq(e1, e2), segment_leq(e2, e1)
    if le and ge:
        return Order.EQUAL
    if le:
        return Order.LESS_EQ
    if ge:
        return Order.GREATER_EQ
    return Order.INCOMPARABLE


@dataclass(frozen=True, eq=False)
class RadiusProfile:
    """Positive piecewise-linear weight ``r`` with ``|dr/ds| <= r`` in the boundary coordinate.

    Since the coordinate is arclength for the rescaled metric ``h / r``, this is the
    1-Lipschitz condition for ``r`` measured in ``h``-arclength.
    """

    values: PiecewiseScalarField

    def __post_init__(self):
        f = self.values
        for i in range(f.n_components):
            for x0, v0, x1, v1 in f.pieces(i):
                if v0 <= 0 or v1 <= 0:
                    raise FieldError("radius profile must be positive")
                if abs(v1 - v0) > min(v0, v1) * (x1 - x0):
                    raise FieldError("radius profile violates the Lipschitz bound")

    @classmethod
    def constant(cls, domain: Domain1D, value=1) -> "RadiusProfile":
        value = as_number(value)
        rows = []
        for comp in domain.components:
            zero = comp.length * 0
            if comp.is_circle:
                rows.append(((zero, value),))
            else:
                rows.append(((zero, value), (comp.length, value)))
        return cls(PiecewiseScalarField(domain, tuple(rows), 0, check_base=False))

    def __call__(self, component: int, x) -> Number:
        return self.values.value(component, x)

    def minimum(self, component: int, arc: Arc) -> Number:
        """Minimum of ``r`` over a (short) arc: attained at an endpoint or breakpoint."""
        f = self.values
        comp = f.component(component)
        cands = [f.value(component, arc.start), f.value(component, arc.end)]
        for p, v in f.breakpoints[component]:
            if arc.contains(p, comp):
                cands.append(v)
        return min(cands)
