"""The equivalence classes of the hypograph and their tree order.

A sweep over probe levels recovers the classes.  The probes are the base level,
every critical value (a breakpoint value) and one level strictly between each
pair of consecutive critical values.  Between two critical values nothing
happens topologically, so one probe per open band is enough.  A class branches
at a critical level exactly when its slice there meets ``{f > t}`` in two or
more components.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterator, Mapping, Sequence

from .field import Arc, ESegment, FieldError, Number, PiecewiseScalarField, PointNotInHypograph, as_number, e_segment
from .levels import LevelInterval


@dataclass(frozen=True)
class Slab:
    """One band of a class: levels in ``levels``, slices shrinking towards ``top_arc``.

    ``probe_arc`` is the slice at the band's interior probe level (``None`` for the
    single-level slab at the base).
    """

    levels: LevelInterval
    top_arc: Arc
    probe_arc: Arc | None = None
    probe_level: Number | None = None


@dataclass(frozen=True)
class TreeClass:
    id: int
    component: int
    parent: int | None
    children: tuple[int, ...]
    bottom: Number
    bottom_closed: bool
    top: Number
    anchor: Number
    slabs: tuple[Slab, ...]

    @property
    def levels(self) -> LevelInterval:
        return LevelInterval(self.bottom, self.top, self.bottom_closed, True)

    @property
    def is_root(self) -> bool:
        return self.parent is None

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class _Band:
    lo: Number
    hi: Number
    probe: Number
    probe_arcs: tuple[tuple[Arc, int], ...]
    top_arcs: tuple[tuple[Arc, int], ...]


@dataclass(frozen=True)
class _Sweep:
    base_arcs: tuple[tuple[Arc, int], ...]
    critical: tuple[Number, ...]
    bands: tuple[_Band, ...]


@dataclass(frozen=True)
class ThinNeck:
    class_id: int
    levels: LevelInterval
    exceptional: bool

    @property
    def height(self) -> Number:
        return self.levels.height


@dataclass(frozen=True, eq=False)
class HypographPartition:
    field: PiecewiseScalarField
    classes: tuple[TreeClass, ...]
    sweeps: tuple[_Sweep, ...] = dc_field(repr=False)
    params: object | None = None
    thin_intervals: Mapping[int, tuple[LevelInterval, ...]] | None = None
    thin_necks: tuple[ThinNeck, ...] = ()

    # -- tree structure ------------------------------------------------------
    def __getitem__(self, cid: int) -> TreeClass:
        return self.classes[cid]

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def roots(self) -> list[int]:
        return [c.id for c in self.classes if c.parent is None]

    @property
    def leaves(self) -> list[int]:
        return [c.id for c in self.classes if not c.children]

    def parent_map(self) -> dict[int, int | None]:
        return {c.id: c.parent for c in self.classes}

    def ancestors(self, cid: int) -> Iterator[int]:
        p = self.classes[cid].parent
        while p is not None:
            yield p
            p = self.classes[p].parent

    def class_leq(self, c1: int, c2: int) -> bool:
        """Tree order: ``c1 <= c2`` when c1 is c2 or one of its ancestors."""
        return c1 == c2 or c1 in self.ancestors(c2)

    # -- geometry ------------------------------------------------------------
    def slice(self, cid: int, t) -> ESegment:
        c = self.classes[cid]
        t = as_number(t)
        if not c.levels.contains(t):
            raise PointNotInHypograph(f"level {t} outside class {cid}")
        return e_segment(self.field, c.component, c.anchor, t)

    def class_at(self, component: int, x, t) -> int:
        x, t = as_number(x), as_number(t)
        seg = e_segment(self.field, component, x, t)
        sw = self.sweeps[component]
        comp = self.field.component(component)
        if t == sw.critical[0]:
            return _locate(sw.base_arcs, seg.arc, comp)
        for band in sw.bands:
            if t == band.hi:
                return _locate(band.top_arcs, seg.arc, comp)
            if band.lo < t < band.hi:
                for arc, cid in band.probe_arcs:
                    if seg.arc.contains_arc(arc, comp) or arc.contains_arc(seg.arc, comp):
                        return cid
        raise AssertionError("point of the hypograph not covered by the sweep")

    # -- thick/thin ----------------------------------------------------------
    def label(self, component: int, x, t) -> str:
        if self.thin_intervals is None:
            raise ValueError("partition carries no thick/thin labels")
        cid = self.class_at(component, x, t)
        t = as_number(t)
        return "N" if any(iv.contains(t) for iv in self.thin_intervals[cid]) else "K"

    def is_thin(self, cid: int, t) -> bool:
        return any(iv.contains(t) for iv in self.thin_intervals[cid])

    def band_lengths(self, cid: int) -> list[tuple[LevelInterval, Number, Number]]:
        """Per slab: level interval and the affine slice length ``alpha + beta * t``."""
        out = []
        for slab in self.classes[cid].slabs:
            if slab.probe_arc is None:
                out.append((slab.levels, slab.top_arc.length, slab.top_arc.length * 0))
                continue
            l_top, l_mid = slab.top_arc.length, slab.probe_arc.length
            beta = (l_top - l_mid) / (slab.levels.hi - slab.probe_level)
            alpha = l_top - beta * slab.levels.hi
            out.append((slab.levels, alpha, beta))
        return out


def _locate(arcs: Sequence[tuple[Arc, int]], arc: Arc, comp) -> int:
    for a, cid in arcs:
        if a.contains_arc(arc, comp) and arc.contains_arc(a, comp):
            return cid
    raise AssertionError("slice not found among probe arcs")


class _ClassBuilder:
    def __init__(self, cid, component, parent, bottom, bottom_closed):
        self.id = cid
        self.component = component
        self.parent = parent
        self.children: list[int] = []
        self.bottom = bottom
        self.bottom_closed = bottom_closed
        self.top = bottom
        self.top_arc: Arc | None = None
        self.slabs: list[Slab] = []

    def freeze(self) -> TreeClass:
        return TreeClass(self.id, self.component, self.parent, tuple(self.children), self.bottom,
                         self.bottom_closed, self.top, self.top_arc.start, tuple(self.slabs))


def _critical_levels(field: PiecewiseScalarField, i: int) -> list[Number]:
    vals = {v for v in field.values(i) if v > field.xi}
    return [field.xi] + sorted(vals)


def tree_partition(field: PiecewiseScalarField) -> HypographPartition:
    """Classes of the hypograph of ``field`` together with their tree order."""
    builders: list[_ClassBuilder] = []
    sweeps = []

    def new_class(component, parent, bottom, closed) -> _ClassBuilder:
        b = _ClassBuilder(len(builders), component, parent, bottom, closed)
        builders.append(b)
        if parent is not None:
            builders[parent].children.append(b.id)
        return b

    for i in range(field.n_components):
        comp = field.component(i)
        crit = _critical_levels(field, i)
        current: list[tuple[Arc, int]] = []
        for arc in field.superlevel_arcs(i, crit[0]):
            b = new_class(i, None, crit[0], True)
            b.top_arc = arc
            b.slabs.append(Slab(LevelInterval(crit[0], crit[0]), arc))
            current.append((arc, b.id))
        base = tuple(current)
        bands = []
        for lo, hi in zip(crit, crit[1:]):
            probe = lo + (hi - lo) / 2
            mids = field.superlevel_arcs(i, probe)
            owner: list[tuple[Arc, int]] = []
            kids: dict[int, list[Arc]] = {}
            for m in mids:
                for k, (arc, _) in enumerate(current):
                    if arc.contains_arc(m, comp):
                        kids.setdefault(k, []).append(m)
                        break
                else:
                    raise AssertionError("probe arc without a parent slice")
            for k, ms in kids.items():
                arc, cid = current[k]
                if len(ms) >= 2:
                    for m in sorted(ms, key=lambda a: a.start):
                        owner.append((m, new_class(i, cid, lo, False).id))
                else:
                    owner.append((ms[0], cid))
            tops = []
            for arc in field.superlevel_arcs(i, hi):
                for m, cid in owner:
                    if m.contains_arc(arc, comp):
                        b = builders[cid]
                        b.top, b.top_arc = hi, arc
                        b.slabs.append(Slab(LevelInterval(lo, hi, False, True), arc, m, probe))
                        tops.append((arc, cid))
                        break
                else:
                    raise AssertionError("critical slice outside every probe arc")
            bands.append(_Band(lo, hi, probe, tuple(owner), tuple(tops)))
            current = tops
        sweeps.append(_Sweep(base, tuple(crit), tuple(bands)))

    classes = tuple(b.freeze() for b in builders)
    return HypographPartition(field, classes, tuple(sweeps))
