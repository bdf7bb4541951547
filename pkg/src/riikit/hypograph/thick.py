"""Thickened hypograph, thick/thin labelling, thin necks and the counting bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field, replace
from fractions import Fraction
from typing import Sequence

from .field import (Arc, Domain1D, ESegment, FieldError, Number, PiecewiseScalarField, RadiusProfile, as_number,
                    e_segment)
from .levels import (ExpThreshold, LevelInterval, StepThreshold, Threshold, merge_intervals, subtract_intervals)
from .tree import HypographPartition, ThinNeck, tree_partition

EXACT = "exact"
FLOAT = "float"


@dataclass(frozen=True)
class PartitionParams:
    k: float = 1.0
    width_E: Threshold = dc_field(default_factory=lambda: ExpThreshold(4.0))
    width_N: Threshold = dc_field(default_factory=lambda: ExpThreshold(24.0))
    exceptional_gap: Number = math.log(3)
    mode: str = FLOAT
    tolerance: float = 1e-12
    t_min: Number | None = None

    def __post_init__(self):
        if not self.k >= 1:
            raise ValueError("k must be at least 1")
        if self.mode not in (EXACT, FLOAT):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.mode == EXACT:
            for w in (self.width_E, self.width_N):
                if not w.exact:
                    raise ValueError("exact mode needs piecewise-constant rational thresholds")
            if self.t_min is None or not isinstance(as_number(self.t_min), Fraction):
                raise ValueError("exact mode needs a rational t_min")

    @property
    def base_level(self) -> Number:
        return as_number(self.t_min) if self.t_min is not None else math.log(2 * self.k)


# -- thickening --------------------------------------------------------------

@dataclass(frozen=True)
class Plateau:
    component: int
    arc: Arc
    level: Number


@dataclass(frozen=True)
class ComponentCondition:
    component: int
    long_ok: bool
    hot_ok: bool


@dataclass(frozen=True, eq=False)
class Thickening:
    field: PiecewiseScalarField
    plateaus: tuple[Plateau, ...]
    conditions: tuple[ComponentCondition, ...]

    @property
    def violations(self) -> list[ComponentCondition]:
        return [c for c in self.conditions if not (c.long_ok and c.hot_ok)]


def _comparable_arc(arcs: Sequence[Arc], ref: Arc, comp) -> Arc:
    for a in arcs:
        if a.contains_arc(ref, comp) or ref.contains_arc(a, comp):
            return a
    raise AssertionError("no gap arc matches the probe gap")


def thicken(g: PiecewiseScalarField, r: RadiusProfile | None, params: PartitionParams) -> Thickening:
    """Fill every gap of ``{g < t}`` while its length stays within ``width_E(t)``."""
    xi = params.base_level
    if r is not None and r.values.n_components != g.n_components:
        raise FieldError("radius profile lives on a different domain")
    w = params.width_E
    plateaus: list[Plateau] = []
    conds = []
    for i in range(g.n_components):
        comp = g.component(i)
        gmax = g.max_value(i)
        conds.append(ComponentCondition(i, w(gmax) <= comp.length, gmax >= xi))
        crit = [xi] + sorted({v for v in g.values(i) if v > xi})
        tops = crit[1:] + [math.inf]
        for lo, hi in zip(crit, tops):
            if hi == math.inf:
                probe = lo + 1
                gaps = g.gap_arcs(i, probe)
                alpha, beta = gaps[0].length, 0
                families = [(gaps[0], alpha, beta)]
            else:
                probe = lo + (hi - lo) / 2
                gaps_hi = g.gap_arcs(i, hi)
                families = []
                for m in g.gap_arcs(i, probe):
                    big = _comparable_arc(gaps_hi, m, comp)
                    beta = (big.length - m.length) / (hi - probe)
                    families.append((m, big.length - beta * hi, beta))
            for m, alpha, beta in families:
                t_fill = w.crossing_sup(alpha, beta, lo, hi)
                if t_fill is None:
                    continue
                if t_fill == math.inf:
                    raise FieldError("width threshold fills a whole component at every level")
                if t_fill == probe:
                    arc = m
                else:
                    arc = _comparable_arc(g.gap_arcs(i, t_fill), m, comp)
                plateaus.append(Plateau(i, arc, t_fill))
    return Thickening(_envelope(g, xi, plateaus, params.mode == FLOAT), tuple(plateaus), tuple(conds))


def thickened_hypograph(g: PiecewiseScalarField, r: RadiusProfile | None, params: PartitionParams) -> PiecewiseScalarField:
    return thicken(g, r, params).field


def _envelope(g: PiecewiseScalarField, xi, plateaus: Sequence[Plateau], as_float: bool) -> PiecewiseScalarField:
    rows = []
    for i in range(g.n_components):
        comp = g.component(i)
        mine = [p for p in plateaus if p.component == i]
        cands = set()
        for x0, v0, x1, v1 in g.pieces(i):
            cands.add(x0)
            if (v0 - xi) * (v1 - xi) < 0:
                cands.add(x0 + (xi - v0) * (x1 - x0) / (v1 - v0))
        for p in mine:
            if not p.arc.full:
                cands.update((p.arc.start, p.arc.end))
        if comp.is_circle:
            cands = {c % comp.length for c in cands}
        else:
            cands.add(comp.length * 0)
            cands.add(comp.length)
        if as_float:
            cands = {float(c) for c in cands}
        pts = []
        for x in sorted(cands):
            v = max(g.value(i, x), xi)
            for p in mine:
                if p.level > v and p.arc.contains(x, comp):
                    v = p.level
            pts.append((x, float(v) if as_float else v))
        if comp.is_circle:
            pts = [q for q in pts if q[0] < comp.length]
        rows.append(tuple(pts))
    domain = g.domain
    if as_float:
        domain = Domain1D(tuple(type(c)(c.kind, float(c.length)) for c in domain.components))
        xi = float(xi)
    return PiecewiseScalarField(domain, tuple(rows), xi)


# -- thick / thin --------------------------------------------------------------

def _thin_sets(p: HypographPartition, w: Threshold) -> dict[int, tuple[LevelInterval, ...]]:
    out = {}
    for c in p.classes:
        found = []
        for levels, alpha, beta in p.band_lengths(c.id):
            if levels.lo == levels.hi:
                if alpha <= w(levels.lo):
                    found.append(levels)
            else:
                found.extend(w.below_set(alpha, beta, levels.lo, levels.hi))
        out[c.id] = tuple(merge_intervals(found))
    return out


def _thin_at(thin, cid, t) -> bool:
    return any(iv.contains(t) for iv in thin[cid])


def _thick_just_below(p: HypographPartition, thin, cid: int, t) -> bool:
    """Thick points at levels accumulating to ``t`` from below, along the chain under ``cid``."""
    c = p[cid]
    if t > c.bottom:
        return not any(iv.lo < t <= iv.hi for iv in thin[cid])
    if c.parent is None:
        return False
    return _thick_just_below(p, thin, c.parent, t)


def _thick_at_or_below(p, thin, cid, t) -> bool:
    return not _thin_at(thin, cid, t) or _thick_just_below(p, thin, cid, t)


def _thick_just_above_bottom(thin, child) -> bool:
    return not any(iv.lo == child.bottom for iv in thin[child.id])


def _exceptional(p: HypographPartition, thin, cid: int, neck: LevelInterval, gap) -> bool:
    if not neck.height < gap:
        return False
    c = p[cid]
    lo, hi = neck.lo, neck.hi
    if neck.lo_closed:
        below = _thick_just_below(p, thin, cid, lo)
    elif lo > c.bottom or c.bottom_closed:
        below = True
    else:
        below = _thick_at_or_below(p, thin, c.parent, lo)
    if not below:
        return False
    if not neck.hi_closed or hi < c.top:
        return True
    return any(_thick_just_above_bottom(thin, p[ch]) for ch in c.children)


def thick_thin_partition(field: PiecewiseScalarField, params: PartitionParams | None = None) -> HypographPartition:
    params = params or PartitionParams()
    p = tree_partition(field)
    thin = _thin_sets(p, params.width_N)
    necks = []
    for c in p.classes:
        for iv in thin[c.id]:
            necks.append(ThinNeck(c.id, iv, _exceptional(p, thin, c.id, iv, params.exceptional_gap)))
    return replace(p, params=params, thin_intervals=thin, thin_necks=tuple(necks))


@dataclass(frozen=True)
class ThickPiece:
    class_id: int
    levels: LevelInterval


def thick_components(p: HypographPartition) -> list[list[ThickPiece]]:
    """Connected components of the thick part C (everything outside non-exceptional necks)."""
    holes: dict[int, list[LevelInterval]] = {c.id: [] for c in p.classes}
    for n in p.thin_necks:
        if not n.exceptional:
            holes[n.class_id].append(n.levels)
    pieces: list[ThickPiece] = []
    first: dict[int, int] = {}
    last: dict[int, int] = {}
    for c in p.classes:
        parts = subtract_intervals(c.levels, sorted(holes[c.id], key=lambda iv: iv.lo))
        for iv in parts:
            if iv.lo == c.bottom and iv.lo_closed == c.bottom_closed:
                first[c.id] = len(pieces)
            if iv.hi == c.top and iv.hi_closed:
                last[c.id] = len(pieces)
            pieces.append(ThickPiece(c.id, iv))
    parent = list(range(len(pieces)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for c in p.classes:
        if c.parent is not None and c.id in first and c.parent in last:
            parent[find(first[c.id])] = find(last[c.parent])
    groups: dict[int, list[ThickPiece]] = {}
    for k, piece in enumerate(pieces):
        groups.setdefault(find(k), []).append(piece)
    return list(groups.values())


# -- counting bounds -------------------------------------------------------------

@dataclass(frozen=True)
class BoundCheck:
    name: str
    lhs: float
    rhs: float
    passed: bool
    asserted: bool


@dataclass(frozen=True)
class BoundsReport:
    n_classes: int
    n_leaves: int
    n_thick_components: int
    n_nonexceptional: int
    n_short_nonexceptional: int
    checks: tuple[BoundCheck, ...]

    @property
    def combinatorial_pass(self) -> bool:
        return all(c.passed for c in self.checks if c.asserted)

    def as_dict(self) -> dict:
        return {
            "classes": self.n_classes,
            "leaves": self.n_leaves,
            "thick_components": self.n_thick_components,
            "G": self.n_nonexceptional,
            "H": self.n_short_nonexceptional,
            "checks": [vars(c) for c in self.checks],
            "combinatorial_pass": self.combinatorial_pass,
        }


def verify_cardinality_bounds(p: HypographPartition, mu_total: float, delta1: float) -> BoundsReport:
    if not (mu_total > 0 and delta1 > 0):
        raise ValueError("mu_total and delta1 must be positive")
    if p.thin_intervals is None:
        raise ValueError("bounds need a thick/thin partition")
    gap = p.params.exceptional_gap
    G = [n for n in p.thin_necks if not n.exceptional]
    H = [n for n in G if n.height < gap]
    n_t, n_m = len(p.classes), len(p.leaves)
    n_c = len(thick_components(p))
    q = mu_total / delta1
    checks = (
        BoundCheck("classes <= 2 leaves", n_t, 2 * n_m, n_t <= 2 * n_m, True),
        BoundCheck("H <= 2 classes", len(H), 2 * n_t, len(H) <= 2 * n_t, True),
        BoundCheck("classes <= 2 mu/delta1", n_t, 2 * q, n_t <= 2 * q, False),
        BoundCheck("thick components <= 10 mu/delta1", n_c, 10 * q, n_c <= 10 * q, False),
        BoundCheck("G <= 12 mu/delta1", len(G), 12 * q, len(G) <= 12 * q, False),
    )
    return BoundsReport(n_t, n_m, n_c, len(G), len(H), checks)


# -- dense disks -------------------------------------------------------------------

@dataclass(frozen=True)
class Disk:
    component: int
    center: Number
    level: Number
    radius: float


@dataclass(frozen=True)
class DiskAssignment:
    disks: tuple[Disk, ...]
    disjoint: bool
    worst_margin: float


class SegmentTooShort(ValueError):
    pass


def dense_disk_assignment(field: PiecewiseScalarField, params: PartitionParams, r: RadiusProfile,
                          segments: Sequence[ESegment]) -> DiskAssignment:
    """One disk per segment, centred at the segment midpoint, radius ``exp(-t) r(x)``.

    The midpoint lies at distance ``>= 2 exp(-t)`` from both ends because every
    segment is required to have length at least ``8 exp(-t)``.
    """
    disks = []
    for seg in segments:
        t = float(seg.level)
        scale = math.exp(-t)
        if float(seg.arc.length) < 8 * scale * (1 - 1e-12):
            raise SegmentTooShort(f"segment of length {float(seg.arc.length):.6g} below 8 exp(-t) = {8 * scale:.6g}")
        x = seg.arc.midpoint()
        if field.component(seg.component).is_circle:
            x = x % field.component(seg.component).length
        disks.append(Disk(seg.component, x, seg.level, scale * float(r(seg.component, x))))
    worst = math.inf
    for a in range(len(disks)):
        for b in range(a + 1, len(disks)):
            d1, d2 = disks[a], disks[b]
            if d1.component != d2.component:
                continue
            comp = field.component(d1.component)
            dist = float(abs(d1.center - d2.center))
            if comp.is_circle:
                dist = min(dist, float(comp.length) - dist)
            need = 2 * (math.exp(-float(d1.level)) + math.exp(-float(d2.level)))
            worst = min(worst, dist - need)
    return DiskAssignment(tuple(disks), worst > 0, worst)


@dataclass(frozen=True)
class DiscretizedThickSegment:
    step: int
    level: float
    base_level: float
    length: float
    count: int
    pieces: tuple[ESegment, ...]


def discretize_thick_levels(p: HypographPartition, steps: int) -> list[DiscretizedThickSegment]:
    """Cut thick slices at levels ``2 i ln 3 + t_min`` into pieces of length ``8 exp(-t)``.

    A thick slice already labelled K is used at its own level.  A slice inside an
    exceptional neck is replaced by the first K slice above it, looking at most
    ``ln 3`` higher, taken midway into that K stretch.
    """
    params = p.params
    ln3 = math.log(3)
    out = []
    comps = thick_components(p)
    in_c = {}
    for group in comps:
        for piece in group:
            in_c.setdefault(piece.class_id, []).append(piece.levels)
    for i in range(steps):
        t_i = 2 * i * ln3 + float(params.base_level)
        for c in p.classes:
            if not c.levels.contains(t_i) or not any(iv.contains(t_i) for iv in in_c.get(c.id, [])):
                continue
            found = _thick_level_above(p, c.id, t_i, t_i + ln3)
            if found is None:
                continue
            cid, t = found
            seg = p.slice(cid, t)
            length = float(seg.arc.length)
            count = math.floor(math.exp(t) * length / 8)
            step = 8 * math.exp(-t)
            pieces = []
            for k in range(count):
                a = seg.arc.start + k * step
                pieces.append(ESegment(seg.component, Arc(seg.component, a, a + step), t, p.field))
            out.append(DiscretizedThickSegment(i, t, t_i, length, count, tuple(pieces)))
    return out


def _thick_level_above(p: HypographPartition, cid: int, t0: float, t1: float):
    thin = p.thin_intervals
    if not _thin_at(thin, cid, t0):
        return cid, t0
    c = p[cid]
    neck = next(iv for iv in thin[cid] if iv.contains(t0))
    if neck.hi < c.top:
        nxt = [iv.lo for iv in thin[cid] if iv.lo > neck.hi]
        stop = min([c.top, t1] + nxt)
        t = (float(neck.hi) + float(stop)) / 2
        return (cid, t) if t < t1 else None
    for ch in c.children:
        child = p[ch]
        if any(iv.lo == child.bottom for iv in thin[ch]):
            continue
        nxt = [iv.lo for iv in thin[ch]]
        stop = min([child.top, t1] + nxt)
        t = (float(child.bottom) + float(stop)) / 2
        if t < t1:
            return ch, t
    return None
