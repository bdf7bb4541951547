"""Brute-force grid reconstruction of classes and thin necks.

Independent of the exact sweep: the field is sampled with ``numpy.interp`` on a
uniform node grid that contains every breakpoint, superlevel sets are node runs
(exact connectivity, lengths within two node spacings), and classes are found by
linking runs between consecutive grid levels (a run with two or more runs above it starts
new classes).  Only used as a test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from fractions import Fraction

from .field import PiecewiseScalarField


@dataclass
class GridClass:
    component: int
    parent: int | None
    levels: list[float]
    runs: list[tuple[int, int]]
    lengths: list[float]
    children: list[int]


@dataclass
class GridNeck:
    class_id: int
    first: int
    last: int
    height: float
    exceptional: bool


@dataclass
class GridPartition:
    levels: dict[int, np.ndarray]
    xs: dict[int, np.ndarray]
    classes: list[GridClass]
    necks: list[GridNeck]
    thin: list[list[bool]]


# irrational level offset keeps grid levels off the rational value lattice
_OFFSET = (3 - math.sqrt(5)) / 2


def _node_count(field: PiecewiseScalarField, i: int, per_unit: int) -> int:
    """Node count with every breakpoint on a node, so node runs see exact connectivity."""
    comp = field.component(i)
    target = max(16, int(math.ceil(float(comp.length) * per_unit)))
    try:
        den = 1
        for p, _ in field.breakpoints[i]:
            den = math.lcm(den, (Fraction(p) / Fraction(comp.length)).denominator)
    except (TypeError, ValueError):
        return target
    if den > target:
        return target
    return den * -(-target // den)


def _run_length(vals: np.ndarray, a: int, b: int, t: float, dx: float, circular: bool) -> float:
    """Length of the node run ``a..b-1`` extended to the interpolated level crossings."""
    m = len(vals)
    ln = (b - a - 1) * dx
    for inside, outside in ((a, a - 1), (b - 1, b)):
        if not circular and not 0 <= outside < m:
            continue
        vi, vo = vals[inside % m], vals[outside % m]
        ln += dx * (vi - t) / (vi - vo)
    return ln


def _runs(mask: np.ndarray, circular: bool) -> list[tuple[int, int, bool]]:
    """Maximal runs of True as (start, stop_exclusive_unrolled, full)."""
    n = len(mask)
    if mask.all():
        return [(0, n, True)]
    if not mask.any():
        return []
    m = mask.astype(np.int8)
    d = np.diff(np.concatenate(([0], m, [0])))
    starts = np.flatnonzero(d == 1)
    stops = np.flatnonzero(d == -1)
    runs = [(int(a), int(b), False) for a, b in zip(starts, stops)]
    if circular and len(runs) > 1 and runs[0][0] == 0 and runs[-1][1] == n:
        a, _, _ = runs.pop()
        first = runs.pop(0)
        runs.append((a, first[1] + n, False))
    return runs


def grid_partition(field: PiecewiseScalarField, n_levels: int = 1000, cells_per_unit: int = 2048,
                   width_coef: float = 24.0, gap: float = math.log(3)) -> GridPartition:
    classes: list[GridClass] = []
    levels_by_comp, xs_by_comp, steps = {}, {}, {}
    xi = float(field.xi)
    for i in range(field.n_components):
        comp = field.component(i)
        length = float(comp.length)
        circular = comp.is_circle
        n = _node_count(field, i, cells_per_unit)
        dx = length / n
        xs = np.arange(n if circular else n + 1) * dx
        bp = field.breakpoints[i]
        px = np.array([float(p) for p, _ in bp])
        pv = np.array([float(v) for _, v in bp])
        if circular:
            vals = np.interp(xs, px, pv, period=length)
        else:
            vals = np.interp(xs, px, pv)
        top = float(vals.max())
        step = (top - xi) / n_levels
        ts = np.array([xi] + ([xi + (k - _OFFSET) * step for k in range(1, n_levels + 1)] if step > 0 else []))
        levels_by_comp[i], xs_by_comp[i] = ts, xs
        prev: list[tuple[int, int, bool, int]] = []
        for li, t in enumerate(ts):
            runs = _runs(vals >= t, circular)
            if not runs:
                break
            kids: dict[int, list[tuple[int, int, bool]]] = {}
            if li == 0:
                for r in runs:
                    classes.append(GridClass(i, None, [], [], [], []))
                    kids.setdefault(len(classes) - 1, []).append(r)
                placed = [(r, k) for k, rs in kids.items() for r in rs]
            else:
                for r in runs:
                    m = len(xs)
                    cell = r[0] % m
                    for a, b, full, cid in prev:
                        if full or a <= cell < b or a <= cell + m < b:
                            kids.setdefault(cid, []).append(r)
                            break
                    else:
                        raise AssertionError("grid run without parent")
                placed = []
                for cid, rs in kids.items():
                    if len(rs) >= 2:
                        for r in sorted(rs):
                            classes.append(GridClass(i, cid, [], [], [], []))
                            classes[cid].children.append(len(classes) - 1)
                            placed.append((r, len(classes) - 1))
                    else:
                        placed.append((rs[0], cid))
            prev = []
            for (a, b, full), cid in placed:
                c = classes[cid]
                c.levels.append(float(t))
                c.runs.append((a, b))
                c.lengths.append(length if full else _run_length(vals, a, b, t, dx, circular))
                prev.append((a, b, full, cid))
        m = len(vals)
        for c in classes:
            if c.component != i:
                continue
            a, b = c.runs[-1]
            idx = np.arange(a, b) % m
            if not c.children:
                # a leaf closes at its sampled peak (a point, or a plateau run)
                node = int(idx[np.argmax(vals[idx])])
                close = float(vals[node])
            else:
                # a branching class closes at the lowest value separating its children
                covered = set()
                for ch in c.children:
                    ca, cb = classes[ch].runs[0]
                    covered.update(int(j) for j in np.arange(ca, cb) % m)
                gap_nodes = [int(j) for j in idx if int(j) not in covered]
                close = float(min(vals[gap_nodes]))
                node = next(iter(covered))
            for ra, rb, rfull in _runs(vals >= close, circular):
                if rfull or ra <= node < rb or ra <= node + m < rb:
                    break
            c.levels.append(close)
            c.runs.append((ra, rb))
            c.lengths.append(length if rfull else _run_length(vals, ra, rb, close, dx, circular))
        steps[i] = step
    thin = [[ln <= width_coef * math.exp(-t) for t, ln in zip(c.levels, c.lengths)] for c in classes]
    necks = []
    for cid, c in enumerate(classes):
        flags = thin[cid]
        half = steps[c.component] / 2
        k = 0
        while k < len(flags):
            if not flags[k]:
                k += 1
                continue
            j = k
            while j + 1 < len(flags) and flags[j + 1]:
                j += 1
            lo = c.levels[k] if c.levels[k] == xi else c.levels[k] - half
            hi = c.levels[j] if j == len(flags) - 1 else c.levels[j] + half
            height = hi - lo
            if k > 0:
                below = True
            elif c.parent is None:
                below = False
            else:
                pf = thin[c.parent]
                below = (not pf[-1]) or (len(pf) > 1 and not pf[-2])
            if j < len(flags) - 1:
                above = True
            else:
                above = any(not thin[ch][0] for ch in c.children)
            necks.append(GridNeck(cid, k, j, height, height < gap and below and above))
            k = j + 1
    return GridPartition(levels_by_comp, xs_by_comp, classes, necks, thin)


def compare_with_grid(p, grid: GridPartition) -> list[str]:
    """Differences between an exact thick/thin partition and the grid reconstruction."""
    problems = []
    if len(p.classes) != len(grid.classes):
        problems.append(f"class count {len(p.classes)} != grid {len(grid.classes)}")
        return problems
    mapping = {}
    for gid, gc in enumerate(grid.classes):
        mid = len(gc.levels) // 2
        t, (a, _) = gc.levels[mid], gc.runs[mid]
        xs = grid.xs[gc.component]
        x = float(xs[a % len(xs)])
        mapping[gid] = p.class_at(gc.component, x, t)
    if sorted(mapping.values()) != list(range(len(p.classes))):
        problems.append("grid classes do not map one-to-one onto exact classes")
        return problems
    for gid, cid in mapping.items():
        want = [n.exceptional for n in p.thin_necks if n.class_id == cid]
        got = [n.exceptional for n in grid.necks if n.class_id == gid]
        if len(want) != len(got):
            problems.append(f"class {cid}: {len(want)} thin necks, grid finds {len(got)}")
        elif want != got:
            problems.append(f"class {cid}: exceptional flags {want} != grid {got}")
    return problems
