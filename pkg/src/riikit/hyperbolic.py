"""Rotationally symmetric metrics, collars, conformal size and minimum-spanning bridge chains.

A metric ``d rho^2 + h(rho)^2 d theta^2`` is described by its profile ``h``.  The
modulus of a band ``a <= rho <= b`` is the integral of ``1 / h``; the conformal
radius of a geodesic disk of radius ``r`` about a pole is
``exp(log r + int_0^r (1/h - 1/rho) d rho)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

SERIES_CUTOFF = 1e-4


# -- collars -----------------------------------------------------------------------

def _check_length(ell: float) -> None:
    if not ell > 0 or not math.isfinite(ell):
        raise ValueError("geodesic length must be positive and finite")


def collar_width(ell: float) -> float:
    """Half-width ``asinh(1 / sinh(ell / 2))`` of the standard collar about a geodesic of length ``ell``."""
    _check_length(ell)
    return math.asinh(1 / math.sinh(ell / 2))


def injrad_in_collar(ell: float, d: float) -> float:
    """Injectivity radius at distance ``d`` from the collar boundary."""
    _check_length(ell)
    w = collar_width(ell)
    if not 0 <= d <= w * (1 + 1e-12):
        raise ValueError(f"d must lie in [0, {w}]")
    return math.asinh(math.cosh(ell / 2) * math.cosh(d) - math.sinh(d))


@dataclass(frozen=True)
class CollarData:
    ell: float
    width: float

    @classmethod
    def of(cls, ell: float) -> "CollarData":
        return cls(ell, collar_width(ell))

    @property
    def interval(self) -> tuple[float, float]:
        return (-self.width, self.width)


# -- profiles ----------------------------------------------------------------------

@dataclass(frozen=True)
class MetricProfile:
    """``kind`` is one of ``flat`` (h = rho), ``spherical`` (sin), ``hyperbolic`` (sinh),
    ``collar`` (ell cosh(rho) / 2 pi, needs ``ell``) or ``cylinder`` (h = 1)."""

    kind: str
    ell: float | None = None

    def __post_init__(self):
        if self.kind not in _PROFILES:
            raise ValueError(f"unknown profile {self.kind!r}; choose from {sorted(_PROFILES)}")
        if self.kind == "collar":
            if self.ell is None:
                raise ValueError("collar profile needs ell")
            _check_length(self.ell)

    def h(self, rho: float) -> float:
        if self.kind == "collar":
            return self.ell * math.cosh(rho) / (2 * math.pi)
        return _PROFILES[self.kind](rho)

    @property
    def domain(self) -> tuple[float, float]:
        if self.kind == "collar":
            w = collar_width(self.ell)
            return (-w, w)
        return {"flat": (0.0, math.inf), "spherical": (0.0, math.pi), "hyperbolic": (0.0, math.inf),
                "cylinder": (-math.inf, math.inf)}[self.kind]


_PROFILES: dict[str, Callable[[float], float] | None] = {
    "flat": lambda r: r,
    "spherical": math.sin,
    "hyperbolic": math.sinh,
    "cylinder": lambda r: 1.0,
    "collar": None,
}


def modulus(profile: MetricProfile, a: float, b: float) -> float:
    """Conformal length of the band ``a <= rho <= b``."""
    lo, hi = profile.domain
    slack = 1e-12 * max(1.0, abs(lo), abs(hi)) if math.isfinite(hi - lo) else 0.0
    if not (a <= b and lo - slack <= a and b <= hi + slack):
        raise ValueError(f"interval [{a}, {b}] outside the profile domain [{lo}, {hi}]")
    if (a == 0 and profile.kind in ("flat", "spherical", "hyperbolic")) or (
            b >= math.pi and profile.kind == "spherical"):
        raise ValueError("the band touches a pole; its modulus is infinite")
    if a == b:
        return 0.0
    val, _ = quad(lambda r: 1 / profile.h(r), a, b, epsabs=1e-13, epsrel=1e-13, limit=200)
    return float(val)


def collar_modulus_closed_form(ell: float) -> float:
    return 4 * math.pi / ell * math.atan(math.sinh(collar_width(ell)))


# -- conformal radius ----------------------------------------------------------------

def _series(K: int, r: float) -> float:
    """``int_0^r (1/h - 1/rho)`` from the Taylor expansion of ``h``, for small ``r``."""
    if K == 0:
        return 0.0
    # 1/sin x - 1/x = x/6 + 7 x^3/360 + ...;  sinh flips the odd-order signs
    return K * r * r / 12 + 7 * r ** 4 / 1440


def conformal_radius(K: int, r: float) -> float:
    if K not in (-1, 0, 1):
        raise ValueError("curvature must be -1, 0 or 1")
    if not r > 0 or (K == 1 and not r < math.pi) or not math.isfinite(r):
        raise ValueError("radius out of domain")
    if K == 0:
        return r
    h = math.sin if K == 1 else math.sinh
    cut = min(r, SERIES_CUTOFF)
    integral = _series(K, cut)
    if r > cut:
        tail, _ = quad(lambda x: 1 / h(x) - 1 / x, cut, r, epsabs=1e-14, epsrel=1e-13, limit=200)
        integral += tail
    return math.exp(math.log(r) + integral)


def conformal_radius_closed_form(K: int, r: float) -> float:
    return {1: lambda: 2 * math.tan(r / 2), 0: lambda: r, -1: lambda: 2 * math.tanh(r / 2)}[K]()


def hyperbolic_radius_constant(kappa: float) -> float:
    """Largest ``c`` with ``r_conf >= c r`` for all ``0 < r < kappa`` in curvature -1.

    The ratio ``r_conf / r`` decreases in ``r``, so ``c`` is its value at ``kappa``.
    """
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    return conformal_radius(-1, kappa) / kappa


# -- injectivity radius ratio ------------------------------------------------------

@dataclass(frozen=True)
class RatioScan:
    min_ratio: float
    max_ratio: float
    argmin: tuple[float, float]
    argmax: tuple[float, float]
    proof_bound: float
    rows: tuple[tuple[float, float, float], ...] = ()


def collar_ratio(ell: float, rho_fraction: float) -> float:
    """``h(rho) / InjRad`` at ``rho = rho_fraction * width`` inside the collar of ``ell``."""
    w = collar_width(ell)
    rho = rho_fraction * w
    d = max(0.0, w - abs(rho))
    return ell * math.cosh(rho) / (2 * math.pi) / injrad_in_collar(ell, d)


def proof_bound(ell: float) -> float:
    """``b (1/sinh b + sqrt(1/sinh^2 b + 1)) / 2 pi`` with ``b = ell / 2``."""
    b = ell / 2
    return b * (1 / math.sinh(b) + math.sqrt(1 / math.sinh(b) ** 2 + 1)) / (2 * math.pi)


def injrad_ratio_scan(ells: Sequence[float], rho_fractions: Sequence[float], keep_rows: bool = False) -> RatioScan:
    """Scan ``h / InjRad`` over collars; ``rho_fractions`` are positions in units of the width, in [-1, 1]."""
    if not len(ells) or not len(rho_fractions):
        raise ValueError("grids must be nonempty")
    if any(abs(f) > 1 for f in rho_fractions):
        raise ValueError("rho fractions must lie in [-1, 1]")
    lo = (math.inf, None)
    hi = (-math.inf, None)
    rows = []
    for ell in ells:
        for fr in rho_fractions:
            ell, fr = float(ell), float(fr)
            q = collar_ratio(ell, fr)
            if q < lo[0]:
                lo = (q, (ell, fr))
            if q > hi[0]:
                hi = (q, (ell, fr))
            if keep_rows:
                rows.append((ell, fr, q))
    return RatioScan(lo[0], hi[0], lo[1], hi[1], max(proof_bound(e) for e in ells), tuple(rows))


# -- k-tameness ----------------------------------------------------------------------

@dataclass(frozen=True)
class TameResult:
    tame: bool
    worst_ratio: float
    worst_interval: tuple[float, float] | None


def _clipped_length(pts: np.ndarray, a: float, b: float) -> float:
    """Length of the polyline inside the band ``a <= s <= b`` (flat metric)."""
    total = 0.0
    for (s0, t0), (s1, t1) in zip(pts[:-1], pts[1:]):
        seg = math.hypot(s1 - s0, t1 - t0)
        if s0 == s1:
            if a <= s0 <= b:
                total += seg
            continue
        u0 = (a - s0) / (s1 - s0)
        u1 = (b - s0) / (s1 - s0)
        lo, hi = max(0.0, min(u0, u1)), min(1.0, max(u0, u1))
        if hi > lo:
            total += (hi - lo) * seg
    return total


def is_k_tame(geodesic: Sequence[tuple[float, float]], k: float, length: float,
              subcylinder_probes: int = 16) -> TameResult:
    """Check ``len(geodesic in I') <= 2 pi k max(Mod I', 1)`` on ``[0, length] x S^1``.

    ``geodesic`` lists ``(s, theta)`` with ``theta`` unwrapped (consecutive points
    differ by the actual angular displacement).  Bands run between all pairs of
    ``subcylinder_probes`` equally spaced axial positions.
    """
    pts = np.asarray(geodesic, dtype=float).reshape(-1, 2)
    if len(pts) and (pts[:, 0].min() < 0 or pts[:, 0].max() > length):
        raise ValueError("polyline leaves the cylinder")
    probes = np.linspace(0, length, max(2, subcylinder_probes))
    worst, where = 0.0, None
    if len(pts) >= 2:
        for i, a in enumerate(probes):
            for b in probes[i + 1:]:
                ratio = _clipped_length(pts, a, b) / (2 * math.pi * max(float(b - a), 1.0))
                if ratio > worst:
                    worst, where = ratio, (float(a), float(b))
    return TameResult(bool(worst <= k), float(worst), where)


def helix(m: int, length: float = 1.0, points_per_turn: int = 64) -> list[tuple[float, float]]:
    """Geodesic winding ``m`` times while crossing ``[0, length]``."""
    n = max(2, m * points_per_turn + 1)
    return [(length * i / (n - 1), 2 * math.pi * m * i / (n - 1)) for i in range(n)]


# -- bridge graphs and admissible chains ---------------------------------------------

@dataclass(frozen=True, eq=False)
class BridgeGraph:
    """Boundary components joined by bridges; ``lengths[i, j]`` is the bridge length (inf if absent)."""

    vertices: tuple
    lengths: np.ndarray

    def __post_init__(self):
        L = np.array(self.lengths, dtype=float)
        n = len(self.vertices)
        if L.shape != (n, n):
            raise ValueError("length matrix must be square and match the vertex list")
        if not np.array_equal(L, L.T):
            raise ValueError("length matrix must be symmetric")
        off = L[~np.eye(n, dtype=bool)]
        if np.any(off <= 0) or np.any(np.isnan(off)):
            raise ValueError("bridge lengths must be positive")
        L.setflags(write=False)
        object.__setattr__(self, "lengths", L)
        object.__setattr__(self, "vertices", tuple(self.vertices))

    def edges(self) -> list[tuple[float, int, int]]:
        n = len(self.vertices)
        return [(float(self.lengths[i, j]), i, j) for i in range(n) for j in range(i + 1, n)
                if math.isfinite(self.lengths[i, j])]


class DisconnectedGraph(ValueError):
    pass


class _DisjointSets:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def minimum_spanning_tree(g: BridgeGraph) -> list[tuple[int, int]]:
    """Kruskal's algorithm; ties broken by ``(length, smaller id, larger id)``."""
    ds = _DisjointSets(len(g.vertices))
    tree = [(i, j) for _, i, j in sorted(g.edges()) if ds.union(i, j)]
    if len(tree) != len(g.vertices) - 1:
        raise DisconnectedGraph("bridge graph is not connected")
    return tree


def _tree_path(tree: list[tuple[int, int]], n: int, src: int, dst: int) -> list[int]:
    adj: dict[int, list[int]] = {v: [] for v in range(n)}
    for i, j in tree:
        adj[i].append(j)
        adj[j].append(i)
    prev = {src: None}
    stack = [src]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in prev:
                prev[w] = v
                stack.append(w)
    path = [dst]
    while path[-1] != src:
        path.append(prev[path[-1]])
    return path[::-1]


@dataclass(frozen=True)
class ChainResult:
    path: tuple
    tree: tuple[tuple[int, int], ...]
    exchange_violations: tuple[tuple[tuple[int, int], tuple[int, int]], ...] = ()

    @property
    def exchange_ok(self) -> bool:
        return not self.exchange_violations


ExchangeOracle = Callable[[tuple[int, int], tuple[int, int]], bool]


def admissible_chain(g: BridgeGraph, source, target, exchange_oracle: ExchangeOracle | None = None) -> ChainResult:
    """Chain of boundary components from ``source`` to ``target`` along a minimum spanning tree.

    With ``exchange_oracle(tree_edge, other_edge)`` (true when ``other_edge`` is a
    strictly better replacement), every swap that keeps a spanning tree is tested
    and the offending pairs are returned.
    """
    idx = {v: k for k, v in enumerate(g.vertices)}
    if source not in idx or target not in idx:
        raise ValueError("query vertices must belong to the graph")
    if source == target:
        raise ValueError("query vertices must be distinct")
    n = len(g.vertices)
    tree = minimum_spanning_tree(g)
    path = _tree_path(tree, n, idx[source], idx[target])
    bad = []
    if exchange_oracle is not None:
        tree_set = set(tree)
        for _, i, j in g.edges():
            if (i, j) in tree_set:
                continue
            # every tree edge on the cycle closed by (i, j) can be swapped for it
            cyc = _tree_path(tree, n, i, j)
            for e in zip(cyc[:-1], cyc[1:]):
                e = (min(e), max(e))
                if exchange_oracle(e, (i, j)):
                    bad.append((e, (i, j)))
    return ChainResult(tuple(g.vertices[k] for k in path), tuple(tree), tuple(bad))


def shorter_bridge_oracle(g: BridgeGraph) -> ExchangeOracle:
    """Replacement is an improvement when it is strictly shorter."""
    return lambda e, f: g.lengths[f] < g.lengths[e]
