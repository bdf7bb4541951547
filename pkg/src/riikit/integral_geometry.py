"""Cauchy-Crofton length estimates for polylines in real projective space.

Points of RP^n are unit vectors in R^(n+1) up to sign.  A curve is stored as a
sign-aligned polyline: consecutive representatives have positive inner product,
and consecutive vertices are joined by the shorter great-circle arc.  Lengths are
normalized so that a projective line has length 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

UNIT_TOL = 1e-12
INCIDENCE_TOL = 1e-14


class CurveError(ValueError):
    pass


class DegenerateIncidence(ValueError):
    """A polyline vertex lies on the hyperplane."""


@dataclass(frozen=True, eq=False)
class ProjectiveCurve:
    points: np.ndarray
    closed: bool = True
    closing_sign: float = dc_field(init=False, default=1.0)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] < 2:
            raise CurveError("a curve needs at least two points in R^(n+1), n >= 1")
        if not np.all(np.isfinite(pts)):
            raise CurveError("curve points must be finite")
        norms = np.linalg.norm(pts, axis=1)
        if np.max(np.abs(norms - 1)) > UNIT_TOL:
            raise CurveError("curve points must be unit vectors")
        for k in range(1, len(pts)):
            d = pts[k] @ pts[k - 1]
            if d < 0:
                pts[k] = -pts[k]
                d = -d
            if d <= UNIT_TOL:
                raise CurveError(f"consecutive points {k - 1}, {k} are a quarter turn apart: ambiguous lift")
        sign = 1.0
        if self.closed:
            d = pts[-1] @ pts[0]
            if abs(d) <= UNIT_TOL:
                raise CurveError("closing segment is ambiguous")
            sign = 1.0 if d > 0 else -1.0
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "closing_sign", sign)

    @property
    def n(self) -> int:
        return self.points.shape[1] - 1

    def segment_ends(self) -> tuple[np.ndarray, np.ndarray]:
        p = self.points
        if self.closed:
            return p, np.vstack([p[1:], self.closing_sign * p[:1]])
        return p[:-1], p[1:]

    def transformed(self, matrix: np.ndarray) -> "ProjectiveCurve":
        return ProjectiveCurve(self.points @ np.asarray(matrix).T, self.closed)

    def to_dict(self) -> dict:
        return {"n": self.n, "closed": self.closed, "points": self.points.tolist()}

    @classmethod
    def from_dict(cls, doc: dict) -> "ProjectiveCurve":
        try:
            pts = np.array(doc["points"], dtype=float)
            closed = bool(doc.get("closed", True))
            n = int(doc["n"])
        except (KeyError, TypeError, ValueError) as exc:
            raise CurveError(f"malformed curve document: {exc}") from exc
        if pts.ndim != 2 or pts.shape[1] != n + 1:
            raise CurveError("points must have n + 1 coordinates")
        return cls(pts, closed)


def load_curve(path: str | Path) -> ProjectiveCurve:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise CurveError(f"invalid JSON in {path}: {exc}") from exc
    return ProjectiveCurve.from_dict(doc)


@dataclass(frozen=True)
class Hyperplane:
    normal: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.normal, dtype=float)
        if abs(np.linalg.norm(v) - 1) > UNIT_TOL:
            raise ValueError("hyperplane normal must be a unit vector")
        object.__setattr__(self, "normal", v)


def _angles(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return 2 * np.arctan2(np.linalg.norm(p - q, axis=1), np.linalg.norm(p + q, axis=1))


def normalized_length(curve: ProjectiveCurve) -> float:
    """Spherical length of the aligned polyline divided by pi."""
    p, q = curve.segment_ends()
    return float(np.sum(_angles(p, q)) / math.pi)


def _crossings(dots: np.ndarray, closed: bool, sign: float) -> np.ndarray:
    """Sign changes along each row of vertex/normal inner products."""
    if closed:
        nxt = np.concatenate([dots[:, 1:], sign * dots[:, :1]], axis=1)
        cur = dots
    else:
        cur, nxt = dots[:, :-1], dots[:, 1:]
    return np.count_nonzero((cur > 0) != (nxt > 0), axis=1)


def count_intersections(curve: ProjectiveCurve, h: Hyperplane | np.ndarray) -> int:
    normal = h.normal if isinstance(h, Hyperplane) else Hyperplane(h).normal
    dots = curve.points @ normal
    if np.min(np.abs(dots)) <= INCIDENCE_TOL:
        raise DegenerateIncidence("a vertex lies on the hyperplane")
    return int(_crossings(dots[None, :], curve.closed, curve.closing_sign)[0])


@dataclass(frozen=True)
class CroftonEstimate:
    mean: float
    std_error: float
    samples: int
    exact_length: float
    resamples: int = 0
    counts: np.ndarray | None = dc_field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {"mean": self.mean, "std_error": self.std_error, "samples": self.samples,
                "exact_length": self.exact_length, "resamples": self.resamples}


def _chunk_counts(curve: ProjectiveCurve, rng: np.random.Generator, size: int) -> tuple[np.ndarray, int]:
    dim = curve.n + 1
    normals = rng.standard_normal((size, dim))
    resamples = 0
    while True:
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
        dots = normals @ curve.points.T
        bad = np.min(np.abs(dots), axis=1) <= INCIDENCE_TOL
        if not bad.any():
            break
        resamples += int(bad.sum())
        normals[bad] = rng.standard_normal((int(bad.sum()), dim))
    return _crossings(dots, curve.closed, curve.closing_sign), resamples


def crofton_length(curve: ProjectiveCurve, n_samples: int, seed: int, chunk: int | None = None) -> CroftonEstimate:
    """Mean hyperplane intersection count over uniform normals on the sphere.

    The samples are split into chunks, each with its own stream spawned from
    ``seed``, so the result depends only on ``seed``, ``n_samples`` and ``chunk``.
    """
    if n_samples < 100:
        raise ValueError("use at least 100 samples")
    if chunk is None:
        chunk = max(256, min(16384, 4_000_000 // len(curve.points)))
    sizes = [min(chunk, n_samples - s) for s in range(0, n_samples, chunk)]
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    parts, resamples = [], 0
    for size, ss in zip(sizes, streams):
        c, r = _chunk_counts(curve, np.random.default_rng(ss), size)
        parts.append(c)
        resamples += r
    counts = np.concatenate(parts)
    mean = float(counts.mean())
    se = float(counts.std(ddof=1) / math.sqrt(n_samples))
    return CroftonEstimate(mean, se, n_samples, normalized_length(curve), resamples, counts)


@dataclass(frozen=True)
class RiiCheck:
    lhs: float
    rhs: float
    passed: bool


def verify_projective_rii(boundary: ProjectiveCurve, degree: int, tol: float = 1e-4) -> RiiCheck:
    """Compare ``2 pi Area = degree`` with the normalized boundary length."""
    if degree <= 0:
        raise ValueError("degree must be positive")
    area = degree / (2 * math.pi)
    lhs = 2 * math.pi * area
    rhs = normalized_length(boundary)
    return RiiCheck(lhs, rhs, lhs >= rhs - tol)


# -- built-in curves -------------------------------------------------------------

def _unit(rows: np.ndarray) -> np.ndarray:
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def line(n_points: int = 360, n: int = 2, fraction: float = 1.0) -> ProjectiveCurve:
    """The projective line through e0 and e1 (a fraction of it when ``fraction < 1``)."""
    theta = np.linspace(0, math.pi * fraction, n_points, endpoint=fraction < 1)
    pts = np.zeros((n_points, n + 1))
    pts[:, 0], pts[:, 1] = np.cos(theta), np.sin(theta)
    return ProjectiveCurve(pts, closed=fraction >= 1)


def conic(n_points: int = 4096, t: float = 1.0) -> ProjectiveCurve:
    """Real locus of ``x^2 + y^2 = t z^2`` in RP^2."""
    if t <= 0:
        raise ValueError("t must be positive")
    theta = np.linspace(0, 2 * math.pi, n_points, endpoint=False)
    s = math.sqrt(t)
    pts = np.column_stack([s * np.cos(theta), s * np.sin(theta), np.ones_like(theta)])
    return ProjectiveCurve(_unit(pts), closed=True)


def rational_cubic(n_points: int = 4096) -> ProjectiveCurve:
    """Image of RP^1 under ``(u:v) -> (Re (u+iv)^3 : Im (u+iv)^3 : u (u^2+v^2))``."""
    phi = np.linspace(0, math.pi, n_points, endpoint=False)
    pts = np.column_stack([np.cos(3 * phi), np.sin(3 * phi), np.cos(phi)])
    return ProjectiveCurve(_unit(pts), closed=True)


BUILTINS = {
    "line": (line, 1),
    "conic": (conic, 2),
    "cubic": (rational_cubic, 3),
}


def builtin(name: str) -> tuple[ProjectiveCurve, int]:
    try:
        make, degree = BUILTINS[name]
    except KeyError:
        raise CurveError(f"unknown builtin curve {name!r}; choose from {sorted(BUILTINS)}") from None
    return make(), degree
