"""The annulus family ``z -> (a z, a z, a / z^2)`` and energy-measure checks.

For ``a > 0`` the map is defined on ``r_a <= |z| <= 1`` where ``r_a`` is the root
in (0, 1) of ``a^2 r^6 + r^4 - a^2``.  The outer circle lands in the fiber of
``H = (|z1|^2 - |z3|^2, |z2|^2 - |z3|^2, Im z1 z2 z3)`` over ``(0, 0, 0)`` and the
inner circle in the fiber over ``(-1, -1, 0)``.  The area stays ``2 pi`` while
the boundary length grows linearly in ``a``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path
from typing import Literal

import numpy as np

from .hypograph.field import CIRCLE, Component, Domain1D, PiecewiseScalarField


# -- inner radius ----------------------------------------------------------------

def _defect(s: float, a2: float) -> float:
    """``r^4 - a^2 (1 - r^6)`` at ``r = 1 - s``, accurate for tiny ``s``."""
    return (1 - s) ** 4 + a2 * math.expm1(6 * math.log1p(-s))


def _defect_ds(s: float, a2: float) -> float:
    return -4 * (1 - s) ** 3 - 6 * a2 * (1 - s) ** 5


def _solve_gap(a: float) -> float:
    """Root ``s = 1 - r_a`` of the defining equation, by bisection then one Newton step."""
    a2 = a * a
    lo, hi = 0.5 / (4 + 6 * a2), 1.0  # defect(lo) >= 1/2 > 0 > defect(hi)
    for _ in range(5000):
        # geometric midpoints while the bracket spans many scales
        mid = math.sqrt(lo * hi) if hi > 4 * lo else 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if _defect(mid, a2) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * hi:
            break
    s = 0.5 * (lo + hi)
    step = _defect(s, a2) / _defect_ds(s, a2)
    if lo <= s - step <= hi:
        s -= step
    return s


def solve_inner_radius(a: float) -> float:
    if not a > 0 or not math.isfinite(a):
        raise ValueError("a must be a positive finite number")
    return 1 - _solve_gap(a)


@dataclass(frozen=True)
class AnnulusMap:
    """``u(z) = (a z, a z, a / z^2)`` on ``r_inner <= |z| <= 1``.

    ``gap = 1 - r_inner`` is kept separately because it is resolved far more
    accurately than ``r_inner`` itself when ``a`` is large.
    """

    a: float
    r_inner: float = dc_field(init=False)
    gap: float = dc_field(init=False)

    def __post_init__(self):
        if not self.a > 0 or not math.isfinite(self.a):
            raise ValueError("a must be a positive finite number")
        s = _solve_gap(self.a)
        object.__setattr__(self, "gap", s)
        object.__setattr__(self, "r_inner", 1 - s)

    @property
    def residual(self) -> float:
        """Defining-equation residual ``a^2 r^6 + r^4 - a^2`` at the stored root."""
        return _defect(self.gap, self.a * self.a)

    @property
    def modulus(self) -> float:
        """Conformal modulus ``ln(1 / r_inner)``."""
        return -math.log1p(-self.gap)

    def __call__(self, z: np.ndarray, coefficients: tuple[float, float, float] | None = None) -> np.ndarray:
        c1, c2, c3 = coefficients or (self.a, self.a, self.a)
        z = np.asarray(z, dtype=complex)
        return np.stack([c1 * z, c2 * z, c3 / z ** 2])

    def derivative(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        a = self.a
        return np.stack([np.full_like(z, a), np.full_like(z, a), -2 * a / z ** 3])

    def speed_squared(self, rho: np.ndarray | float) -> np.ndarray | float:
        """``|u'(z)|^2`` as a function of ``|z|`` alone."""
        a2 = self.a * self.a
        return 2 * a2 + 4 * a2 / np.asarray(rho, dtype=float) ** 6


# -- fibers ----------------------------------------------------------------------

@dataclass(frozen=True)
class LagrangianFiber:
    c: tuple[float, float, float]

    def residual(self, w: np.ndarray) -> np.ndarray:
        h = moment_map(w)
        return np.max(np.abs(h - np.asarray(self.c)[:, None]), axis=0)


OUTER_FIBER = LagrangianFiber((0.0, 0.0, 0.0))
INNER_FIBER = LagrangianFiber((-1.0, -1.0, 0.0))


def moment_map(w: np.ndarray) -> np.ndarray:
    z1, z2, z3 = w
    m3 = np.abs(z3) ** 2
    return np.stack([np.abs(z1) ** 2 - m3, np.abs(z2) ** 2 - m3, np.imag(z1 * z2 * z3)])


def _exact_moment_residual(x: float, y: float, coefficients: tuple[float, float, float],
                           c: tuple[float, float, float]) -> float:
    """``max |H(u(z)) - c|`` at the double-precision point ``z = x + iy``, evaluated exactly.

    Floating evaluation loses about ``a^3 * 1e-16`` in the product term; rationals
    remove that so the residual measures the map, not the arithmetic.
    """
    c1, c2, c3 = (Fraction(v) for v in coefficients)
    X, Y = Fraction(x), Fraction(y)
    n2 = X * X + Y * Y
    # a / z^2 = a conj(z)^2 / |z|^4
    w3 = (c3 * (X * X - Y * Y) / (n2 * n2), c3 * (-2 * X * Y) / (n2 * n2))
    m3 = w3[0] ** 2 + w3[1] ** 2
    h1 = c1 * c1 * n2 - m3
    h2 = c2 * c2 * n2 - m3
    zz = (X * X - Y * Y, 2 * X * Y)  # z1 z2 = c1 c2 z^2
    im = c1 * c2 * (zz[0] * w3[1] + zz[1] * w3[0])
    return float(max(abs(h1 - Fraction(c[0])), abs(h2 - Fraction(c[1])), abs(im - Fraction(c[2]))))


def fiber_residual(m: AnnulusMap, which_boundary: Literal["outer", "inner"], samples: int = 256,
                   coefficients: tuple[float, float, float] | None = None) -> float:
    """Largest ``|H(u(z)) - c|`` over ``samples`` points of one boundary circle.

    The sample points are rounded to doubles; ``H`` is then evaluated exactly.
    """
    if which_boundary == "outer":
        rho, fiber = 1.0, OUTER_FIBER
    elif which_boundary == "inner":
        rho, fiber = m.r_inner, INNER_FIBER
    else:
        raise ValueError("which_boundary must be 'outer' or 'inner'")
    coeffs = coefficients or (m.a, m.a, m.a)
    theta = 2 * np.pi * np.arange(samples) / samples
    xs, ys = rho * np.cos(theta), rho * np.sin(theta)
    return max(_exact_moment_residual(float(x), float(y), coeffs, fiber.c) for x, y in zip(xs, ys))


# -- area and lengths ------------------------------------------------------------

def area(m: AnnulusMap, quadrature_order: int = 64, angular_points: int = 256) -> float:
    """Energy of the map: Gauss-Legendre in ``log |z|`` times a trapezoid rule in angle.

    In ``s = log |z|`` the integrand is ``(2 a^2 + 4 a^2 e^(-6 s)) e^(2 s)``, which
    stays smooth as ``r_a -> 0`` where a radial rule in ``|z|`` would not.
    """
    lo = math.log1p(-m.gap)
    nodes, weights = np.polynomial.legendre.leggauss(quadrature_order)
    s = 0.5 * lo * (1 - nodes)  # maps [-1, 1] onto [lo, 0]
    rho = np.exp(s)
    radial = 0.5 * (-lo) * np.sum(weights * m.speed_squared(rho) * rho ** 2)
    # the integrand is angle-independent, so the periodic trapezoid rule is exact
    angular = angular_points * (2 * np.pi / angular_points)
    return float(radial * angular)


def area_closed_form(m: AnnulusMap) -> float:
    r = m.r_inner
    return 2 * math.pi * m.a ** 2 * (r ** -4 - r ** 2)


def _circle_length(m: AnnulusMap, rho: float, samples: int) -> float:
    theta = 2 * np.pi * np.arange(samples) / samples
    z = rho * np.exp(1j * theta)
    speed = np.sqrt(np.sum(np.abs(m.derivative(z)) ** 2, axis=0))
    return float(np.sum(speed * rho) * (2 * np.pi / samples))


def boundary_length(m: AnnulusMap, samples: int = 512) -> dict[str, float]:
    """Lengths of the two boundary images, by trapezoid quadrature of ``|u'| |dz|``."""
    return {"outer": _circle_length(m, 1.0, samples), "inner": _circle_length(m, m.r_inner, samples)}


def boundary_length_closed_form(m: AnnulusMap) -> dict[str, float]:
    a, r = m.a, m.r_inner
    return {"outer": 2 * math.pi * a * math.sqrt(6),
            "inner": 2 * math.pi * math.sqrt(2 * a * a * r * r + 4 * a * a / r ** 4)}


def cauchy_riemann_residual(m: AnnulusMap, n_radial: int = 32, n_angular: int = 64) -> float:
    """Relative Cauchy-Riemann defect of the third coordinate, from real partial derivatives.

    The first two coordinates are linear and satisfy the equations identically.
    """
    rho = np.exp(np.linspace(math.log1p(-m.gap), 0.0, n_radial))
    theta = 2 * np.pi * np.arange(n_angular) / n_angular
    R, T = np.meshgrid(rho, theta, indexing="ij")
    x, y = R * np.cos(T), R * np.sin(T)
    a = m.a
    q4, q6 = R ** -4, R ** -6
    # a / z^2 = P + iQ with P = a (x^2 - y^2) / |z|^4, Q = -2 a x y / |z|^4
    px = a * (2 * x * q4 - 4 * x * (x * x - y * y) * q6)
    py = a * (-2 * y * q4 - 4 * y * (x * x - y * y) * q6)
    qx = -2 * a * (y * q4 - 4 * x * x * y * q6)
    qy = -2 * a * (x * q4 - 4 * x * y * y * q6)
    scale = 2 * a / R ** 3
    return float(np.max((np.abs(px - qy) + np.abs(py + qx)) / scale))


# -- boundary data for the partition pipeline ------------------------------------

def boundary_log_density(m: AnnulusMap, samples: int = 64, xi: float | None = None) -> PiecewiseScalarField:
    """``ln |u'|`` along the outer and inner circles as a field on two circles.

    Component 0 is the outer circle (length 2 pi), component 1 the inner circle
    (length ``2 pi r_inner``).  The density depends only on ``|z|``, so each
    component is constant.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    rows, comps = [], []
    for rho in (1.0, m.r_inner):
        length = 2 * math.pi * rho
        g = 0.5 * math.log(float(m.speed_squared(rho)))
        comps.append(Component(CIRCLE, length))
        rows.append(tuple((length * k / samples, g) for k in range(samples)))
    base = min(v for row in rows for _, v in row) if xi is None else xi
    return PiecewiseScalarField(Domain1D(tuple(comps)), tuple(rows), base)


# -- energy density fields and the thick/thin checks -----------------------------

@dataclass(frozen=True, eq=False)
class EnergyDensityField:
    """Density on a flat grid: rows step ``dr`` in the axial direction, columns step ``dtheta``.

    ``periodic`` marks the column direction as a circle (a flat cylinder).
    """

    values: np.ndarray
    dr: float
    dtheta: float
    periodic: bool = True

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or min(v.shape) < 1:
            raise ValueError("density grid must be two-dimensional")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("density must be finite and nonnegative")
        if not (self.dr > 0 and self.dtheta > 0):
            raise ValueError("cell sizes must be positive")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    @property
    def cell_area(self) -> float:
        return self.dr * self.dtheta

    @property
    def total(self) -> float:
        return float(self.values.sum() * self.cell_area)

    def to_dict(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "dr": self.dr, "dtheta": self.dtheta,
                "periodic": self.periodic, "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, doc: dict) -> "EnergyDensityField":
        vals = np.array(doc["values"], dtype=float)
        if vals.shape != (doc["rows"], doc["cols"]):
            raise ValueError("values do not match rows x cols")
        return cls(vals, float(doc["dr"]), float(doc["dtheta"]), bool(doc.get("periodic", True)))

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n")


def annulus_density_field(m: AnnulusMap, rows: int = 64, cols: int | None = None) -> EnergyDensityField:
    """Energy density of the annulus map pulled back to the flat cylinder ``[0, Mod] x S^1``.

    With ``z = exp(-s + i theta)`` the density is ``|u'(z)|^2 |z|^2``, sampled at cell centres.
    """
    mod = m.modulus
    if cols is None:
        cols = max(8, int(round(2 * math.pi * rows / mod)))  # near-square cells
    ds, dth = mod / rows, 2 * math.pi / cols
    s = (np.arange(rows) + 0.5) * ds
    rho = np.exp(-s)
    dens = m.speed_squared(rho) * rho ** 2
    return EnergyDensityField(np.repeat(dens[:, None], cols, axis=1), ds, dth, periodic=True)


@dataclass(frozen=True)
class CylinderDecay:
    lo: float
    hi: float
    modulus: float
    mass: float
    exponent: float


@dataclass(frozen=True)
class ThickThinCheckReport:
    empirical_c1: float
    gradient_violations: int
    decay: tuple[CylinderDecay, ...]
    delta1: float
    delta2: float
    c2: float
    disks_tested: int

    def to_dict(self) -> dict:
        return {
            "empirical_c1": self.empirical_c1,
            "gradient_violations": self.gradient_violations,
            "disks_tested": self.disks_tested,
            "decay": [vars(d) for d in self.decay],
            "delta1": self.delta1, "delta2": self.delta2, "c2": self.c2,
        }


def _disk_mass(f: EnergyDensityField, i: int, j: int, radius: float) -> float:
    """Mass of the cells whose centres lie within ``radius`` of the centre of cell ``(i, j)``."""
    ri = int(radius / f.dr) + 1
    rj = int(radius / f.dtheta) + 1
    di = np.arange(-ri, ri + 1)
    dj = np.arange(-rj, rj + 1)
    DI, DJ = np.meshgrid(di, dj, indexing="ij")
    inside = (DI * f.dr) ** 2 + (DJ * f.dtheta) ** 2 <= radius ** 2
    rows = i + DI[inside]
    cols = j + DJ[inside]
    keep = (rows >= 0) & (rows < f.rows)
    if f.periodic:
        cols = cols % f.cols
    else:
        keep &= (cols >= 0) & (cols < f.cols)
    return float(f.values[rows[keep], cols[keep]].sum() * f.cell_area)


def _decay_exponent(f: EnergyDensityField, lo: int, hi: int, circumference: float) -> float:
    """Least-squares slope of ``-ln(mu(trimmed) / mu(window))`` against the trim in modulus units."""
    row_mass = f.values.sum(axis=1) * f.cell_area
    total = row_mass[lo:hi].sum()
    scale = 2 * math.pi / circumference  # axial length -> modulus
    ts, ys = [], []
    for k in range(1, (hi - lo) // 2):
        inner = row_mass[lo + k:hi - k].sum()
        if inner <= 0:
            break
        ts.append(k * f.dr * scale)
        ys.append(-math.log(inner / total))
    if len(ts) < 2:
        return float("nan")
    t, y = np.array(ts), np.array(ys)
    return float(np.dot(t, y) / np.dot(t, t))


def check_thick_thin(field: EnergyDensityField, delta1: float = 0.1, delta2: float = 0.05, c2: float = 1.0,
                     disk_samples: int = 200, cylinder_splits: int = 8, c1: float | None = None,
                     seed: int = 0) -> ThickThinCheckReport:
    """Empirical gradient and cylinder constants of a sampled energy density.

    Disks are round in the flat metric, so their conformal radius is the radius.
    ``empirical_c1`` is the largest ``density(centre) * radius^2 / mu(disk)`` over
    disks of mass below ``delta1``; with ``c1`` given, ratios above it are counted.
    Sub-cylinders between split rows with mass below ``delta2`` and modulus above
    ``2 c2`` get a fitted decay exponent.
    """
    if not (delta1 > 0 and delta2 > 0 and c2 > 0):
        raise ValueError("delta1, delta2 and c2 must be positive")
    cell = max(field.dr, field.dtheta)
    height = field.rows * field.dr
    width = field.cols * field.dtheta
    r_min = 4 * cell
    r_max = min(height, width) / 4
    if r_max < r_min:
        raise ValueError("grid too coarse: fewer than 4 cells across the smallest disk")
    rng = np.random.default_rng(seed)
    radii = np.geomspace(r_min, r_max, 8)
    best, violations, tested = 0.0, 0, 0
    for _ in range(disk_samples):
        radius = float(rng.choice(radii))
        margin = int(math.ceil(radius / field.dr))
        if field.rows - 2 * margin <= 0:
            continue
        i = int(rng.integers(margin, field.rows - margin))
        if field.periodic:
            j = int(rng.integers(0, field.cols))
        else:
            mj = int(math.ceil(radius / field.dtheta))
            if field.cols - 2 * mj <= 0:
                continue
            j = int(rng.integers(mj, field.cols - mj))
        mass = _disk_mass(field, i, j, radius)
        if mass >= delta1:
            continue
        tested += 1
        ratio = 0.0 if mass == 0 else float(field.values[i, j]) * radius ** 2 / mass
        best = max(best, ratio)
        if c1 is not None and ratio > c1:
            violations += 1
    decay = []
    cuts = np.unique(np.linspace(0, field.rows, cylinder_splits + 1).round().astype(int))
    row_mass = field.values.sum(axis=1) * field.cell_area
    for a_idx in range(len(cuts)):
        for b_idx in range(a_idx + 1, len(cuts)):
            lo, hi = int(cuts[a_idx]), int(cuts[b_idx])
            mod = (hi - lo) * field.dr * 2 * math.pi / width
            mass = float(row_mass[lo:hi].sum())
            if mass < delta2 and mod > 2 * c2 and mass > 0:
                decay.append(CylinderDecay(lo * field.dr, hi * field.dr, mod, mass,
                                           _decay_exponent(field, lo, hi, width)))
    return ThickThinCheckReport(best, violations, tuple(decay), delta1, delta2, c2, tested)


# -- sweeps ----------------------------------------------------------------------

SWEEP_COLUMNS = ("a", "r_a", "area", "outer_len", "inner_len", "ratio", "outer_residual", "inner_residual")


def annulus_row(a: float, quadrature_order: int = 64, angular_points: int = 256) -> dict[str, float]:
    m = AnnulusMap(a)
    ar = area(m, quadrature_order, angular_points)
    lens = boundary_length(m)
    return {
        "a": a,
        "r_a": m.r_inner,
        "area": ar,
        "outer_len": lens["outer"],
        "inner_len": lens["inner"],
        "ratio": (lens["outer"] + lens["inner"]) / ar,
        "outer_residual": fiber_residual(m, "outer"),
        "inner_residual": fiber_residual(m, "inner"),
    }
