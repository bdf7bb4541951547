"""Command-line front end: ``riikit <command> [options]``.

Every command writes its results and a ``manifest.json`` into ``--out``.
Exit status: 0 when all checks pass, 2 when a check fails, 1 on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from . import holomorphic as hol
from . import hyperbolic as hyp
from . import integral_geometry as ig
from .hypograph import (PartitionParams, RadiusProfile, thick_thin_partition, thicken, verify_cardinality_bounds)
from .hypograph.field import FieldError
from .hypograph.fixtures import FIXTURES
from .hypograph.io import load_field, partition_to_dict
from .hypograph.properties import check_field, exact_params
from .hypograph.random_fields import random_field

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunManifest:
    command: str
    config: dict
    version: str = __version__
    wall_time: float = 0.0
    checks: list[dict] = dc_field(default_factory=list)

    def check(self, name: str, passed: bool, **detail) -> bool:
        if any(c["name"] == name for c in self.checks):
            raise ValueError(f"duplicate check {name!r}")
        self.checks.append({"name": name, "passed": bool(passed), **detail})
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def to_dict(self) -> dict:
        return {"version": self.version, "command": self.command, "config": self.config,
                "wall_time": self.wall_time, "checks": self.checks, "passed": self.passed}


# -- output helpers ---------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def _dumps(doc) -> str:
    return json.dumps(_jsonable(doc), indent=1, sort_keys=True) + "\n"


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def _csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def _table(args, rows: list[dict], columns, stem: str) -> None:
    if args.format == "csv":
        _write(args.out, f"{stem}.csv", _csv(rows, columns))
    else:
        _write(args.out, f"{stem}.json", _dumps(rows))


# -- crofton ----------------------------------------------------------------------

def cmd_crofton(args, man: RunManifest) -> None:
    if args.seed is None:
        raise UsageError("crofton needs --seed")
    if (args.builtin is None) == (args.curve is None):
        raise UsageError("give exactly one of --builtin or --curve")
    if args.builtin:
        curve, degree = ig.builtin(args.builtin)
    else:
        curve, degree = ig.load_curve(args.curve), args.degree
    samples = args.samples or 100_000
    est = ig.crofton_length(curve, samples, args.seed)
    doc = est.to_dict()
    _write(args.out, "estimate.json", _dumps(doc))
    counts = est.counts
    _write(args.out, "samples.csv", "index,count\n" + "".join(f"{i},{int(c)}\n" for i, c in enumerate(counts)))
    tol = args.tolerance if args.tolerance is not None else 1e-9
    dev = abs(est.mean - est.exact_length)
    man.check("mean within 3 standard errors of length", dev <= 3 * est.std_error + tol,
              deviation=dev, bound=3 * est.std_error + tol)
    if degree is not None:
        man.check("every count <= degree", int(counts.max()) <= degree, max_count=int(counts.max()), degree=degree)
        rii = ig.verify_projective_rii(curve, degree)
        man.check("degree >= normalized length", rii.passed, lhs=rii.lhs, rhs=rii.rhs)
    print(json.dumps(_jsonable(doc), sort_keys=True))


# -- annulus sweep ----------------------------------------------------------------

def cmd_annulus_sweep(args, man: RunManifest) -> None:
    values = args.a or [0.5, 1.0, 5.0, 50.0, 500.0]
    if any(not a > 0 for a in values):
        raise UsageError("a-values must be positive")
    rows = [hol.annulus_row(a, args.order, args.angular) for a in values]
    _table(args, rows, hol.SWEEP_COLUMNS, "sweep")
    tol = args.tolerance if args.tolerance is not None else 1e-6
    err = max(abs(r["area"] - 2 * math.pi) for r in rows)
    man.check("area equals 2 pi", err <= tol, max_error=err)
    res = max(max(r["outer_residual"], r["inner_residual"]) for r in rows)
    man.check("fiber residuals below 1e-9", res < 1e-9, max_residual=res)
    ordered = sorted(rows, key=lambda r: r["a"])
    ratios = [r["ratio"] for r in ordered]
    man.check("length/area increasing in a", all(x < y for x, y in zip(ratios, ratios[1:])), ratios=ratios)
    print(_csv(rows, hol.SWEEP_COLUMNS), end="")


# -- partition --------------------------------------------------------------------

def _bands(p) -> list[dict]:
    rows = []
    for c in p.classes:
        for s in c.slabs:
            rows.append({"class": c.id, "component": c.component, "lo": float(s.levels.lo), "hi": float(s.levels.hi),
                         "arc_start": float(s.top_arc.start), "arc_end": float(s.top_arc.end)})
    return rows


def _partition_field(field, man: RunManifest, out: Path, params: PartitionParams, mu_total: float = 1.0,
                     delta1: float = 1.0):
    p = thick_thin_partition(field, params)
    report = verify_cardinality_bounds(p, mu_total, delta1)
    doc = partition_to_dict(p) if params.mode == "exact" else _float_partition_doc(p)
    doc["bounds"] = report.as_dict()
    _write(out, "partition.json", _dumps(doc))
    _write(out, "bands.csv", _csv(_bands(p), ("class", "component", "lo", "hi", "arc_start", "arc_end")))
    for c in report.checks:
        if c.asserted:
            man.check(c.name, c.passed, lhs=c.lhs, rhs=c.rhs)
    return p, report


def _float_partition_doc(p) -> dict:
    return {
        "classes": [{"id": c.id, "component": c.component, "parent": c.parent, "bottom": float(c.bottom),
                     "top": float(c.top)} for c in p.classes],
        "forest": {str(c.id): c.parent for c in p.classes},
        "thin_necks": [{"class": n.class_id, "lo": float(n.levels.lo), "hi": float(n.levels.hi),
                        "exceptional": n.exceptional} for n in p.thin_necks],
    }


def cmd_partition(args, man: RunManifest) -> None:
    sources = [args.field is not None, args.fixture is not None, args.from_annulus is not None, args.fuzz is not None]
    if sum(sources) != 1:
        raise UsageError("give exactly one of --field, --fixture, --from-annulus, --fuzz")
    if args.fuzz is not None:
        if args.seed is None:
            raise UsageError("--fuzz needs --seed")
        bad = {}
        for i in range(args.fuzz):
            problems = check_field(random_field(args.seed + i), args.seed + i)
            if problems:
                bad[args.seed + i] = problems
        _write(args.out, "fuzz.json", _dumps({"fields": args.fuzz, "first_seed": args.seed, "violations": bad}))
        man.check("no property violations", not bad, failing_seeds=sorted(bad))
        print(json.dumps({"fields": args.fuzz, "violations": len(bad)}))
        return
    if args.from_annulus is not None:
        m = hol.AnnulusMap(args.from_annulus)
        field = hol.boundary_log_density(m, args.samples or 64)
        params = PartitionParams(t_min=float(field.xi))
        mu = hol.area(m)
    else:
        field = FIXTURES[args.fixture]() if args.fixture else load_field(args.field)
        params = exact_params(field)
        mu = 1.0
    p, report = _partition_field(field, man, args.out, params, mu, 1.0)
    print(json.dumps({"classes": len(p.classes), "leaves": len(p.leaves), "thin_necks": len(p.thin_necks),
                      "exceptional": sum(n.exceptional for n in p.thin_necks)}))


# -- hyperbolic calculators ---------------------------------------------------------

def _hyp_value(calc: str, a: dict) -> Any:
    def need(*keys):
        missing = [k for k in keys if a.get(k) is None]
        if missing:
            raise UsageError(f"{calc} needs " + ", ".join("--" + k for k in missing))
        return [float(a[k]) for k in keys]

    if calc == "collar-width":
        (ell,) = need("l")
        return hyp.collar_width(ell)
    if calc == "injrad":
        ell, d = need("l", "d")
        return hyp.injrad_in_collar(ell, d)
    if calc == "modulus":
        lo, hi = need("a", "b")
        profile = a.get("profile") or "cylinder"
        ell = float(a["l"]) if a.get("l") is not None else None
        return hyp.modulus(hyp.MetricProfile(profile, ell), lo, hi)
    if calc == "conformal-radius":
        K, r = need("K", "r")
        if K not in (-1.0, 0.0, 1.0):
            raise ValueError("K must be -1, 0 or 1")
        return hyp.conformal_radius(int(K), r)
    raise UsageError(f"unknown calculator {calc!r}")


HYP_FIELDS = ("l", "d", "a", "b", "K", "r", "profile")


def cmd_hyp(args, man: RunManifest) -> None:
    if args.calc == "ratio-scan":
        ells = np.linspace(args.l_min, args.l_max, args.n_l)
        fracs = np.linspace(-1, 1, args.n_rho)
        scan = hyp.injrad_ratio_scan(ells, fracs, keep_rows=True)
        rows = [{"l": e, "rho_fraction": f, "ratio": q} for e, f, q in scan.rows]
        _table(args, rows, ("l", "rho_fraction", "ratio"), "ratio_scan")
        doc = {"min_ratio": scan.min_ratio, "max_ratio": scan.max_ratio, "argmin": scan.argmin,
               "argmax": scan.argmax, "proof_expression_max": scan.proof_bound}
        _write(args.out, "ratio_scan_summary.json", _dumps(doc))
        man.check("min ratio >= 1/pi", scan.min_ratio >= 1 / math.pi - 1e-9, min_ratio=scan.min_ratio)
        print(json.dumps(_jsonable(doc), sort_keys=True))
        return
    if args.batch:
        try:
            with open(args.batch, newline="") as fh:
                reader = list(csv.DictReader(fh))
        except OSError as exc:
            raise UsageError(f"cannot read {args.batch}: {exc}") from exc
        rows = []
        for row in reader:
            inp = {k: (v if k == "profile" else float(v)) for k, v in row.items() if v not in (None, "")}
            rows.append({**{k: inp.get(k, "") for k in HYP_FIELDS}, "value": _hyp_value(args.calc, inp)})
        _write(args.out, "hyp.csv", _csv(rows, HYP_FIELDS + ("value",)))
        print(_csv(rows, HYP_FIELDS + ("value",)), end="")
        return
    inp = {k: getattr(args, k) for k in HYP_FIELDS if getattr(args, k) is not None}
    doc = {"calculator": args.calc, "input": inp, "value": _hyp_value(args.calc, inp)}
    _write(args.out, "hyp.json", _dumps(doc))
    print(json.dumps(_jsonable(doc), sort_keys=True))


# -- pipeline ---------------------------------------------------------------------

def cmd_pipeline(args, man: RunManifest) -> None:
    """Annulus map -> boundary log-density -> thickened hypograph -> partition -> bounds."""
    m = hol.AnnulusMap(args.a)
    params = PartitionParams(k=args.k)
    xi = min(float(params.base_level), hol.boundary_log_density(m, 1).min_value())
    params = PartitionParams(k=args.k, t_min=xi)
    g = hol.boundary_log_density(m, args.samples or 64, xi=xi)
    th = thicken(g, RadiusProfile.constant(g.domain), params)
    mu = hol.area(m)
    p, report = _partition_field(th.field, man, args.out, params, mu, args.delta1)
    lengths = hol.boundary_length(m)
    density = hol.annulus_density_field(m, args.rows)
    tt = hol.check_thick_thin(density, args.delta1, args.delta2, args.c2, seed=args.seed or 0)
    doc = {
        "a": args.a, "r_a": m.r_inner, "area": mu, "boundary_length": lengths,
        "length_over_area": (lengths["outer"] + lengths["inner"]) / mu,
        "base_level": xi,
        "thickening": {"plateaus": len(th.plateaus), "violations": [vars(c) for c in th.violations]},
        "bounds": report.as_dict(),
        "thick_thin": tt.to_dict(),
    }
    _write(args.out, "pipeline.json", _dumps(doc))
    man.check("area equals 2 pi", abs(mu - 2 * math.pi) <= (args.tolerance or 1e-6), area=mu)
    print(json.dumps({"classes": len(p.classes), "thin_necks": len(p.thin_necks),
                      "empirical_c1": tt.empirical_c1, "passed": man.passed}))


# -- argument parsing -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--out", type=Path)
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--tolerance", type=float)
    common.add_argument("--config", type=Path, help="JSON file of defaults; explicit flags win")

    parser = _Parser(prog="riikit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("crofton", parents=[common], help="Crofton length estimate of a projective curve")
    p.add_argument("--builtin", choices=sorted(ig.BUILTINS))
    p.add_argument("--curve", type=Path)
    p.add_argument("--degree", type=int)
    p.set_defaults(run=cmd_crofton)

    p = sub.add_parser("annulus-sweep", parents=[common], help="area and boundary length of the annulus family")
    p.add_argument("--a", type=float, nargs="+")
    p.add_argument("--order", type=int, default=64)
    p.add_argument("--angular", type=int, default=256)
    p.set_defaults(run=cmd_annulus_sweep)

    p = sub.add_parser("partition", parents=[common], help="tree classes and thin necks of a boundary field")
    p.add_argument("--field", type=Path)
    p.add_argument("--fixture", choices=sorted(FIXTURES))
    p.add_argument("--from-annulus", type=float, dest="from_annulus")
    p.add_argument("--fuzz", type=int)
    p.set_defaults(run=cmd_partition)

    p = sub.add_parser("hyp", parents=[common], help="collar, modulus and conformal-radius calculators")
    p.add_argument("calc", choices=("collar-width", "injrad", "modulus", "conformal-radius", "ratio-scan"))
    p.add_argument("--l", type=float)
    p.add_argument("--d", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--K", type=int)
    p.add_argument("--r", type=float)
    p.add_argument("--profile", choices=("flat", "spherical", "hyperbolic", "collar", "cylinder"))
    p.add_argument("--batch", type=Path, help="CSV with one column per argument; writes one value per row")
    p.add_argument("--l-min", type=float, default=0.01, dest="l_min")
    p.add_argument("--l-max", type=float, default=2.0, dest="l_max")
    p.add_argument("--n-l", type=int, default=100, dest="n_l")
    p.add_argument("--n-rho", type=int, default=100, dest="n_rho")
    p.set_defaults(run=cmd_hyp)

    p = sub.add_parser("pipeline", parents=[common], help="annulus map through partition and bounds")
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--rows", type=int, default=64)
    p.add_argument("--delta1", type=float, default=0.1)
    p.add_argument("--delta2", type=float, default=0.05)
    p.add_argument("--c2", type=float, default=1.0)
    p.set_defaults(run=cmd_pipeline)
    return parser


def _merge_config(args) -> None:
    if args.config is None:
        return
    try:
        conf = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    if not isinstance(conf, dict):
        raise UsageError("config must be a JSON object")
    for key, value in conf.items():
        key = key.replace("-", "_")
        if not hasattr(args, key):
            raise UsageError(f"unknown config key {key!r}")
        if getattr(args, key) is None:
            setattr(args, key, Path(value) if key in ("out", "field", "curve", "batch") else value)


def _config_echo(args) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items())
            if k not in ("run", "config")}


def main(argv: list[str] | None = None) -> int:
    t0 = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        _merge_config(args)
        if args.out is None:
            args.out = Path("riikit-out")
        if args.format is None:
            args.format = "csv"
        if args.tolerance is not None and not args.tolerance > 0:
            raise UsageError("--tolerance must be positive")
        man = RunManifest(args.command, _config_echo(args))
        args.run(args, man)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (FieldError, ig.CurveError, ValueError, OSError) as exc:
        print(f"riikit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    man.wall_time = time.perf_counter() - t0
    _write(args.out, "manifest.json", _dumps(man.to_dict()))
    return EXIT_OK if man.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
