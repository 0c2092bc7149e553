"""Command-line front end: ``weyl2d verify|curvature|classify|family``.

Exit codes: 0 pass, 1 configuration or domain error, 2 verification failure,
3 I/O error.  Output bytes depend only on the configuration.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .compact import CompactFamily, family_report, family_to_h
from .cplx import FDScheme, HoloFn, holo_from_json
from .errors import BorderlineError, DomainError
from .mobius import anti_mobius_classify, global_verdict, mobius_of
from .weyl import (
    WeylStructure,
    curvature_flat_gauge,
    ew_residual_full,
    ew_residual_linear,
    nonsolution_structure,
    theorem1_structure,
)

EXIT_OK, EXIT_CONFIG, EXIT_FAIL, EXIT_IO = 0, 1, 2, 3
CSV_COLUMNS = ("x", "y", "re_f", "im_f", "re_K", "im_K", "scal", "faraday", "res_linear", "res_full")
TOP_OFFENDERS = 5


class ConfigError(ValueError):
    pass


class InputError(OSError):
    pass


@dataclass(frozen=True)
class RunConfig:
    h: HoloFn | None = None
    family: CompactFamily | None = None
    f_override: str | None = None
    region: tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0)
    grid: int = 21
    scheme: FDScheme = field(default_factory=FDScheme)
    tol_linear: float = 1e-7
    tol_full: float = 1e-5
    out: str | None = None
    fmt: str = "json"

    def __post_init__(self):
        x0, x1, y0, y1 = self.region
        if not (x0 < x1 and y0 < y1):
            raise ConfigError("region needs x0 < x1 and y0 < y1")
        if not all(math.isfinite(v) for v in self.region):
            raise ConfigError("region bounds must be finite")
        if not 8 <= self.grid <= 4096:
            raise ConfigError("grid must lie in [8, 4096]")
        if not (self.tol_linear > 0 and self.tol_full > 0):
            raise ConfigError("tolerances must be positive")
        if self.fmt not in ("csv", "json"):
            raise ConfigError("format must be csv or json")

    def structure(self) -> WeylStructure:
        if self.f_override is not None:
            return nonsolution_structure(self.f_override)
        h = self.h
        if h is None and self.family is not None:
            h = family_to_h(self.family)
        if h is None:
            raise ConfigError("an h (--h) or a family (--family) is required")
        return theorem1_structure(h, self.scheme)

    def points(self) -> list[complex]:
        """Grid points in row-major (y, x) order."""
        x0, x1, y0, y1 = self.region
        xs = np.linspace(x0, x1, self.grid)
        ys = np.linspace(y0, y1, self.grid)
        return [complex(float(x), float(y)) for y in ys for x in xs]


# --------------------------------------------------------------------------
# Config assembly


def _floats(text: str, n: int, what: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in str(text).split(","))
    except ValueError:
        raise ConfigError(f"{what} must be {n} comma-separated numbers") from None
    if len(vals) != n:
        raise ConfigError(f"{what} must be {n} comma-separated numbers")
    return vals


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def parse_h(spec) -> HoloFn:
    """HoloFn from a dict, an inline JSON string or a path to a JSON file."""
    if isinstance(spec, dict):
        obj = spec
    else:
        text = spec if str(spec).lstrip().startswith("{") else _read_text(spec)
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid HoloFn JSON: {exc.msg}") from None
    try:
        return holo_from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid HoloFn JSON: {exc}") from None


def _family(value) -> CompactFamily:
    if isinstance(value, dict):
        return CompactFamily.from_json(value)
    if isinstance(value, (list, tuple)):
        return CompactFamily(*value)
    return CompactFamily(*_floats(value, 3, "family"))


# flag dest -> config-file key
_KEYS = {
    "h": "h", "family": "family", "f_override": "f_override", "region": "region", "grid": "grid",
    "fd_step": "fd_step", "richardson": "richardson", "exclusion": "exclusion",
    "tol_linear": "tol_linear", "tol_full": "tol_full", "out": "out", "format": "format",
}


def build_config(args: argparse.Namespace) -> RunConfig:
    raw: dict = {}
    if getattr(args, "config", None):
        try:
            raw = json.loads(_read_text(args.config))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid config JSON: {exc.msg}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(raw) - set(_KEYS.values())
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for dest, key in _KEYS.items():
        v = getattr(args, dest, None)
        if v is not None:
            raw[key] = v
    try:
        base = FDScheme()
        scheme = FDScheme(
            float(raw.get("fd_step", base.step)),
            int(raw.get("richardson", base.levels)),
            float(raw.get("exclusion", base.exclusion)),
        )
        region = raw.get("region", RunConfig.region)
        region = _floats(region, 4, "region") if isinstance(region, str) else tuple(float(v) for v in region)
        if len(region) != 4:
            raise ConfigError("region must have 4 entries")
        return RunConfig(
            h=parse_h(raw["h"]) if raw.get("h") is not None else None,
            family=_family(raw["family"]) if raw.get("family") is not None else None,
            f_override=raw.get("f_override"),
            region=region,
            grid=int(raw.get("grid", RunConfig.grid)),
            scheme=scheme,
            tol_linear=float(raw.get("tol_linear", RunConfig.tol_linear)),
            tol_full=float(raw.get("tol_full", RunConfig.tol_full)),
            out=raw.get("out"),
            fmt=raw.get("format", RunConfig.fmt),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


# --------------------------------------------------------------------------
# Grid sweep


def _map(fn, items):
    """Ordered map, parallel when WEYL2D_THREADS > 1."""
    try:
        n = int(os.environ.get("WEYL2D_THREADS", "1"))
    except ValueError:
        n = 1
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _sample(W: WeylStructure, z: complex, scheme: FDScheme) -> dict | None:
    """All per-point quantities, or None when the point is excluded."""
    if not W.connection.contains(z):
        return None
    try:
        f = W.connection(z)
        c = curvature_flat_gauge(W, z, scheme)
        lin = ew_residual_linear(W, z, scheme)
        full = ew_residual_full(W, z, scheme)
    except DomainError:
        return None
    return {"z": z, "f": f, "K": c.K, "s": c.s, "faraday": c.faraday, "linear": abs(lin), "full": abs(full)}


def sweep(cfg: RunConfig) -> tuple[list[dict], list[complex]]:
    W = cfg.structure()
    pts = cfg.points()
    results = _map(lambda z: _sample(W, z, cfg.scheme), pts)
    kept = [r for r in results if r is not None]
    excluded = [z for z, r in zip(pts, results) if r is None]
    return kept, excluded


def verify_report(cfg: RunConfig) -> dict:
    kept, excluded = sweep(cfg)
    max_lin = max((r["linear"] for r in kept), default=0.0)
    max_full = max((r["full"] for r in kept), default=0.0)

    def score(r):
        return (-max(r["linear"] / cfg.tol_linear, r["full"] / cfg.tol_full), r["z"].imag, r["z"].real)

    worst = sorted(kept, key=score)[:TOP_OFFENDERS]
    bbox = None
    if excluded:
        xs = [z.real for z in excluded]
        ys = [z.imag for z in excluded]
        bbox = [min(xs), max(xs), min(ys), max(ys)]
    return {
        "version": __version__,
        "points_evaluated": len(kept),
        "points_excluded": len(excluded),
        "max_linear": max_lin,
        "max_full": max_full,
        "max_full_real": 2 * max_full,
        "tol_linear": cfg.tol_linear,
        "tol_full": cfg.tol_full,
        "pass": bool(max_lin <= cfg.tol_linear and max_full <= cfg.tol_full),
        "excluded": {"count": len(excluded), "bbox": bbox, "exclusion_radius": cfg.scheme.exclusion},
        "worst": [
            {"x": r["z"].real, "y": r["z"].imag, "linear": r["linear"], "full": r["full"]} for r in worst
        ],
    }


def curvature_rows(cfg: RunConfig) -> list[tuple[float, ...]]:
    kept, _ = sweep(cfg)
    rows = [
        (r["z"].real, r["z"].imag, r["f"].real, r["f"].imag, r["K"].real, r["K"].imag,
         r["s"], r["faraday"], r["linear"], r["full"])
        for r in kept
    ]
    rows.sort(key=lambda row: (row[1], row[0]))
    return [tuple(float(v) + 0.0 for v in row) for row in rows]


def format_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for row in rows:
        buf.write(",".join("%.17g" % v for v in row) + "\n")
    return buf.getvalue()


# --------------------------------------------------------------------------
# Commands


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc.strerror or exc}") from None


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def cmd_verify(args) -> int:
    cfg = build_config(args)
    report = verify_report(cfg)
    _emit(_dumps(report), cfg.out)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_curvature(args) -> int:
    cfg = build_config(args)
    rows = curvature_rows(cfg)
    if cfg.fmt == "csv":
        text = format_csv(rows)
    else:
        text = _dumps({"version": __version__, "columns": list(CSV_COLUMNS), "rows": [list(r) for r in rows]})
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_classify(args) -> int:
    cfg = build_config(args)
    h = cfg.h if cfg.h is not None else (family_to_h(cfg.family) if cfg.family is not None else None)
    if h is None:
        raise ConfigError("classify needs --h or --family")
    if not h.is_constant() and mobius_of(h) is None:
        raise ConfigError("classification requires a Mobius h")
    cls = anti_mobius_classify(h)
    report = {"version": __version__, "h": h.to_json(), **cls.to_json(), "verdict": global_verdict(cls)}
    _emit(_dumps(report), cfg.out)
    return EXIT_OK


def cmd_family(args) -> int:
    cfg = build_config(args)
    fam = cfg.family
    if None not in (args.A, args.B, args.C):
        fam = CompactFamily(args.A, args.B, args.C)
    elif any(v is not None for v in (args.A, args.B, args.C)):
        raise ConfigError("--A, --B and --C must be given together")
    if fam is None:
        raise ConfigError("family needs --A/--B/--C or --family A,B,C")
    report = {"version": __version__, "family": fam.to_json(), **family_report(fam, cfg.scheme)}
    _emit(_dumps(report), cfg.out)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="JSON file with run settings (flags override it)")
    shared.add_argument("--h", help="HoloFn as inline JSON or a path to a JSON file")
    shared.add_argument("--family", help="compact family parameters A,B,C")
    shared.add_argument("--f-override", dest="f_override", help="named non-EW test field, e.g. conj")
    shared.add_argument("--region", help="x0,x1,y0,y1")
    shared.add_argument("--grid", type=int, help="points per axis")
    shared.add_argument("--fd-step", dest="fd_step", type=float)
    shared.add_argument("--richardson", type=int, help="Richardson levels")
    shared.add_argument("--exclusion", type=float, help="singular-set exclusion radius")
    shared.add_argument("--tol-linear", dest="tol_linear", type=float)
    shared.add_argument("--tol-full", dest="tol_full", type=float)
    shared.add_argument("--out", help="output path (default stdout)")
    shared.add_argument("--format", choices=("csv", "json"))

    parser = argparse.ArgumentParser(prog="weyl2d", description="Two-dimensional Einstein-Weyl toolkit.")
    parser.add_argument("--version", action="version", version=f"weyl2d {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[shared], help="check the EW equations on a grid").set_defaults(run=cmd_verify)
    sub.add_parser("curvature", parents=[shared], help="export curvature on a grid").set_defaults(run=cmd_curvature)
    sub.add_parser("classify", parents=[shared], help="classify conj(h)").set_defaults(run=cmd_classify)
    fam = sub.add_parser("family", parents=[shared], help="report on a compact family")
    for name in "ABC":
        fam.add_argument(f"--{name}", type=float)
    fam.set_defaults(run=cmd_family)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.run(args)
    except InputError as exc:
        print(f"weyl2d: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, BorderlineError, DomainError, ValueError) as exc:
        print(f"weyl2d: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
