"""Command line front end: ``sylvan <command> [flags]``.

Every command writes one JSON report (to ``--out`` or stdout) that embeds the
schema version, tool version, seed and resolved configuration. Exit status is
0 on success, 2 when a limit did not stabilize and 1 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import InvalidInput, NotStabilized, SylvanError
from .extension_rank import default_jobs, limit_rank
from .linalg import parse_matrix
from .rank_functions import (
    ShiftedRank,
    check_axioms,
    field_rank,
    matrix_ring_rank,
    product_ring_rank,
    MatrixSampler,
)
from .rings.algebras import FiniteAlgebra
from .rings.extensions import CrossedProduct, TensorExtension
from .rings.specs import build_algebra, build_base, load_spec
from .scalars import field_from_name

__all__ = ["main", "build_parser", "SCHEMA"]

SCHEMA = "sylvan-report/1"

# defaults live here, not in argparse, so a config file can fill unset flags
DEFAULTS = {
    "kappa": 3,
    "tol": "0",
    "seed": None,
    "trials": 200,
    "jobs": None,
    "schedule": None,
    "mode": "companion",
    "rank": "field",
    "field": "QQ",
    "k": 2,
    "weights": None,
    "kind": "ow",
    "d": 1,
    "n": 4,
    "N": 64,
    "eps": "1/4",
    "tower": "finite-then-t",
    "poly": None,
    "roots": None,
    "points": None,
    "exhaust": False,
}


def _add_common(p: argparse.ArgumentParser, *names: str):
    opts = {
        "spec": dict(help="ring spec (JSON file or inline JSON)"),
        "matrix": dict(help="matrix (JSON file, inline JSON or literal like '[[1 - z]]')"),
        "schedule": dict(help="window schedule, e.g. 'box:2^k,k=2..6' or 'degrees:2^k,k=1..6'"),
        "kappa": dict(type=int, help="consecutive agreeing steps required (default 3)"),
        "tol": dict(help="stabilization tolerance as a rational (default 0)"),
        "seed": dict(type=int, help="random seed (default: $SYLVAN_SEED or 0)"),
        "trials": dict(type=int, help="number of random trials"),
        "jobs": dict(type=int, help="worker processes (default: machine parallelism)"),
    }
    for name in names:
        p.add_argument(f"--{name}", default=None, **opts[name])
    p.add_argument("--out", default=None, help="write the JSON report here (default stdout)")
    p.add_argument("--csv", default=None, help="write per-step samples as CSV")
    p.add_argument("--config", default=None, help="JSON file of flag values; explicit flags win")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sylvan", description="Rank functions on ring extensions.")
    ap.add_argument("--version", action="version", version=f"sylvan {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", help="window limit rank of a matrix over a crossed product or extension")
    _add_common(p, "spec", "matrix", "schedule", "kappa", "tol", "seed", "jobs")
    p.add_argument("--exhaust", action="store_true", default=None, help="run every schedule step")

    p = sub.add_parser("fieldext", help="rank over a field extension")
    _add_common(p, "spec", "matrix", "schedule", "kappa", "tol", "seed")
    p.add_argument("--mode", choices=["companion", "roots", "evalpoints", "algebraic", "tower"], default=None)
    p.add_argument("--poly", default=None, help="single monic polynomial for companion mode, e.g. 't^2 - 1'")
    p.add_argument("--roots", default=None, help="comma-separated distinct roots for roots mode")
    p.add_argument("--points", type=int, default=None, help="number of evaluation points")
    p.add_argument("--tower", choices=["finite-then-t", "t-then-u"], default=None)

    p = sub.add_parser("tower", help="compare the two ways through a tower of extensions")
    _add_common(p, "spec", "matrix", "schedule", "kappa", "tol", "seed")
    p.add_argument("--tower", choices=["finite-then-t", "t-then-u"], default=None)

    p = sub.add_parser("quasitile", help="build and check a quasitiling")
    _add_common(p, "seed")
    p.add_argument("--kind", choices=["ow", "kt"], default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--eps", default=None)

    p = sub.add_parser("axioms", help="randomized check of the rank function axioms")
    _add_common(p, "seed", "trials")
    p.add_argument("--rank", choices=["field", "matrix", "product", "shifted"], default=None)
    p.add_argument("--field", default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--weights", default=None, help="comma-separated weights for --rank product")

    p = sub.add_parser("trace-compare", help="trace rank against the window limit")
    _add_common(p, "spec", "matrix", "schedule", "kappa", "tol", "seed")
    return ap


# --- configuration --------------------------------------------------------


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("out", "csv", "config")}
    if args.config:
        try:
            extra = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidInput(f"config file {args.config}: {exc}") from None
        if not isinstance(extra, dict):
            raise InvalidInput("config file must hold a JSON object")
        for k, v in extra.items():
            if cfg.get(k) is None:
                cfg[k] = v
    for k, v in DEFAULTS.items():
        if cfg.get(k) is None and k in vars(args):
            cfg[k] = v
    if cfg.get("seed") is None:
        env = os.environ.get("SYLVAN_SEED")
        try:
            cfg["seed"] = int(env) if env else 0
        except ValueError:
            raise InvalidInput(f"SYLVAN_SEED={env!r} is not an integer") from None
    if "jobs" in cfg and cfg["jobs"] is None:
        cfg["jobs"] = default_jobs()
    return cfg


def _read(text_or_path: str | None, what: str) -> str:
    if text_or_path is None:
        raise InvalidInput(f"--{what} is required")
    p = Path(text_or_path)
    s = text_or_path.lstrip()
    if not s.startswith(("[", "{")) and p.exists():
        try:
            return p.read_text()
        except OSError as exc:
            raise InvalidInput(f"cannot read {text_or_path}: {exc}") from None
    return text_or_path


def _where(path: str | None, what: str) -> str:
    return path if path and Path(path).exists() else what


def _ring(cfg, default=None):
    if cfg.get("spec") is None:
        if default is None:
            raise InvalidInput("--spec is required")
        return load_spec(default)
    return load_spec(_read(cfg["spec"], "spec"))


def _matrix(cfg, ring):
    return parse_matrix(_read(cfg.get("matrix"), "matrix"), ring, _where(cfg.get("matrix"), "matrix"))


def _default_schedule(ring) -> str:
    if isinstance(ring, CrossedProduct):
        return "group:full" if ring.group.finite else "box:2^k,k=2..6"
    if isinstance(ring.algebra, FiniteAlgebra):
        return "field:full"
    return "degrees:2^k,k=1..6"


# --- commands -------------------------------------------------------------


def cmd_rank(cfg):
    S = _ring(cfg)
    A = _matrix(cfg, S)
    cfg["schedule"] = cfg["schedule"] or _default_schedule(S)
    rep = limit_rank(A, cfg["schedule"], cfg["kappa"], Fraction(cfg["tol"]), exhaust=bool(cfg["exhaust"]),
                     jobs=cfg["jobs"])
    return rep.to_json(), rep.samples, rep.stabilized


def cmd_fieldext(cfg):
    from . import field_ext as fx

    mode = cfg["mode"]
    if mode == "tower":
        return cmd_tower(cfg)
    if mode == "algebraic":
        S = _ring(cfg)
        if not isinstance(S, TensorExtension) or not isinstance(S.algebra, FiniteAlgebra):
            raise InvalidInput("algebraic mode needs a finite_ext spec")
        A = _matrix(cfg, S)
        value = fx.algebraic_ext_rank(A)
        window = fx.algebraic_window_value(A)
        return {"mode": mode, "value": str(value), "window_value": str(window), "agree": value == window}, [], True
    S = _ring(cfg, {"kind": "poly_ext"})
    A = _matrix(cfg, S)
    tol = Fraction(cfg["tol"])
    if mode == "companion" and cfg.get("poly"):
        f = _poly_of(S, cfg["poly"])
        return {"mode": mode, "poly": cfg["poly"], "value": str(fx.rk_f(A, f))}, [], True
    if mode == "companion":
        from .windows import parse_schedule

        sched = parse_schedule(cfg["schedule"] or "degrees:2^k,k=1..6")
        if sched.kind != "degrees":
            raise InvalidInput("companion mode needs a degrees: schedule")
        rep = fx.monic_sequence_limit(A, sched.sizes, kappa=cfg["kappa"], tol=tol, strict=False)
        return rep.to_json(), rep.samples, rep.stabilized
    if mode == "roots":
        if not cfg.get("roots"):
            raise InvalidInput("--roots is required in roots mode")
        roots = [S.K.parse(r.strip()) for r in str(cfg["roots"]).split(",")]
        return {"mode": mode, "roots": [S.K.format(r) for r in roots],
                "value": str(fx.rk_f_by_roots(A, roots))}, [], True
    if mode == "evalpoints":
        pts = fx.default_points(S.K, int(cfg["points"] or 64))
        rep = fx.eval_point_limit(A, pts, kappa=cfg["kappa"], tol=tol)
        return rep.to_json(), rep.samples, rep.stabilized
    raise InvalidInput(f"unknown mode {mode!r}")  # pragma: no cover - argparse guards this


def _poly_of(S, text):
    from .scalars import MultiPoly

    return MultiPoly.parse(text, S.K, [S.algebra.var])


def cmd_tower(cfg):
    from . import field_ext as fx

    kind = cfg.get("tower") or "finite-then-t"
    spec = json.loads(_read(cfg["spec"], "spec")) if cfg.get("spec") else {"kind": "poly_ext"}
    if not isinstance(spec, dict):
        raise InvalidInput("spec must be a JSON object")
    R, rk = build_base(spec.get("base"))
    if kind == "finite-then-t":
        if "algebra" not in spec:
            raise InvalidInput("a finite-then-t tower needs a spec with an 'algebra'")
        E0 = build_algebra(R.K, spec["algebra"])
        tower = fx.finite_then_t_tower(E0, R, rk, schedule=cfg["schedule"] or "degrees:2^k,k=1..6",
                                       kappa=cfg["kappa"])
    else:
        sched = cfg["schedule"] or "degrees:2^k,k=1..5"
        tower = fx.t_then_u_tower(R, rk, schedule=sched, inner_schedule=sched, kappa=cfg["kappa"])
    rep = fx.composition_check(_read(cfg.get("matrix"), "matrix"), tower, cfg["kappa"], Fraction(cfg["tol"]))
    samples = rep.one_step.samples if rep.one_step else []
    return rep.to_json(), samples, rep.both_stabilized


def cmd_quasitile(cfg):
    from .windows import box_window, check_quasitiling, degree_window, kt_quasitile, ow_quasitile_boxes

    n, N = int(cfg["n"]), int(cfg["N"])
    if cfg["kind"] == "ow":
        q = ow_quasitile_boxes(int(cfg["d"]), n, N, Fraction(cfg["eps"]))
        target = box_window(q.tiles[0].ext, N)
    else:
        q = kt_quasitile(n, N)
        target = degree_window(q.tiles[0].ext, N)
    rep = check_quasitiling(q, target)
    return {"kind": cfg["kind"], "coverage": str(q.coverage), "tiles": len(q.tiles),
            "translates": sum(len(c) for c in q.centers), "conditions": rep.to_json(), "ok": rep.ok}, [], True


def cmd_axioms(cfg):
    F = field_from_name(cfg["field"])
    kind = cfg["rank"]
    if kind == "field":
        rk = field_rank(F)
    elif kind == "matrix":
        rk = matrix_ring_rank(int(cfg["k"]), F)
    elif kind == "product":
        if not cfg.get("weights"):
            raise InvalidInput("--weights is required for --rank product")
        rk = product_ring_rank([Fraction(w.strip()) for w in str(cfg["weights"]).split(",")], F)
    else:
        rk = ShiftedRank(field_rank(F))
    rep = check_axioms(rk, MatrixSampler(rk.ring), trials=int(cfg["trials"]), seed=int(cfg["seed"]))
    return {"rank": rk.describe(), "ok": rep.ok, "results": rep.to_json()}, [], True


def cmd_trace_compare(cfg):
    from .trace_compare import trace_window_compare

    S = _ring(cfg)
    A = _matrix(cfg, S)
    rep = trace_window_compare(A, cfg.get("schedule"), cfg["kappa"], Fraction(cfg["tol"]),
                              rng=random.Random(cfg["seed"]))
    return rep.to_json(), rep.window.samples if rep.window else [], rep.verdict != "not-stabilized"


COMMANDS = {
    "rank": cmd_rank,
    "fieldext": cmd_fieldext,
    "tower": cmd_tower,
    "quasitile": cmd_quasitile,
    "axioms": cmd_axioms,
    "trace-compare": cmd_trace_compare,
}


# --- output ---------------------------------------------------------------


def write_csv(samples, path: str) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "dimW", "rank_value_num", "rank_value_den", "normalized_decimal",
                "invariance_defect_decimal"])
    for s in samples:
        rv = Fraction(s.rank_value)
        w.writerow([s.step, s.dim, rv.numerator, rv.denominator, f"{float(s.normalized):.12g}",
                    "" if s.defect is None else f"{float(s.defect):.12g}"])
    Path(path).write_text(buf.getvalue())


def _envelope(cfg, command, result, status):
    return {
        "schema": SCHEMA,
        "tool": "sylvan",
        "version": __version__,
        "command": command,
        "seed": cfg.get("seed"),
        "config": {k: v for k, v in sorted(cfg.items()) if k != "command"},
        "status": status,
        "result": result,
    }


def _emit(doc, out):
    text = json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = resolve_config(args)
        result, samples, ok = COMMANDS[args.command](cfg)
    except NotStabilized as exc:
        rep = exc.report
        result = rep.to_json() if hasattr(rep, "to_json") else None
        _emit(_envelope(cfg, args.command, result, "not-stabilized"), args.out)
        if args.csv and rep is not None and hasattr(rep, "samples"):
            write_csv(rep.samples, args.csv)
        print(f"sylvan: {exc}", file=sys.stderr)
        return 2
    except (SylvanError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"sylvan: error: {msg}", file=sys.stderr)
        return 1
    status = "ok" if ok else "not-stabilized"
    _emit(_envelope(cfg, args.command, result, status), args.out)
    if args.csv:
        write_csv(samples, args.csv)
    if not ok:
        print("sylvan: the limit did not stabilize along the schedule", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
