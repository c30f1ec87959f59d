"""Command-line front end.

Exit codes: 0 success, 2 invalid input (JSON error object on stderr),
3 resource limit hit (partial report with ``"truncated": true``).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from . import serialize
from .arith import FactorBudget
from .errors import LabError, ResourceLimit
from .geometry import OrbitCache
from .heights import canonical_height_partial, truncated_counting, weil_height
from .primdiv import DEFAULT_REPORT_BUDGET, zsigmondy_set
from .sequences import DynValue, SequenceSpec, TermStream, WanderingNumerator
from .serialize import dumps, fracstr, real12
from .vojta import ExperimentConfig, check_deltaj, check_theorem01, min_iterate_j, run_experiment

CACHE_ENV = "ZCACHE_DIR"
DEFAULT_CACHE_DIR = ".zcache"

SPEC_FLAGS = ("u", "v", "p", "q", "init", "morphism", "form", "start", "alpha", "beta")

EXIT_OK, EXIT_INVALID, EXIT_LIMIT = 0, 2, 3


class UsageError(LabError):
    code = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _spec_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("sequence")
    g.add_argument("--kind", help="powerdiff | lucas | eds | gcdgroup | dynvalue | wandering")
    g.add_argument("--u")
    g.add_argument("--v")
    g.add_argument("--p", help="Lucas P coefficient")
    g.add_argument("--q", help="Lucas Q coefficient")
    g.add_argument("--init", help="EDS initial terms a1,a2,a3,a4")
    g.add_argument("--morphism", help='forms separated by ";", e.g. "X^2+Y^2;Y^2"')
    g.add_argument("--form", help="target form, e.g. X-3*Y")
    g.add_argument("--start", help="start point, comma separated")
    g.add_argument("--alpha")
    g.add_argument("--beta")


def _run_args(p: argparse.ArgumentParser, *, exclude=True, budget=True) -> None:
    p.add_argument("--n-max", type=int, dest="n_max")
    if exclude:
        p.add_argument("--exclude", help="comma separated primes to exclude")
    if budget:
        p.add_argument("--trial-bound", type=int)
        p.add_argument("--rho-iterations", type=int)
        p.add_argument("--factor-max-digits", type=int)
        p.add_argument("--digit-ceiling", type=int)
    p.add_argument("--no-cache", action="store_true", help="do not read or write the orbit cache")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zsiglab", description="Primitive prime divisors and dynamical Zsigmondy sets.")
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its fields")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config field by dotted path (applied last)")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("seq", parents=[common], help="print sequence terms")
    _spec_args(p)
    _run_args(p, exclude=False, budget=False)
    p.add_argument("--digit-ceiling", type=int)

    p = sub.add_parser("zsigmondy", parents=[common], help="compute the Zsigmondy set up to a horizon")
    _spec_args(p)
    _run_args(p)

    p = sub.add_parser("heights", parents=[common], help="canonical height estimate or counting function")
    _spec_args(p)
    _run_args(p, exclude=False, budget=False)
    p.add_argument("--digit-ceiling", type=int)
    p.add_argument("--value", help="integer for the truncated counting function")
    p.add_argument("--exclude", help="primes in S for the counting function")

    p = sub.add_parser("vojta-check", parents=[common], help="exact degree-threshold checks")
    p.add_argument("--N", type=int, dest="N")
    p.add_argument("--d", type=int)
    p.add_argument("--deg-f", type=int, dest="deg_f")
    p.add_argument("--deg-d", type=int, dest="deg_d")
    p.add_argument("--deg-neg-canonical", type=int, dest="deg_neg_canonical")
    p.add_argument("--j", type=int)
    p.add_argument("--deg-delta", type=int, dest="deg_delta")
    p.add_argument("--min-j", action="store_true", dest="min_j")

    p = sub.add_parser("experiment", parents=[common], help="sequence run plus threshold verdicts")
    _spec_args(p)
    _run_args(p)
    p.add_argument("--j", type=int)
    return parser


def _set_path(cfg: dict, dotted: str, value) -> None:
    keys = dotted.split(".")
    node = cfg
    for k in keys[:-1]:
        node = node.setdefault(k, {})
    try:
        value = json.loads(value)
    except (TypeError, json.JSONDecodeError):
        pass
    node[keys[-1]] = value


def _load_config(args) -> dict:
    cfg: dict = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if "kind" in cfg:
            cfg = {"spec": cfg}
    spec = cfg.setdefault("spec", {})
    params = spec.setdefault("params", {})
    if getattr(args, "kind", None):
        if spec.get("kind") and spec["kind"] != args.kind:
            spec["params"] = params = {}
        spec["kind"] = args.kind
    for key in SPEC_FLAGS:
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    if getattr(args, "n_max", None) is not None:
        cfg["n_max"] = args.n_max
        cfg["horizon"] = args.n_max
    if getattr(args, "exclude", None):
        cfg["excluded_primes"] = [x for x in args.exclude.split(",") if x.strip()]
    budget = cfg.setdefault("factoring_budget", {})
    for flag, key in (("trial_bound", "trial_bound"), ("rho_iterations", "rho_iterations"), ("factor_max_digits", "max_digits")):
        val = getattr(args, flag, None)
        if val is not None:
            budget[key] = val
    if getattr(args, "digit_ceiling", None) is not None:
        cfg["digit_ceiling"] = args.digit_ceiling
    if getattr(args, "j", None) is not None:
        cfg["j"] = args.j
    for item in args.set:
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        _set_path(cfg, k.strip(), v)
    if "horizon" not in cfg and "n_max" in cfg:
        cfg["horizon"] = cfg["n_max"]
    if "n_max" not in cfg and "horizon" in cfg:
        cfg["n_max"] = cfg["horizon"]
    return cfg


def _budget(cfg: dict) -> FactorBudget:
    b = cfg.get("factoring_budget") or {}
    base = DEFAULT_REPORT_BUDGET
    return FactorBudget(
        trial_bound=int(b.get("trial_bound", base.trial_bound)),
        rho_iterations=int(b.get("rho_iterations", base.rho_iterations)),
        max_digits=int(b.get("max_digits", base.max_digits)),
    )


def _n_max(cfg: dict) -> int:
    if "n_max" not in cfg:
        raise UsageError("missing --n-max (or n_max in the config)")
    return int(cfg["n_max"])


def cache_path(spec: SequenceSpec, cache_dir: str | Path | None = None) -> Path:
    cache_dir = Path(cache_dir or os.environ.get(CACHE_ENV, DEFAULT_CACHE_DIR))
    start = ",".join(str(x) for x in spec.start.coords)
    start_hash = hashlib.sha256(start.encode()).hexdigest()[:16]
    return cache_dir / f"{spec.morphism.digest()[:24]}_{start_hash}.jsonl"


class _CachedStream:
    """A TermStream whose orbit is preloaded from and saved to the disk cache."""

    def __init__(self, spec: SequenceSpec, cfg: dict, use_cache: bool):
        ceiling = int(cfg.get("digit_ceiling", 10**6))
        self.path = None
        orbit = None
        if isinstance(spec, (DynValue, WanderingNumerator)):
            orbit = OrbitCache(spec.morphism, spec.start, digit_ceiling=ceiling)
            if use_cache:
                self.path = cache_path(spec)
                if self.path.exists():
                    try:
                        orbit.load(self.path)
                    except (ValueError, KeyError, json.JSONDecodeError):
                        self.path.unlink()
        self.stream = TermStream(spec, orbit=orbit, digit_ceiling=ceiling)

    def save(self) -> None:
        if self.path is not None:
            serialize.extend_orbit_jsonl(self.path, self.stream.orbit.points)


def _spec(cfg: dict) -> SequenceSpec:
    spec = cfg.get("spec") or {}
    if not spec.get("kind"):
        raise UsageError("missing --kind (or spec.kind in the config)")
    return SequenceSpec.from_json(spec)


def cmd_seq(cfg, args):
    spec = _spec(cfg)
    n_max = _n_max(cfg)
    cached = _CachedStream(spec, cfg, not args.no_cache)
    rows, truncated = [], False
    for n in range(spec.first_index, n_max + 1):
        try:
            rows.append((n, cached.stream.term(n)))
        except ResourceLimit:
            truncated = True
            break
    cached.save()
    if args.format == "csv":
        text = "n,a_n\n" + "".join(f"{n},{a}\n" for n, a in rows)
    else:
        out = {"spec": spec.to_json(), "n_max": n_max, "truncated": truncated,
               "terms": [{"n": n, "value": str(a)} for n, a in rows]}
        text = dumps(out)
    return text, truncated


def cmd_zsigmondy(cfg, args):
    spec = _spec(cfg)
    cached = _CachedStream(spec, cfg, not args.no_cache)
    report = zsigmondy_set(spec, _n_max(cfg), cfg.get("excluded_primes", ()), budget=_budget(cfg), stream=cached.stream)
    cached.save()
    text = report.to_csv() if args.format == "csv" else dumps(report.to_json())
    return text, report.truncated


def cmd_heights(cfg, args):
    if getattr(args, "value", None) is not None or "value" in cfg:
        value = int(cfg.get("value", args.value))
        excl = [int(p) for p in cfg.get("excluded_primes", ())]
        res = truncated_counting(value, excl, _budget(cfg))
        out = {"value": str(value), "S": [str(p) for p in excl], "sum": real12(res.sum),
               "complete": res.complete, "upper": real12(res.upper)}
        if args.format == "csv":
            return f"sum,complete,upper\n{out['sum']},{str(res.complete).lower()},{out['upper']}\n", False
        return dumps(out), False
    spec = _spec(cfg)
    if not isinstance(spec, (DynValue, WanderingNumerator)):
        raise UsageError("heights needs a dynvalue or wandering spec")
    cached = _CachedStream(spec, cfg, not args.no_cache)
    est = canonical_height_partial(spec.morphism, spec.start, _n_max(cfg), cache=cached.stream.orbit)
    cached.save()
    if args.format == "csv":
        text = "n,weil_height,scaled\n" + "".join(
            f"{n},{real12(weil_height(cached.stream.orbit.point(n)))},{real12(v)}\n" for n, v in est.values
        )
    else:
        text = dumps({"spec": spec.to_json(), "height": est.to_json()})
    return text, est.truncated


def cmd_vojta_check(cfg, args):
    N = cfg.get("N", args.N)
    d = cfg.get("d", args.d)
    if d is None:
        raise UsageError("vojta-check needs --d")
    d = int(d)
    deg_k = cfg.get("deg_neg_canonical", args.deg_neg_canonical)
    if deg_k is None and N is not None:
        deg_k = int(N) + 1
    if args.min_j or cfg.get("min_j"):
        deg_d = cfg.get("deg_d", args.deg_d)
        if deg_d is None or deg_k is None:
            raise UsageError("--min-j needs --deg-d and --N or --deg-neg-canonical")
        j = min_iterate_j(d, int(deg_d), int(deg_k))
        return dumps({"which": "MinJ", "j": j}), False
    deg_delta = cfg.get("deg_delta", args.deg_delta)
    if deg_delta is not None:
        deg_d = cfg.get("deg_d", args.deg_d)
        j = cfg.get("j", args.j)
        if deg_d is None or j is None or deg_k is None:
            raise UsageError("the deltaj check needs --deg-d, --j, --deg-delta and --N or --deg-neg-canonical")
        v = check_deltaj(d, int(deg_d), int(deg_k), int(j), int(deg_delta))
    else:
        deg_f = cfg.get("deg_f", args.deg_f)
        if N is None or deg_f is None:
            raise UsageError("vojta-check needs --N, --d and --deg-f")
        v = check_theorem01(int(N), d, int(deg_f))
    if args.format == "csv":
        return f"which,satisfied,lhs,rhs\n{v.which},{str(v.satisfied).lower()},{fracstr(v.lhs)},{fracstr(v.rhs)}\n", False
    return dumps(v.to_json()), False


def cmd_experiment(cfg, args):
    if "horizon" not in cfg:
        raise UsageError("missing --n-max (or horizon in the config)")
    cfg = dict(cfg)
    cfg.setdefault("digit_ceiling", 10**6)
    ec = ExperimentConfig.from_json(cfg)
    report = run_experiment(ec)
    text = report.to_csv() if args.format == "csv" else dumps(report.to_json())
    return text, report.truncated


COMMANDS = {
    "seq": cmd_seq,
    "zsigmondy": cmd_zsigmondy,
    "heights": cmd_heights,
    "vojta-check": cmd_vojta_check,
    "experiment": cmd_experiment,
}


def _fail(exc: Exception, code: str) -> int:
    sys.stderr.write(json.dumps({"error": code, "message": str(exc)}) + "\n")
    return EXIT_INVALID


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _load_config(args)
        text, truncated = COMMANDS[args.subcommand](cfg, args)
    except ResourceLimit as exc:
        sys.stderr.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")
        sys.stdout.write(dumps({"truncated": True, "error": str(exc)}))
        return EXIT_LIMIT
    except LabError as exc:
        return _fail(exc, exc.code)
    except (ValueError, KeyError, TypeError) as exc:
        return _fail(exc, "invalid")
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_LIMIT if truncated else EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
