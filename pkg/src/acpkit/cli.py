"""Command-line front end. Machine output is JSON on stdout, diagnostics go to stderr.

Exit codes: 0 success or related, 1 not related or axiom failures,
2 usage, input or declaration errors, 3 unguarded recursion, 4 variant mismatch.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .axioms import SUITES, corrupted_axiom, run_suite, suite_axioms
from .bisim import bisim
from .conditions import assignment_endo
from .cts import cts_to_json, to_dot
from .errors import AcpError, UnguardedError, VariantError
from .rewrite import normalize, substitute_eval
from .service import ReplyFunction, default_reply, service_config, service_process
from .sos import DEFAULT_MAX_DEPTH, DEFAULT_MAX_STATES, cts_of
from .terms import AlgebraConfig, CondEval, GenCondEval, Term, check_variant, format_term, load_spec

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_UNGUARDED, EXIT_VARIANT = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def load(path: str) -> AlgebraConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    return load_spec(text)


def proc(cfg: AlgebraConfig, name: str) -> Term:
    if name not in cfg.procs:
        known = ", ".join(sorted(cfg.procs)) or "none"
        raise UsageError(f"no proc named {name!r} (known: {known})")
    return cfg.procs[name]


def default_kind(cfg: AlgebraConfig) -> str:
    if cfg.signals:
        return "signal"
    return "retro" if cfg.retro else "plain"


def _kind_fits(kind: str, cfg: AlgebraConfig) -> bool:
    return {"plain": not cfg.signals and not cfg.retro, "signal": cfg.signals, "retro": cfg.retro}[kind]


def cmd_normalize(args) -> int:
    cfg = load(args.file)
    _emit(format_term(normalize(proc(cfg, args.proc), cfg)))
    return EXIT_OK


def cmd_lts(args) -> int:
    cfg = load(args.file)
    T = cts_of(proc(cfg, args.proc), cfg, args.max_states, args.max_depth)
    if args.dot:
        sys.stdout.write(to_dot(T))
        return EXIT_OK
    out = cts_to_json(T)
    out["exhausted"] = T.exhausted
    _emit(out)
    return EXIT_OK


def cmd_bisim(args) -> int:
    cfg_a, cfg_b = load(args.file_a), load(args.file_b)
    if cfg_a.variant != cfg_b.variant:
        raise VariantError(f"variant mismatch: {cfg_a.variant} vs {cfg_b.variant}")
    kind = args.kind or default_kind(cfg_a)
    if not _kind_fits(kind, cfg_a):
        raise VariantError(f"bisimilarity kind {kind} does not apply to variant {cfg_a.variant}")
    T1 = cts_of(proc(cfg_a, args.proc_a), cfg_a, args.max_states)
    T2 = cts_of(proc(cfg_b, args.proc_b), cfg_b, args.max_states)
    mode = "last_action" if cfg_a.exclusive else "plain"
    v = bisim(kind, T1, T2, mode)
    out = v.to_json(T1, T2)
    out["mode"] = mode
    if T1.exhausted or T2.exhausted:
        # a truncated system can only witness inequivalence
        out["exhausted"] = True
        if v.related:
            print("warning: state limit hit, 'related' is not authoritative", file=sys.stderr)
    _emit(out)
    return EXIT_OK if v.related else EXIT_NO


def cmd_eval(args) -> int:
    cfg = load(args.file)
    p = proc(cfg, args.proc)
    if (args.endo is None) == (args.assign is None):
        raise UsageError("give exactly one of --endo and --assign")
    if args.assign is not None:
        if args.generalized:
            raise UsageError("--generalized needs --endo")
        assignment = parse_assignment(args.assign)
        if args.via_endo:
            result = normalize(CondEval(assignment_endo(assignment), p), cfg)
        else:
            result = normalize(substitute_eval(p, assignment, cfg), cfg)
    else:
        if args.endo not in cfg.endos:
            raise UsageError(f"unknown endomorphism {args.endo!r}")
        h = cfg.endos[args.endo]
        t = GenCondEval(h, p) if args.generalized else CondEval(h, p)
        check_variant(t, cfg)
        result = normalize(t, cfg)
    _emit(format_term(result))
    return EXIT_OK


def parse_assignment(text: str) -> dict[str, bool]:
    out = {}
    for part in text.split(","):
        if not part.strip():
            continue
        k, eq, v = part.partition("=")
        v = v.strip().lower()
        if not eq or v not in ("0", "1", "true", "false"):
            raise UsageError(f"bad assignment entry {part.strip()!r}, expected atom=0 or atom=1")
        out[k.strip()] = v in ("1", "true")
    return out


def cmd_check_axioms(args) -> int:
    seed = args.seed
    env = os.environ.get("ACPKIT_SEED")
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise UsageError(f"ACPKIT_SEED must be an integer, got {env!r}") from None
    axioms = None
    if args.inject_broken:
        axioms = suite_axioms(args.variant) + [corrupted_axiom()]
    only = set(args.only.split(",")) if args.only else None
    if only and args.inject_broken:
        only.add("BROKEN")
    report = run_suite(args.variant, args.n, seed, axioms=axioms, only=only)
    _emit(report.to_json())
    return EXIT_OK if report.ok else EXIT_NO


def cmd_service_demo(args) -> int:
    commands = tuple(c.strip() for c in args.commands.split(",") if c.strip())
    G = ReplyFunction.parse(commands, args.reply) if args.reply else default_reply(commands)
    cfg = service_config(commands)
    T = cts_of(service_process(G), cfg, args.max_states)
    if args.dot:
        sys.stdout.write(to_dot(T))
        return EXIT_OK
    out = cts_to_json(T)
    out["exhausted"] = T.exhausted
    out["reply"] = {".".join(k): v for k, v in G.table.items()}
    _emit(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="acpkit", description="Process algebra with conditional expressions.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("normalize", help="print the basic-term normal form of a proc")
    p.add_argument("file")
    p.add_argument("proc")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("lts", help="emit the transition system of a proc")
    p.add_argument("file")
    p.add_argument("proc")
    p.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    p.add_argument("--dot", action="store_true", help="Graphviz output instead of JSON")
    p.set_defaults(func=cmd_lts)

    p = sub.add_parser("bisim", help="decide bisimilarity of two procs")
    p.add_argument("file_a")
    p.add_argument("proc_a")
    p.add_argument("file_b")
    p.add_argument("proc_b")
    p.add_argument("--kind", choices=("plain", "signal", "retro"))
    p.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    p.set_defaults(func=cmd_bisim)

    p = sub.add_parser("eval", help="condition evaluation")
    p.add_argument("file")
    p.add_argument("proc")
    p.add_argument("--endo")
    p.add_argument("--assign", help='complete assignment such as "p=1,q=0"')
    p.add_argument("--generalized", action="store_true")
    p.add_argument("--via-endo", action="store_true", help="evaluate an assignment with the CE operator")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("check-axioms", help="instance-test the axioms of a variant")
    p.add_argument("--variant", choices=SUITES, default="acpec")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", help="comma-separated axiom names")
    p.add_argument("--inject-broken", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_check_axioms)

    p = sub.add_parser("service-demo", help="transition system of the request/reply service")
    p.add_argument("--commands", default="m1,m2")
    p.add_argument("--reply", help='values such as "m1=T,m2=F,m1.m1=F,..."')
    p.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    p.add_argument("--dot", action="store_true")
    p.set_defaults(func=cmd_service_demo)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except UnguardedError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNGUARDED
    except VariantError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VARIANT
    except (UsageError, AcpError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
