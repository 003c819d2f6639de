"""Command line entry point: lie3cert verify | show | invariant | export-registry."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .exactfield import format_fe, parse_fe
from .liecore import FRAME_NAMES, NotOneDimensional, projective_invariant, structure_profile, to_frame
from .registry import (
    DomainViolation, ExcludedParameter, RegistryError, UnknownEntry, export_json, instantiate,
    load_registry,
)
from .verifier import SUITES, emit_report, verify


def _params(items: list[str] | None) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise argparse.ArgumentTypeError(f"--param expects name=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = parse_fe(v)
    return out


def _frame_line(m, kind: str) -> str:
    names = FRAME_NAMES[kind]
    terms = []
    for c, n in zip(to_frame(m, kind), names):
        if c.is_zero():
            continue
        s = format_fe(c)
        if s in ("1", "-1"):
            terms.append(n if s == "1" else f"-{n}")
        elif " " in s or "i" in s:
            terms.append(f"({s})*{n}")
        else:
            terms.append(f"{s}*{n}")
    return " + ".join(terms).replace("+ -", "- ") or "0"


def cmd_verify(args) -> int:
    reg = load_registry()
    report = verify(args.form, samples=args.samples, seed=args.seed, reg=reg, only=args.only)
    if args.json:
        Path(args.json).write_text(emit_report(report, "json"))
    if args.quiet:
        print(" ".join(f"{k}={v}" for k, v in report.summary.items()) or "no claims")
    else:
        sys.stdout.write(emit_report(report, "text"))
    return 1 if report.failed else 0


def cmd_show(args) -> int:
    reg = load_registry()
    e = reg.entry(args.entry)
    u = instantiate(e, _params(args.param))
    print(f"{e.id} ({e.label})  form {e.form}  dim {u.dim}  {e.structural_class}")
    print(f"cite: {e.cite}")
    if e.source is not None:
        print(f"from {e.source} via {e.via}")
    for kind in FRAME_NAMES:
        print(f"[{kind}]")
        for m in u.preferred_basis():
            print("  " + _frame_line(m, kind))
    return 0


def cmd_invariant(args) -> int:
    reg = load_registry()
    e = reg.entry(args.entry)
    u = instantiate(e, _params(args.param))
    out = {"entry": e.id, "structure_profile": structure_profile(u).as_dict()}
    try:
        out["projective_invariant"] = projective_invariant(u).as_dict()
    except NotOneDimensional:
        out["projective_invariant"] = None
    print(json.dumps(out, indent=1))
    return 0


def cmd_export(args) -> int:
    export_json(load_registry(), args.json)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lie3cert", description="Exact certificates for the real subalgebra "
                                "classifications of sl3(R), su(2,1) and su(3).")
    sub = p.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("verify", help="run a claim suite")
    v.add_argument("--form", choices=SUITES, default="all")
    v.add_argument("--samples", type=int, default=5, help="sample points per parametric claim")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", metavar="PATH", help="write the JSON report here")
    v.add_argument("--only", metavar="CLAIM_ID_GLOB", help="run only matching claims")
    v.add_argument("--quiet", action="store_true", help="print only the summary counts")
    v.set_defaults(func=cmd_verify)

    for name, fn, text in (("show", cmd_show, "print an entry's basis in all four frames"),
                           ("invariant", cmd_invariant, "print structure profile and projective invariant")):
        s = sub.add_parser(name, help=text)
        s.add_argument("entry")
        s.add_argument("--param", action="append", metavar="NAME=VALUE")
        s.set_defaults(func=fn)

    x = sub.add_parser("export-registry", help="write the registry as JSON")
    x.add_argument("--json", metavar="PATH", required=True)
    x.set_defaults(func=cmd_export)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "samples", 1) < 1:
        print("lie3cert: --samples must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except UnknownEntry as exc:
        print(f"lie3cert: unknown entry {exc.args[0]}", file=sys.stderr)
    except (DomainViolation, ExcludedParameter, RegistryError, argparse.ArgumentTypeError, ValueError) as exc:
        print(f"lie3cert: {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
