"""Command-line front end.

Subcommands: check, construct, verify, certify, table1.  Machine output
is JSON on stdout with --json, human-readable otherwise; table1 also
renders markdown with --md.  Exit codes: 0 success (or "simulates"),
1 semantic negative (verification mismatches, or a certify verdict that
contradicts --expect), 2 usage or input errors.

Settings resolve flag > environment > config file > default; the
environment names mirror the flags with an EMBEDSIM_ prefix (for
example EMBEDSIM_CAP), and the config file is JSON with the flag names
as keys ("cap", "delta", "seed", "jobs").
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .certifier import (certify_nonmonotonic_failure,
                        certify_strategy_failure, decide_avg_dot)
from .constructors import DeltaConfig, construct
from .fixtures import FIXTURE_NAMES
from .logic import KBError, StratifiedKB, enumerate_models, parse_kb
from .strategies import AttributeEmbedding, strategy_from_name
from .table1 import run_table1
from .verifier import verify_monotonic, verify_nonmonotonic

ENV_PREFIX = "EMBEDSIM_"


class UsageError(Exception):
    pass


def _load_config(path: str | None) -> dict:
    if path is None:
        path = os.environ.get(ENV_PREFIX + "CONFIG")
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError(f"config file {path} must hold a JSON object")
    return doc


def _setting(name: str, flag_value, config: dict, cast=int, default=None):
    if flag_value is not None:
        return flag_value
    env = os.environ.get(ENV_PREFIX + name.upper())
    if env is not None:
        try:
            return cast(env)
        except ValueError as exc:
            raise UsageError(f"bad {ENV_PREFIX}{name.upper()}={env!r}") from exc
    if name in config:
        return cast(config[name])
    return default


def _read_kb(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_kb(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _read_embedding(path: str) -> AttributeEmbedding:
    try:
        with open(path, encoding="utf-8") as fh:
            return AttributeEmbedding.from_json_dict(json.load(fh))
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise UsageError(f"cannot load embedding {path}: {exc}") from exc


def _emit(doc: dict, as_json: bool, human_lines: list[str]) -> None:
    if as_json:
        print(json.dumps(doc, sort_keys=True, indent=2))
    else:
        print("\n".join(human_lines))


def cmd_check(args, config) -> int:
    kb = _read_kb(args.kb)
    if isinstance(kb, StratifiedKB):
        doc = {"kind": "stratified", "atoms": len(kb.signature),
               "strata": len(kb.strata),
               "interpretations": 1 << len(kb.signature)}
        lines = [f"stratified, k={len(kb.strata)}",
                 f"atoms: {len(kb.signature)} ({' '.join(kb.signature.atoms)})",
                 f"interpretations: {doc['interpretations']}"]
    else:
        models = enumerate_models(kb)
        doc = {"kind": "plain", "atoms": len(kb.signature),
               "formulas": len(kb.formulas), "models": len(models),
               "consistent": bool(models)}
        lines = [f"plain KB, {len(kb.formulas)} formulas",
                 f"atoms: {len(kb.signature)} ({' '.join(kb.signature.atoms)})",
                 f"models: {len(models)}"
                 + ("" if models else " (inconsistent)")]
    _emit(doc, args.json, lines)
    return 0


def cmd_construct(args, config) -> int:
    kb = _read_kb(args.kb)
    delta = _setting("delta", args.delta, config)
    try:
        result = construct(kb, args.prop, DeltaConfig(delta))
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    doc = result.embedding.to_json_dict(provenance=result.provenance())
    text = json.dumps(doc, indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        if not args.json:
            print(f"wrote {args.output}: dimension {result.embedding.dimension}, "
                  f"strategy {result.strategy.name}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args, config) -> int:
    kb = _read_kb(args.kb)
    embedding = _read_embedding(args.embedding)
    try:
        strategy = strategy_from_name(args.strategy)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    cap = _setting("cap", args.cap, config)
    jobs = _setting("jobs", args.jobs, config, default=1)
    if isinstance(kb, StratifiedKB):
        report = verify_nonmonotonic(embedding, strategy, kb, cap=cap, jobs=jobs)
    else:
        report = verify_monotonic(embedding, strategy, kb, cap=cap, jobs=jobs)
    lines = [f"strategy: {report.strategy}",
             f"queries: {report.queries} (subset cap {report.cap})",
             f"verdict: {'simulates' if report.simulates else 'mismatches'}"]
    for mm in report.mismatches[:20]:
        lines.append(f"  mismatch {'&'.join(mm.subset)} -> {mm.head}: "
                     f"expected {mm.expected}, got {mm.got} [{mm.score}]")
    if len(report.mismatches) > 20:
        lines.append(f"  ... {len(report.mismatches) - 20} more")
    _emit(report.to_dict(), args.json, lines)
    return 0 if report.simulates else 1


def cmd_certify(args, config) -> int:
    if (args.fixture is None) == (args.kb is None):
        raise UsageError("certify needs exactly one of --fixture or a KB file")
    if args.fixture is not None:
        try:
            if args.nonmonotonic:
                cert = certify_nonmonotonic_failure(args.strategy,
                                                    args.fixture)
            else:
                cert = certify_strategy_failure(args.strategy, args.fixture)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    else:
        if args.strategy != "avg-dot":
            raise UsageError(
                "generic decisions exist only for avg-dot; other strategies "
                f"take --fixture (one of: {', '.join(FIXTURE_NAMES)})")
        kb = _read_kb(args.kb)
        if isinstance(kb, StratifiedKB):
            raise UsageError("generic avg-dot decision needs a plain KB")
        cert = decide_avg_dot(kb)
    lines = [f"strategy: {cert.strategy}",
             f"fixture: {cert.fixture or '(generic)'}",
             f"mode: {cert.mode}",
             f"verdict: {cert.verdict}",
             f"evidence: {cert.evidence['kind']}"]
    for assumption in cert.assumptions:
        lines.append(f"  assumes: {assumption}")
    _emit(cert.to_dict(), args.json, lines)
    if args.expect is not None and cert.verdict != args.expect:
        return 1
    return 0


def cmd_table1(args, config) -> int:
    seed = _setting("seed", args.seed, config, default=0)
    jobs = _setting("jobs", args.jobs, config, default=1)
    report = run_table1(seed=seed, jobs=jobs)
    if args.json:
        text = report.to_json()
    elif args.md:
        text = report.to_markdown()
    else:
        mark = {"simulable": "yes", "not-simulable": "no "}
        width = max(len(r.strategy) for r in report.rows)
        rows = [f"{'strategy':<{width}}  mono  non-mono"]
        rows += [
            f"{r.strategy:<{width}}  {mark[r.monotonic.verdict]}   "
            f"{mark[r.non_monotonic.verdict]}"
            for r in report.rows
        ]
        text = "\n".join(rows) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embedsim",
        description="decide, construct and certify pooled-embedding "
                    "simulations of attribute dependencies")
    parser.add_argument("--config", help="JSON config file (caps, delta, seed)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse a KB file and summarize it")
    p.add_argument("kb")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("construct", help="build a simulating embedding")
    p.add_argument("kb")
    p.add_argument("--prop", type=int, required=True, choices=range(1, 6),
                   help="construction recipe (1-3 plain KB, 4-5 stratified)")
    p.add_argument("--delta", type=int, help="dominance constant override")
    p.add_argument("-o", "--output", help="embedding JSON destination")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="check an embedding against a KB")
    p.add_argument("kb")
    p.add_argument("embedding")
    p.add_argument("--strategy", required=True)
    p.add_argument("--cap", type=int, help="subset size cap")
    p.add_argument("--jobs", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("certify", help="produce a (non-)simulability certificate")
    p.add_argument("kb", nargs="?")
    p.add_argument("--strategy", required=True)
    p.add_argument("--fixture", choices=list(FIXTURE_NAMES))
    p.add_argument("--nonmonotonic", action="store_true",
                   help="certify the ranked-default column")
    p.add_argument("--expect", choices=["simulable", "not-simulable"])
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("table1", help="run the full strategy verdict table")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--md", action="store_true")
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_table1)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; normalize other codes
        return 2 if exc.code not in (0,) else 0
    try:
        config = _load_config(args.config)
        return args.func(args, config)
    except (UsageError, KBError, ValueError) as exc:
        # ValueError covers strategy/embedding shape problems surfaced
        # by the library (dimension mismatches, numeric-only strategies)
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
