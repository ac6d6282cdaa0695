"""Command-line surface: property checks, bounds, LP utilities, catalog I/O.

Every run emits a JSON report that echoes its full configuration, so a
report is reproducible from its own contents.  Exit codes: 0 the property
holds or a bound was computed, 2 refuted (certificate embedded), 3
inconclusive under the given budget, 1 usage or data error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import List, Optional

from . import lp as lpmod
from .akci import (
    AKSequence,
    AKStep,
    check_sequence,
    is_k_ak,
    validate_sequence,
)
from .catalog import Catalog, export_string, parse_catalog
from .dl import is_k_dl
from .lp import LinearProgram, LPOutcome, check_certificate
from .masks import points_of
from .matroid import Matroid, MatroidError
from .psm import recursive_psm
from .secret import AccessStructure, PortSpec, port, ss_bound

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REFUTED = 2
EXIT_INCONCLUSIVE = 3

REPORT_SCHEMA = "matext-report/1"


class CLIError(Exception):
    pass


def _env_int(name: str, default: Optional[int]) -> Optional[int]:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise CLIError(f"environment variable {name} must be an integer, got {raw!r}")


def _load_matroid(source: str, entry: Optional[str]) -> Matroid:
    cat = Catalog()
    if os.path.exists(source):
        with open(source) as fh:
            names = cat.load(fh)
        if entry is not None:
            return cat.get(entry)
        if len(names) == 1:
            return cat.get(names[0])
        raise CLIError(
            f"catalog file {source} holds {len(names)} matroids; pick one with --id"
        )
    if entry is not None:
        raise CLIError("--id only applies when the matroid source is a catalog file")
    try:
        return cat.get(source)
    except KeyError as exc:
        raise CLIError(str(exc))


def _emit(report: dict, out: Optional[str]) -> None:
    report.setdefault("schema", REPORT_SCHEMA)
    report.setdefault("timestamp", time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()))
    text = json.dumps(report, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _verdict_exit(verdict) -> int:
    if verdict is True:
        return EXIT_OK
    if verdict is False:
        return EXIT_REFUTED
    return EXIT_INCONCLUSIVE


def _cmd_check_dl(args) -> int:
    m = _load_matroid(args.matroid, args.id)
    budget = args.budget if args.budget is not None else _env_int("MATEXT_BUDGET", 100_000)
    verdict, reports = is_k_dl(
        m,
        args.depth,
        budget=budget,
        use_filters=not args.no_filters,
        cut_budget=args.cut_budget,
    )
    refuting = [r.to_dict() for r in reports if r.status == "refuted"]
    report = {
        "command": "check-dl",
        "config": {
            "matroid": args.matroid,
            "id": args.id,
            "depth": args.depth,
            "budget": budget,
            "cut_budget": args.cut_budget,
            "filters": not args.no_filters,
        },
        "verdict": verdict if isinstance(verdict, str) else bool(verdict),
        "pairs_checked": len(reports),
        "refuting_pairs": refuting,
        "witnesses": [
            r.to_dict() for r in reports if r.status.startswith("witness")
        ][: args.max_witnesses],
    }
    _emit(report, args.out)
    return _verdict_exit(verdict)


def _read_sequence(path: str) -> AKSequence:
    with open(path) as fh:
        return AKSequence.from_json(fh.read())


def _cmd_check_ak(args) -> int:
    m = _load_matroid(args.matroid, args.id)
    config = {
        "matroid": args.matroid,
        "id": args.id,
        "filters": args.filters == "on",
        "ge": args.ge == "on",
    }
    if args.sequence:
        seq = _read_sequence(args.sequence)
        validate_sequence(m, seq)
        outcome, seq_report = check_sequence(m, seq)
        config["sequence"] = args.sequence
        refuted = outcome.status == "infeasible"
        if refuted and not check_certificate(
            lpmod_build_lp_for(m, seq), outcome
        ):
            raise CLIError("refutation certificate failed independent verification")
        report = {
            "command": "check-ak",
            "config": config,
            "verdict": (not refuted),
            "sequence_report": seq_report.to_dict(),
            "certificate": json.loads(outcome.to_json()),
        }
        _emit(report, args.out)
        return EXIT_REFUTED if refuted else EXIT_OK
    budget = args.budget if args.budget is not None else _env_int("MATEXT_BUDGET", 2000)
    config.update({"depth": args.depth, "budget": budget})
    verdict, res = is_k_ak(
        m,
        args.depth,
        budget=budget,
        use_filters=args.filters == "on",
        use_ge=args.ge == "on",
    )
    report = {
        "command": "check-ak",
        "config": config,
        "verdict": verdict if isinstance(verdict, str) else bool(verdict),
        "lp_solves": res.lp_solves,
    }
    if res.refutation is not None:
        report["refutation"] = json.loads(res.refutation.to_json(m.n))
        report["certificate"] = json.loads(res.reports[0].outcome.to_json())
    _emit(report, args.out)
    return _verdict_exit(verdict)


def lpmod_build_lp_for(m: Matroid, seq: AKSequence) -> LinearProgram:
    from .akci import build_sequence_lp

    return build_sequence_lp(m, seq)


def _parse_points(text: str) -> int:
    try:
        return sum(1 << int(p) for p in text.split(",") if p != "")
    except ValueError:
        raise CLIError(f"point list must be comma-separated integers, got {text!r}")


def _cmd_check_ci(args) -> int:
    m = _load_matroid(args.matroid, args.id)
    if args.sequence:
        seq = _read_sequence(args.sequence)
    elif args.x and args.y:
        seq = AKSequence([AKStep(x=_parse_points(args.x), y=_parse_points(args.y), kind="CI")])
    else:
        raise CLIError("check-ci needs --sequence or both --x and --y")
    seq = AKSequence([AKStep(x=s.x, y=s.y, kind="CI") for s in seq.steps])
    validate_sequence(m, seq)
    outcome, seq_report = check_sequence(m, seq)
    refuted = outcome.status == "infeasible"
    report = {
        "command": "check-ci",
        "config": {
            "matroid": args.matroid,
            "id": args.id,
            "sequence": args.sequence,
            "x": args.x,
            "y": args.y,
        },
        "verdict": (not refuted),
        "sequence_report": seq_report.to_dict(),
        "certificate": json.loads(outcome.to_json()),
    }
    _emit(report, args.out)
    return EXIT_REFUTED if refuted else EXIT_OK


def _cmd_check_psm(args) -> int:
    m = _load_matroid(args.matroid, args.id)
    budget = args.budget if args.budget is not None else _env_int("MATEXT_BUDGET", 10_000)
    trace: List[dict] = []
    verdict = recursive_psm(
        m, args.depth, budget=budget, cut_budget=args.cut_budget, trace=trace
    )
    report = {
        "command": "check-psm",
        "config": {
            "matroid": args.matroid,
            "id": args.id,
            "depth": args.depth,
            "budget": budget,
            "cut_budget": args.cut_budget,
        },
        "verdict": verdict if isinstance(verdict, str) else bool(verdict),
        "refuting_triples": trace,
    }
    _emit(report, args.out)
    return _verdict_exit(verdict)


def _cmd_ss_bound(args) -> int:
    if args.access:
        with open(args.access) as fh:
            data = json.load(fh)
        acc = AccessStructure(
            participants=sum(1 << p for p in data["participants"]),
            dealer=data["dealer"],
            min_authorized=sorted(
                sum(1 << p for p in a) for a in data["min_authorized"]
            ),
        )
        spec = acc
        source = {"access": args.access}
    else:
        if args.matroid is None or args.dealer is None:
            raise CLIError("ss-bound needs --access or both --matroid and --dealer")
        m = _load_matroid(args.matroid, args.id)
        spec = port(m, args.dealer)
        source = {"matroid": args.matroid, "id": args.id, "dealer": args.dealer}
    seq = _read_sequence(args.ak_steps) if args.ak_steps else None
    result = ss_bound(spec, seq)
    acc_obj = spec.structure if isinstance(spec, PortSpec) else spec
    report = {
        "command": "ss-bound",
        "config": {**source, "ak_steps": args.ak_steps},
        "structure": {
            "participants": points_of(acc_obj.participants),
            "dealer": acc_obj.dealer,
            "min_authorized": [points_of(a) for a in acc_obj.min_authorized],
        },
        "bound": result.to_dict(),
    }
    _emit(report, args.out)
    return EXIT_OK


def _cmd_lp(args) -> int:
    with open(args.file) as fh:
        lp = LinearProgram.from_json(fh.read())
    if args.lp_action == "solve":
        outcome = lpmod.solve(lp, method=args.method)
        report = {
            "command": "lp solve",
            "config": {"file": args.file, "method": args.method},
            "outcome": json.loads(outcome.to_json()),
            "verified": check_certificate(lp, outcome),
        }
        _emit(report, args.out)
        if outcome.status == "infeasible":
            return EXIT_REFUTED
        return EXIT_OK
    with open(args.certificate) as fh:
        outcome = LPOutcome.from_json(fh.read())
    ok = check_certificate(lp, outcome)
    report = {
        "command": "lp verify",
        "config": {"file": args.file, "certificate": args.certificate},
        "verified": ok,
    }
    _emit(report, args.out)
    return EXIT_OK if ok else EXIT_ERROR


def _cmd_catalog(args) -> int:
    cat = Catalog()
    if args.cat_action == "list":
        for name in cat.names():
            m = cat.get(name)
            print(f"{name}\tn={m.n}\trank={m.k}")
        return EXIT_OK
    if args.cat_action == "export":
        m = _load_matroid(args.name, None)
        text = export_string(m)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    if args.cat_action == "import":
        with open(args.name) as fh:
            names = cat.load(fh)
        print(json.dumps({"imported": names}))
        return EXIT_OK
    # verify
    if os.path.exists(args.name):
        with open(args.name) as fh:
            ms = parse_catalog(fh)
    else:
        ms = [cat.get(args.name)]
    bad = []
    for m in ms:
        ok, viol = m.verify_axioms()
        if not ok:
            bad.append({"name": m.name, "violation": repr(viol)})
    print(json.dumps({"checked": len(ms), "violations": bad}, indent=2))
    return EXIT_OK if not bad else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="matext",
        description="Matroid extension properties and secret-sharing bounds",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def matroid_arg(p):
        p.add_argument("matroid", help="built-in name or catalog file path")
        p.add_argument("--id", help="entry name when the source is a catalog file")
        p.add_argument("--out", help="write the JSON report here instead of stdout")

    p = sub.add_parser("check-dl", help="recursive quasi-intersection check")
    matroid_arg(p)
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--cut-budget", type=int, default=4000)
    p.add_argument("--no-filters", action="store_true")
    p.add_argument("--max-witnesses", type=int, default=20)
    p.set_defaults(func=_cmd_check_dl)

    p = sub.add_parser("check-ak", help="AK sequence feasibility / refutation search")
    matroid_arg(p)
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--sequence", help="JSON file of AK/CI steps")
    p.add_argument("--filters", choices=["on", "off"], default="on")
    p.add_argument("--ge", choices=["on", "off"], default="off")
    p.set_defaults(func=_cmd_check_ak)

    p = sub.add_parser("check-ci", help="common-information extension feasibility")
    matroid_arg(p)
    p.add_argument("--sequence", help="JSON file of steps (forced to CI kind)")
    p.add_argument("--x", help="comma-separated points of X")
    p.add_argument("--y", help="comma-separated points of Y")
    p.set_defaults(func=_cmd_check_ci)

    p = sub.add_parser("check-psm", help="recursive pseudomodularity check")
    matroid_arg(p)
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--cut-budget", type=int, default=2000)
    p.set_defaults(func=_cmd_check_psm)

    p = sub.add_parser("ss-bound", help="information-ratio lower bound for a port")
    p.add_argument("--matroid", help="built-in name or catalog file path")
    p.add_argument("--id")
    p.add_argument("--dealer", type=int, help="dealer point of the port")
    p.add_argument("--access", help="JSON access structure instead of a port")
    p.add_argument("--ak-steps", help="JSON file of auxiliary AK/CI steps")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_ss_bound)

    p = sub.add_parser("lp", help="solve or verify a serialized LP")
    lps = p.add_subparsers(dest="lp_action", required=True)
    ps = lps.add_parser("solve")
    ps.add_argument("file")
    ps.add_argument("--method", choices=["auto", "exact", "float"], default="auto")
    ps.add_argument("--out")
    ps.set_defaults(func=_cmd_lp)
    pv = lps.add_parser("verify")
    pv.add_argument("file")
    pv.add_argument("certificate")
    pv.add_argument("--out")
    pv.set_defaults(func=_cmd_lp)

    p = sub.add_parser("catalog", help="list / export / import / verify matroids")
    cs = p.add_subparsers(dest="cat_action", required=True)
    for action in ("list", "export", "import", "verify"):
        pc = cs.add_parser(action)
        if action != "list":
            pc.add_argument("name", help="built-in name or file path")
        if action == "export":
            pc.add_argument("--out")
        pc.set_defaults(func=_cmd_catalog)

    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (MatroidError, lpmod.LPError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
