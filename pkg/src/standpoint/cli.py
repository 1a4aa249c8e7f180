"""Command-line front end: ``standpoint [options] [IMPLICATION]``.

Exit status: 0 valid (satisfiable in sat mode), 1 invalid (unsatisfiable),
2 parse or usage error, 3 internal error or exhausted resources.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace
from typing import TextIO

from .errors import InvariantViolation, OracleLimitError, ParseError, ResourceExhausted, StandpointError
from .proof import proof_to_json, render_proof
from .search import DEFAULT_MAX_COLORINGS, prove
from .semantics import StandpointModel, find_countermodel
from .syntax import SequentInput, negate_nnf, normalize_input, parse_implication, render_input

EXIT_VALID, EXIT_INVALID, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


@dataclass
class RunConfig:
    mode: str = "validity"  # validity | sat
    emit: str = "text"  # text | json
    certificate: str | None = None  # proof | model | both | none; None picks the default
    oracle_check: bool = False
    no_seriality: bool = False
    max_colorings: int = DEFAULT_MAX_COLORINGS
    stats: bool = False
    search: str = "local"

    @property
    def wanted(self) -> str:
        if self.certificate is not None:
            return self.certificate
        return "both"


@dataclass
class Outcome:
    status: int
    report: dict


def _model_text(model: StandpointModel, at: str | None, word: str = "falsified") -> list[str]:
    def names(xs):
        return "{" + ", ".join(sorted(xs, key=model.precisifications.index)) + "}"

    lines = ["Pi = " + names(model.precisifications)]
    lines += [f"sigma({s}) = {names(m)}" for s, m in sorted(model.sigma.items())]
    lines += [f"delta({p}) = {names(m)}" for p, m in sorted(model.delta.items())]
    if at is not None:
        lines.append(f"{word} at {at}")
    return lines


def decide(config: RunConfig, text: str) -> Outcome:
    """The whole pipeline for one implication; never raises."""
    try:
        inp = normalize_input(parse_implication(text))
    except ParseError as e:
        return Outcome(EXIT_USAGE, {"verdict": "error", "error": str(e)})
    query = inp
    if config.mode == "sat":
        query = SequentInput(inp.gamma, negate_nnf(inp.goal), inp.vocabulary)
    serial = not config.no_seriality
    try:
        verdict = prove(query, mode=config.search, serial=serial, max_colorings=config.max_colorings)
    except ResourceExhausted as e:
        return Outcome(EXIT_INTERNAL, {"verdict": "error", "error": f"resource limit: {e}"})
    except (InvariantViolation, StandpointError) as e:
        return Outcome(EXIT_INTERNAL, {"verdict": "error", "error": f"internal error: {e}"})

    if config.mode == "sat":
        # a counter-model of the negation is a model of the formula
        label = "satisfiable" if not verdict.valid else "unsatisfiable"
        status = EXIT_VALID if not verdict.valid else EXIT_INVALID
    else:
        label = "valid" if verdict.valid else "invalid"
        status = EXIT_VALID if verdict.valid else EXIT_INVALID
    report: dict = {"verdict": label, "input": render_input(inp), "stats": verdict.stats}
    cert: dict = {}
    if verdict.valid and config.wanted in ("proof", "both"):
        cert["proof"] = proof_to_json(verdict.proof)
    if not verdict.valid and config.wanted in ("model", "both"):
        cert["model"] = verdict.model.to_json(verdict.falsified_at)
    report["certificate"] = cert
    report["_verdict"] = verdict

    if config.oracle_check:
        try:
            found = find_countermodel(query, serial=serial)
        except OracleLimitError as e:
            report["oracle"] = f"skipped: {e}"
        else:
            if (found is None) == verdict.valid:
                report["oracle"] = "agree"
            else:
                report["oracle"] = "DISAGREE"
                report["certificate"] = {
                    "proof": proof_to_json(verdict.proof) if verdict.valid else None,
                    "model": verdict.model.to_json(verdict.falsified_at) if not verdict.valid else None,
                    "oracle_model": found[0].to_json(found[1]) if found else None,
                }
                status = EXIT_INTERNAL
    return Outcome(status, report)


def _public(report: dict, config: RunConfig) -> dict:
    out = {k: v for k, v in report.items() if not k.startswith("_")}
    if config.wanted == "none":
        out.pop("certificate", None)
    return out


def _text(report: dict, config: RunConfig) -> str:
    if report["verdict"] == "error":
        return f"error: {report['error']}\n"
    lines = [report["verdict"]]
    verdict = report.get("_verdict")
    cert = report.get("certificate", {})
    if report.get("oracle") == "DISAGREE":
        lines.append("oracle: DISAGREE")
        lines.append(json.dumps(cert, ensure_ascii=False, indent=1))
    elif config.wanted != "none" and verdict is not None:
        if verdict.valid and "proof" in cert:
            lines.append(render_proof(verdict.proof).rstrip("\n"))
        elif not verdict.valid and "model" in cert:
            word = "satisfied" if config.mode == "sat" else "falsified"
            lines += _model_text(verdict.model, verdict.falsified_at, word)
    if "oracle" in report and report["oracle"] != "DISAGREE":
        lines.append(f"oracle: {report['oracle']}")
    if config.stats:
        lines.append("stats: " + json.dumps(report["stats"], sort_keys=True))
    return "\n".join(lines) + "\n"


def run(config: RunConfig, text: str, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    outcome = decide(config, text)
    report = outcome.report
    if config.emit == "json":
        out.write(json.dumps(_public(report, config), ensure_ascii=False, indent=1) + "\n")
    elif report["verdict"] == "error":
        err.write(_text(report, config))
    else:
        out.write(_text(report, config))
    return outcome.status


def run_batch(config: RunConfig, corpus: str, out: TextIO | None = None) -> int:
    """One implication per line; blank lines and ``#`` comments are skipped."""
    out = out or sys.stdout
    results = []
    for n, line in enumerate(corpus.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        outcome = decide(config, line)
        entry = {"line": n, "status": outcome.status, **_public(outcome.report, config)}
        if config.emit != "json":
            entry.pop("certificate", None)
        results.append(entry)
    decided = [r for r in results if r["verdict"] != "error"]
    summary = {
        "lines": len(results),
        "verdicts": {v: sum(1 for r in results if r["verdict"] == v) for v in sorted({r["verdict"] for r in results})},
        "recursive_calls_max": max((r["stats"]["recursive_calls_max"] for r in decided), default=0),
        "bound_max": max((r["stats"]["bound"] for r in decided), default=0),
        "within_bound": all(r["stats"]["recursive_calls_max"] <= r["stats"]["bound"] for r in decided),
        "colorings_total": sum(r["stats"]["colorings"] for r in decided),
        "threads_total": sum(r["stats"]["threads_run"] for r in decided),
        "disagreements": sum(1 for r in results if r.get("oracle") == "DISAGREE"),
    }
    if config.emit == "json":
        out.write(json.dumps({"results": results, "summary": summary}, ensure_ascii=False, indent=1) + "\n")
    else:
        for r in results:
            detail = r.get("error") or r["input"]
            extra = f" [oracle {r['oracle']}]" if "oracle" in r else ""
            out.write(f"line {r['line']}: {r['verdict']}{extra}: {detail}\n")
        out.write("summary: " + json.dumps(summary, sort_keys=True) + "\n")
    return EXIT_INTERNAL if any(r["status"] == EXIT_INTERNAL for r in results) else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="standpoint",
        description="Decide standpoint implications 'G |- phi' with proofs or counter-models.",
    )
    ap.add_argument("implication", nargs="?", help="input text; read from --file or stdin if omitted")
    ap.add_argument("--file", help="read the input from this file")
    ap.add_argument("--batch", action="store_true", help="treat the input as a corpus, one implication per line")
    ap.add_argument("--mode", choices=("validity", "sat"), default="validity")
    ap.add_argument("--emit", choices=("text", "json"), default="text")
    ap.add_argument("--certificate", choices=("proof", "model", "both", "none"))
    ap.add_argument("--oracle-check", action="store_true", help="cross-check the verdict by model enumeration")
    ap.add_argument("--no-seriality", action="store_true", help="allow standpoints to denote the empty set")
    ap.add_argument("--max-colorings", type=int, default=DEFAULT_MAX_COLORINGS)
    ap.add_argument("--stats", action="store_true", help="print search statistics")
    ap.add_argument("--search", choices=("local", "uniform"), default="local",
                    help="how (∧) premises are chosen per thread (default: local)")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.max_colorings < 1:
        ap.error("--max-colorings must be positive")
    config = RunConfig(
        mode=args.mode,
        emit=args.emit,
        certificate=args.certificate,
        oracle_check=args.oracle_check,
        no_seriality=args.no_seriality,
        max_colorings=args.max_colorings,
        stats=args.stats,
        search=args.search,
    )
    if args.implication is not None and args.file is not None:
        ap.error("give either an implication or --file, not both")
    try:
        if args.implication is not None:
            text = args.implication
        elif args.file is not None:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
        else:
            text = sys.stdin.read()
    except OSError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE
    if args.batch:
        return run_batch(config, text)
    return run(config, text)


if __name__ == "__main__":
    sys.exit(main())
