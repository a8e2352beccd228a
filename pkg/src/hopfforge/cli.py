"""Command-line front end.

    hopfforge verify FILE...        run every applicable check
    hopfforge classify FILE...      report the strongest verdict
    hopfforge construct FILE --emit counit,antipode,E,F
    hopfforge corpus NAME... --out DIR   (NAME may be "all")

Exit codes: 0 everything passed, 1 some check failed, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import corpus
from .instance import InstanceError, dumps, load_instance
from .runner import EMITTABLE, RunResult, report_dict, report_text, run_construct, run_verify

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _emit_list(raw: str) -> list[str]:
    items = [x.strip() for x in raw.split(",") if x.strip()]
    bad = [x for x in items if x not in EMITTABLE]
    if bad or not items:
        raise argparse.ArgumentTypeError(f"choose from {', '.join(EMITTABLE)}")
    return items


def _positive(raw: str) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hopfforge", description="Exact verification of multiplier Hopf structures.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("files", nargs="+", help="instance files")
        sp.add_argument("--window", type=_positive, help="window size for supported (infinite-basis) algebras")
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--jobs", type=_positive, default=1, help="worker processes")
        sp.add_argument("--timing", action="store_true", help="include per-check timings in reports")

    common(sub.add_parser("verify", help="run every applicable check"))
    common(sub.add_parser("classify", help="report the strongest verdict"))
    cons = sub.add_parser("construct", help="build counit, antipode, E or F")
    common(cons)
    cons.add_argument("--emit", type=_emit_list, required=True, help="comma list of counit, antipode, E, F")
    corp = sub.add_parser("corpus", help="write generated instance files")
    corp.add_argument("names", nargs="*", default=["all"], help="instance names, or 'all'")
    corp.add_argument("--out", default=".", help="output directory")
    corp.add_argument("--list", action="store_true", help="list known names and exit")
    return p


def _run_one(task: tuple) -> tuple[str, int, dict | None, str | None]:
    """Worker: returns (name, exit code, report dict, error message)."""
    path, command, window, emit, timing = task
    try:
        inst = load_instance(path, window=window)
    except InstanceError as err:
        return path, EXIT_INPUT, None, str(err)
    except Exception as err:  # an instance the engines cannot even build
        return path, EXIT_INPUT, None, f"{path}: {err}"
    res = run_construct(inst, emit) if command == "construct" else run_verify(inst, command)
    return inst.name, res.exit_code, report_dict(res, timing), None


def _render(name: str, report: dict | None, error: str | None, fmt: str, timing: bool) -> str:
    if report is None:
        if fmt == "json":
            return dumps({"instance": name, "error": error, "exitCode": EXIT_INPUT})
        return f"== {name}\nerror: {error}\nexit: {EXIT_INPUT}\n"
    if fmt == "json":
        return dumps(report)
    return _text_from_dict(report, timing)


def _text_from_dict(rep: dict, timing: bool) -> str:
    lines = [f"== {rep['instance']} ({rep['command']})"]
    for c in rep["checks"]:
        line = f"{c['status']:<12} {c['checkId']}  [{c['paperRef']}]"
        if "witness" in c:
            line += f"  witness={json.dumps(c['witness'])}"
        if timing and "timing" in c:
            line += f"  {c['timing']:.3f}s"
        lines.append(line)
    if "classification" in rep:
        cl = rep["classification"]
        lines.append(f"verdict: {cl['label']}")
        lines.extend(f"note: {n}" for n in cl["notes"])
        if cl["unmet"]:
            lines.append("unmet: " + "; ".join(cl["unmet"]))
    for name, art in rep.get("artifacts", {}).items():
        lines.append(f"{name}: {json.dumps(art)}")
    lines.append(f"exit: {rep['exitCode']}")
    return "\n".join(lines) + "\n"


def _cmd_corpus(args) -> int:
    if args.list:
        print("\n".join(corpus.names()))
        return EXIT_OK
    names = corpus.names() if "all" in args.names else args.names
    unknown = [n for n in names if n not in corpus.CATALOG]
    if unknown:
        print(f"unknown corpus name(s): {', '.join(unknown)}", file=sys.stderr)
        return EXIT_INPUT
    os.makedirs(args.out, exist_ok=True)
    for n in names:
        target = os.path.join(args.out, f"{n}.json")
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(corpus.generate_text(n))
        print(target)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.command == "corpus":
        return _cmd_corpus(args)
    try:
        from .instance import max_dim
        max_dim()
    except InstanceError as err:
        print(str(err), file=sys.stderr)
        return EXIT_INPUT
    emit = getattr(args, "emit", None)
    tasks = [(f, args.command, args.window, emit, args.timing) for f in args.files]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_one, tasks))  # map keeps input order
    else:
        results = [_run_one(t) for t in tasks]
    worst = EXIT_OK
    for name, code, report, error in results:
        sys.stdout.write(_render(name, report, error, args.format, args.timing))
        if error:
            print(error, file=sys.stderr)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
