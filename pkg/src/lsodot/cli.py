"""Command-line interface and REPL.

Exit codes: 0 success, 1 type error, 2 parse error, 3 runtime error
(step budget, wrong shapes, failed fuzz cases), 4 usage error.
Diagnostics go to stderr, results to stdout; identical argv and seeds
produce byte-identical output.

Report paths (`fuzz --report`, `quantum measure --report`) write
line-delimited JSON records and render a companion PNG figure next to them.
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
from pathlib import Path
from typing import Optional

from .kernel import Imp
from .matrices import Matrix, apply_linear, compile_matrix
from .metatheory import SUITE_NAMES, SuiteReport, run_suite
from .quantum import ORACLES, deutsch_demo, measure, norm_weigher
from .rewrite import (StepBudgetExceeded, StuckOnNondeterminism,
                      sample_normalize, step_budget)
from .syntax import (ParseError, parse_matrix_rows, parse_prop, parse_term,
                     parse_vector, print_prop, print_term, print_vector)
from .typecheck import TypeCheckError, check_closed, synthesize
from .vectors import decode, encode, vshape

EXIT_OK, EXIT_TYPE, EXIT_PARSE, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="lsodot", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="type-check a closed term file")
    c.add_argument("file")
    c.add_argument("--expect", help="required proposition")
    c.add_argument("--tensor", action="store_true", help="enable '><' syntax")

    e = sub.add_parser("eval", help="normalize a closed term file")
    e.add_argument("file")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--trace", action="store_true",
                   help="emit one JSON record per reduction step")
    e.add_argument("--budget", type=int, default=None)
    e.add_argument("--tensor", action="store_true")

    sub.add_parser("repl", help="interactive loop")

    v = sub.add_parser("vec", help="encode/decode vectors as proofs")
    v.add_argument("mode", choices=("encode", "decode"))
    v.add_argument("--shape", required=True, help="vector-shaped proposition")

    cm = sub.add_parser("compile-matrix", help="compile a matrix file to a proof")
    cm.add_argument("matrixfile")
    cm.add_argument("--in", dest="in_prop", required=True)
    cm.add_argument("--out", dest="out_prop", required=True)
    cm.add_argument("--emit", help="also write the term to this file")

    ap = sub.add_parser("apply", help="apply a compiled proof to a vector file")
    ap.add_argument("termfile")
    ap.add_argument("vectorfile")

    q = sub.add_parser("quantum", help="measurement sampling and Deutsch demo")
    qsub = q.add_subparsers(dest="qcommand", required=True)
    qm = qsub.add_parser("measure")
    qm.add_argument("file")
    qm.add_argument("--n", type=int, required=True)
    qm.add_argument("--samples", type=int, default=1000)
    qm.add_argument("--seed", type=int, default=0)
    qm.add_argument("--report", help="write JSONL records and a PNG figure")
    qd = qsub.add_parser("deutsch")
    qd.add_argument("--oracle", choices=ORACLES, required=True)
    qd.add_argument("--samples", type=int, default=1000)
    qd.add_argument("--seed", type=int, default=0)

    f = sub.add_parser("fuzz", help="run a metatheory property suite")
    f.add_argument("--suite", choices=SUITE_NAMES, required=True)
    f.add_argument("--n", type=int, default=100)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--report", help="write JSONL records and a PNG figure")
    return p


def main(argv: Optional[list[str]] = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _dispatch(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except TypeCheckError as e:
        print(f"type error: {e}", file=sys.stderr)
        return EXIT_TYPE
    except (StepBudgetExceeded, StuckOnNondeterminism) as e:
        print(f"runtime error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ValueError, OSError) as e:
        print(f"runtime error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "check":
        return _cmd_check(args)
    if cmd == "eval":
        return _cmd_eval(args)
    if cmd == "repl":
        return _cmd_repl()
    if cmd == "vec":
        return _cmd_vec(args)
    if cmd == "compile-matrix":
        return _cmd_compile_matrix(args)
    if cmd == "apply":
        return _cmd_apply(args)
    if cmd == "quantum":
        return _cmd_quantum(args)
    return _cmd_fuzz(args)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _cmd_check(args) -> int:
    term = parse_term(_read(args.file), allow_tensor=args.tensor)
    if args.expect is not None:
        prop = parse_prop(args.expect)
        check_closed(term, prop)
    else:
        prop, _ = synthesize({}, term)
    print(print_prop(prop))
    return EXIT_OK


def _cmd_eval(args) -> int:
    term = parse_term(_read(args.file), allow_tensor=args.tensor)
    synthesize({}, term)  # reject ill-typed input before rewriting
    rng = random.Random(args.seed)
    budget = args.budget if args.budget is not None else step_budget()
    nf, trace = sample_normalize(term, rng, weigher=norm_weigher, budget=budget)
    if args.trace:
        for i, step in enumerate(trace.steps):
            rec = {"step": i, "rule": step.rule.name, "path": list(step.path),
                   "probability": (str(step.probability)
                                   if step.probability is not None else None)}
            print(json.dumps(rec))
    print(print_term(nf))
    return EXIT_OK


def _cmd_vec(args) -> int:
    shape = vshape(parse_prop(args.shape))
    text = sys.stdin.read()
    if args.mode == "encode":
        values = parse_vector(text)
        print(print_term(encode(values, shape)))
    else:
        term = parse_term(text, allow_tensor=True)
        check_closed(term, shape.prop)
        print(print_vector(decode(term, shape)))
    return EXIT_OK


def _cmd_compile_matrix(args) -> int:
    m = Matrix.from_rows(parse_matrix_rows(_read(args.matrixfile)))
    in_shape = vshape(parse_prop(args.in_prop))
    out_shape = vshape(parse_prop(args.out_prop))
    term = compile_matrix(m, in_shape, out_shape)
    text = print_term(term)
    if args.emit:
        Path(args.emit).write_text(text + "\n", encoding="utf-8")
    print(text)
    return EXIT_OK


def _cmd_apply(args) -> int:
    term = parse_term(_read(args.termfile), allow_tensor=True)
    prop, _ = synthesize({}, term)
    if not isinstance(prop, Imp):
        raise TypeCheckError("connective-mismatch",
                             f"term has type {print_prop(prop)}, not an implication")
    in_shape = vshape(prop.dom)
    out_shape = vshape(prop.cod)
    values = parse_vector(_read(args.vectorfile))
    print(print_vector(apply_linear(term, values, in_shape, out_shape)))
    return EXIT_OK


def _cmd_quantum(args) -> int:
    if args.qcommand == "measure":
        state = parse_term(_read(args.file), allow_tensor=True)
        counts = measure(state, args.n, args.samples, args.seed)
        for outcome in sorted(counts):
            print(f"{outcome}: {counts[outcome]}")
        if args.report:
            _write_measure_report(args.report, counts, args.samples)
        return EXIT_OK
    counts = deutsch_demo(args.oracle, args.samples, args.seed)
    for outcome in sorted(counts):
        print(f"{outcome}: {counts[outcome]}")
    return EXIT_OK


def _cmd_fuzz(args) -> int:
    report = run_suite(args.suite, args.n, args.seed)
    print(report.summary())
    for c in report.failures:
        print(f"case {c.index} (seed {c.seed}): {c.detail}", file=sys.stderr)
        if c.shrunk:
            print(f"  shrunk: {c.shrunk}", file=sys.stderr)
    if args.report:
        _write_fuzz_report(args.report, report)
    return EXIT_OK if not report.failures else EXIT_RUNTIME


# ---------------------------------------------------------------------------
# Reports: line-delimited records plus a rendered figure alongside

def _figure_path(path: str) -> Path:
    p = Path(path)
    out = p.with_suffix(".png")
    if out == p:
        out = p.with_suffix(".plot.png")
    return out


def _write_fuzz_report(path: str, report: SuiteReport) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for c in report.cases:
            rec = {"case": c.index, "seed": c.seed,
                   "verdict": "pass" if c.ok else "fail"}
            if not c.ok:
                rec["detail"] = c.detail
                if c.term:
                    rec["term"] = c.term
                if c.shrunk:
                    rec["shrunk"] = c.shrunk
            fh.write(json.dumps(rec) + "\n")
    passed = report.n - len(report.failures)
    _render_bars(_figure_path(path),
                 f"suite {report.suite} (n={report.n}, seed {report.seed})",
                 {"pass": passed, "fail": len(report.failures)},
                 colors=("#2a9d8f", "#e76f51"))


def _write_measure_report(path: str, counts: dict[int, int], samples: int) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for outcome in sorted(counts):
            rec = {"outcome": outcome, "count": counts[outcome],
                   "frequency": counts[outcome] / samples}
            fh.write(json.dumps(rec) + "\n")
    _render_bars(_figure_path(path), f"measurement outcomes ({samples} samples)",
                 {str(k): v for k, v in sorted(counts.items())},
                 colors=("#264653", "#2a9d8f"))


def _render_bars(path: Path, title: str, data: dict[str, int], colors) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    labels = list(data)
    values = [data[k] for k in labels]
    ax.bar(labels, values, color=[colors[i % len(colors)] for i in range(len(labels))])
    ax.set_title(title, fontsize=10)
    ax.set_ylabel("count")
    for i, v in enumerate(values):
        ax.text(i, v, str(v), ha="center", va="bottom", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


# ---------------------------------------------------------------------------
# REPL

_REPL_HELP = """commands:
  :check TERM      type-check a closed term
  :type TERM       synthesize and print the type
  :eval TERM       normalize (sampling with the current seed)
  :let NAME = TERM define NAME by textual substitution
  :seed N          set the sampling seed
  :quit            leave the loop"""


def _expand(text: str, defs: dict[str, str]) -> str:
    for _ in range(100):
        out = text
        for name, body in defs.items():
            out = re.sub(rf"\b{re.escape(name)}\b", lambda _m: f"({body})", out)
        if out == text:
            return out
        text = out
    raise UsageError("definitions expand without reaching a fixed point")


def _cmd_repl() -> int:
    defs: dict[str, str] = {}
    seed = 0
    prompt = "lsodot> " if sys.stdin.isatty() else ""
    while True:
        try:
            line = input(prompt)
        except EOFError:
            return EXIT_OK
        line = line.strip()
        if not line:
            continue
        try:
            if line in (":quit", ":q"):
                return EXIT_OK
            if line == ":help":
                print(_REPL_HELP)
                continue
            if line.startswith(":seed"):
                seed = int(line.split(maxsplit=1)[1])
                print(f"seed = {seed}")
                continue
            if line.startswith(":let"):
                body = line[len(":let"):].strip()
                name, _, definition = body.partition("=")
                name = name.strip()
                if not name.isidentifier() or not definition.strip():
                    raise UsageError("usage: :let NAME = TERM")
                parse_term(_expand(definition.strip(), defs), allow_tensor=True)
                defs[name] = _expand(definition.strip(), defs)
                print(f"{name} defined")
                continue
            for cmd, action in ((":check", "check"), (":type", "type"),
                                (":eval", "eval")):
                if line.startswith(cmd):
                    text = _expand(line[len(cmd):].strip(), defs)
                    term = parse_term(text, allow_tensor=True)
                    prop, _ = synthesize({}, term)  # closed: raises on free vars
                    if action == "check":
                        print(f"ok: {print_prop(prop)}")
                    elif action == "type":
                        print(print_prop(prop))
                    else:
                        nf, _tr = sample_normalize(
                            term, random.Random(seed), weigher=norm_weigher)
                        print(print_term(nf))
                    break
            else:
                raise UsageError(f"unknown command {line.split()[0]!r} "
                                 "(try :help)")
        except (ParseError, TypeCheckError, UsageError,
                StepBudgetExceeded, ValueError) as e:
            print(f"error: {e}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
