"""
treesat command line.

    python src/cli.py reduce input.timbuk --algo heavy --x 2 --y 1
    python src/cli.py complement input.timbuk --pipeline H+C+H
    python src/cli.py generate --n 4 --td 1.5 --count 300 --seed 7 --out-dir corpus
    python src/cli.py equiv a.timbuk b.timbuk --exact
    python src/cli.py stats input.timbuk
    python src/cli.py bench --corpus corpus --pipelines C,H+C+H --csv out.csv

Exit codes: 0 success, 1 not equivalent (equiv), 2 invalid input,
3 budget exceeded, 4 internal error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import config
from automata.complement import equivalent
from automata.core import TreeAutomaton, stats, validate
from automata.generator import TvParams, derive_seed, tabakov_vardi
from automata.oracle import bounded_difference
from automata.reduce import heavy
from automata.saturate import sat1, sat2
from automata.simulation import CacheMode
from config import configure_logging, logger
from formats.report_csv import read_report_csv, summarize, write_report_csv
from formats.timbuk import dump_timbuk, load_timbuk, serialize_timbuk
from harness.bench import run_bench
from harness.pipelines import PIPELINES, run_pipeline
from utils.errors import INTERNAL_ERROR, AutomataError, invalid_input
from utils.formatting import format_error_response, format_success_response

NOT_EQUIVALENT = 1
REDUCERS = {"heavy": heavy, "sat1": sat1, "sat2": sat2}


def _load(path: str) -> TreeAutomaton:
    try:
        return load_timbuk(path)
    except OSError as e:
        raise invalid_input(
            f"Cannot read '{path}': {e.strerror or e}", path=path
        ) from e


def _options(args) -> config.SimulationOptions:
    return config.SimulationOptions(
        cache=args.cache, prerefine_depth=args.prerefine or 0, jobs=args.jobs
    )


def _stats_dict(a: TreeAutomaton) -> dict:
    s = stats(a)
    return {
        "states": s.state_count,
        "transitions": s.transition_count,
        "per_symbol": {
            symbol.name: count for symbol, count in zip(a.alphabet, s.per_symbol)
        },
        "initial": s.initial_count,
    }


def _certify(
    original: TreeAutomaton, reduced: TreeAutomaton, certify: str
) -> tuple[str, str | None]:
    """PASS/FAIL of language preservation, with a distinguishing tree on FAIL."""
    if certify == "exact":
        return ("PASS" if equivalent(original, reduced) else "FAIL"), None
    if not certify.isdigit():
        raise invalid_input(f"--certify takes a depth or 'exact', got '{certify}'")
    witness = bounded_difference(original, reduced, int(certify))
    return ("PASS", None) if witness is None else ("FAIL", str(witness))


def cmd_reduce(args) -> int:
    a = _load(args.input)
    reduced = REDUCERS[args.algo](a, args.x, args.y, _options(args))
    result = {
        "algo": args.algo,
        "x": args.x,
        "y": args.y,
        "input": _stats_dict(a),
        "output": _stats_dict(reduced),
    }
    status = 0
    if args.certify:
        verdict, witness = _certify(a, reduced, args.certify)
        result["certification"] = verdict
        if witness is not None:
            result["witness"] = witness
        if verdict == "FAIL":
            logger.error(f"language changed by {args.algo}: {witness}")
            status = INTERNAL_ERROR
    if args.out:
        dump_timbuk(reduced, args.out, Path(args.input).stem)
    else:
        sys.stdout.write(serialize_timbuk(reduced, Path(args.input).stem))
    print(format_success_response(result))
    return status


def cmd_complement(args) -> int:
    a = _load(args.input)
    report = run_pipeline(a, args.pipeline, Path(args.input).stem, _options(args))
    if args.out:
        dump_timbuk(report.automaton, args.out, f"{Path(args.input).stem}_complement")
    print(format_success_response(report.summary()))
    return 0


def cmd_generate(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for index in range(args.count):
        params = TvParams(
            n=args.n,
            s=args.s,
            td=args.td,
            ad=args.ad,
            seed=derive_seed(args.seed, index),
            initial=args.initial,
            leaf_symbols=args.leaf_symbols,
        )
        name = f"tv-{index:04d}"
        path = out_dir / f"{name}.timbuk"
        dump_timbuk(tabakov_vardi(params), path, name.replace("-", "_"))
        written.append(path.name)
    logger.info(f"wrote {len(written)} automata to {out_dir}")
    print(format_success_response({"out_dir": str(out_dir), "count": len(written)}))
    return 0


def cmd_equiv(args) -> int:
    a, b = _load(args.a), _load(args.b)
    if args.depth is not None:
        witness = bounded_difference(a, b, args.depth)
        same = witness is None
        result = {"equivalent": same, "mode": f"depth {args.depth}"}
        if witness is not None:
            result["witness"] = str(witness)
    else:
        same = equivalent(a, b)
        result = {"equivalent": same, "mode": "exact"}
    print(format_success_response(result))
    return 0 if same else NOT_EQUIVALENT


def cmd_stats(args) -> int:
    a = _load(args.input)
    print(format_success_response({**_stats_dict(a), "violations": validate(a)}))
    return 0


def cmd_bench(args) -> int:
    pipelines = [p.strip() for p in args.pipelines.split(",") if p.strip()]
    reports = run_bench(args.corpus, pipelines, args.jobs, _options(args))
    text = write_report_csv(reports)
    Path(args.csv).write_text(text)
    summary = summarize(read_report_csv(text))
    failures = sum(1 for report in reports if report.error)
    print(
        format_success_response(
            {
                "csv": args.csv,
                "rows": len(reports),
                "failures": failures,
                "summary": summary.to_dict(orient="records"),
            }
        )
    )
    return 0


def _add_engine_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--cache",
        choices=[m.value for m in CacheMode],
        default=config.DEFAULT_CACHE_MODE,
    )
    parser.add_argument(
        "--prerefine", type=int, default=config.DEFAULT_PREREFINE_DEPTH, metavar="D"
    )
    parser.add_argument("--jobs", type=int, default=1, metavar="J")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treesat", description="Tree automata reduction toolkit"
    )
    parser.add_argument("--log-level", default=None, help="overrides TREESAT_LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", required=True)

    reduce_parser = commands.add_parser("reduce", help="reduce an automaton")
    reduce_parser.add_argument("input")
    reduce_parser.add_argument("--algo", choices=sorted(REDUCERS), default="heavy")
    reduce_parser.add_argument("--x", type=int, default=1)
    reduce_parser.add_argument("--y", type=int, default=1)
    reduce_parser.add_argument("--out")
    reduce_parser.add_argument("--certify", metavar="DEPTH|exact")
    _add_engine_flags(reduce_parser)
    reduce_parser.set_defaults(handler=cmd_reduce)

    complement_parser = commands.add_parser(
        "complement", help="run a complement pipeline"
    )
    complement_parser.add_argument("input")
    complement_parser.add_argument(
        "--pipeline",
        default="C",
        help=f"one of {', '.join(PIPELINES)} or any step list",
    )
    complement_parser.add_argument("--out")
    _add_engine_flags(complement_parser)
    complement_parser.set_defaults(handler=cmd_complement)

    generate_parser = commands.add_parser(
        "generate", help="write a Tabakov-Vardi corpus"
    )
    generate_parser.add_argument("--n", type=int, required=True)
    generate_parser.add_argument("--s", type=int, default=2)
    generate_parser.add_argument("--td", type=float, default=1.0)
    generate_parser.add_argument("--ad", type=float, default=0.5)
    generate_parser.add_argument("--seed", type=int, default=0)
    generate_parser.add_argument("--count", type=int, default=1)
    generate_parser.add_argument(
        "--initial", default="all", help="all, one or density=f"
    )
    generate_parser.add_argument("--leaf-symbols", type=int, default=1)
    generate_parser.add_argument("--out-dir", required=True)
    generate_parser.set_defaults(handler=cmd_generate)

    equiv_parser = commands.add_parser("equiv", help="compare two languages")
    equiv_parser.add_argument("a")
    equiv_parser.add_argument("b")
    mode = equiv_parser.add_mutually_exclusive_group()
    mode.add_argument("--depth", type=int)
    mode.add_argument("--exact", action="store_true", help="the default")
    equiv_parser.set_defaults(handler=cmd_equiv)

    stats_parser = commands.add_parser("stats", help="print automaton statistics")
    stats_parser.add_argument("input")
    stats_parser.set_defaults(handler=cmd_stats)

    bench_parser = commands.add_parser(
        "bench", help="run pipelines over a corpus into a CSV"
    )
    bench_parser.add_argument("--corpus", required=True)
    bench_parser.add_argument("--pipelines", default=",".join(PIPELINES))
    bench_parser.add_argument("--csv", required=True)
    _add_engine_flags(bench_parser)
    bench_parser.set_defaults(handler=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except AutomataError as e:
        logger.debug(f"{args.command} failed: {e}")
        print(format_error_response(e.code, str(e), **e.error.data), file=sys.stderr)
        return e.code
    except Exception as e:
        logger.error(f"Error executing {args.command}: {e}", exc_info=True)
        print(
            format_error_response(INTERNAL_ERROR, f"{args.command} failed: {e}"),
            file=sys.stderr,
        )
        return INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
