"""Run pipelines over a directory of Timbuk files and collect one report per pair."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import config
from config import logger
from formats.timbuk import load_timbuk
from harness.pipelines import PipelineReport, parse_pipeline, run_pipeline
from utils.errors import AutomataError, invalid_input

CORPUS_SUFFIXES = (".timbuk", ".tmb", ".txt")


def corpus_files(directory: str | Path) -> list[Path]:
    """Timbuk files of a corpus directory, sorted by name."""
    directory = Path(directory)
    if not directory.is_dir():
        raise invalid_input(f"Corpus directory '{directory}' does not exist")
    return sorted(
        p for p in directory.iterdir() if p.is_file() and p.suffix in CORPUS_SUFFIXES
    )


def bench_file(
    path: Path, pipelines: list[str], options: config.SimulationOptions
) -> list[PipelineReport]:
    """
    All pipelines over one file; failures become reports with an error message.

    Returns:
        One report per pipeline, in the order given.
    """
    corpus_id = path.stem
    try:
        a = load_timbuk(path)
    except (AutomataError, OSError) as e:
        logger.warning(f"{path}: {e}")
        return [
            PipelineReport(corpus_id, pipeline, error=str(e)) for pipeline in pipelines
        ]
    reports = []
    for pipeline in pipelines:
        try:
            report = run_pipeline(a, pipeline, corpus_id, options)
            report.automaton = None
        except AutomataError as e:
            logger.warning(f"{corpus_id} {pipeline}: {e}")
            report = PipelineReport(
                corpus_id, pipeline, a.state_count, len(a.transitions), error=str(e)
            )
        except Exception as e:
            logger.error(f"Error running {pipeline} on {corpus_id}: {e}", exc_info=True)
            report = PipelineReport(
                corpus_id, pipeline, a.state_count, len(a.transitions), error=repr(e)
            )
        reports.append(report)
    return reports


def _bench_task(payload) -> list[PipelineReport]:
    return bench_file(*payload)


def run_bench(
    corpus: str | Path,
    pipelines: list[str],
    jobs: int = 1,
    options: config.SimulationOptions = config.DEFAULT_OPTIONS,
) -> list[PipelineReport]:
    """
    Reports for every (file, pipeline), grouped by file in corpus order.

    Files are distributed over `jobs` worker processes; each pipeline run stays
    sequential inside its worker.
    """
    for pipeline in pipelines:
        parse_pipeline(pipeline, options)
    files = corpus_files(corpus)
    if jobs > 1:
        options = replace(options, jobs=1)
    payloads = [(path, pipelines, options) for path in files]
    logger.info(
        f"benchmarking {len(files)} automata x {len(pipelines)} pipelines "
        f"on {jobs} workers"
    )
    if jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            batches = list(pool.map(_bench_task, payloads))
    else:
        batches = [_bench_task(payload) for payload in payloads]
    return [report for batch in batches for report in batch]
