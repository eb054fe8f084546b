"""CSV reports of pipeline runs, one row per (automaton, pipeline)."""

from __future__ import annotations

import io
from typing import TYPE_CHECKING, Iterable

import pandas as pd

if TYPE_CHECKING:
    from harness.pipelines import PipelineReport

COLUMNS = [
    "corpus_id",
    "pipeline",
    "step",
    "states",
    "transitions",
    "ms",
    "empty",
    "steps",
    "error",
]


def report_row(report: PipelineReport) -> dict:
    """Flatten a report: final stats, total time and the per-step trail."""
    last = report.steps[-1] if report.steps else None
    return {
        "corpus_id": report.corpus_id,
        "pipeline": report.pipeline,
        "step": last.name if last else "",
        "states": last.states if last else report.input_states,
        "transitions": last.transitions if last else report.input_transitions,
        "ms": round(report.total_ms, 3),
        "empty": report.empty,
        "steps": ";".join(
            f"{step.name}:{step.states}/{step.transitions}/{step.ms:.3f}"
            for step in report.steps
        ),
        "error": report.error or "",
    }


def report_frame(reports: Iterable[PipelineReport]) -> pd.DataFrame:
    return pd.DataFrame([report_row(report) for report in reports], columns=COLUMNS)


def write_report_csv(reports: Iterable[PipelineReport]) -> str:
    """CSV text with a header row and one row per report, in the given order."""
    return report_frame(reports).to_csv(index=False)


def read_report_csv(text: str) -> pd.DataFrame:
    frame = pd.read_csv(
        io.StringIO(text), keep_default_na=False, dtype={"corpus_id": str}
    )
    for column in ("states", "transitions", "ms"):
        frame[column] = pd.to_numeric(frame[column], errors="coerce")
    return frame


def summarize(frame: pd.DataFrame) -> pd.DataFrame:
    """
    Per-pipeline aggregates over successful rows.

    `empty_fraction` over a complement pipeline is the fraction of universal
    inputs.
    """
    ok = frame[frame["error"].astype(str) == ""].copy()
    ok["empty"] = ok["empty"].astype(str).str.lower() == "true"
    summary = ok.groupby("pipeline", sort=False).agg(
        runs=("corpus_id", "count"),
        mean_states=("states", "mean"),
        mean_transitions=("transitions", "mean"),
        total_transitions=("transitions", "sum"),
        mean_ms=("ms", "mean"),
        empty_fraction=("empty", "mean"),
    )
    return summary.reset_index()
