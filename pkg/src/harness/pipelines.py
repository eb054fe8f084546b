"""
Reduction/complement pipelines such as "H+C+H".

A pipeline is a `+`-joined list of steps: RU (remove useless states),
H or H(x,y) (Heavy), S1 / S2 or S1(x,y) / S2(x,y) (Sat1 / Sat2) and C
(complement). H, S1 and S2 default to lookaheads (1,1).
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass, field
from typing import Callable

import config
from automata.complement import complement, is_empty
from automata.core import TreeAutomaton, remove_useless, stats
from automata.reduce import heavy
from automata.saturate import sat1, sat2
from config import logger
from utils.errors import invalid_input

# Pipelines compared in the complement experiments.
PIPELINES = ("C", "H+C", "H+S2+C", "H+C+H", "H+C+H+S2")

_STEP = re.compile(r"^(RU|H|S1|S2|C)(?:\((\d+),(\d+)\))?$")


@dataclass(frozen=True)
class Step:
    name: str
    apply: Callable[[TreeAutomaton], TreeAutomaton] = field(compare=False)


@dataclass(frozen=True)
class StepReport:
    name: str
    states: int
    transitions: int
    ms: float


@dataclass
class PipelineReport:
    """Per-step sizes and timings of one pipeline run over one automaton."""

    corpus_id: str
    pipeline: str
    input_states: int | None = None
    input_transitions: int | None = None
    steps: list[StepReport] = field(default_factory=list)
    empty: bool | None = None
    error: str | None = None
    automaton: TreeAutomaton | None = field(default=None, repr=False, compare=False)

    @property
    def total_ms(self) -> float:
        return sum(step.ms for step in self.steps)

    @property
    def final_states(self) -> int | None:
        return self.steps[-1].states if self.steps else self.input_states

    @property
    def final_transitions(self) -> int | None:
        return self.steps[-1].transitions if self.steps else self.input_transitions

    def summary(self) -> dict:
        return {
            "corpus_id": self.corpus_id,
            "pipeline": self.pipeline,
            "input": {
                "states": self.input_states,
                "transitions": self.input_transitions,
            },
            "steps": [
                {
                    "name": s.name,
                    "states": s.states,
                    "transitions": s.transitions,
                    "ms": round(s.ms, 3),
                }
                for s in self.steps
            ],
            "states": self.final_states,
            "transitions": self.final_transitions,
            "ms": round(self.total_ms, 3),
            "empty": self.empty,
            "error": self.error,
        }


def parse_pipeline(
    text: str, options: config.SimulationOptions = config.DEFAULT_OPTIONS
) -> list[Step]:
    """
    Turn "H(2,1)+C" into executable steps.

    Raises:
        AutomataError: on an unknown token or parameters on RU / C.
    """
    steps = []
    for token in text.replace(" ", "").split("+"):
        match = _STEP.match(token)
        if match is None:
            raise invalid_input(f"Unknown pipeline step '{token}' in '{text}'")
        kind, x, y = match.group(1), match.group(2), match.group(3)
        if kind in ("RU", "C"):
            if x is not None:
                raise invalid_input(f"Step {kind} takes no lookahead parameters")
            steps.append(Step(kind, remove_useless if kind == "RU" else complement))
            continue
        x, y = (int(x), int(y)) if x is not None else (1, 1)
        reducer = {"H": heavy, "S1": sat1, "S2": sat2}[kind]
        steps.append(Step(token, lambda a, f=reducer, x=x, y=y: f(a, x, y, options)))
    return steps


def run_pipeline(
    a: TreeAutomaton,
    pipeline: str,
    corpus_id: str = "",
    options: config.SimulationOptions = config.DEFAULT_OPTIONS,
) -> PipelineReport:
    """
    Execute `pipeline` on `a`, timing each step with a monotonic clock.

    Errors propagate to the caller; the report carries the final automaton.
    """
    steps = parse_pipeline(pipeline, options)
    initial = stats(a)
    report = PipelineReport(
        corpus_id, pipeline, initial.state_count, initial.transition_count
    )
    current = a
    for step in steps:
        started = time.perf_counter()
        current = step.apply(current)
        elapsed = (time.perf_counter() - started) * 1000.0
        s = stats(current)
        report.steps.append(
            StepReport(step.name, s.state_count, s.transition_count, elapsed)
        )
        logger.info(
            f"[{corpus_id or '-'}] {pipeline} step {step.name}: "
            f"{s.state_count} states, {s.transition_count} transitions, "
            f"{elapsed:.1f} ms"
        )
    report.empty = is_empty(current)
    report.automaton = current
    return report
