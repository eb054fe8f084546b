"""
Transition pruning, state quotienting and the Heavy(x,y) reduction loop.

Every step recomputes the relations it needs on the automaton it is applied
to; nothing is projected across quotienting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

import config
from automata.core import Transition, TreeAutomaton, remove_useless, stats
from automata.relation import Relation, induced_equiv, strict_part
from automata.simulation import dw_sim, up_sim
from config import logger
from utils.errors import invalid_input


@dataclass(frozen=True)
class PruneSpec:
    """
    P(source, target): transition t is dominated by t' when t' has a larger
    source and a lifted-larger target tuple. Exactly one side is strict.
    """

    source_relation: Relation
    target_relation: Relation
    source_strict: bool = False
    target_strict: bool = False

    def __post_init__(self):
        if self.source_strict == self.target_strict:
            raise invalid_input(
                "Exactly one side of a pruning relation pair must be strict",
                source_strict=self.source_strict,
                target_strict=self.target_strict,
            )


@dataclass(frozen=True)
class QuotientMap:
    """State -> class index, with classes ordered by their smallest member."""

    class_of: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]

    @classmethod
    def from_equivalence(cls, equiv: Relation) -> QuotientMap:
        classes = tuple(tuple(members) for members in equiv.classes())
        class_of = [0] * equiv.size
        for index, members in enumerate(classes):
            for state in members:
                class_of[state] = index
        return cls(tuple(class_of), classes)


def dominated(a: TreeAutomaton, spec: PruneSpec) -> set[Transition]:
    """Transitions of `a` that have a P-larger same-symbol transition in `a`."""
    n = a.state_count
    for relation in (spec.source_relation, spec.target_relation):
        if relation.size != n:
            raise invalid_input(
                f"Relation of dimension {relation.size} "
                f"for an automaton with {n} states"
            )
    source = spec.source_relation
    if spec.source_strict:
        source = strict_part(source)
    target = spec.target_relation.matrix
    target_strict = strict_part(spec.target_relation).matrix
    removed: set[Transition] = set()
    for symbol, group in a.by_symbol.items():
        sources = np.array([t.source for t in group], dtype=np.int64)
        # larger[i, j]: group[j] is P-larger than group[i]
        larger = source.matrix[np.ix_(sources, sources)].copy()
        rank = a.alphabet[symbol].rank
        some_strict = np.zeros_like(larger)
        for position in range(rank):
            children = np.array([t.targets[position] for t in group], dtype=np.int64)
            larger &= target[np.ix_(children, children)]
            some_strict |= target_strict[np.ix_(children, children)]
        if spec.target_strict:
            larger &= some_strict
        for i in np.nonzero(larger.any(axis=1))[0]:
            removed.add(group[int(i)])
    return removed


def prune(a: TreeAutomaton, spec: PruneSpec) -> TreeAutomaton:
    """
    Remove every transition dominated by another one of the original transition set.

    Removals happen in parallel; P is not recomputed as transitions disappear.
    """
    removed = dominated(a, spec)
    if not removed:
        return a
    logger.debug(f"pruning removed {len(removed)} of {len(a.transitions)} transitions")
    return a.with_transitions(t for t in a.transitions if t not in removed)


def quotient(a: TreeAutomaton, equiv: Relation) -> TreeAutomaton:
    """
    Collapse each equivalence class into one state.

    Classes are numbered by their smallest member, which also gives the class
    its name. Raises if `equiv` is not an equivalence on the states of `a`.
    """
    if equiv.size != a.state_count:
        raise invalid_input(
            f"Relation of dimension {equiv.size} "
            f"for an automaton with {a.state_count} states"
        )
    qmap = QuotientMap.from_equivalence(equiv)
    if len(qmap.classes) == a.state_count:
        return a
    class_of = qmap.class_of
    transitions = [
        Transition(class_of[t.source], t.symbol, tuple(class_of[r] for r in t.targets))
        for t in a.transitions
    ]
    names = None
    if a.state_names is not None:
        names = tuple(a.state_names[members[0]] for members in qmap.classes)
    logger.debug(f"quotient merged {a.state_count} states into {len(qmap.classes)}")
    return TreeAutomaton(
        a.alphabet,
        len(qmap.classes),
        frozenset(class_of[q] for q in a.initial),
        tuple(transitions),
        names,
    )


def _check_lookahead(**lookaheads: int) -> None:
    for name, value in lookaheads.items():
        if value < 1:
            raise invalid_input(f"Lookahead {name} must be at least 1, got {value}")


def quotient_dw(
    a: TreeAutomaton, x: int, options=config.DEFAULT_OPTIONS
) -> TreeAutomaton:
    """Quotient by the equivalence induced by downward x-lookahead simulation."""
    return quotient(a, induced_equiv(dw_sim(a, x, options)))


def quotient_up(
    a: TreeAutomaton, y: int, options=config.DEFAULT_OPTIONS
) -> TreeAutomaton:
    """Quotient by the equivalence induced by upward y-lookahead simulation."""
    return quotient(a, induced_equiv(up_sim(a, y, None, options)))


def prune_dw(a: TreeAutomaton, x: int, options=config.DEFAULT_OPTIONS) -> TreeAutomaton:
    """P(id, strict dw-x)."""
    identity = Relation.identity(a.state_count)
    return prune(a, PruneSpec(identity, dw_sim(a, x, options), target_strict=True))


def prune_up(a: TreeAutomaton, y: int, options=config.DEFAULT_OPTIONS) -> TreeAutomaton:
    """P(strict up-y(id), id)."""
    identity = Relation.identity(a.state_count)
    upward = up_sim(a, y, None, options)
    return prune(a, PruneSpec(upward, identity, source_strict=True))


def prune_up_dw(
    a: TreeAutomaton, x: int, options=config.DEFAULT_OPTIONS
) -> TreeAutomaton:
    """P(strict up-1(id), dw-x); the upward side is ordinary simulation."""
    upward = up_sim(a, 1, None, options)
    return prune(a, PruneSpec(upward, dw_sim(a, x, options), source_strict=True))


def prune_up_relative(
    a: TreeAutomaton, y: int, options=config.DEFAULT_OPTIONS
) -> TreeAutomaton:
    """P(up-y(dw-1), strict dw-1)."""
    downward = dw_sim(a, 1, options)
    upward = up_sim(a, y, downward, options)
    return prune(a, PruneSpec(upward, downward, target_strict=True))


def op_xy(
    a: TreeAutomaton, x: int, y: int, options=config.DEFAULT_OPTIONS
) -> TreeAutomaton:
    """One pass of the Op(x,y) sequence of removals, quotients and prunes."""
    _check_lookahead(x=x, y=y)
    a = remove_useless(a)
    a = quotient_dw(a, x, options)
    a = prune_dw(a, x, options)
    a = remove_useless(a)
    a = quotient_up(a, y, options)
    a = prune_up(a, y, options)
    a = prune_up_dw(a, x, options)
    a = remove_useless(a)
    a = quotient_up(a, y, options)
    a = prune_up_relative(a, y, options)
    return remove_useless(a)


def _size(a: TreeAutomaton) -> tuple[int, int]:
    s = stats(a)
    return s.state_count, s.transition_count


def _iterate(step, a: TreeAutomaton, label: str) -> TreeAutomaton:
    """Apply `step` until the state and transition counts stop changing."""
    current = a
    for iteration in range(1, config.MAX_ITERATIONS + 1):
        reduced = step(current)
        if _size(reduced) == _size(current):
            logger.debug(f"{label} reached its fixpoint after {iteration} passes")
            return reduced
        current = reduced
    logger.warning(
        f"{label} stopped after {config.MAX_ITERATIONS} iterations without a fixpoint"
    )
    return current


def heavy(
    a: TreeAutomaton, x: int = 1, y: int = 1, options=config.DEFAULT_OPTIONS
) -> TreeAutomaton:
    """
    Heavy(x,y): iterate Op(1,1) to its fixpoint, then Heavy(1,1)Op(x,y) to the
    joint fixpoint.

    Args:
        a: automaton to reduce
        x: downward lookahead
        y: upward lookahead
        options: simulation engine options

    Returns:
        A language-equivalent automaton that one further pass leaves unchanged.
    """
    _check_lookahead(x=x, y=y)
    before = _size(a)

    def heavy11(b: TreeAutomaton) -> TreeAutomaton:
        return _iterate(lambda c: op_xy(c, 1, 1, options), b, "Heavy(1,1)")

    if (x, y) == (1, 1):
        result = heavy11(a)
    else:
        result = _iterate(
            lambda c: op_xy(heavy11(c), x, y, options), a, f"Heavy({x},{y})"
        )
    logger.info(f"Heavy({x},{y}): {before} -> {_size(result)} (states, transitions)")
    return result
