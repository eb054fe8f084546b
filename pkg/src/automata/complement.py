"""
Complementation, intersection, emptiness and language equivalence.

Complement goes through the classical bottom-up subset construction: a macro
state is the set of states that can read some closed tree, kept as a bitmask.
Only macro states reachable from the leaf rules are built.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

import numpy as np

import config
from automata.core import Transition, TreeAutomaton, productive_states, realign
from automata.relation import Relation
from config import logger
from utils.errors import BudgetExceededError


@dataclass(frozen=True)
class Determinization:
    """Reachable macro states and their moves; the empty sink only if reached."""

    macros: tuple[int, ...]
    moves: dict[tuple[int, tuple[int, ...]], int]


def _mask(states) -> int:
    mask = 0
    for q in states:
        mask |= 1 << q
    return mask


def subset_construction(a: TreeAutomaton, budget: int | None = None) -> Determinization:
    """
    Bottom-up determinization of `a`, complete over its alphabet.

    Raises:
        BudgetExceededError: when more than `budget` macro states are needed.
    """
    budget = config.MACRO_STATE_BUDGET if budget is None else budget
    rules: dict[int, list[tuple[int, tuple[int, ...]]]] = {
        symbol: [(t.source, t.targets) for t in group]
        for symbol, group in a.by_symbol.items()
    }
    macros: list[int] = []
    index: dict[int, int] = {}
    moves: dict[tuple[int, tuple[int, ...]], int] = {}

    def intern(mask: int) -> int:
        if mask not in index:
            if len(macros) >= budget:
                raise BudgetExceededError(
                    f"determinization needs more than {budget} macro states", budget
                )
            index[mask] = len(macros)
            macros.append(mask)
        return index[mask]

    for symbol, sym in enumerate(a.alphabet):
        if sym.rank == 0:
            sources = (source for source, _ in rules.get(symbol, ()))
            moves[(symbol, ())] = intern(_mask(sources))

    done = 0
    while done < len(macros):
        frontier_start, done = done, len(macros)
        for symbol, sym in enumerate(a.alphabet):
            if sym.rank == 0:
                continue
            group = rules.get(symbol, ())
            for combo in itertools.product(range(done), repeat=sym.rank):
                if max(combo) < frontier_start:
                    continue
                children = [macros[i] for i in combo]
                mask = 0
                for source, targets in group:
                    if all((children[i] >> r) & 1 for i, r in enumerate(targets)):
                        mask |= 1 << source
                moves[(symbol, combo)] = intern(mask)
    logger.debug(
        f"subset construction: {a.state_count} states -> {len(macros)} macro states"
    )
    return Determinization(tuple(macros), moves)


def _as_automaton(
    a: TreeAutomaton, det: Determinization, accept_intersecting: bool
) -> TreeAutomaton:
    initial_mask = _mask(a.initial)
    transitions = [
        Transition(target, symbol, combo)
        for (symbol, combo), target in det.moves.items()
    ]
    initial = [
        i
        for i, macro in enumerate(det.macros)
        if bool(macro & initial_mask) == accept_intersecting
    ]
    names = tuple(f"m{i}" for i in range(len(det.macros)))
    return TreeAutomaton(
        a.alphabet, len(det.macros), frozenset(initial), tuple(transitions), names
    )


def determinize_complete(a: TreeAutomaton) -> TreeAutomaton:
    """Deterministic complete automaton for `a`; its initial states meet I(a)."""
    return _as_automaton(a, subset_construction(a), accept_intersecting=True)


def complement(a: TreeAutomaton) -> TreeAutomaton:
    """Automaton accepting exactly the closed trees that `a` rejects."""
    return _as_automaton(a, subset_construction(a), accept_intersecting=False)


def intersect(a: TreeAutomaton, b: TreeAutomaton) -> TreeAutomaton:
    """Product automaton over the pairs reachable top-down from I(a) x I(b)."""
    b = realign(b, a.alphabet)
    index: dict[tuple[int, int], int] = {}
    queue: deque[tuple[int, int]] = deque()

    def pair(p: int, q: int) -> int:
        key = (p, q)
        if key not in index:
            index[key] = len(index)
            queue.append(key)
        return index[key]

    initial = [pair(p, q) for p in sorted(a.initial) for q in sorted(b.initial)]
    transitions = []
    while queue:
        p, q = queue.popleft()
        source = index[(p, q)]
        for t in a.by_source[p]:
            for u in b.transitions_from(q, t.symbol):
                targets = tuple(pair(r, s) for r, s in zip(t.targets, u.targets))
                transitions.append(Transition(source, t.symbol, targets))
    names = tuple(f"{a.name_of(p)}_{b.name_of(q)}" for p, q in index)
    return TreeAutomaton(
        a.alphabet, len(index), frozenset(initial), tuple(transitions), names
    )


def union(a: TreeAutomaton, b: TreeAutomaton) -> TreeAutomaton:
    """Disjoint union; the states of `b` follow those of `a`."""
    b = realign(b, a.alphabet)
    shift = a.state_count
    transitions = list(a.transitions) + [
        Transition(t.source + shift, t.symbol, tuple(r + shift for r in t.targets))
        for t in b.transitions
    ]
    names = tuple(a.name_of(q) for q in range(a.state_count)) + tuple(
        f"{b.name_of(q)}'" for q in range(b.state_count)
    )
    initial = set(a.initial) | {q + shift for q in b.initial}
    return TreeAutomaton(
        a.alphabet,
        shift + b.state_count,
        frozenset(initial),
        tuple(transitions),
        names,
    )


def is_empty(a: TreeAutomaton) -> bool:
    return not (productive_states(a) & a.initial)


def is_universal(a: TreeAutomaton) -> bool:
    """Whether `a` accepts every closed tree over its alphabet."""
    return is_empty(complement(a))


def is_included(a: TreeAutomaton, b: TreeAutomaton) -> bool:
    """L(a) included in L(b); raises BudgetExceededError when inconclusive."""
    return is_empty(intersect(a, complement(realign(b, a.alphabet))))


def equivalent(a: TreeAutomaton, b: TreeAutomaton) -> bool:
    """
    Exact language equality.

    Raises:
        BudgetExceededError: if either complement exceeds the macro state budget.
            This is an inconclusive outcome, never reported as False.
    """
    return is_included(a, b) and is_included(b, a)


def downward_language_inclusion(a: TreeAutomaton) -> Relation:
    """
    Exact inclusion between the closed-tree languages of single states.

    [p][q] holds iff every tree readable from p is readable from q, i.e. every
    reachable macro state containing p also contains q.
    """
    det = subset_construction(a)
    n = a.state_count
    matrix = np.ones((n, n), dtype=bool)
    for macro in det.macros:
        inside = np.array([(macro >> q) & 1 for q in range(n)], dtype=bool)
        matrix &= ~np.outer(inside, ~inside)
    return Relation(matrix)
