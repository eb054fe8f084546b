"""
Brute-force ground truth for small automata.

Everything here favours obviously-correct code over speed: tree membership by
memoized recursion, exhaustive tree enumeration, bounded language comparison
and a lookahead simulation solver that enumerates complete attacks and searches
defences without any caching.
"""

from __future__ import annotations

import itertools
from typing import Iterator

import numpy as np

from automata.core import RankedAlphabet, Transition, Tree, TreeAutomaton, realign
from automata.relation import Relation
from utils.errors import invalid_input

Run = dict[tuple[int, ...], int]


# ==================== Membership ====================


def reading_states(
    a: TreeAutomaton, t: Tree, memo: dict | None = None
) -> frozenset[int]:
    """States from which `t` can be read."""
    memo = {} if memo is None else memo
    cached = memo.get(t)
    if cached is not None:
        return cached
    symbol = a.alphabet.index(t.symbol)
    rank = a.alphabet[symbol].rank
    if len(t.children) != rank:
        raise invalid_input(
            f"Symbol '{t.symbol}' has rank {rank} "
            f"but {len(t.children)} children in tree {t}"
        )
    children = [reading_states(a, child, memo) for child in t.children]
    readers = frozenset(
        tr.source
        for tr in a.by_symbol.get(symbol, ())
        if all(target in children[i] for i, target in enumerate(tr.targets))
    )
    memo[t] = readers
    return readers


def accepts(a: TreeAutomaton, t: Tree) -> bool:
    return bool(reading_states(a, t) & a.initial)


def accepting_run(a: TreeAutomaton, t: Tree) -> Run | None:
    """
    An accepting run as a map from node paths to states, or None.

    The root has path (); the i-th child of node w has path w + (i,).
    """
    memo: dict = {}
    roots = sorted(reading_states(a, t, memo) & a.initial)
    if not roots:
        return None
    run: Run = {}

    def assign(node: Tree, path: tuple[int, ...], state: int) -> None:
        run[path] = state
        symbol = a.alphabet.index(node.symbol)
        readers = [reading_states(a, child, memo) for child in node.children]
        for tr in a.transitions_from(state, symbol):
            if all(target in readers[i] for i, target in enumerate(tr.targets)):
                for i, (child, target) in enumerate(zip(node.children, tr.targets)):
                    assign(child, path + (i,), target)
                return
        raise AssertionError(
            f"state {state} was marked as reading {node} without a transition"
        )

    assign(t, (), roots[0])
    return run


def verify_run(a: TreeAutomaton, t: Tree, run: Run) -> bool:
    """Re-check a run transition by transition."""
    if run.get(()) not in a.initial:
        return False
    transitions = set(a.transitions)

    def check(node: Tree, path: tuple[int, ...]) -> bool:
        if path not in run or node.symbol not in a.alphabet:
            return False
        targets = []
        for i in range(len(node.children)):
            child_path = path + (i,)
            if child_path not in run:
                return False
            targets.append(run[child_path])
        step = Transition(run[path], a.alphabet.index(node.symbol), tuple(targets))
        if step not in transitions:
            return False
        return all(check(child, path + (i,)) for i, child in enumerate(node.children))

    return check(t, ())


# ==================== Enumeration ====================


def iter_trees(alphabet: RankedAlphabet, d: int) -> Iterator[Tree]:
    """
    Yield every closed tree of depth <= d exactly once.

    Order: by depth, then by symbol index, then by the product order of the
    children over the previously enumerated trees.
    """
    upto: list[Tree] = []
    depth_of: dict[Tree, int] = {}
    for depth in range(1, d + 1):
        level: list[Tree] = []
        for symbol in alphabet:
            if symbol.rank == 0:
                if depth == 1:
                    level.append(Tree(symbol.name))
                continue
            for children in itertools.product(upto, repeat=symbol.rank):
                if max(depth_of[child] for child in children) == depth - 1:
                    level.append(Tree(symbol.name, children))
        for tree in level:
            depth_of[tree] = depth
            yield tree
        upto.extend(level)
        if not level:
            return


def enumerate_trees(alphabet: RankedAlphabet, d: int) -> list[Tree]:
    return list(iter_trees(alphabet, d))


def bounded_language(a: TreeAutomaton, d: int) -> set[Tree]:
    memo: dict = {}
    return {
        t for t in iter_trees(a.alphabet, d) if reading_states(a, t, memo) & a.initial
    }


def bounded_difference(a: TreeAutomaton, b: TreeAutomaton, d: int) -> Tree | None:
    """
    A tree of depth <= d accepted by exactly one of `a`, `b`, or None.

    Trees are grouped by the pair of reading-state sets they induce; one
    representative per pair is enough, so the search never enumerates more
    than the distinct pairs reachable within depth d.
    """
    b = realign(b, a.alphabet)
    initial_a = sum(1 << q for q in a.initial)
    initial_b = sum(1 << q for q in b.initial)

    def readers(automaton: TreeAutomaton, symbol: int, children) -> int:
        mask = 0
        for t in automaton.by_symbol.get(symbol, ()):
            if all((children[i] >> r) & 1 for i, r in enumerate(t.targets)):
                mask |= 1 << t.source
        return mask

    seen: dict[tuple[int, int], Tree] = {}
    for depth in range(1, d + 1):
        known = list(seen.items())
        found: list[tuple[tuple[int, int], Tree]] = []
        for symbol, sym in enumerate(a.alphabet):
            if sym.rank == 0 and depth > 1:
                continue
            for combo in itertools.product(known, repeat=sym.rank):
                key = (
                    readers(a, symbol, [k[0] for k, _ in combo]),
                    readers(b, symbol, [k[1] for k, _ in combo]),
                )
                if key in seen:
                    continue
                tree = Tree(sym.name, tuple(tree for _, tree in combo))
                seen[key] = tree
                found.append((key, tree))
        for (mask_a, mask_b), tree in found:
            if bool(mask_a & initial_a) != bool(mask_b & initial_b):
                return tree
        if not found:
            break
    return None


def bounded_equiv(a: TreeAutomaton, b: TreeAutomaton, d: int) -> bool:
    """Same accepted trees up to depth d."""
    return bounded_difference(a, b, d) is None


# ==================== Pairwise pruning ====================


def lifted(
    r: Relation, left: tuple[int, ...], right: tuple[int, ...], strict: bool
) -> bool:
    """
    Tuple lifting of a preorder.

    Non-strict: pointwise related. Strict: pointwise related and at least one
    position related by the strict part.
    """
    if len(left) != len(right):
        return False
    if not all(r[x, y] for x, y in zip(left, right)):
        return False
    if not strict:
        return True
    return any(r[x, y] and not r[y, x] for x, y in zip(left, right))


def naive_dominated(
    a: TreeAutomaton,
    source: Relation,
    target: Relation,
    source_strict: bool,
    target_strict: bool,
) -> set[Transition]:
    """Transitions with a larger same-symbol transition, scanning every pair."""
    removed = set()
    for t in a.transitions:
        for u in a.transitions:
            if t.symbol != u.symbol:
                continue
            if not lifted(source, (t.source,), (u.source,), source_strict):
                continue
            if lifted(target, t.targets, u.targets, target_strict):
                removed.add(t)
                break
    return removed


# ==================== Naive lookahead simulation ====================


def _dw_moves(a: TreeAutomaton, state: int):
    return [(t, t.targets) for t in a.transitions if t.source == state]


def _up_moves(a: TreeAutomaton, state: int):
    return [
        ((t, i), (t.source,))
        for t in a.transitions
        for i, target in enumerate(t.targets)
        if target == state
    ]


def _full_attacks(moves, state: int, depth: int) -> list:
    """Attacks from `state` expanded `depth` levels; stuck or cut states stay leaves."""
    options = moves(state)
    if depth == 0 or not options:
        return [state]
    attacks = []
    for move, successors in options:
        below = [_full_attacks(moves, s, depth - 1) for s in successors]
        for children in itertools.product(*below):
            attacks.append((state, move, children))
    return attacks


def _truncate(attack, depth: int):
    if isinstance(attack, int):
        return attack
    state, move, children = attack
    if depth == 0:
        return state
    return (state, move, tuple(_truncate(child, depth - 1) for child in children))


def _naive_fixpoint(
    a: TreeAutomaton, k: int, moves, answers, w: np.ndarray
) -> Relation:
    n = a.state_count
    if k < 1:
        raise invalid_input(f"Lookahead must be at least 1, got {k}")
    maximal = {
        p: [x for x in _full_attacks(moves, p, k) if not isinstance(x, int)]
        for p in range(n)
    }

    def defended(attack, q: int, current: np.ndarray) -> bool:
        if isinstance(attack, int):
            return bool(current[attack, q])
        _, move, children = attack
        return any(
            all(defended(child, s, current) for child, s in zip(children, successors))
            for successors in answers(q, move)
        )

    while True:
        current = w.copy()
        for p in range(n):
            for q in range(n):
                if p == q or not current[p, q]:
                    continue
                for attack in maximal[p]:
                    prefixes = (_truncate(attack, m) for m in range(1, k + 1))
                    if not any(defended(prefix, q, current) for prefix in prefixes):
                        w[p, q] = False
                        break
        if np.array_equal(w, current):
            break
    closure = [[bool(w[p, q]) for q in range(n)] for p in range(n)]
    for m in range(n):
        for p in range(n):
            for q in range(n):
                if closure[p][m] and closure[m][q]:
                    closure[p][q] = True
    return Relation(closure) if n else Relation(np.zeros((0, 0), dtype=bool))


def naive_lookahead_dw_sim(a: TreeAutomaton, k: int) -> Relation:
    """Downward k-lookahead simulation by exhaustive attack enumeration."""

    def answers(q: int, move: Transition):
        return [
            u.targets
            for u in a.transitions
            if u.source == q and u.symbol == move.symbol
        ]

    w = np.ones((a.state_count, a.state_count), dtype=bool)
    return _naive_fixpoint(a, k, lambda s: _dw_moves(a, s), answers, w)


def naive_lookahead_up_sim(a: TreeAutomaton, k: int, r: Relation) -> Relation:
    """Upward k-lookahead simulation w.r.t. `r` by exhaustive attack enumeration."""
    n = a.state_count
    if r.size != n:
        raise invalid_input(
            f"Relation of dimension {r.size} for an automaton with {n} states"
        )

    def answers(q: int, move: tuple[Transition, int]):
        t, i = move
        found = []
        for u in a.transitions:
            if u.symbol != t.symbol or u.targets[i] != q:
                continue
            if t.source in a.initial and u.source not in a.initial:
                continue
            sides = (j for j in range(len(t.targets)) if j != i)
            if all(r[t.targets[j], u.targets[j]] for j in sides):
                found.append((u.source,))
        return found

    w = np.ones((n, n), dtype=bool)
    for p in a.initial:
        for q in range(n):
            if q not in a.initial:
                w[p, q] = False
    return _naive_fixpoint(a, k, lambda s: _up_moves(a, s), answers, w)
