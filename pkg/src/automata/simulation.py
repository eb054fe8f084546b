"""
Downward and upward k-lookahead simulation preorders.

Both are computed by the same refinement game. W starts as the largest
candidate relation and only loses pairs. For every pair (p, q) still in W,
Spoiler grows attacks from p one level at a time (d = 1, 2, ..., k);
Duplicator tries to answer each prefix from q by the same labels, every
frontier pair of the answer being in W. A defended prefix defeats all of its
extensions. Spoiler wins (p, q) with a maximal attack, one of depth k or one
that cannot grow because none of its frontier states has a move, of which no
prefix is defended. The fixpoint is not transitive for k > 1; the preorder is
its transitive closure.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from typing import Any, Hashable, Iterator

import numpy as np

import config
from config import logger
from automata.core import Transition, TreeAutomaton
from automata.relation import Relation, transitive_closure
from utils.errors import invalid_input


class CacheMode(str, Enum):
    NONE = "none"
    LOCAL = "local"
    SEMIGLOBAL = "semiglobal"
    GLOBAL = "global"


class Direction(str, Enum):
    DOWNWARD = "downward"
    UPWARD = "upward"


# An attack node is (move, children); a child is either a frontier state (int)
# or a deeper node. Moves are Transitions downward and (Transition, position)
# pairs upward, so equal attacks are equal tuples and hash alike.
Attack = tuple[Any, tuple[Any, ...]]


class AttackCache:
    """
    Verdicts of (sub-attack, defender) games.

    A *good* attack is one Duplicator could not defend; it stays good while W
    shrinks. A *bad* attack was defended against the W of the moment and may
    turn good later, so bad verdicts never outlive a refinement round.
    """

    def __init__(self, mode: CacheMode, good: set | None = None):
        self.mode = CacheMode(mode)
        self.good: set[Hashable] = set(good or ())
        self.bad: set[Hashable] = set()
        self.hits = 0

    def lookup(self, key: Hashable) -> bool | None:
        """Cached "defended?" verdict, or None."""
        if self.mode is CacheMode.NONE:
            return None
        if key in self.good:
            self.hits += 1
            return False
        if key in self.bad:
            self.hits += 1
            return True
        return None

    def record(self, key: Hashable, defended: bool) -> None:
        if self.mode is CacheMode.NONE:
            return
        (self.bad if defended else self.good).add(key)

    def start_game(self) -> None:
        if self.mode is CacheMode.LOCAL:
            self.good.clear()
            self.bad.clear()

    def start_round(self) -> None:
        if self.mode in (CacheMode.LOCAL, CacheMode.SEMIGLOBAL):
            self.good.clear()
        self.bad.clear()


class GameSide(ABC):
    """Move structure of one simulation game over an automaton."""

    direction: Direction

    def __init__(self, automaton: TreeAutomaton):
        self.automaton = automaton
        self._responses: dict[tuple[int, Any], tuple[Any, ...]] = {}

    @abstractmethod
    def spoiler_moves(self, state: int) -> tuple[Any, ...]:
        """Moves available from `state`."""

    @abstractmethod
    def successors(self, move: Any) -> tuple[int, ...]:
        """States the game continues from after `move`."""

    @abstractmethod
    def _matching(self, state: int, move: Any) -> Iterator[Any]:
        """Duplicator moves from `state` answering `move`, side conditions included."""

    def responses(self, state: int, move: Any) -> tuple[Any, ...]:
        key = (state, move)
        cached = self._responses.get(key)
        if cached is None:
            cached = tuple(self._matching(state, move))
            self._responses[key] = cached
        return cached

    def initial_matrix(self) -> np.ndarray:
        n = self.automaton.state_count
        return np.ones((n, n), dtype=bool)


class DownwardSide(GameSide):
    direction = Direction.DOWNWARD

    def spoiler_moves(self, state: int) -> tuple[Transition, ...]:
        return self.automaton.by_source[state]

    def successors(self, move: Transition) -> tuple[int, ...]:
        return move.targets

    def _matching(self, state: int, move: Transition) -> Iterator[Transition]:
        return iter(self.automaton.transitions_from(state, move.symbol))


class UpwardSide(GameSide):
    """
    Upward game relative to a relation R on side children.

    Spoiler leaves the pivot state through a transition in which it occurs at
    some position; Duplicator answers with the same symbol and position, side
    children related by R, and "source in I implies answer source in I".
    """

    direction = Direction.UPWARD

    def __init__(self, automaton: TreeAutomaton, side_relation: Relation):
        super().__init__(automaton)
        if side_relation.size != automaton.state_count:
            raise invalid_input(
                f"Relation of dimension {side_relation.size} for an automaton "
                f"with {automaton.state_count} states"
            )
        self.side_relation = side_relation.matrix

    def spoiler_moves(self, state: int) -> tuple[tuple[Transition, int], ...]:
        return self.automaton.occurrences_of[state]

    def successors(self, move: tuple[Transition, int]) -> tuple[int, ...]:
        return (move[0].source,)

    def _matching(
        self, state: int, move: tuple[Transition, int]
    ) -> Iterator[tuple[Transition, int]]:
        t, position = move
        initial = self.automaton.initial
        for u in self.automaton.occurrences.get((state, t.symbol, position), ()):
            if t.source in initial and u.source not in initial:
                continue
            if all(
                self.side_relation[t.targets[j], u.targets[j]]
                for j in range(len(t.targets))
                if j != position
            ):
                yield (u, position)

    def initial_matrix(self) -> np.ndarray:
        n = self.automaton.state_count
        is_initial = np.zeros(n, dtype=bool)
        is_initial[list(self.automaton.initial)] = True
        return ~np.outer(is_initial, ~is_initial)


class LookaheadGame:
    """Refinement of W for one game side and lookahead k."""

    def __init__(
        self,
        side: GameSide,
        k: int,
        cache: CacheMode | str = CacheMode.NONE,
        w: np.ndarray | None = None,
        good: set | None = None,
    ):
        self.side = side
        self.k = k
        self.w = side.initial_matrix() if w is None else w
        self.cache = AttackCache(CacheMode(cache), good)
        self.rounds = 0
        self.games = 0

    def spoiler_wins(self, p: int, q: int) -> bool:
        """Whether Spoiler refutes the pair (p, q) against the current W."""
        self.games += 1
        self.cache.start_game()
        for move in self.side.spoiler_moves(p):
            if self._attack_wins(self._node(move), 1, q):
                return True
        return False

    def _node(self, move: Any) -> Attack:
        return (move, tuple(self.side.successors(move)))

    def _attack_wins(self, attack: Attack, depth: int, q: int) -> bool:
        if self._defends(attack, q):
            return False
        if depth >= self.k:
            return True
        options, grown = self._extensions(attack)
        if not grown:
            return True
        return any(self._attack_wins(extended, depth + 1, q) for extended in options)

    def _extensions(self, node: Any) -> tuple[list[Any], bool]:
        """All one-level extensions of a (sub-)attack and whether any frontier grew."""
        if isinstance(node, int):
            moves = self.side.spoiler_moves(node)
            if not moves:
                return [node], False
            return [self._node(move) for move in moves], True
        move, children = node
        grown = False
        per_child = []
        for child in children:
            options, child_grown = self._extensions(child)
            grown = grown or child_grown
            per_child.append(options)
        if not grown:
            return [node], False
        return [(move, combo) for combo in itertools.product(*per_child)], True

    def _defends(self, node: Any, q: int) -> bool:
        if isinstance(node, int):
            return bool(self.w[node, q])
        key = (node, q)
        verdict = self.cache.lookup(key)
        if verdict is not None:
            return verdict
        move, children = node
        defended = False
        for response in self.side.responses(q, move):
            if all(
                self._defends(child, target)
                for child, target in zip(children, self.side.successors(response))
            ):
                defended = True
                break
        self.cache.record(key, defended)
        return defended

    def refine_rows(self, rows, snapshot: bool) -> list[tuple[int, int]]:
        """
        Play one round over the pairs (p, q) with p in `rows`.

        With `snapshot` the matrix is left untouched and the flips are returned;
        otherwise each flip is applied immediately.
        """
        flips = []
        n = self.w.shape[0]
        for p in rows:
            if not self.side.spoiler_moves(p):
                continue
            for q in range(n):
                if p == q or not self.w[p, q]:
                    continue
                if self.spoiler_wins(p, q):
                    flips.append((p, q))
                    if not snapshot:
                        self.w[p, q] = False
        return flips

    def solve(self) -> np.ndarray:
        """Refine W in place until a round changes nothing."""
        n = self.w.shape[0]
        while True:
            self.rounds += 1
            self.cache.start_round()
            flips = self.refine_rows(range(n), snapshot=False)
            logger.debug(
                f"{self.side.direction.value} k={self.k} round {self.rounds}: "
                f"{len(flips)} pairs removed"
            )
            if not flips:
                return self.w


def _refine_chunk(payload) -> tuple[list[tuple[int, int]], set]:
    side, k, cache, w, rows, good = payload
    game = LookaheadGame(side, k, cache, w, good)
    game.cache.start_round()
    flips = game.refine_rows(rows, snapshot=True)
    return flips, game.cache.good


def _solve_parallel(
    side: GameSide, k: int, cache: CacheMode, w: np.ndarray, jobs: int
) -> np.ndarray:
    """Jacobi-style rounds: every pair is judged against the same W snapshot."""
    n = w.shape[0]
    chunks = [list(range(start, n, jobs)) for start in range(jobs)]
    good: set = set()
    rounds = 0
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        while True:
            rounds += 1
            keep_good = good if cache is CacheMode.GLOBAL else set()
            payloads = [(side, k, cache, w, rows, keep_good) for rows in chunks if rows]
            flips: list[tuple[int, int]] = []
            for chunk_flips, chunk_good in pool.map(_refine_chunk, payloads):
                flips.extend(chunk_flips)
                if cache is CacheMode.GLOBAL:
                    good |= chunk_good
            logger.debug(
                f"{side.direction.value} k={k} parallel round {rounds}: "
                f"{len(flips)} flips"
            )
            if not flips:
                return w
            w = w.copy()
            for p, q in flips:
                w[p, q] = False


def _solve(
    side: GameSide, k: int, cache: CacheMode | str, w: np.ndarray, jobs: int
) -> np.ndarray:
    if k < 1:
        raise invalid_input(f"Lookahead must be at least 1, got {k}")
    cache = CacheMode(cache)
    if jobs > 1 and side.automaton.state_count > 1:
        return _solve_parallel(side, k, cache, w, jobs)
    game = LookaheadGame(side, k, cache, w)
    result = game.solve()
    logger.debug(
        f"{side.direction.value} k={k}: {game.rounds} rounds, {game.games} games, "
        f"{game.cache.hits} cache hits"
    )
    return result


def pre_refine(a: TreeAutomaton, d: int) -> Relation:
    """
    Remove pairs (p, q) witnessed by a tree of depth <= d readable from p but not q.

    Trees may be truncated: a hole stands for any subtree. Each tree is
    represented by the bitmask of states that can read it, so the exploration
    runs over distinct masks rather than over trees.

    Returns:
        A relation containing every k-lookahead downward simulation.
    """
    if d < 1:
        raise invalid_input(f"Pre-refinement depth must be at least 1, got {d}")
    n = a.state_count
    hole = (1 << n) - 1
    types = {hole}
    for level in range(d):
        if len(types) > config.PREREFINE_TYPE_BUDGET:
            logger.warning(
                f"pre-refinement stopped at depth {level}: {len(types)} tree types "
                f"exceed budget {config.PREREFINE_TYPE_BUDGET}"
            )
            break
        known = sorted(types)
        grown = set(types)
        for symbol_index, symbol in enumerate(a.alphabet):
            transitions = a.by_symbol.get(symbol_index, ())
            for combo in itertools.product(known, repeat=symbol.rank):
                mask = 0
                for t in transitions:
                    children = enumerate(t.targets)
                    if all((combo[i] >> target) & 1 for i, target in children):
                        mask |= 1 << t.source
                grown.add(mask)
        types = grown
    readers = np.array(
        [[(mask >> state) & 1 for state in range(n)] for mask in sorted(types)],
        dtype=np.int64,
    ).reshape(len(types), n)
    witnessed = (readers.T @ (1 - readers)) > 0
    return Relation(~witnessed)


def lookahead_dw_sim(
    a: TreeAutomaton,
    k: int = 1,
    cache: CacheMode | str = CacheMode.SEMIGLOBAL,
    prerefine_d: int | None = None,
    jobs: int = 1,
) -> Relation:
    """
    Maximal downward k-lookahead simulation preorder.

    Args:
        a: automaton
        k: lookahead (>= 1)
        cache: attack caching mode; every mode yields the same relation
        prerefine_d: optional depth of the bounded-tree pre-refinement
        jobs: worker processes for the snapshot schedule (1 = sequential)

    Returns:
        The transitive closure of the refinement fixpoint.
    """
    side = DownwardSide(a)
    w = side.initial_matrix()
    if prerefine_d:
        w &= pre_refine(a, prerefine_d).matrix
    return transitive_closure(Relation(_solve(side, k, cache, w, jobs)))


def lookahead_up_sim(
    a: TreeAutomaton,
    k: int,
    r: Relation,
    cache: CacheMode | str = CacheMode.SEMIGLOBAL,
    jobs: int = 1,
) -> Relation:
    """Maximal upward k-lookahead simulation preorder relative to `r`."""
    side = UpwardSide(a, r)
    w = _solve(side, k, cache, side.initial_matrix(), jobs)
    return transitive_closure(Relation(w))


def dw_sim(
    a: TreeAutomaton,
    k: int,
    options: config.SimulationOptions = config.DEFAULT_OPTIONS,
) -> Relation:
    """Downward lookahead simulation with engine options taken from `options`."""
    depth = options.prerefine_depth or None
    return lookahead_dw_sim(a, k, options.cache, depth, options.jobs)


def up_sim(
    a: TreeAutomaton,
    k: int,
    r: Relation | None = None,
    options: config.SimulationOptions = config.DEFAULT_OPTIONS,
) -> Relation:
    """Upward lookahead simulation relative to `r` (identity when omitted)."""
    r = Relation.identity(a.state_count) if r is None else r
    return lookahead_up_sim(a, k, r, options.cache, options.jobs)


def ordinary_dw_sim(a: TreeAutomaton) -> Relation:
    return lookahead_dw_sim(a, 1, CacheMode.NONE)
