"""Random tree automata: the Tabakov-Vardi model and a generic uniform sampler."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from automata.core import RankedAlphabet, Transition, TreeAutomaton
from config import logger
from utils.errors import invalid_input


@dataclass(frozen=True)
class TvParams:
    """
    Tabakov-Vardi parameters.

    Attributes:
        n: number of states
        s: number of rank-2 symbols
        td: transition density, round(n * td) transitions per rank-2 symbol
        ad: acceptance density, round(n * ad) leaf rules per leaf symbol
        seed: generator seed
        initial: "all", "one" or "density=f"
        leaf_symbols: number of rank-0 symbols
    """

    n: int
    s: int = 2
    td: float = 1.0
    ad: float = 0.5
    seed: int = 0
    initial: str = "all"
    leaf_symbols: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise invalid_input(f"n must be at least 1, got {self.n}")
        if self.s < 0 or self.leaf_symbols < 1:
            raise invalid_input(
                "Need s >= 0 binary symbols and at least one leaf symbol"
            )
        if self.td < 0:
            raise invalid_input(
                f"Transition density must be non-negative, got {self.td}"
            )
        if not 0 <= self.ad <= 1:
            raise invalid_input(f"Acceptance density must lie in [0, 1], got {self.ad}")
        parse_initial(self.initial)


def round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def derive_seed(seed: int, index: int) -> int:
    """Independent seed for the index-th member of a batch."""
    state = np.random.SeedSequence([seed, index]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def parse_initial(rule: str) -> float | str:
    if rule in ("all", "one"):
        return rule
    if rule.startswith("density="):
        try:
            density = float(rule.split("=", 1)[1])
        except ValueError:
            density = -1.0
        if 0 <= density <= 1:
            return density
    raise invalid_input(
        f"Initial-set rule must be all, one or density=f in [0,1], got '{rule}'"
    )


def _initial_states(rule: str, n: int, rng: np.random.Generator) -> frozenset[int]:
    parsed = parse_initial(rule)
    if parsed == "all":
        return frozenset(range(n))
    if parsed == "one":
        return frozenset({int(rng.integers(n))})
    count = min(round_half_up(n * parsed), n)
    return frozenset(int(q) for q in rng.choice(n, count, replace=False))


def _draw(
    rng: np.random.Generator, n: int, arity: int, wanted: int, what: str
) -> list[tuple[int, ...]]:
    """`wanted` distinct (source, targets...) tuples, uniformly without replacement."""
    pool = n ** (arity + 1)
    if wanted > pool:
        logger.warning(
            f"{what}: {wanted} requested but only {pool} distinct exist, clamping"
        )
        wanted = pool
    drawn = []
    for code in rng.choice(pool, wanted, replace=False):
        code = int(code)
        digits = []
        for _ in range(arity + 1):
            code, digit = divmod(code, n)
            digits.append(digit)
        drawn.append(tuple(reversed(digits)))
    return drawn


def tv_alphabet(s: int, leaf_symbols: int = 1) -> RankedAlphabet:
    """Leaf symbols c0, c1, ... followed by binary symbols a0, a1, ..."""
    return RankedAlphabet.from_pairs(
        [(f"c{i}", 0) for i in range(leaf_symbols)] + [(f"a{i}", 2) for i in range(s)]
    )


def random_automaton(
    alphabet: RankedAlphabet | Iterable[tuple[str, int]],
    n: int,
    density: float,
    leaf_density: float,
    seed: int,
    initial: str = "all",
) -> TreeAutomaton:
    """
    Uniform random automaton over any ranked alphabet.

    Every symbol of rank m > 0 gets round(n * density) distinct transitions
    drawn from Q^(m+1); every leaf symbol gets round(n * leaf_density) distinct
    leaf rules drawn from Q. Equal arguments give equal automata.
    """
    if not isinstance(alphabet, RankedAlphabet):
        alphabet = RankedAlphabet.from_pairs(alphabet)
    if n < 1:
        raise invalid_input(f"n must be at least 1, got {n}")
    rng = np.random.default_rng(seed)
    transitions = []
    for index, symbol in enumerate(alphabet):
        density_for = leaf_density if symbol.rank == 0 else density
        wanted = round_half_up(n * density_for)
        drawn = _draw(rng, n, symbol.rank, wanted, f"symbol {symbol.name}")
        for source, *targets in drawn:
            transitions.append(Transition(source, index, tuple(targets)))
    names = tuple(f"q{i}" for i in range(n))
    initial_states = _initial_states(initial, n, rng)
    return TreeAutomaton(alphabet, n, initial_states, tuple(transitions), names)


def tabakov_vardi(p: TvParams) -> TreeAutomaton:
    """Random automaton with s binary symbols and p.leaf_symbols leaf symbols."""
    alphabet = tv_alphabet(p.s, p.leaf_symbols)
    return random_automaton(alphabet, p.n, p.td, p.ad, p.seed, p.initial)
