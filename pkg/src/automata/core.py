"""
Tree automaton data model: ranked alphabets, transitions, top-down automata and trees.

Leaf rules <q, sigma, psi> are stored as rank-0 transitions with an empty target
tuple; the unique final pseudo-state psi is never a state of the automaton.
Automaton values are immutable, so the lookup tables built lazily from the
transition set always agree with it.
"""

from __future__ import annotations

import re
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from utils.errors import invalid_input


@dataclass(frozen=True)
class Symbol:
    name: str
    rank: int


@dataclass(frozen=True)
class RankedAlphabet:
    """Symbols with their ranks; a symbol is referenced by its index."""

    symbols: tuple[Symbol, ...] = ()

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, int]]) -> RankedAlphabet:
        return cls(tuple(Symbol(name, rank) for name, rank in pairs))

    @cached_property
    def _index_by_name(self) -> dict[str, int]:
        index: dict[str, int] = {}
        for i, symbol in enumerate(self.symbols):
            index.setdefault(symbol.name, i)
        return index

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __contains__(self, name: object) -> bool:
        return name in self._index_by_name

    def __getitem__(self, index: int) -> Symbol:
        return self.symbols[index]

    def index(self, name: str) -> int:
        """Index of the symbol called `name`."""
        try:
            return self._index_by_name[name]
        except KeyError:
            raise invalid_input(f"Unknown symbol '{name}'", symbol=name) from None

    def rank(self, name: str) -> int:
        return self.symbols[self.index(name)].rank

    def leaves(self) -> list[int]:
        """Indices of the rank-0 symbols."""
        return [i for i, symbol in enumerate(self.symbols) if symbol.rank == 0]

    def as_mapping(self) -> dict[str, int]:
        return {symbol.name: symbol.rank for symbol in self.symbols}

    def violations(self) -> list[str]:
        problems = []
        seen: set[str] = set()
        for symbol in self.symbols:
            if symbol.name in seen:
                problems.append(f"symbol '{symbol.name}' declared more than once")
            seen.add(symbol.name)
            if symbol.rank < 0:
                problems.append(
                    f"symbol '{symbol.name}' has negative rank {symbol.rank}"
                )
        return problems


@dataclass(frozen=True, order=True)
class Transition:
    """Top-down transition <source, symbol, targets>; symbol is an alphabet index."""

    source: int
    symbol: int
    targets: tuple[int, ...] = ()


class AutomatonStats(NamedTuple):
    state_count: int
    transition_count: int
    per_symbol: tuple[int, ...]
    initial_count: int


@dataclass(frozen=True)
class TreeAutomaton:
    """
    Top-down nondeterministic tree automaton (Sigma, Q, delta, I).

    States are the dense integers range(state_count). Transitions are kept
    sorted and duplicate-free, so two automata with the same states, initial set
    and transition set compare equal regardless of how they were built.
    """

    alphabet: RankedAlphabet
    state_count: int
    initial: frozenset[int] = frozenset()
    transitions: tuple[Transition, ...] = ()
    state_names: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "transitions", tuple(sorted(set(self.transitions))))
        if self.state_names is not None:
            object.__setattr__(self, "state_names", tuple(self.state_names))

    @classmethod
    def from_rules(
        cls,
        alphabet: Iterable[tuple[str, int]] | RankedAlphabet,
        rules: Iterable[tuple[str, str, Sequence[str]]],
        initial: Iterable[str] = (),
        states: Sequence[str] | None = None,
    ) -> TreeAutomaton:
        """
        Build an automaton from named rules `(source, symbol, targets)`.

        Args:
            alphabet: ranked alphabet or `(name, rank)` pairs
            rules: top-down rules; leaf rules have an empty target sequence
            initial: names of the initial states
            states: optional explicit state order; otherwise order of appearance

        Returns:
            The automaton, with `state_names` set to the given names.
        """
        if not isinstance(alphabet, RankedAlphabet):
            alphabet = RankedAlphabet.from_pairs(alphabet)
        rules = list(rules)
        initial = list(initial)
        names: list[str] = list(states) if states is not None else []
        index = {name: i for i, name in enumerate(names)}

        def state(name: str) -> int:
            if name not in index:
                if states is not None:
                    raise invalid_input(f"Undeclared state '{name}'", state=name)
                index[name] = len(names)
                names.append(name)
            return index[name]

        transitions = []
        for source, symbol, targets in rules:
            transitions.append(
                Transition(
                    state(source),
                    alphabet.index(symbol),
                    tuple(state(target) for target in targets),
                )
            )
        initial_ids = [state(name) for name in initial]
        return cls(
            alphabet,
            len(names),
            frozenset(initial_ids),
            tuple(transitions),
            tuple(names),
        )

    def name_of(self, state: int) -> str:
        if self.state_names is not None and state < len(self.state_names):
            return self.state_names[state]
        return f"q{state}"

    def with_initial(self, initial: Iterable[int]) -> TreeAutomaton:
        return TreeAutomaton(
            self.alphabet,
            self.state_count,
            frozenset(initial),
            self.transitions,
            self.state_names,
        )

    def with_transitions(self, transitions: Iterable[Transition]) -> TreeAutomaton:
        return TreeAutomaton(
            self.alphabet,
            self.state_count,
            self.initial,
            tuple(transitions),
            self.state_names,
        )

    @cached_property
    def by_source(self) -> tuple[tuple[Transition, ...], ...]:
        table: list[list[Transition]] = [[] for _ in range(self.state_count)]
        for t in self.transitions:
            if 0 <= t.source < self.state_count:
                table[t.source].append(t)
        return tuple(tuple(row) for row in table)

    @cached_property
    def by_source_symbol(self) -> dict[tuple[int, int], tuple[Transition, ...]]:
        table: dict[tuple[int, int], list[Transition]] = defaultdict(list)
        for t in self.transitions:
            table[(t.source, t.symbol)].append(t)
        return {key: tuple(value) for key, value in table.items()}

    @cached_property
    def by_symbol(self) -> dict[int, tuple[Transition, ...]]:
        table: dict[int, list[Transition]] = defaultdict(list)
        for t in self.transitions:
            table[t.symbol].append(t)
        return {key: tuple(value) for key, value in table.items()}

    @cached_property
    def occurrences(self) -> dict[tuple[int, int, int], tuple[Transition, ...]]:
        """Transitions indexed by (target state, symbol, position of that target)."""
        table: dict[tuple[int, int, int], list[Transition]] = defaultdict(list)
        for t in self.transitions:
            for position, target in enumerate(t.targets):
                table[(target, t.symbol, position)].append(t)
        return {key: tuple(value) for key, value in table.items()}

    @cached_property
    def occurrences_of(self) -> tuple[tuple[tuple[Transition, int], ...], ...]:
        """For every state, the (transition, position) pairs where it is a target."""
        table: list[list[tuple[Transition, int]]] = [
            [] for _ in range(self.state_count)
        ]
        for t in self.transitions:
            for position, target in enumerate(t.targets):
                if 0 <= target < self.state_count:
                    table[target].append((t, position))
        return tuple(tuple(row) for row in table)

    def transitions_from(self, state: int, symbol: int) -> tuple[Transition, ...]:
        return self.by_source_symbol.get((state, symbol), ())


@dataclass(frozen=True)
class Tree:
    """Finite closed tree: a symbol name and one subtree per argument."""

    symbol: str
    children: tuple[Tree, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))

    def __hash__(self) -> int:
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash((self.symbol, self.children))

    @cached_property
    def depth(self) -> int:
        """Number of nodes on the longest root-to-leaf path (a leaf has depth 1)."""
        return 1 + max((child.depth for child in self.children), default=0)

    def __str__(self) -> str:
        if not self.children:
            return self.symbol
        return f"{self.symbol}({','.join(str(child) for child in self.children)})"

    @classmethod
    def parse(cls, text: str) -> Tree:
        """Parse the bracket syntax produced by `str`, e.g. ``a(b,c(b))``."""
        tokens = re.findall(r"[^\s(),]+|[(),]", text)
        position = 0

        def node() -> Tree:
            nonlocal position
            if position >= len(tokens) or tokens[position] in "(),":
                raise invalid_input(f"Malformed tree '{text}'")
            symbol = tokens[position]
            position += 1
            children = []
            if position < len(tokens) and tokens[position] == "(":
                position += 1
                if position < len(tokens) and tokens[position] == ")":
                    position += 1
                    return cls(symbol)
                while True:
                    children.append(node())
                    if position < len(tokens) and tokens[position] == ",":
                        position += 1
                        continue
                    if position < len(tokens) and tokens[position] == ")":
                        position += 1
                        break
                    raise invalid_input(f"Malformed tree '{text}'")
            return cls(symbol, tuple(children))

        tree = node()
        if position != len(tokens):
            raise invalid_input(f"Trailing input in tree '{text}'")
        return tree


def validate(a: TreeAutomaton) -> list[str]:
    """
    Check the automaton invariants.

    Returns:
        One description per violation; empty when the automaton is well formed.
    """
    violations = list(a.alphabet.violations())
    n = a.state_count
    if n < 0:
        violations.append(f"negative state count {n}")
    for q in sorted(a.initial):
        if not 0 <= q < n:
            violations.append(f"initial state {q} out of range [0, {n})")
    for t in a.transitions:
        if not 0 <= t.symbol < len(a.alphabet):
            violations.append(f"transition {t}: unknown symbol index {t.symbol}")
            continue
        symbol = a.alphabet[t.symbol]
        if len(t.targets) != symbol.rank:
            violations.append(
                f"transition {t}: symbol '{symbol.name}' has rank {symbol.rank} "
                f"but {len(t.targets)} targets"
            )
        if not 0 <= t.source < n:
            violations.append(f"transition {t}: source {t.source} out of range")
        for target in t.targets:
            if not 0 <= target < n:
                violations.append(f"transition {t}: target {target} out of range")
    if a.state_names is not None and len(a.state_names) != n:
        violations.append(f"{len(a.state_names)} state names for {n} states")
    return violations


def stats(a: TreeAutomaton) -> AutomatonStats:
    per_symbol = [0] * len(a.alphabet)
    for t in a.transitions:
        per_symbol[t.symbol] += 1
    return AutomatonStats(
        a.state_count, len(a.transitions), tuple(per_symbol), len(a.initial)
    )


def productive_states(a: TreeAutomaton) -> set[int]:
    """States from which some closed tree can be read (backward saturation)."""
    pending = []
    watchers: dict[int, list[int]] = defaultdict(list)
    productive: set[int] = set()
    queue: deque[int] = deque()
    for i, t in enumerate(a.transitions):
        distinct = set(t.targets)
        pending.append(len(distinct))
        for target in distinct:
            watchers[target].append(i)
        if not distinct and t.source not in productive:
            productive.add(t.source)
            queue.append(t.source)
    while queue:
        state = queue.popleft()
        for i in watchers[state]:
            pending[i] -= 1
            source = a.transitions[i].source
            if pending[i] == 0 and source not in productive:
                productive.add(source)
                queue.append(source)
    return productive


def reachable_states(
    a: TreeAutomaton, transitions: Iterable[Transition] | None = None
) -> set[int]:
    """States reachable top-down from the initial states."""
    successors: dict[int, list[int]] = defaultdict(list)
    for t in a.transitions if transitions is None else transitions:
        successors[t.source].extend(t.targets)
    reached = set(a.initial)
    queue = deque(reached)
    while queue:
        state = queue.popleft()
        for target in successors[state]:
            if target not in reached:
                reached.add(target)
                queue.append(target)
    return reached


def restrict(
    a: TreeAutomaton, keep: Iterable[int]
) -> tuple[TreeAutomaton, dict[int, int]]:
    """
    Keep only the given states, re-indexed densely in their original order.

    Returns:
        The restricted automaton and the old -> new state map.
    """
    kept = sorted(set(keep))
    mapping = {old: new for new, old in enumerate(kept)}
    transitions = [
        Transition(mapping[t.source], t.symbol, tuple(mapping[r] for r in t.targets))
        for t in a.transitions
        if t.source in mapping and all(r in mapping for r in t.targets)
    ]
    names = None
    if a.state_names is not None:
        names = tuple(a.state_names[old] for old in kept)
    restricted = TreeAutomaton(
        a.alphabet,
        len(kept),
        frozenset(mapping[q] for q in a.initial if q in mapping),
        tuple(transitions),
        names,
    )
    return restricted, mapping


def realign(a: TreeAutomaton, alphabet: RankedAlphabet) -> TreeAutomaton:
    """
    Re-express `a` over `alphabet`, which must rank the same symbol names.

    Raises:
        AutomataError: if the two alphabets differ in names or ranks.
    """
    if a.alphabet == alphabet:
        return a
    if a.alphabet.as_mapping() != alphabet.as_mapping():
        raise invalid_input(
            "Automata are over different ranked alphabets",
            left=a.alphabet.as_mapping(),
            right=alphabet.as_mapping(),
        )
    renumber = [alphabet.index(symbol.name) for symbol in a.alphabet]
    transitions = tuple(
        Transition(t.source, renumber[t.symbol], t.targets) for t in a.transitions
    )
    return TreeAutomaton(alphabet, a.state_count, a.initial, transitions, a.state_names)


def remove_useless_with_map(a: TreeAutomaton) -> tuple[TreeAutomaton, dict[int, int]]:
    productive = productive_states(a)
    usable = [
        t
        for t in a.transitions
        if t.source in productive and all(r in productive for r in t.targets)
    ]
    useful = reachable_states(a.with_initial(a.initial & productive), usable)
    return restrict(a, useful)


def remove_useless(a: TreeAutomaton) -> TreeAutomaton:
    """Drop states that are unreachable from I or cannot read any closed tree."""
    return remove_useless_with_map(a)[0]
