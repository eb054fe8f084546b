"""
Transition saturation, the GFS table and the Sat1/Sat2 reduction pipelines.

A saturation S(Rs, Rt) adds <p, sigma, r1..rn> whenever some existing
<p', sigma, r1'..rn'> has p Rs p' and ri Rt ri' for every i. Relations are
passed already oriented: "larger" variants are inverse matrices of the
computed preorders.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

import numpy as np

import config
from automata.complement import downward_language_inclusion
from automata.core import (
    RankedAlphabet,
    Transition,
    Tree,
    TreeAutomaton,
    remove_useless,
    stats,
)
from automata.generator import derive_seed, random_automaton
from automata.oracle import bounded_difference
from automata.reduce import (
    heavy,
    prune_up,
    prune_up_dw,
    prune_up_relative,
    quotient_up,
)
from automata.relation import Relation
from automata.simulation import dw_sim, up_sim
from config import logger
from utils.errors import BudgetExceededError, invalid_input


@dataclass(frozen=True)
class SaturationSpec:
    source_relation: Relation
    target_relation: Relation

    def __post_init__(self):
        sides = (("source", self.source_relation), ("target", self.target_relation))
        for side, relation in sides:
            if not relation.is_reflexive():
                raise invalid_input(f"Saturation {side} relation must be reflexive")


def saturate(
    a: TreeAutomaton, spec: SaturationSpec, budget_factor: int | None = None
) -> TreeAutomaton:
    """
    Sat(A, S): add every candidate dominated through S by an existing transition.

    Args:
        a: automaton to saturate
        spec: oriented source and target relations
        budget_factor: at most budget_factor * |delta| transitions may be added

    Returns:
        The saturated automaton; states and initial states are unchanged.

    Raises:
        BudgetExceededError: if the added-transition budget is exceeded.
    """
    n = a.state_count
    for relation in (spec.source_relation, spec.target_relation):
        if relation.size != n:
            raise invalid_input(
                f"Relation of dimension {relation.size} "
                f"for an automaton with {n} states"
            )
    factor = config.SATURATION_BUDGET_FACTOR if budget_factor is None else budget_factor
    budget = factor * len(a.transitions)
    # below[x][y] holds the states z with z R y
    rs, rt = spec.source_relation.matrix, spec.target_relation.matrix
    sources_below = [np.nonzero(rs[:, q])[0].tolist() for q in range(n)]
    targets_below = [np.nonzero(rt[:, q])[0].tolist() for q in range(n)]
    existing = set(a.transitions)
    added: set[Transition] = set()
    for t in a.transitions:
        for targets in itertools.product(*(targets_below[r] for r in t.targets)):
            for source in sources_below[t.source]:
                candidate = Transition(source, t.symbol, targets)
                if candidate in existing or candidate in added:
                    continue
                added.add(candidate)
                if len(added) > budget:
                    raise BudgetExceededError(
                        f"saturation would add more than {budget} transitions", budget
                    )
    if not added:
        return a
    logger.debug(f"saturation added {len(added)} transitions to {len(a.transitions)}")
    return a.with_transitions(a.transitions + tuple(added))


# ==================== Relation kinds and the GFS table ====================


class RelationKind(str, Enum):
    ID = "id"
    DW_SIM = "dw-sim"
    DW_TRACE = "dw-trace"
    UP_SIM_ID = "up-sim(id)"
    UP_TRACE_ID = "up-trace(id)"
    UP_SIM_DW = "up-sim(dw-sim)"
    UP_TRACE_DW = "up-trace(dw-trace)"

    @property
    def downward(self) -> bool:
        return self in (RelationKind.DW_SIM, RelationKind.DW_TRACE)

    @property
    def upward(self) -> bool:
        return self.value.startswith("up-")


KIND_ORDER = tuple(RelationKind)

_GFS_ROWS = {
    RelationKind.ID: "YYYYYNN",
    RelationKind.DW_SIM: "YYYNNNN",
    RelationKind.DW_TRACE: "YYYNNNN",
    RelationKind.UP_SIM_ID: "YNNYYNN",
    RelationKind.UP_TRACE_ID: "YNNYYNN",
    RelationKind.UP_SIM_DW: "NNNNNNN",
    RelationKind.UP_TRACE_DW: "NNNNNNN",
}

# (source kind, target kind) -> whether S(Rs, Rt) is good for saturation
GFS_TABLE: dict[tuple[RelationKind, RelationKind], bool] = {
    (rs, rt): row[column] == "Y"
    for rs, row in _GFS_ROWS.items()
    for column, rt in enumerate(KIND_ORDER)
}


def _dw_trace(a: TreeAutomaton, options: config.SimulationOptions) -> Relation:
    if a.state_count <= config.EXACT_TRACE_MAX_STATES:
        return downward_language_inclusion(a)
    return dw_sim(a, config.TRACE_LOOKAHEAD, options)


def preorder_for_kind(
    a: TreeAutomaton,
    kind: RelationKind,
    x: int = 1,
    y: int = 1,
    options: config.SimulationOptions = config.DEFAULT_OPTIONS,
) -> Relation:
    """The preorder named by `kind` on the states of `a`, smaller to larger."""
    kind = RelationKind(kind)
    if kind is RelationKind.ID:
        return Relation.identity(a.state_count)
    if kind is RelationKind.DW_SIM:
        return dw_sim(a, x, options)
    if kind is RelationKind.DW_TRACE:
        return _dw_trace(a, options)
    if kind is RelationKind.UP_SIM_ID:
        return up_sim(a, y, None, options)
    if kind is RelationKind.UP_TRACE_ID:
        return up_sim(a, config.TRACE_LOOKAHEAD, None, options)
    if kind is RelationKind.UP_SIM_DW:
        return up_sim(a, y, dw_sim(a, x, options), options)
    return up_sim(a, config.TRACE_LOOKAHEAD, _dw_trace(a, options), options)


def relation_for_kind(
    a: TreeAutomaton,
    kind: RelationKind,
    side: str,
    x: int = 1,
    y: int = 1,
    options: config.SimulationOptions = config.DEFAULT_OPTIONS,
) -> Relation:
    """
    Relation of `kind` oriented for a saturation side.

    Downward kinds act as "larger" on the source side, upward kinds as
    "larger" on the target side; the other side uses the preorder as is.
    Only the named relation is flipped: the upward kinds relative to a
    downward relation are computed against dw-sim (or dw-trace) in its
    smaller-to-larger orientation, never against its inverse.
    """
    if side not in ("source", "target"):
        raise invalid_input(f"Side must be 'source' or 'target', got '{side}'")
    kind = RelationKind(kind)
    relation = preorder_for_kind(a, kind, x, y, options)
    if (side == "source" and kind.downward) or (side == "target" and kind.upward):
        return relation.inverse()
    return relation


def spec_for_kinds(
    a: TreeAutomaton,
    kind_rs: RelationKind,
    kind_rt: RelationKind,
    options: config.SimulationOptions = config.DEFAULT_OPTIONS,
) -> SaturationSpec:
    return SaturationSpec(
        relation_for_kind(a, kind_rs, "source", options=options),
        relation_for_kind(a, kind_rt, "target", options=options),
    )


class GfsStatus(str, Enum):
    NO_VIOLATION = "no-violation-found"
    COUNTEREXAMPLE = "counterexample"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class GfsVerdict:
    """Outcome of a GFS check; a counterexample comes with its witness tree."""

    status: GfsStatus
    automaton: TreeAutomaton | None = None
    saturated: TreeAutomaton | None = None
    witness: Tree | None = None
    checked: int = 0


def check_gfs_claim(
    kind_rs: RelationKind,
    kind_rt: RelationKind,
    sample: Iterable[TreeAutomaton],
    depth: int = 5,
    options: config.SimulationOptions = config.DEFAULT_OPTIONS,
    budget_factor: int | None = None,
) -> GfsVerdict:
    """
    Saturate every sample automaton with S(kind_rs, kind_rt) and look for a new tree.

    Returns:
        COUNTEREXAMPLE with the first language change found. Otherwise
        NO_VIOLATION for cells the table marks as GFS and INCONCLUSIVE for the
        others.
    """
    kind_rs, kind_rt = RelationKind(kind_rs), RelationKind(kind_rt)
    checked = 0
    for a in sample:
        try:
            spec = spec_for_kinds(a, kind_rs, kind_rt, options)
            saturated = saturate(a, spec, budget_factor)
        except BudgetExceededError as e:
            logger.warning(
                f"skipping sample for ({kind_rs.value}, {kind_rt.value}): {e}"
            )
            continue
        checked += 1
        witness = bounded_difference(a, saturated, depth)
        if witness is not None:
            return GfsVerdict(GfsStatus.COUNTEREXAMPLE, a, saturated, witness, checked)
    status = GfsStatus.INCONCLUSIVE
    if GFS_TABLE[(kind_rs, kind_rt)]:
        status = GfsStatus.NO_VIOLATION
    return GfsVerdict(status, checked=checked)


GFS_SEARCH_ALPHABET = (("b", 0), ("f", 1), ("a", 2))


def gfs_sample(count: int, seed: int, max_states: int = 6) -> Iterable[TreeAutomaton]:
    """Mixed-rank random automata with 2..max_states states and a few initial ones."""
    rng = np.random.default_rng(seed)
    for index in range(count):
        n = int(rng.integers(2, max_states + 1))
        density = float(rng.choice([0.5, 1.0, 1.5, 2.0]))
        leaf_density = float(rng.choice([0.25, 0.5]))
        initial = f"density={float(rng.choice([0.25, 0.5])):.2f}"
        yield random_automaton(
            GFS_SEARCH_ALPHABET,
            n,
            density,
            leaf_density,
            derive_seed(seed, index),
            initial,
        )


def gfs_shapes(
    children: int = 3, max_root_transitions: int = 3
) -> Iterator[TreeAutomaton]:
    """
    Every flat automaton over the binary and leaf symbols of GFS_SEARCH_ALPHABET.

    State 0 is the only initial state and has 1..max_root_transitions binary
    transitions into the states 1..children; those carry a nonempty set of
    leaf rules and nothing else. Children without leaf rules are empty, which
    is what separates the upward relations computed relative to dw-sim from
    the ones computed relative to the identity.
    """
    alphabet = RankedAlphabet.from_pairs(GFS_SEARCH_ALPHABET)
    binary = [i for i, symbol in enumerate(alphabet) if symbol.rank == 2]
    states = range(1, children + 1)
    pairs = [
        (symbol, targets)
        for symbol in binary
        for targets in itertools.product(states, repeat=2)
    ]
    leaf_rules = [(symbol, q) for symbol in alphabet.leaves() for q in states]
    names = tuple(f"q{i}" for i in range(children + 1))
    for size in range(1, max_root_transitions + 1):
        for root in itertools.combinations(pairs, size):
            top = tuple(Transition(0, symbol, targets) for symbol, targets in root)
            for count in range(1, len(leaf_rules) + 1):
                for chosen in itertools.combinations(leaf_rules, count):
                    leaves = tuple(Transition(q, symbol, ()) for symbol, q in chosen)
                    yield TreeAutomaton(
                        alphabet, children + 1, frozenset({0}), top + leaves, names
                    )


def search_gfs_counterexample(
    kind_rs: RelationKind,
    kind_rt: RelationKind,
    attempts: int = 1000,
    seed: int = 0,
    depth: int = 5,
    max_states: int = 6,
    options: config.SimulationOptions = config.DEFAULT_OPTIONS,
    shapes: bool = True,
) -> GfsVerdict:
    """
    Falsification of one table cell.

    With `shapes` the exhaustive flat automata of `gfs_shapes` are tried
    first, then `attempts` random mixed-rank automata.
    """
    sample = gfs_sample(attempts, seed, max_states)
    if shapes:
        sample = itertools.chain(gfs_shapes(), sample)
    verdict = check_gfs_claim(kind_rs, kind_rt, sample, depth, options)
    logger.info(
        f"GFS search ({RelationKind(kind_rs).value}, {RelationKind(kind_rt).value}): "
        f"{verdict.status.value} after {verdict.checked} automata"
    )
    return verdict


# ==================== Better-automaton ordering and Sat1/Sat2 ====================


class Ordering(str, Enum):
    BETTER = "better"
    WORSE = "worse"
    EQUAL = "equal"


def better_than(b: TreeAutomaton, a: TreeAutomaton) -> Ordering:
    """Fewer states wins; with equal states, fewer transitions wins."""
    sb, sa = stats(b), stats(a)
    key_b = (sb.state_count, sb.transition_count)
    key_a = (sa.state_count, sa.transition_count)
    if key_b == key_a:
        return Ordering.EQUAL
    return Ordering.BETTER if key_b < key_a else Ordering.WORSE


def saturate_dw(
    a: TreeAutomaton, x: int, options=config.DEFAULT_OPTIONS
) -> TreeAutomaton:
    """S(dw-x larger, dw-x)."""
    downward = dw_sim(a, x, options)
    return saturate(a, SaturationSpec(downward.inverse(), downward))


def saturate_up(
    a: TreeAutomaton, y: int, options=config.DEFAULT_OPTIONS
) -> TreeAutomaton:
    """S(up-y(id), up-y(id) larger)."""
    upward = up_sim(a, y, None, options)
    return saturate(a, SaturationSpec(upward, upward.inverse()))


def _best_seen(step, a: TreeAutomaton, label: str) -> TreeAutomaton:
    """
    Repeat `step` while every result is strictly better than the previous one.

    Returns:
        The last strictly improving automaton, which is the best one seen.
    """
    best = remove_useless(a)
    for iteration in range(1, config.MAX_ITERATIONS + 1):
        try:
            candidate = remove_useless(step(best))
        except BudgetExceededError as e:
            logger.warning(f"{label}: stopping at iteration {iteration}, {e}")
            return best
        if better_than(candidate, best) is not Ordering.BETTER:
            logger.debug(f"{label}: no improvement at iteration {iteration}")
            return best
        best = candidate
    logger.warning(f"{label} stopped after {config.MAX_ITERATIONS} iterations")
    return best


def sat1(
    a: TreeAutomaton, x: int = 1, y: int = 1, options=config.DEFAULT_OPTIONS
) -> TreeAutomaton:
    """Alternate saturations with upward reductions and Heavy(x,y); keep the best."""

    def step(b: TreeAutomaton) -> TreeAutomaton:
        b = saturate_dw(b, x, options)
        b = saturate_up(b, y, options)
        b = quotient_up(b, y, options)
        b = prune_up_dw(b, x, options)
        b = quotient_up(b, y, options)
        b = prune_up_relative(b, y, options)
        return heavy(b, x, y, options)

    result = _best_seen(step, a, "Sat1")
    logger.info(f"Sat1({x},{y}): {stats(a)[:2]} -> {stats(result)[:2]}")
    return result


def sat2(
    a: TreeAutomaton, x: int = 1, y: int = 1, options=config.DEFAULT_OPTIONS
) -> TreeAutomaton:
    """
    Downward saturation loop with upward reductions, then upward saturation and
    Heavy(x,y).

    Both loops stop as soon as an iteration fails to improve and return the
    best automaton they have seen.
    """

    def inner(b: TreeAutomaton) -> TreeAutomaton:
        b = saturate_dw(b, x, options)
        b = quotient_up(b, y, options)
        b = prune_up(b, y, options)
        b = prune_up_dw(b, x, options)
        b = quotient_up(b, y, options)
        return prune_up_relative(b, y, options)

    def outer(b: TreeAutomaton) -> TreeAutomaton:
        b = _best_seen(inner, b, "Sat2 inner loop")
        b = saturate_up(b, y, options)
        return heavy(b, x, y, options)

    result = _best_seen(outer, a, "Sat2")
    logger.info(f"Sat2({x},{y}): {stats(a)[:2]} -> {stats(result)[:2]}")
    return result
