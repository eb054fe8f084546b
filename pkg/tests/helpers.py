"""Hypothesis strategies and small reference algorithms shared by the tests."""

import os
import sys

import numpy as np
from hypothesis.strategies import booleans, composite, integers, lists, sampled_from

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from automata.generator import random_automaton  # noqa: E402
from automata.relation import Relation, transitive_closure  # noqa: E402

BINARY = (("b", 0), ("a", 2))
MIXED = (("b", 0), ("c", 0), ("f", 1), ("a", 2))


@composite
def small_automata(draw, max_states=4, alphabet=BINARY, densities=(0.5, 1.0, 1.5)):
    """Random automata small enough for exhaustive oracles."""
    n = draw(integers(1, max_states))
    density = draw(sampled_from(densities))
    leaf_density = draw(sampled_from([0.25, 0.5, 1.0]))
    seed = draw(integers(0, 2**32 - 1))
    initial = draw(sampled_from(["all", "one", "density=0.5"]))
    return random_automaton(alphabet, n, density, leaf_density, seed, initial)


@composite
def preorders(draw, max_size=5, size=None):
    """Reflexive-transitive closures of random relations, `size` x `size` if given."""
    n = draw(integers(1, max_size)) if size is None else size
    cells = draw(lists(booleans(), min_size=n * n, max_size=n * n))
    matrix = np.array(cells, dtype=bool).reshape(n, n) | np.eye(n, dtype=bool)
    return transitive_closure(Relation(matrix))


def classical_dw_sim(a):
    """Ordinary downward simulation by the textbook refinement loop."""
    n = a.state_count
    w = [[True] * n for _ in range(n)]
    changed = True
    while changed:
        changed = False
        for p in range(n):
            for q in range(n):
                if not w[p][q]:
                    continue
                for t in a.by_source[p]:
                    if not any(
                        all(w[r][s] for r, s in zip(t.targets, u.targets))
                        for u in a.transitions_from(q, t.symbol)
                    ):
                        w[p][q] = False
                        changed = True
                        break
    return Relation(np.array(w, dtype=bool).reshape(n, n))


def is_subset_language(a, b, trees):
    """Every listed tree accepted by `a` is accepted by `b`."""
    from automata.oracle import accepts

    return all(accepts(b, t) for t in trees if accepts(a, t))
