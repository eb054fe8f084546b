"""Binary relations over states as boolean matrices.

Entry [p][q] reads "q is at least as large as p" in the housed preorder. The
"larger" relations used by saturation are plain inverses of these matrices.
"""

from __future__ import annotations

import numpy as np

from utils.errors import invalid_input


class Relation:
    """Boolean n x n matrix over state indices."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        matrix = np.array(matrix, dtype=bool)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise invalid_input(
                f"Relation matrix must be square, got shape {matrix.shape}"
            )
        self.matrix = matrix

    @classmethod
    def identity(cls, n: int) -> Relation:
        return cls(np.eye(n, dtype=bool))

    @classmethod
    def full(cls, n: int) -> Relation:
        return cls(np.ones((n, n), dtype=bool))

    @classmethod
    def from_pairs(cls, n: int, pairs) -> Relation:
        matrix = np.zeros((n, n), dtype=bool)
        for p, q in pairs:
            matrix[p, q] = True
        return cls(matrix)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def __getitem__(self, pair: tuple[int, int]) -> bool:
        return bool(self.matrix[pair])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Relation):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and bool(
            np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self):
        return hash(self.matrix.tobytes())

    def __and__(self, other: Relation) -> Relation:
        return Relation(self.matrix & other.matrix)

    def __or__(self, other: Relation) -> Relation:
        return Relation(self.matrix | other.matrix)

    def __repr__(self) -> str:
        return f"Relation({self.pairs()})"

    def pairs(self) -> list[tuple[int, int]]:
        return [(int(p), int(q)) for p, q in zip(*np.nonzero(self.matrix))]

    def copy(self) -> Relation:
        return Relation(self.matrix.copy())

    def inverse(self) -> Relation:
        return Relation(self.matrix.T.copy())

    def issubset(self, other: Relation) -> bool:
        return not bool(np.any(self.matrix & ~other.matrix))

    def is_reflexive(self) -> bool:
        return bool(np.all(np.diagonal(self.matrix)))

    def is_transitive(self) -> bool:
        m = self.matrix.astype(np.int64)
        return not bool(np.any(((m @ m) > 0) & ~self.matrix))

    def is_preorder(self) -> bool:
        return self.is_reflexive() and self.is_transitive()

    def is_equivalence(self) -> bool:
        return self.is_preorder() and bool(np.array_equal(self.matrix, self.matrix.T))

    def classes(self) -> list[list[int]]:
        """Equivalence classes, ordered by their smallest member."""
        if not self.is_equivalence():
            raise invalid_input("Relation is not an equivalence")
        seen = np.zeros(self.size, dtype=bool)
        classes = []
        for p in range(self.size):
            if not seen[p]:
                members = [int(q) for q in np.nonzero(self.matrix[p])[0]]
                seen[members] = True
                classes.append(members)
        return classes


def transitive_closure(r: Relation) -> Relation:
    """Smallest transitive superset (Warshall, one row-broadcast per pivot)."""
    m = r.matrix.copy()
    for k in range(r.size):
        m |= np.outer(m[:, k], m[k, :])
    return Relation(m)


def strict_part(r: Relation) -> Relation:
    """The preorder minus its inverse."""
    return Relation(r.matrix & ~r.matrix.T)


def induced_equiv(r: Relation) -> Relation:
    """The equivalence r intersected with its inverse."""
    return Relation(r.matrix & r.matrix.T)
