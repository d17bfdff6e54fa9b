"""Bipartitions of n qubits and the index bookkeeping for partial traces.

A bipartition is a bitmask over qubits: bit i set means qubit i belongs to
part A.  Basis indices keep qubit 0 in the most significant position, and the
sub-indices j_A, j_Abar preserve the relative qubit order of each part.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from .errors import DomainError
from .state import PureState


@dataclass(frozen=True)
class Bipartition:
    n: int
    mask: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise DomainError(f"qubit count must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "mask", int(self.mask))
        if self.n < 2:
            raise DomainError(f"need at least 2 qubits, got n={self.n}")
        full = (1 << self.n) - 1
        if not 0 <= self.mask <= full:
            raise DomainError(f"mask {self.mask:#x} does not fit in {self.n} bits")
        if self.mask == 0 or self.mask == full:
            raise DomainError("both parts of a bipartition must be non-empty")

    @property
    def n_a(self) -> int:
        return self.mask.bit_count()

    @property
    def n_abar(self) -> int:
        return self.n - self.n_a

    @property
    def dim_a(self) -> int:
        return 1 << self.n_a

    @property
    def dim_abar(self) -> int:
        return 1 << self.n_abar

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q in range(self.n) if self.mask >> q & 1)

    @property
    def balanced(self) -> bool:
        return self.n_a == self.n // 2

    def complement(self) -> "Bipartition":
        return Bipartition(self.n, ((1 << self.n) - 1) ^ self.mask)

    @cached_property
    def index_maps(self) -> tuple[np.ndarray, np.ndarray]:
        """Arrays mapping every basis index j to (j_A, j_Abar)."""
        return _index_maps(self.n, self.mask)

    @cached_property
    def gather(self) -> np.ndarray:
        """Permutation g with reshape(z) = z[g].reshape(dim_a, dim_abar)."""
        return gather_permutation(self.n, self.mask)

    def __repr__(self) -> str:
        return f"Bipartition(n={self.n}, qubits={self.qubits})"


def _index_maps(n: int, mask: int) -> tuple[np.ndarray, np.ndarray]:
    j = np.arange(1 << n, dtype=np.int64)
    j_a = np.zeros_like(j)
    j_abar = np.zeros_like(j)
    for q in range(n):  # ascending qubit order keeps relative significance
        bit = (j >> (n - 1 - q)) & 1
        if mask >> q & 1:
            j_a = (j_a << 1) | bit
        else:
            j_abar = (j_abar << 1) | bit
    return j_a, j_abar


def gather_permutation(n: int, mask: int) -> np.ndarray:
    j_a, j_abar = _index_maps(n, mask)
    dim_abar = 1 << (n - mask.bit_count())
    pos = j_a * dim_abar + j_abar
    g = np.empty(1 << n, dtype=np.int64)
    g[pos] = np.arange(1 << n, dtype=np.int64)
    return g


def split_index(j: int, b: Bipartition) -> tuple[int, int]:
    """Split a basis index into (j_A, j_Abar) for the given bipartition."""
    j = int(j)
    if not 0 <= j < (1 << b.n):
        raise DomainError(f"index {j} out of range for n={b.n}")
    j_a = j_abar = 0
    for q in range(b.n):
        bit = (j >> (b.n - 1 - q)) & 1
        if b.mask >> q & 1:
            j_a = (j_a << 1) | bit
        else:
            j_abar = (j_abar << 1) | bit
    return j_a, j_abar


def join_index(j_a: int, j_abar: int, b: Bipartition) -> int:
    """Inverse of split_index."""
    j_a, j_abar = int(j_a), int(j_abar)
    if not 0 <= j_a < b.dim_a:
        raise DomainError(f"part-A index {j_a} out of range")
    if not 0 <= j_abar < b.dim_abar:
        raise DomainError(f"part-Abar index {j_abar} out of range")
    j = 0
    pos_a, pos_abar = b.n_a, b.n_abar
    for q in range(b.n):
        if b.mask >> q & 1:
            pos_a -= 1
            bit = (j_a >> pos_a) & 1
        else:
            pos_abar -= 1
            bit = (j_abar >> pos_abar) & 1
        j = (j << 1) | bit
    return j


def balanced_masks(n: int) -> np.ndarray:
    """Masks of all size-floor(n/2) subsets, ascending; A is the smaller part."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or int(n) < 2:
        raise DomainError(f"need an integer n >= 2, got {n!r}")
    n = int(n)
    masks = [sum(1 << q for q in subset) for subset in combinations(range(n), n // 2)]
    return np.array(sorted(masks), dtype=np.int64)


def balanced_bipartitions(n: int) -> list[Bipartition]:
    """All balanced bipartitions of n qubits in ascending mask order."""
    return [Bipartition(n, int(m)) for m in balanced_masks(n)]


def reshape(state: PureState, b: Bipartition) -> np.ndarray:
    """Amplitudes as a dim_a x dim_abar matrix, M[j_A, j_Abar] = z[j]."""
    if state.n != b.n:
        raise DomainError(f"state has n={state.n} but bipartition has n={b.n}")
    return state.amplitudes[b.gather].reshape(b.dim_a, b.dim_abar)
