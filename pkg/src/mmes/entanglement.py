"""Bipartition purities and the entanglement potential.

The purity of part A is tr(rho_A^2).  Writing the amplitudes as the matrix
M[j_A, j_Abar], the Gram matrix G = M M^dagger equals rho_A, so the purity is
the squared Frobenius norm of G; forming G on the smaller factor keeps the
cost at O(min(dim)^2 * max(dim)).  The entanglement potential is the purity
averaged over every balanced bipartition; minimizing it spreads entanglement
as evenly as the geometry allows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bipartitions import Bipartition, balanced_masks, gather_permutation
from .errors import DomainError, NumericalError
from .state import PureState

# A stacked gather table costs K*2^n int64 entries; cache it only when modest.
_CACHE_ENTRY_LIMIT = 1 << 24
_CHUNK_ENTRY_LIMIT = 1 << 23


@lru_cache(maxsize=8)
def _stacked_gathers(n: int) -> np.ndarray | None:
    masks = balanced_masks(n)
    if masks.size << n > _CACHE_ENTRY_LIMIT:
        return None
    g = np.empty((masks.size, 1 << n), dtype=np.int64)
    for k, mask in enumerate(masks):
        g[k] = gather_permutation(n, int(mask))
    g.setflags(write=False)
    return g


def _gather_chunks(n: int):
    """Yield gather tables for balanced bipartitions, (chunk, 2^n) at a time."""
    stacked = _stacked_gathers(n)
    if stacked is not None:
        yield stacked
        return
    masks = balanced_masks(n)
    per = max(1, _CHUNK_ENTRY_LIMIT >> n)
    for start in range(0, masks.size, per):
        block = masks[start:start + per]
        g = np.empty((block.size, 1 << n), dtype=np.int64)
        for k, mask in enumerate(block):
            g[k] = gather_permutation(n, int(mask))
        yield g


def _purity_amps(z: np.ndarray, b: Bipartition) -> float:
    m = z[b.gather].reshape(b.dim_a, b.dim_abar)
    if b.dim_a <= b.dim_abar:
        g = m @ m.conj().T
    else:
        g = m.conj().T @ m
    return float(np.einsum("ij,ij->", g, g.conj()).real)


def purity(state: PureState, b: Bipartition) -> float:
    """Purity of the reduced state on part A of the given bipartition."""
    if state.n != b.n:
        raise DomainError(f"state has n={state.n} but bipartition has n={b.n}")
    return _purity_amps(state.amplitudes, b)


def _balanced_purities(z: np.ndarray, n: int):
    dim_a = 1 << (n // 2)
    dim_abar = 1 << (n - n // 2)
    for g in _gather_chunks(n):
        m = z[g].reshape(g.shape[0], dim_a, dim_abar)
        gram = m @ m.conj().transpose(0, 2, 1)
        yield np.einsum("kij,kij->k", gram, gram.conj()).real


def _potential_amps(z: np.ndarray, n: int) -> float:
    total = []
    count = 0
    for p in _balanced_purities(z, n):
        total.append(float(p.sum()))
        count += p.size
    value = math.fsum(total) / count
    if not math.isfinite(value):
        raise NumericalError("entanglement potential is not finite")
    return value


def potential(state: PureState) -> float:
    """Average purity over all balanced bipartitions, in [1/dim_a, 1]."""
    return _potential_amps(state.amplitudes, state.n)


@dataclass(frozen=True)
class PurityProfile:
    """Purity of every balanced bipartition of one state, with summary stats."""

    n: int
    masks: tuple[int, ...]
    purities: np.ndarray
    mean: float
    std: float
    min: float
    max: float

    def __post_init__(self):
        arr = np.asarray(self.purities, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "purities", arr)
        if len(self.masks) != arr.size or arr.size == 0:
            raise DomainError("profile needs one purity per mask")
        floor = 1.0 / (1 << (self.n // 2))
        if arr.min() < floor - 1e-10 or arr.max() > 1.0 + 1e-10:
            raise DomainError("purities fall outside the valid range")


def purity_profile(state: PureState) -> PurityProfile:
    masks = balanced_masks(state.n)
    chunks = list(_balanced_purities(state.amplitudes, state.n))
    values = np.concatenate(chunks) if len(chunks) > 1 else chunks[0]
    return PurityProfile(
        n=state.n,
        masks=tuple(int(m) for m in masks),
        purities=values,
        mean=float(values.mean()),
        std=float(values.std()),
        min=float(values.min()),
        max=float(values.max()),
    )


def _tangent_gradient_amps(z: np.ndarray, n: int) -> np.ndarray:
    """Gradient of the potential in the 2^(n+1) real coordinates, tangent to the sphere.

    For one bipartition the purity is tr((M M^H)^2); its derivative with
    respect to conj(z) scatters 2 (G M) back through the gather permutation.
    The real-coordinate gradient doubles that, and the bipartition average
    divides by the count.  Layout matches z.view(float64): re0, im0, re1, ...
    """
    dim = 1 << n
    dim_a = 1 << (n // 2)
    dim_abar = 1 << (n - n // 2)
    acc = np.zeros(dim, dtype=np.complex128)
    count = 0
    for g in _gather_chunks(n):
        m = z[g].reshape(g.shape[0], dim_a, dim_abar)
        gram = m @ m.conj().transpose(0, 2, 1)
        t = (gram @ m).reshape(g.shape[0], dim)
        for k in range(g.shape[0]):
            acc[g[k]] += t[k]
        count += g.shape[0]
    w = (4.0 / count) * acc
    grad = w.view(np.float64).copy()
    radial = z.view(np.float64)
    grad -= np.dot(grad, radial) * radial
    return grad


def potential_gradient(state: PureState) -> np.ndarray:
    """Tangent-space gradient of potential() at the state.

    Returns 2**(n+1) reals interleaved as (re, im) per amplitude.  The radial
    component is projected out; phase invariance of the purities makes the
    result orthogonal to the global-phase direction i*z as well.
    """
    return _tangent_gradient_amps(state.amplitudes, state.n)
