"""Slow, independent reference implementations used to cross-check the package.

Everything here is written from first principles with plain loops and the
textbook density-matrix route, deliberately sharing no code with mmes itself.
"""
import itertools
import math

import numpy as np


def reduced_density_matrix(z, n, qubits_a):
    """rho_A by explicit partial trace, one matrix element at a time."""
    qubits_a = sorted(qubits_a)
    qubits_b = [q for q in range(n) if q not in qubits_a]
    da, db = 2 ** len(qubits_a), 2 ** len(qubits_b)

    def glue(bits_a, bits_b):
        # qubit 0 is the most significant bit of the basis index
        bits = [0] * n
        for q, b in zip(qubits_a, bits_a):
            bits[q] = b
        for q, b in zip(qubits_b, bits_b):
            bits[q] = b
        idx = 0
        for b in bits:
            idx = (idx << 1) | b
        return idx

    rho = np.zeros((da, da), dtype=complex)
    for ia in range(da):
        bits_ia = [(ia >> (len(qubits_a) - 1 - k)) & 1 for k in range(len(qubits_a))]
        for ja in range(da):
            bits_ja = [(ja >> (len(qubits_a) - 1 - k)) & 1 for k in range(len(qubits_a))]
            acc = 0j
            for ib in range(db):
                bits_ib = [(ib >> (len(qubits_b) - 1 - k)) & 1 for k in range(len(qubits_b))]
                acc += z[glue(bits_ia, bits_ib)] * np.conj(z[glue(bits_ja, bits_ib)])
            rho[ia, ja] = acc
    return rho


def purity_by_partial_trace(z, n, qubits_a):
    rho = reduced_density_matrix(z, n, qubits_a)
    return float(np.trace(rho @ rho).real)


def purity_by_quartic_sum(z, n, mask):
    """Direct quadruple sum over basis indices, no matrices at all."""
    dim = 1 << n
    # bit q of the basis index corresponds to qubit n-1-q in our convention,
    # while bit q of the mask refers to qubit q; translate the mask once.
    index_mask = 0
    for q in range(n):
        if (mask >> q) & 1:
            index_mask |= 1 << (n - 1 - q)
    total = 0.0
    for i in range(dim):
        for j in range(dim):
            ia, ib = i & index_mask, i & ~index_mask
            ja, jb = j & index_mask, j & ~index_mask
            k = ia | jb
            l = ja | ib
            total += (z[i] * z[j] * np.conj(z[k]) * np.conj(z[l])).real
    return total


def mask_qubits(mask, n):
    return [q for q in range(n) if (mask >> q) & 1]


def potential_by_combinations(z, n):
    """Mean balanced-cut purity via itertools, fsum accumulation."""
    half = n // 2
    purities = []
    for combo in itertools.combinations(range(n), half):
        purities.append(purity_by_partial_trace(z, n, list(combo)))
    return math.fsum(purities) / len(purities)


def haar_state(n, rng):
    v = rng.standard_normal(2 ** n) + 1j * rng.standard_normal(2 ** n)
    return v / np.linalg.norm(v)
