"""Pauli noise models and the raw-rate / effective-rate conversion.

Errors are sampled in batches as ``(B, 2n)`` uint8 arrays ``[x | z]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gf2
from .codes import CodeLattice
from .pauli import PauliOperator

BITPHASE = "bitphase"
DEPOL = "depol"
NN_DEPOL = "nn-depol"
NOISE_KINDS = (BITPHASE, DEPOL, NN_DEPOL)

# largest raw rate for which the NN effective rate is monotone in p
NN_P_MAX = 15.0 / 16.0


@dataclass(frozen=True)
class NoiseModel:
    kind: str
    p: float

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        if not 0.0 <= self.p < 1.0:
            raise ValueError(f"error rate must lie in [0, 1), got {self.p}")


def effective_rate(model: NoiseModel, neighbor_count: int = 0) -> float:
    """Probability that one qubit carries a nontrivial Pauli."""
    p = model.p
    if model.kind == DEPOL:
        return p
    if model.kind == BITPHASE:
        return 2 * p - p * p
    if neighbor_count < 0:
        raise ValueError("neighbor_count must be non-negative")
    q = 0.0
    for _ in range(neighbor_count):
        q = q * (1 - 4 * p / 15) + (1 - q) * 12 * p / 15
    return q


def per_qubit_effective_rates(model: NoiseModel, lattice: CodeLattice) -> np.ndarray:
    counts = lattice.neighbor_counts()
    return np.array([effective_rate(model, int(c)) for c in counts])


def rate_from_effective(kind: str, p_eff: float, neighbor_count: int = 0, tol: float = 1e-13) -> float:
    """Inverse of :func:`effective_rate` in the raw rate ``p``."""
    if kind not in NOISE_KINDS:
        raise ValueError(f"unknown noise kind {kind!r}")
    if p_eff < 0:
        raise ValueError("effective rate must be non-negative")
    if kind == DEPOL:
        if p_eff >= 1:
            raise ValueError("depolarizing effective rate must be below 1")
        return float(p_eff)
    if kind == BITPHASE:
        if p_eff >= 1:
            raise ValueError("bit/phase-flip effective rate must be below 1")
        return float(1 - np.sqrt(1 - p_eff))
    if p_eff == 0:
        return 0.0
    top = effective_rate(NoiseModel(NN_DEPOL, NN_P_MAX), neighbor_count)
    if p_eff >= top:
        raise ValueError(f"effective rate {p_eff} unreachable with {neighbor_count} neighbours (max {top:.6f})")
    lo, hi = 0.0, NN_P_MAX
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if effective_rate(NoiseModel(NN_DEPOL, mid), neighbor_count) < p_eff:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def model_for_effective_rate(kind: str, p_eff: float, lattice: CodeLattice) -> NoiseModel:
    """Noise model whose bulk qubits see effective rate ``p_eff``."""
    return NoiseModel(kind, rate_from_effective(kind, p_eff, lattice.bulk_neighbor_count))


def _edge_incidence(lattice: CodeLattice) -> tuple[np.ndarray, np.ndarray]:
    edges = np.asarray(lattice.edges, dtype=np.int64)
    a = np.zeros((len(edges), lattice.n), dtype=np.uint8)
    b = np.zeros((len(edges), lattice.n), dtype=np.uint8)
    a[np.arange(len(edges)), edges[:, 0]] = 1
    b[np.arange(len(edges)), edges[:, 1]] = 1
    return a, b


def sample_batch(model: NoiseModel, lattice: CodeLattice, rng: np.random.Generator, size: int) -> np.ndarray:
    n = lattice.n
    out = np.zeros((size, 2 * n), dtype=np.uint8)
    if model.kind == BITPHASE:
        out[:, :n] = rng.random((size, n)) < model.p
        out[:, n:] = rng.random((size, n)) < model.p
    elif model.kind == DEPOL:
        hit = rng.random((size, n)) < model.p
        code = rng.integers(1, 4, size=(size, n), dtype=np.uint8) * hit  # 1=X 2=Z 3=Y
        out[:, :n] = code & 1
        out[:, n:] = code >> 1
    else:
        ne = len(lattice.edges)
        hit = rng.random((size, ne)) < model.p
        code = rng.integers(1, 16, size=(size, ne), dtype=np.uint8) * hit
        ca, cb = code & 3, code >> 2
        inc_a, inc_b = _edge_incidence(lattice)
        out[:, :n] = gf2.matmul(ca & 1, inc_a) ^ gf2.matmul(cb & 1, inc_b)
        out[:, n:] = gf2.matmul(ca >> 1, inc_a) ^ gf2.matmul(cb >> 1, inc_b)
    return out


def sample(model: NoiseModel, lattice: CodeLattice, rng: np.random.Generator) -> PauliOperator:
    return PauliOperator.from_vector(sample_batch(model, lattice, rng, 1)[0])
