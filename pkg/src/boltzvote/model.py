"""Fully connected Boltzmann machine over binary units.

A model is a bias vector ``b`` and a symmetric zero-diagonal weight matrix
``W``; the energy of a 0/1 state ``s`` is

    E(s) = -sum_i b_i s_i - sum_{i<j} W_ij s_i s_j

with every unordered pair counted once.  State probabilities follow
``exp(-E(s)) / Z``.  This module provides the exact (enumeration-based)
probability and moment oracles, empirical moments of sample batches, and the
basis change to the equivalent +-1 spin problem used by annealing hardware.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import validation
from .errors import DimensionMismatch, EnumerationLimitExceeded

#: Exact operations refuse models larger than this rather than thrash.
ENUMERATION_GUARD = 24

_BLOCK = 1 << 16


@dataclass
class BoltzmannMachine:
    """Model parameters: per-unit biases and symmetric pair weights.

    Parameters
    ----------
    biases : ndarray of shape (n_units,)
    weights : ndarray of shape (n_units, n_units)
        Symmetric, zero diagonal.  ``weights[i, j]`` is the coefficient of
        the unordered pair ``{i, j}`` in the energy.
    """

    biases: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.biases = np.array(self.biases, dtype=float)
        self.weights = np.array(self.weights, dtype=float)
        validation.check_bias_weights(self.biases, self.weights)

    @property
    def n_units(self) -> int:
        return self.biases.shape[0]

    @classmethod
    def zeros(cls, n_units: int) -> "BoltzmannMachine":
        return cls(np.zeros(n_units), np.zeros((n_units, n_units)))

    def copy(self) -> "BoltzmannMachine":
        return BoltzmannMachine(self.biases.copy(), self.weights.copy())


@dataclass
class IsingProblem:
    """+-1 spin problem: fields ``h``, couplings ``J``, and a constant offset.

    Energy of a spin vector ``S`` (pairs counted once):

        H(S) = -sum_i h_i S_i - sum_{i<j} J_ij S_i S_j

    Positive couplings favour aligned spins.  ``energy_offset`` is the
    constant produced by basis changes so that equivalent problems report
    identical total energies.
    """

    fields_h: np.ndarray
    couplings_J: np.ndarray
    energy_offset: float = 0.0

    def __post_init__(self):
        self.fields_h = np.array(self.fields_h, dtype=float)
        self.couplings_J = np.array(self.couplings_J, dtype=float)
        self.energy_offset = float(self.energy_offset)
        validation.check_symmetric_couplings(self.fields_h, self.couplings_J)

    @property
    def n_spins(self) -> int:
        return self.fields_h.shape[0]


@dataclass
class MomentStatistics:
    """First moments ``<s_i>`` and second moments ``<s_i s_j>``.

    The diagonal of ``second`` always equals ``first`` because binary units
    satisfy ``s_i^2 = s_i``; constructors enforce this.  Off-diagonal entries
    coming from a genuine distribution or sample batch obey the Frechet
    bounds ``max(0, f_i + f_j - 1) <= second_ij <= min(f_i, f_j)``, but
    externally supplied targets are allowed to violate the lower bound, so it
    is deliberately not validated here.
    """

    first: np.ndarray
    second: np.ndarray

    def __post_init__(self):
        self.first = np.array(self.first, dtype=float)
        self.second = np.array(self.second, dtype=float)
        n = self.first.shape[0]
        if self.first.ndim != 1 or self.second.shape != (n, n):
            raise DimensionMismatch(
                f"moment shapes disagree: {self.first.shape} vs {self.second.shape}"
            )
        if not np.allclose(self.second, self.second.T, atol=1e-9, rtol=0.0):
            raise ValueError("second moments must be symmetric")
        validation.check_unit_interval(self.first, "first moments")
        validation.check_unit_interval(self.second, "second moments")
        np.fill_diagonal(self.second, self.first)

    @property
    def n_units(self) -> int:
        return self.first.shape[0]

    def copy(self) -> "MomentStatistics":
        return MomentStatistics(self.first.copy(), self.second.copy())

    def with_first(self, first: np.ndarray) -> "MomentStatistics":
        """Replace the first moments (and the tied diagonal), keep the rest."""
        return MomentStatistics(np.asarray(first, dtype=float), self.second.copy())


def energy(bm: BoltzmannMachine, state) -> float:
    """Energy of one binary state under the model."""
    s = validation.check_state(state, bm.n_units).astype(float)
    return float(-bm.biases @ s - 0.5 * s @ bm.weights @ s)


def ising_energy(problem: IsingProblem, spins) -> float:
    """Spin-problem energy, excluding ``energy_offset``."""
    s = validation.check_spins(spins).astype(float)
    if s.shape[0] != problem.n_spins:
        raise DimensionMismatch(
            f"expected {problem.n_spins} spins, got {s.shape[0]}"
        )
    return float(-problem.fields_h @ s - 0.5 * s @ problem.couplings_J @ s)


def _guard(n_units: int) -> None:
    if n_units > ENUMERATION_GUARD:
        raise EnumerationLimitExceeded(
            f"exact enumeration limited to {ENUMERATION_GUARD} units, got {n_units}"
        )


def _state_block(lo: int, hi: int, n: int) -> np.ndarray:
    codes = np.arange(lo, hi, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n)) & 1).astype(float)


def _neg_energies(bm: BoltzmannMachine, states: np.ndarray) -> np.ndarray:
    return states @ bm.biases + 0.5 * np.einsum("ij,ij->i", states @ bm.weights, states)


def log_partition(bm: BoltzmannMachine) -> float:
    """log Z, accumulated in the log domain so large parameters cannot overflow."""
    _guard(bm.n_units)
    total_states = 1 << bm.n_units
    running_max = -np.inf
    for lo in range(0, total_states, _BLOCK):
        block = _state_block(lo, min(lo + _BLOCK, total_states), bm.n_units)
        running_max = max(running_max, float(_neg_energies(bm, block).max()))
    acc = 0.0
    for lo in range(0, total_states, _BLOCK):
        block = _state_block(lo, min(lo + _BLOCK, total_states), bm.n_units)
        acc += float(np.exp(_neg_energies(bm, block) - running_max).sum())
    return running_max + float(np.log(acc))


def state_probability(bm: BoltzmannMachine, state) -> float:
    """Exact probability of one state: exp(-E(state)) / Z."""
    e = energy(bm, state)
    return float(np.exp(-e - log_partition(bm)))


def all_state_probabilities(bm: BoltzmannMachine) -> np.ndarray:
    """Exact probabilities of all ``2**n`` states, indexed by bit code.

    State ``k`` has unit ``i`` set iff bit ``i`` of ``k`` is set.
    """
    _guard(bm.n_units)
    log_z = log_partition(bm)
    total_states = 1 << bm.n_units
    out = np.empty(total_states)
    for lo in range(0, total_states, _BLOCK):
        hi = min(lo + _BLOCK, total_states)
        block = _state_block(lo, hi, bm.n_units)
        out[lo:hi] = np.exp(_neg_energies(bm, block) - log_z)
    return out


def exact_moments(bm: BoltzmannMachine) -> MomentStatistics:
    """Ground-truth first and second moments by full enumeration."""
    _guard(bm.n_units)
    log_z = log_partition(bm)
    n = bm.n_units
    total_states = 1 << n
    first = np.zeros(n)
    second = np.zeros((n, n))
    for lo in range(0, total_states, _BLOCK):
        block = _state_block(lo, min(lo + _BLOCK, total_states), n)
        p = np.exp(_neg_energies(bm, block) - log_z)
        first += p @ block
        second += (block * p[:, None]).T @ block
    second = 0.5 * (second + second.T)
    np.fill_diagonal(second, first)
    return MomentStatistics(np.clip(first, 0.0, 1.0), np.clip(second, 0.0, 1.0))


def empirical_moments(batch) -> MomentStatistics:
    """Sample means of ``s_i`` and ``s_i s_j`` over a batch of binary states."""
    x = validation.check_bit_batch(batch).astype(float)
    reads = x.shape[0]
    first = x.mean(axis=0)
    second = (x.T @ x) / reads
    second = 0.5 * (second + second.T)
    np.fill_diagonal(second, first)
    return MomentStatistics(first, second)


def to_ising(bm: BoltzmannMachine) -> IsingProblem:
    """Rewrite the model in the +-1 spin basis via ``s = 2x - 1``.

    For every state ``x``: ``energy(bm, x) == ising_energy(problem, 2x - 1)
    + problem.energy_offset`` exactly.
    """
    h = bm.biases / 2.0 + bm.weights.sum(axis=1) / 4.0
    j = bm.weights / 4.0
    offset = -(bm.biases.sum() / 2.0 + bm.weights.sum() / 8.0)
    return IsingProblem(h, j, offset)


def spins_to_bits(spins) -> np.ndarray:
    """Map +-1 spins to 0/1 bits elementwise (+1 -> 1, -1 -> 0)."""
    s = validation.check_spins(spins)
    return ((s + 1) // 2).astype(np.int8)


def bits_to_spins(bits) -> np.ndarray:
    """Map 0/1 bits to +-1 spins elementwise (1 -> +1, 0 -> -1)."""
    b = np.asarray(bits)
    if not np.isin(b, (0, 1)).all():
        raise ValueError("bit entries must be 0 or 1")
    return (2 * b.astype(np.int8) - 1).astype(np.int8)
