"""Input validation helpers and seeded-stream derivation."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, EmptyBatch

_FLOAT_TOL = 1e-9


def check_bias_weights(biases: np.ndarray, weights: np.ndarray) -> None:
    if biases.ndim != 1:
        raise DimensionMismatch("biases must be a 1-d vector")
    n = biases.shape[0]
    if weights.shape != (n, n):
        raise DimensionMismatch(
            f"weights must be ({n}, {n}) to match {n} biases, got {weights.shape}"
        )
    if not (np.all(np.isfinite(biases)) and np.all(np.isfinite(weights))):
        raise ValueError("model parameters must be finite")
    if not np.array_equal(weights, weights.T):
        raise ValueError("weights must be symmetric")
    if np.any(np.diagonal(weights) != 0.0):
        raise ValueError("weights must have a zero diagonal")


def check_symmetric_couplings(fields: np.ndarray, couplings: np.ndarray) -> None:
    # same structural constraints as bias/weight pairs
    check_bias_weights(fields, couplings)


def check_state(state, n_units: int) -> np.ndarray:
    state = np.asarray(state)
    if state.ndim != 1 or state.shape[0] != n_units:
        raise DimensionMismatch(
            f"state must have length {n_units}, got shape {state.shape}"
        )
    if not np.isin(state, (0, 1)).all():
        raise ValueError("state entries must be 0 or 1")
    return state.astype(np.int8)


def check_spins(spins) -> np.ndarray:
    spins = np.asarray(spins)
    if not np.isin(spins, (-1, 1)).all():
        raise ValueError("spin entries must be -1 or +1")
    return spins.astype(np.int8)


def check_bit_batch(batch) -> np.ndarray:
    """Validate a batch of binary state vectors, shape (reads, n_units)."""
    batch = np.asarray(batch)
    if batch.ndim != 2:
        raise DimensionMismatch("sample batch must be 2-d (reads, units)")
    if batch.shape[0] == 0:
        raise EmptyBatch("sample batch is empty")
    if not np.isin(batch, (0, 1)).all():
        raise ValueError("sample batch entries must be 0 or 1")
    return batch.astype(np.int8)


def check_spin_batch(batch) -> np.ndarray:
    """Validate a batch of spin vectors, shape (reads, n_spins)."""
    batch = np.asarray(batch)
    if batch.ndim != 2:
        raise DimensionMismatch("spin batch must be 2-d (reads, spins)")
    if batch.shape[0] == 0:
        raise EmptyBatch("spin batch is empty")
    if not np.isin(batch, (-1, 1)).all():
        raise ValueError("spin batch entries must be -1 or +1")
    return batch.astype(np.int8)


def check_unit_interval(values: np.ndarray, what: str) -> None:
    if np.any(values < -_FLOAT_TOL) or np.any(values > 1.0 + _FLOAT_TOL):
        raise ValueError(f"{what} must lie in [0, 1]")


def child_seed(seed: int, *key: int) -> int:
    """Derive a deterministic child seed from a base seed and an integer key.

    The derivation is platform-independent, so streams keyed by e.g.
    (seed, iteration) are reproducible regardless of call order.
    """
    entropy = (int(seed),) + tuple(int(k) for k in key)
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])
