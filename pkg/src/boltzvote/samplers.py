"""Samplers producing state batches from a Boltzmann machine.

Three interchangeable samplers feed the trainer:

* ``ExactSampler`` enumerates the distribution: closed-form moments for
  gradient estimates and inverse-CDF draws for read batches.
* ``GibbsSampler`` runs single-site heat-bath updates on one chain with
  burn-in and thinning.
* ``AnnealerSampler`` emulates an annealing device: map the model to a
  spin problem, minor-embed it on a Chimera graph, Metropolis-anneal each
  read independently under a geometric inverse-temperature ramp, then
  majority-vote decode the chains back to logical bits.

All samplers are deterministic functions of (model, config, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numba import njit

from . import validation
from .chimera import ChimeraGraph, EmbeddingPlan, majority_vote_decode, stretch_embedding
from .errors import EmptyBatch
from .model import (
    BoltzmannMachine,
    IsingProblem,
    MomentStatistics,
    all_state_probabilities,
    empirical_moments,
    exact_moments,
    spins_to_bits,
    to_ising,
)


@dataclass(frozen=True)
class GibbsConfig:
    """Heat-bath chain settings: burn-in sweeps, thinning interval, seed."""

    burn_in_sweeps: int = 100
    sweeps_between_samples: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.burn_in_sweeps < 0:
            raise ValueError("burn_in_sweeps must be >= 0")
        if self.sweeps_between_samples < 1:
            raise ValueError("sweeps_between_samples must be >= 1")


@dataclass(frozen=True)
class AnnealConfig:
    """Annealing schedule: inverse temperature ramps geometrically from
    ``beta_start`` to ``beta_final`` over ``sweeps`` Metropolis sweeps; each
    of ``reads`` restarts is an independent chain from a uniform random
    state."""

    beta_start: float = 0.1
    beta_final: float = 1.0
    sweeps: int = 100
    reads: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not (self.beta_start > 0 and self.beta_final > 0):
            raise ValueError("inverse temperatures must be positive")
        if self.beta_start > self.beta_final:
            raise ValueError("beta_start must not exceed beta_final")
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        if self.reads < 1:
            raise ValueError("reads must be >= 1")


def exact_sample(bm: BoltzmannMachine, count: int, seed: int) -> np.ndarray:
    """``count`` i.i.d. draws from the exact distribution via inverse CDF."""
    if count < 1:
        raise EmptyBatch("count must be >= 1")
    probs = all_state_probabilities(bm)
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    rng = np.random.default_rng(seed)
    codes = np.searchsorted(cdf, rng.random(count), side="right")
    return ((codes[:, None] >> np.arange(bm.n_units)) & 1).astype(np.int8)


@njit(cache=True)
def _gibbs_sweeps(biases, weights, state, uniforms, burn_in, spacing, out):
    n = biases.shape[0]
    kept = 0
    total = uniforms.shape[0]
    for t in range(total):
        for i in range(n):
            field = biases[i]
            for j in range(n):
                field += weights[i, j] * state[j]
            if field >= 0.0:
                p_one = 1.0 / (1.0 + math.exp(-field))
            else:
                e = math.exp(field)
                p_one = e / (1.0 + e)
            state[i] = 1.0 if uniforms[t, i] < p_one else 0.0
        if t >= burn_in and (t - burn_in + 1) % spacing == 0:
            for i in range(n):
                out[kept, i] = state[i]
            kept += 1
    return kept


def gibbs_sample(bm: BoltzmannMachine, cfg: GibbsConfig, count: int) -> np.ndarray:
    """``count`` thinned samples from one heat-bath chain.

    Sites are visited in fixed index order within each sweep; the update
    sets ``s_i`` to 1 with probability ``logistic(b_i + sum_j W_ij s_j)``.
    """
    if count < 1:
        raise EmptyBatch("count must be >= 1")
    rng = np.random.default_rng(cfg.seed)
    n = bm.n_units
    state = rng.integers(0, 2, size=n).astype(np.float64)
    total = cfg.burn_in_sweeps + count * cfg.sweeps_between_samples
    uniforms = rng.random((total, n))
    out = np.zeros((count, n), dtype=np.int8)
    kept = _gibbs_sweeps(
        bm.biases,
        bm.weights,
        state,
        uniforms,
        cfg.burn_in_sweeps,
        cfg.sweeps_between_samples,
        out,
    )
    assert kept == count
    return out


def _beta_schedule(cfg: AnnealConfig) -> np.ndarray:
    if cfg.sweeps == 1:
        return np.array([cfg.beta_final])
    ratio = cfg.beta_final / cfg.beta_start
    return cfg.beta_start * ratio ** (np.arange(cfg.sweeps) / (cfg.sweeps - 1))


def anneal_sample(problem: IsingProblem, cfg: AnnealConfig) -> np.ndarray:
    """Spin batch of shape (reads, n_spins) from an annealed Metropolis walk.

    Every read restarts from a uniform random spin state.  All reads are
    advanced in lockstep through the same site-visit order; spins with no
    field and no couplings keep their uniform initial values, which matches
    their free-spin stationary distribution at any temperature.
    """
    rng = np.random.default_rng(cfg.seed)
    n = problem.n_spins
    full = (rng.integers(0, 2, size=(cfg.reads, n)) * 2 - 1).astype(np.int8)
    coupled = np.abs(problem.couplings_J).sum(axis=0) > 0.0
    active = np.flatnonzero((problem.fields_h != 0.0) | coupled)
    if active.size == 0:
        return full
    h = problem.fields_h[active]
    j = problem.couplings_J[np.ix_(active, active)]
    state = full[:, active].astype(np.float64)
    for beta in _beta_schedule(cfg):
        for site in range(active.size):
            local = state @ j[:, site] + h[site]
            delta = 2.0 * state[:, site] * local
            accept = rng.random(cfg.reads) < np.exp(-beta * np.maximum(delta, 0.0))
            state[accept, site] *= -1.0
    full[:, active] = state.astype(np.int8)
    return full


@dataclass(frozen=True)
class ExactSampler:
    """Oracle sampler: closed-form moments, inverse-CDF reads."""

    def sample_moments(
        self, bm: BoltzmannMachine, reads: int, seed: int, return_batch: bool = False
    ) -> tuple[MomentStatistics, np.ndarray | None]:
        moments = exact_moments(bm)
        batch = exact_sample(bm, reads, seed) if return_batch else None
        return moments, batch

    def draw(self, bm: BoltzmannMachine, reads: int, seed: int) -> np.ndarray:
        return exact_sample(bm, reads, seed)


@dataclass(frozen=True)
class GibbsSampler:
    """Heat-bath MCMC sampler with a base configuration; per-call seeds
    override the configured one so training can use fresh reads each
    iteration."""

    config: GibbsConfig = GibbsConfig()

    def sample_moments(
        self, bm: BoltzmannMachine, reads: int, seed: int, return_batch: bool = False
    ) -> tuple[MomentStatistics, np.ndarray | None]:
        batch = self.draw(bm, reads, seed)
        return empirical_moments(batch), (batch if return_batch else None)

    def draw(self, bm: BoltzmannMachine, reads: int, seed: int) -> np.ndarray:
        return gibbs_sample(bm, replace(self.config, seed=seed), reads)


class AnnealerSampler:
    """Emulated annealing device behind the common sampler contract.

    Pipeline per call: spin-basis transform, clique (or stretched) minor
    embedding, parameter embedding with ferromagnetic chains, annealed
    Metropolis reads, majority-vote decoding, and the spin-to-bit map.

    Parameters
    ----------
    config : AnnealConfig
        Schedule template; ``reads`` and ``seed`` are overridden per call.
    chain_multiplier : int
        1 for the concise embedding, 2 or 3 for deliberately longer chains.
    chain_strength : float or None
        Ferromagnetic intra-chain coupling; ``None`` selects twice the
        largest per-coupler logical magnitude at each call.
    chimera : (rows, cols) or None
        Target graph size; ``None`` uses the smallest square grid that fits.
    """

    def __init__(
        self,
        config: AnnealConfig = AnnealConfig(),
        chain_multiplier: int = 1,
        chain_strength: float | None = None,
        chimera: tuple[int, int] | None = None,
    ):
        if chain_multiplier not in (1, 2, 3):
            raise ValueError("chain_multiplier must be 1, 2, or 3")
        if chain_strength is not None and not chain_strength > 0:
            raise ValueError("chain_strength must be positive")
        self.config = config
        self.chain_multiplier = chain_multiplier
        self.chain_strength = chain_strength
        self.chimera = chimera
        self._plan_key: tuple | None = None
        self._plan: EmbeddingPlan | None = None

    def _graph_for(self, n_units: int) -> ChimeraGraph:
        if self.chimera is not None:
            return ChimeraGraph(*self.chimera)
        side = max(1, math.ceil(n_units * self.chain_multiplier / 4))
        return ChimeraGraph(side, side)

    def plan(self, n_units: int) -> EmbeddingPlan:
        graph = self._graph_for(n_units)
        key = (n_units, self.chain_multiplier, graph.rows, graph.cols)
        if self._plan_key != key:
            emb = stretch_embedding(n_units, self.chain_multiplier, graph)
            self._plan = EmbeddingPlan(emb, graph, validate=False)
            self._plan_key = key
        return self._plan

    def sample_moments(
        self, bm: BoltzmannMachine, reads: int, seed: int, return_batch: bool = False
    ) -> tuple[MomentStatistics, np.ndarray | None]:
        batch = self.draw(bm, reads, seed)
        return empirical_moments(batch), (batch if return_batch else None)

    def draw(self, bm: BoltzmannMachine, reads: int, seed: int) -> np.ndarray:
        plan = self.plan(bm.n_units)
        logical = to_ising(bm)
        strength = self.chain_strength
        if strength is None:
            strength = plan.default_chain_strength(logical)
        physical = plan.embed(logical, strength)
        cfg = replace(self.config, reads=reads, seed=seed)
        spins = anneal_sample(physical, cfg)
        decoded = majority_vote_decode(
            spins, plan.embedding, validation.child_seed(seed, 1)
        )
        return spins_to_bits(decoded)


def annealer_boltzmann_sample(
    bm: BoltzmannMachine,
    config: AnnealConfig,
    chain_multiplier: int = 1,
    chain_strength: float | None = None,
    chimera: tuple[int, int] | None = None,
) -> np.ndarray:
    """One-shot run of the full annealer pipeline; returns 0/1 bit reads."""
    sampler = AnnealerSampler(config, chain_multiplier, chain_strength, chimera)
    return sampler.draw(bm, config.reads, config.seed)
