"""Moment-matching training loop and the chain-length experiment harness.

Each iteration estimates the model's first and second moments with the
configured sampler and nudges the parameters toward the targets:

    W_ij += step_size * (<s_i s_j>_target - <s_i s_j>_model)   (i != j)
    b_i  += step_size * (<s_i>_target - <s_i>_model)

which is gradient ascent on the moment-matching log-likelihood.  Training
is resumable: passing an existing trace continues the iteration count and
the per-iteration sampling streams exactly where they left off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DimensionMismatch
from .model import BoltzmannMachine, MomentStatistics, log_partition
from .samplers import AnnealConfig, AnnealerSampler, ExactSampler
from .validation import child_seed


@dataclass(frozen=True)
class TrainerConfig:
    step_size: float = 0.1
    iterations: int = 200
    reads_per_iteration: int = 1000
    init_scale: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.step_size) and self.step_size >= 0):
            raise ValueError("step_size must be finite and non-negative")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.reads_per_iteration < 1:
            raise ValueError("reads_per_iteration must be >= 1")
        if self.init_scale < 0:
            raise ValueError("init_scale must be >= 0")


@dataclass
class TrainingTrace:
    """Per-iteration record: model moments, summed error, parameter snapshot.

    The lists grow across resumed runs, so ``len(trace)`` is the cumulative
    iteration count.  ``last_batches`` holds the sample batches collected
    from the final iterations of the most recent ``train`` call when batch
    collection was requested, and is not part of the per-iteration history.
    """

    moments: list[MomentStatistics] = field(default_factory=list)
    summed_errors: list[float] = field(default_factory=list)
    biases: list[np.ndarray] = field(default_factory=list)
    weights: list[np.ndarray] = field(default_factory=list)
    last_batches: list[np.ndarray] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.summed_errors)

    def append(self, moments: MomentStatistics, error: float, model: BoltzmannMachine):
        self.moments.append(moments)
        self.summed_errors.append(float(error))
        self.biases.append(model.biases.copy())
        self.weights.append(model.weights.copy())


def init_model(n: int, cfg: TrainerConfig) -> BoltzmannMachine:
    """Small random symmetric model, deterministic in the config seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(cfg.seed)
    biases = rng.uniform(-cfg.init_scale, cfg.init_scale, size=n)
    weights = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    weights[iu] = rng.uniform(-cfg.init_scale, cfg.init_scale, size=iu[0].shape[0])
    weights += weights.T
    return BoltzmannMachine(biases, weights)


def summed_error(model_moments: MomentStatistics, targets: MomentStatistics) -> float:
    """Sum of squared first-moment and unordered second-moment deviations."""
    if model_moments.n_units != targets.n_units:
        raise DimensionMismatch("moment dimensions disagree")
    d_first = model_moments.first - targets.first
    d_second = model_moments.second - targets.second
    iu = np.triu_indices(targets.n_units, k=1)
    return float(d_first @ d_first + d_second[iu] @ d_second[iu])


def train(
    model: BoltzmannMachine,
    targets: MomentStatistics,
    sampler,
    cfg: TrainerConfig,
    trace: TrainingTrace | None = None,
    collect_last: int = 0,
) -> TrainingTrace:
    """Run ``cfg.iterations`` moment-matching updates, mutating ``model``.

    Each iteration draws its sampling seed from (config seed, cumulative
    iteration index), so identical configs give bitwise-identical traces
    and a resumed run continues the same stream.  With ``collect_last > 0``
    the sample batches of the final ``collect_last`` iterations of this
    call are kept on ``trace.last_batches``.
    """
    if model.n_units != targets.n_units:
        raise DimensionMismatch(
            f"model has {model.n_units} units, targets {targets.n_units}"
        )
    if trace is None:
        trace = TrainingTrace()
    trace.last_batches = []
    start = len(trace)
    for step in range(cfg.iterations):
        iteration = start + step
        want_batch = collect_last > 0 and step >= cfg.iterations - collect_last
        moments, batch = sampler.sample_moments(
            model,
            cfg.reads_per_iteration,
            child_seed(cfg.seed, iteration),
            return_batch=want_batch,
        )
        error = summed_error(moments, targets)
        model.weights += cfg.step_size * (targets.second - moments.second)
        np.fill_diagonal(model.weights, 0.0)
        model.biases += cfg.step_size * (targets.first - moments.first)
        trace.append(moments, error, model)
        if want_batch:
            trace.last_batches.append(batch)
    return trace


def log_likelihood(bm: BoltzmannMachine, targets: MomentStatistics) -> float:
    """Moment-matching objective: target-weighted mean log-probability.

    Equals ``b . first + sum_{i<j} W_ij second_ij - log Z``, whose gradient
    in the parameters is exactly the per-iteration update direction.
    Requires enumeration, so it is limited to small models.
    """
    if bm.n_units != targets.n_units:
        raise DimensionMismatch("model and target dimensions disagree")
    pair_term = 0.5 * float(np.sum(bm.weights * targets.second)) - 0.5 * float(
        np.sum(np.diagonal(bm.weights) * targets.first)
    )
    return float(bm.biases @ targets.first) + pair_term - log_partition(bm)


def window_rmse(
    trace: TrainingTrace, targets: MomentStatistics, window: tuple[int, int]
) -> tuple[float, float]:
    """Mean and standard deviation of per-iteration moment RMSE in a window.

    ``window`` is a half-open (start, stop) range of 0-based iteration
    indices into the trace.  The RMSE at one iteration runs over all first
    moments and all unordered second moments.
    """
    start, stop = window
    if not (0 <= start < stop <= len(trace)):
        raise ValueError(f"window {window} outside trace of length {len(trace)}")
    n = targets.n_units
    components = n + n * (n - 1) // 2
    values = [
        math.sqrt(summed_error(trace.moments[t], targets) / components)
        for t in range(start, stop)
    ]
    return float(np.mean(values)), float(np.std(values))


def generate_random_targets(n: int, seed: int) -> MomentStatistics:
    """Random target moments: uniform activations, damped pair products.

    ``first_i ~ U(0, 1)`` and ``second_ij = c_ij * first_i * first_j`` with
    ``c_ij ~ U(0, 1)``, so second moments never exceed either first moment.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    first = rng.uniform(0.0, 1.0, size=n)
    second = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    strengths = rng.uniform(0.0, 1.0, size=iu[0].shape[0])
    second[iu] = strengths * first[iu[0]] * first[iu[1]]
    second += second.T
    np.fill_diagonal(second, first)
    return MomentStatistics(first, second)


@dataclass(frozen=True)
class ExperimentConfig:
    """Chain-length experiment: train against random targets through the
    annealer pipeline at a given chain multiplier and report windowed RMSE."""

    node_count: int = 5
    chain_multiplier: int = 1
    target_seed: int = 0
    trainer_seed: int = 0
    iterations: int = 200
    rmse_window: tuple[int, int] = (190, 200)
    step_size: float = 0.1
    reads_per_iteration: int = 200
    init_scale: float = 0.05
    beta_start: float = 0.1
    beta_final: float = 1.0
    sweeps: int = 30
    chain_strength: float = 1.0
    chimera: tuple[int, int] | None = None
    sampler: str = "annealer"

    def __post_init__(self):
        if self.chain_multiplier not in (1, 2, 3):
            raise ValueError("chain_multiplier must be 1, 2, or 3")
        start, stop = self.rmse_window
        if not (0 <= start < stop <= self.iterations):
            raise ValueError("rmse_window must lie within the iteration count")
        if self.sampler not in ("annealer", "exact"):
            raise ValueError("sampler must be 'annealer' or 'exact'")


@dataclass
class ChainExperimentReport:
    config: ExperimentConfig
    targets: MomentStatistics
    trace: TrainingTrace
    rmse_mean: float
    rmse_std: float


def chain_length_experiment(cfg: ExperimentConfig) -> ChainExperimentReport:
    """Train one network through the annealer (or the exact control) and
    report the windowed RMSE plus the full per-moment convergence series."""
    targets = generate_random_targets(cfg.node_count, cfg.target_seed)
    trainer_cfg = TrainerConfig(
        step_size=cfg.step_size,
        iterations=cfg.iterations,
        reads_per_iteration=cfg.reads_per_iteration,
        init_scale=cfg.init_scale,
        seed=cfg.trainer_seed,
    )
    if cfg.sampler == "exact":
        sampler = ExactSampler()
    else:
        sampler = AnnealerSampler(
            AnnealConfig(
                beta_start=cfg.beta_start,
                beta_final=cfg.beta_final,
                sweeps=cfg.sweeps,
            ),
            chain_multiplier=cfg.chain_multiplier,
            chain_strength=cfg.chain_strength,
            chimera=cfg.chimera,
        )
    model = init_model(cfg.node_count, trainer_cfg)
    trace = train(model, targets, sampler, trainer_cfg)
    mean, std = window_rmse(trace, targets, cfg.rmse_window)
    return ChainExperimentReport(cfg, targets, trace, mean, std)
