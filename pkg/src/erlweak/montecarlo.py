"""Monte Carlo over classical phase points: sample, evolve, postselect.

Sampling is chunked with one substream per chunk, keyed by (seed, chunk
index), so the sample stream and every derived estimate are bit-identical
regardless of how chunks would be partitioned across workers. Reductions run
in fixed chunk order.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
from scipy.stats import norm

from .analytic import oracle_postselected_means
from .dynamics import apply_to_points, coupling_map
from .states import (
    GaussianState,
    Quadrature,
    make_particle,
    make_pure_device,
    quadrature_moments,
    quadrature_vector,
    tensor,
)

DEFAULT_CHUNK = 1 << 18
REPEATABILITY_TOL = 1e-12
ADAPTIVE_EPSILON_FRACTION = 0.05


class InsufficientAcceptanceError(RuntimeError):
    """Fewer than two samples survived postselection."""

    def __init__(self, acceptance_rate: float):
        super().__init__(
            f"insufficient acceptance (rate {acceptance_rate:.3g}); "
            "widen epsilon or increase n_samples"
        )
        self.acceptance_rate = acceptance_rate


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    mu_q: float
    mu_p: float
    sigma: float
    delta_Q: float
    mu_P: float
    omega: float
    g: float
    theta_A: Quadrature
    theta_B: Quadrature
    b: float
    epsilon: float | None  # None -> adaptive: 0.05 * std of B after evolution
    n_samples: int
    seed: int

    def __post_init__(self):
        if self.epsilon is not None and self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")

    def particle(self) -> GaussianState:
        return make_particle(self.mu_q, self.mu_p, self.sigma)

    def device(self) -> GaussianState:
        return make_pure_device(self.delta_Q, self.mu_P, self.omega)

    def joint(self) -> GaussianState:
        return tensor(self.particle(), self.device())

    def evolved_joint(self) -> GaussianState:
        from .dynamics import apply_to_state

        return apply_to_state(coupling_map(self.g, self.theta_A), self.joint())

    def resolved_epsilon(self) -> float:
        if self.epsilon is not None:
            return self.epsilon
        _, var_B = quadrature_moments(self.evolved_joint(), 0, self.theta_B)
        return ADAPTIVE_EPSILON_FRACTION * math.sqrt(var_B)


@dataclasses.dataclass(frozen=True)
class PostselectedEstimate:
    mean_Q: float
    mean_P: float
    mean_A: float
    se_Q: float
    se_P: float
    se_A: float
    n_accepted: int
    n_samples: int
    acceptance_rate: float
    epsilon: float


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))


def sample_state(
    state: GaussianState, n: int, seed: int, chunk_size: int = DEFAULT_CHUNK
) -> np.ndarray:
    """Draw n i.i.d. points from a Gaussian state as an (n, 2*n_modes) array."""
    if n < 1:
        raise ValueError("n must be >= 1")
    try:
        lower = np.linalg.cholesky(state.cov)
    except np.linalg.LinAlgError as exc:
        raise ValueError("covariance is not factorizable (degenerate state)") from exc
    out = np.empty((n, state.mean.size))
    start = 0
    chunk = 0
    while start < n:
        m = min(chunk_size, n - start)
        z = _chunk_rng(seed, chunk).standard_normal((m, state.mean.size))
        out[start : start + m] = state.mean + z @ lower.T
        start += m
        chunk += 1
    return out


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(values.size))
    return mean, se


def run_weak_experiment(
    config: ExperimentConfig, chunk_size: int = DEFAULT_CHUNK
) -> PostselectedEstimate:
    """Sample the joint state, evolve each point, postselect on
    |B(q', p') - b| <= epsilon, and estimate conditional means of
    Q', P' and A(q', p') with normal-theory standard errors.

    Per-point repeatability (A and P unchanged by the coupling) is asserted
    on every chunk.
    """
    joint = config.joint()
    smap = coupling_map(config.g, config.theta_A)
    epsilon = config.resolved_epsilon()
    try:
        lower = np.linalg.cholesky(joint.cov)
    except np.linalg.LinAlgError as exc:
        raise ValueError("covariance is not factorizable (degenerate state)") from exc

    accepted: list[np.ndarray] = []
    n = config.n_samples
    start = 0
    chunk = 0
    while start < n:
        m = min(chunk_size, n - start)
        z = _chunk_rng(config.seed, chunk).standard_normal((m, 4))
        pts = joint.mean + z @ lower.T
        evolved = apply_to_points(smap, pts)

        a_before = config.theta_A.value(pts[:, 0], pts[:, 1])
        a_after = config.theta_A.value(evolved[:, 0], evolved[:, 1])
        scale = np.maximum(1.0, np.abs(a_before))
        if np.max(np.abs(a_after - a_before) / scale) > REPEATABILITY_TOL:
            raise AssertionError("repeatability violated: A changed under coupling")
        if not np.array_equal(evolved[:, 3], pts[:, 3]):
            raise AssertionError("repeatability violated: P changed under coupling")

        b_val = config.theta_B.value(evolved[:, 0], evolved[:, 1])
        keep = np.abs(b_val - config.b) <= epsilon
        accepted.append(
            np.column_stack([evolved[keep, 2], evolved[keep, 3], a_after[keep]])
        )
        start += m
        chunk += 1

    rows = np.concatenate(accepted, axis=0)
    n_acc = rows.shape[0]
    rate = n_acc / n
    if n_acc < 2:
        raise InsufficientAcceptanceError(rate)
    mean_Q, se_Q = _mean_se(rows[:, 0])
    mean_P, se_P = _mean_se(rows[:, 1])
    mean_A, se_A = _mean_se(rows[:, 2])
    return PostselectedEstimate(
        mean_Q, mean_P, mean_A, se_Q, se_P, se_A, n_acc, n, rate, epsilon
    )


def oracle_estimate(config: ExperimentConfig) -> tuple[float, float, float]:
    """Point-conditioned (epsilon -> 0) oracle values (Q, P, A) for a config."""
    from .analytic import conditional_expectation_A

    evolved = config.evolved_joint()
    mean_Q, mean_P = oracle_postselected_means(evolved, config.theta_B, config.b)
    mean_A = conditional_expectation_A(evolved, config.theta_A, config.theta_B, config.b)
    return mean_Q, mean_P, mean_A


def windowed_oracle(
    config: ExperimentConfig, epsilon: float | None = None
) -> tuple[float, float, float]:
    """Exact conditional means given the hard window |B - b| <= epsilon.

    For jointly Gaussian (X, B): E[X | window] differs from E[X] by the
    regression coefficient times the truncated-normal mean shift of B. This
    is the true expectation of the Monte Carlo estimator and quantifies the
    O(epsilon^2) window bias exactly.
    """
    if epsilon is None:
        epsilon = config.resolved_epsilon()
    evolved = config.evolved_joint()
    v = quadrature_vector(2, 0, config.theta_B)
    mu_B = float(v @ evolved.mean)
    var_B = float(v @ evolved.cov @ v)
    s = math.sqrt(var_B)
    lo = (config.b - epsilon - mu_B) / s
    hi = (config.b + epsilon - mu_B) / s
    prob = norm.cdf(hi) - norm.cdf(lo)
    if prob <= 0:
        raise InsufficientAcceptanceError(0.0)
    e_B = mu_B - s * (norm.pdf(hi) - norm.pdf(lo)) / prob

    results = []
    vectors = [
        quadrature_vector(2, 1, Quadrature(0.0)),  # device Q
        quadrature_vector(2, 1, Quadrature(math.pi / 2)),  # device P
        quadrature_vector(2, 0, config.theta_A),  # particle A
    ]
    for u in vectors:
        slope = float(u @ evolved.cov @ v) / var_B
        results.append(float(u @ evolved.mean) + slope * (e_B - mu_B))
    return tuple(results)


def acceptance_probability(config: ExperimentConfig, epsilon: float | None = None) -> float:
    """Exact probability of the postselection window under the evolved state."""
    if epsilon is None:
        epsilon = config.resolved_epsilon()
    mu_B, var_B = quadrature_moments(config.evolved_joint(), 0, config.theta_B)
    s = math.sqrt(var_B)
    return float(
        norm.cdf((config.b + epsilon - mu_B) / s) - norm.cdf((config.b - epsilon - mu_B) / s)
    )


def joint_momentum_histogram(
    config: ExperimentConfig,
    bins: int | tuple[int, int],
    hist_range: tuple[tuple[float, float], tuple[float, float]] | None = None,
    chunk_size: int = DEFAULT_CHUNK,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """2D histogram of (particle momentum after coupling, device momentum).

    Postselection settings in the config are ignored. Returns
    (counts, p_edges, P_edges); total count equals n_samples.
    """
    if isinstance(bins, int):
        bins = (bins, bins)
    if bins[0] < 2 or bins[1] < 2:
        raise ValueError("bins must be >= 2 in each dimension")
    if hist_range is not None:
        (p_lo, p_hi), (P_lo, P_hi) = hist_range
        if not (p_lo < p_hi and P_lo < P_hi):
            raise ValueError("empty histogram range")
    pts = sample_state(config.joint(), config.n_samples, config.seed, chunk_size)
    evolved = apply_to_points(coupling_map(config.g, config.theta_A), pts)
    if hist_range is None:
        mu, cov = config.evolved_joint().mean, config.evolved_joint().cov
        half_p = 5.0 * math.sqrt(cov[1, 1])
        half_P = 5.0 * math.sqrt(cov[3, 3])
        hist_range = ((mu[1] - half_p, mu[1] + half_p), (mu[3] - half_P, mu[3] + half_P))
    counts, p_edges, P_edges = np.histogram2d(
        evolved[:, 1], evolved[:, 3], bins=bins, range=hist_range
    )
    return counts, p_edges, P_edges


def exact_strong_correlation(
    delta_Q: float, config: ExperimentConfig
) -> float:
    """Closed-form Pearson correlation between the device pointer Q' and the
    particle observable A, for a pure device of position spread delta_Q."""
    var_A = float(
        config.theta_A.vector @ config.particle().cov @ config.theta_A.vector
    )
    g = config.g
    return g * math.sqrt(var_A) / math.sqrt(delta_Q**2 + g**2 * var_A)


def strong_measurement_correlation(
    delta_Q_sequence,
    config: ExperimentConfig,
    chunk_size: int = DEFAULT_CHUNK,
) -> list[float]:
    """Sampled Pearson correlation between pointer position Q' and the
    particle observable A, for each device spread in a decreasing sequence.

    Tends to 1 as delta_Q -> 0: the strong-measurement limit.
    """
    out = []
    for delta_Q in delta_Q_sequence:
        if delta_Q <= 0:
            raise ValueError("delta_Q must be positive")
        joint = tensor(config.particle(), make_pure_device(delta_Q, config.mu_P, config.omega))
        pts = sample_state(joint, config.n_samples, config.seed, chunk_size)
        evolved = apply_to_points(coupling_map(config.g, config.theta_A), pts)
        a = config.theta_A.value(pts[:, 0], pts[:, 1])
        q_dev = evolved[:, 2]
        if a.std() == 0 or q_dev.std() == 0:
            raise ValueError("degenerate variance in correlation estimate")
        out.append(float(np.corrcoef(a, q_dev)[0, 1]))
    return out
