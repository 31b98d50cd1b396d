"""Monte Carlo and brute-force oracles for the analytic ingredients.

Everything here is independent of the closed forms it checks: mutual
information on scalar fading instances is estimated from the exact
conditional Gaussian density (bias-controlled, with quantifiable standard
errors), log-moment inequalities are audited by direct channel simulation,
and per-path statistics by plain sample means.

All estimators are deterministic given (seed, n_samples, n_workers).  The
sample budget is sharded across ``n_workers`` independent substreams (the
default worker count comes from the ``FADECAP_WORKERS`` environment
variable); results are reproducible for a fixed worker count, which is
recorded in every report.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.special import logsumexp

from .channel import ChannelConfig, realize_many, simulate
from .direct import LogUniformX2, SchemeParams
from .fading import Ar1Gaussian, IidGaussian, PathGainSpec, ZeroPath, complex_normal
from .streams import substream

_CHUNK = 65536


def default_workers() -> int:
    """Worker count from FADECAP_WORKERS (default 1)."""
    raw = os.environ.get("FADECAP_WORKERS", "1")
    workers = int(raw)
    if workers < 1:
        raise ValueError(f"FADECAP_WORKERS must be >= 1, got {workers}")
    return workers


def _shard_sizes(n_samples: int, n_workers: int) -> List[int]:
    base, extra = divmod(n_samples, n_workers)
    return [base + (1 if w < extra else 0) for w in range(n_workers)]


@dataclass(frozen=True)
class McEstimate:
    """A Monte Carlo estimate with its standard error."""

    value: float
    std_error: float
    n_samples: int

    def __post_init__(self) -> None:
        if self.std_error < 0.0:
            raise ValueError("standard error cannot be negative")


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one numeric audit, JSON-serializable."""

    check: str
    lhs: float
    rhs: float
    std_error: float
    passed: bool
    workers: int = 1

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "std_error": self.std_error,
            "pass": self.passed,
            "workers": self.workers,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _combine_mean_sem(values_per_shard: List[np.ndarray]) -> McEstimate:
    values = np.concatenate(values_per_shard)
    n = values.size
    sem = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return McEstimate(value=float(np.mean(values)), std_error=sem, n_samples=n)


def mc_log_gain(
    spec: PathGainSpec, n_samples: int, seed: int, n_workers: Optional[int] = None
) -> McEstimate:
    """Sample mean of log|H|^2 over independent stationary marginal draws."""
    if isinstance(spec, ZeroPath):
        raise ValueError("the zero tap has no log-gain statistics")
    if not isinstance(spec, (IidGaussian, Ar1Gaussian)):
        raise TypeError(f"not a path-gain spec: {spec!r}")
    workers = default_workers() if n_workers is None else n_workers
    shards = []
    for w, size in enumerate(_shard_sizes(n_samples, workers)):
        if size == 0:
            continue
        h = complex_normal(substream(seed, w), size, spec.alpha)
        shards.append(np.log(np.abs(h) ** 2))
    return _combine_mean_sem(shards)


def mi_scalar_gaussian(
    h_variance: float,
    w_variance: float,
    x2_law: LogUniformX2,
    n_outer: int = 100_000,
    n_inner: int = 512,
    seed: int = 0,
    n_workers: Optional[int] = None,
) -> McEstimate:
    """Monte Carlo mutual information I(X; HX + W) for the scalar fading model.

    H ~ CN(0, h_variance), W ~ CN(0, w_variance), X circularly symmetric with
    the given log-uniform magnitude law.  Conditionally on |X|^2 = t the
    output is CN(0, h_variance*t + w_variance), so

        I(X; Y) = h(Y) - E[ log(pi e (h_variance |X|^2 + w_variance)) ].

    h(Y) is estimated as the average of -log f_Y(Y_i) over n_outer exact
    output draws, with the mixture density f_Y evaluated by n_inner-node
    Gauss-Legendre quadrature over the 1-D magnitude law.  Both terms are
    paired per sample, so the reported standard error is the standard error
    of the full estimator.
    """
    if h_variance <= 0.0:
        raise ValueError(f"h_variance must be positive, got {h_variance}")
    if w_variance < 0.0:
        raise ValueError(f"w_variance must be nonnegative, got {w_variance}")
    if n_outer < 2:
        raise ValueError("need at least two outer samples")

    a, b = x2_law.log_min, x2_law.log_max
    if b > a:
        nodes, weights = np.polynomial.legendre.leggauss(n_inner)
        u = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        log_w = np.log(0.5 * weights)  # weights of the average over [a, b]
    else:
        u = np.array([a])
        log_w = np.array([0.0])
    s_nodes = h_variance * np.exp(u) + w_variance  # conditional variances at nodes
    log_s_nodes = np.log(s_nodes)

    workers = default_workers() if n_workers is None else n_workers
    shards = []
    for w, size in enumerate(_shard_sizes(n_outer, workers)):
        if size == 0:
            continue
        rng = substream(seed, w)
        contributions = []
        for start in range(0, size, _CHUNK):
            m = min(_CHUNK, size - start)
            u_draw = x2_law.sample_log_x2(rng, m)
            s_draw = h_variance * np.exp(u_draw) + w_variance
            y2 = s_draw * rng.exponential(size=m)  # |Y|^2 | X is exponential(mean s)
            # log f_Y(y) for a circularly-symmetric mixture of CN(0, s_j)
            log_fy = logsumexp(
                log_w[None, :] - math.log(math.pi) - log_s_nodes[None, :]
                - y2[:, None] / s_nodes[None, :],
                axis=1,
            )
            contributions.append(-log_fy - (math.log(math.pi) + 1.0 + np.log(s_draw)))
        shards.append(np.concatenate(contributions))
    return _combine_mean_sem(shards)


def mc_block_power(
    params: SchemeParams, n_samples: int, seed: int, n_workers: Optional[int] = None
) -> McEstimate:
    """Monte Carlo block-average power of the scheme (oracle for the closed form)."""
    workers = default_workers() if n_workers is None else n_workers
    shards = []
    for w, size in enumerate(_shard_sizes(n_samples, workers)):
        if size == 0:
            continue
        rng = substream(seed, w)
        total = np.zeros(size)
        for nu in range(1, params.tau + 1):
            total += np.exp(params.slot_law(nu).sample_log_x2(rng, size))
        shards.append(total / params.block_len)
    return _combine_mean_sem(shards)


def _scheme_inputs(params: SchemeParams, n: int, n_draws: int, rng: np.random.Generator) -> np.ndarray:
    """(n_draws, n) input matrix of IID scheme blocks truncated at length n."""
    x = np.zeros((n_draws, n), dtype=complex)
    block = params.block_len
    for start in range(0, n, block):
        for nu in range(1, params.tau + 1):
            t = start + params.num_taps + nu - 1  # 0-based time of slot nu
            if t >= n:
                break
            x[:, t] = params.slot_law(nu).sample_x(rng, n_draws)
    return x


def _slot_mean_powers(params: SchemeParams, n: int) -> np.ndarray:
    """Analytic E|X_k|^2 of the scheme at times 1..n."""
    powers = np.zeros(n)
    block = params.block_len
    for t in range(n):
        pos = t % block
        if pos >= params.num_taps:
            powers[t] = math.exp(params.slot_law(pos - params.num_taps + 1).log_mean_power)
    return powers


def verify_log_moment_bounds(
    config: ChannelConfig,
    scheme: Optional[SchemeParams],
    k: int,
    n_samples: int = 1_000_000,
    seed: int = 0,
    n_workers: Optional[int] = None,
) -> List[CheckReport]:
    """Audit the two output log-moment identities at time index ``k``.

    (a)  E[log|Y_k|^2]  <=  E[log(sigma^2 + sum_l alpha_l |X_{k-l}|^2)], checked
         from two independently seeded sample sets with a joint standard error;
    (b)  log E|Y_k|^2  ==  log(sigma^2 + sum_l alpha_l E|X_{k-l}|^2), checked
         against the analytic slot powers via the delta method.

    ``scheme=None`` audits the zero-input channel (pure noise).  Both checks
    use a 3-standard-error acceptance threshold and simulate the channel
    output through the real channel operator.
    """
    if k < 1:
        raise ValueError(f"time index must be >= 1, got {k}")
    if scheme is not None and scheme.num_taps != config.num_paths:
        raise ValueError("scheme guard length must match the channel memory")
    workers = default_workers() if n_workers is None else n_workers
    alphas = np.asarray(config.alphas)
    sigma2 = config.noise_variance
    taps = min(k, config.num_paths + 1)  # number of input symbols reaching Y_k

    def input_batch(rng: np.random.Generator, m: int) -> np.ndarray:
        if scheme is None:
            return np.zeros((m, k), dtype=complex)
        return _scheme_inputs(scheme, k, m, rng)

    def weighted_input_power(x: np.ndarray) -> np.ndarray:
        """sigma^2 + sum_{l=0}^{min(k-1,L)} alpha_l |x_{k-l}|^2 per draw."""
        window = np.abs(x[:, k - taps : k][:, ::-1]) ** 2  # column l is |x_{k-l}|^2
        return sigma2 + window @ alphas[:taps]

    # (a) LHS and RHS from disjoint seeds so their errors combine independently.
    lhs_vals, rhs_vals, y2_vals = [], [], []
    for w, size in enumerate(_shard_sizes(n_samples, workers)):
        if size == 0:
            continue
        for start in range(0, size, _CHUNK):
            m = min(_CHUNK, size - start)
            chunk_id = start // _CHUNK
            x = input_batch(substream(seed, 0, w, chunk_id), m)
            real = realize_many(config, k, m, seed=_mix(seed, 1, w, chunk_id))
            y_k = simulate(config, x, real)[:, k - 1]
            lhs_vals.append(np.log(np.abs(y_k) ** 2))
            y2_vals.append(np.abs(y_k) ** 2)
            x_rhs = input_batch(substream(seed, 2, w, chunk_id), m)
            rhs_vals.append(np.log(weighted_input_power(x_rhs)))

    lhs = _combine_mean_sem(lhs_vals)
    rhs = _combine_mean_sem(rhs_vals)
    joint = math.hypot(lhs.std_error, rhs.std_error)
    report_a = CheckReport(
        check="log_moment_upper",
        lhs=lhs.value,
        rhs=rhs.value,
        std_error=joint,
        passed=lhs.value <= rhs.value + 3.0 * joint,
        workers=workers,
    )

    second = _combine_mean_sem(y2_vals)
    if scheme is None:
        analytic = math.log(sigma2)
    else:
        powers = _slot_mean_powers(scheme, k)
        analytic = math.log(sigma2 + float(powers[k - taps : k][::-1] @ alphas[:taps]))
    log_mean = math.log(second.value)
    log_sem = second.std_error / second.value
    report_b = CheckReport(
        check="second_moment_identity",
        lhs=log_mean,
        rhs=analytic,
        std_error=log_sem,
        passed=abs(log_mean - analytic) <= 3.0 * log_sem,
        workers=workers,
    )
    return [report_a, report_b]


def _mix(seed: int, *key: int) -> int:
    """Stable derived master seed for components that take a seed, not a stream."""
    mixed = np.random.SeedSequence(seed, spawn_key=tuple(key)).generate_state(2)
    return int(mixed[0]) | (int(mixed[1]) << 32)
