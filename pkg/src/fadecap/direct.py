"""Zero-guarded block inputs with log-uniform magnitudes, and the rate they achieve.

The transmit scheme splits time into IID blocks of length L + tau: L guard
zeros (decoupling the block from earlier inputs) followed by tau independent
circularly-symmetric symbols whose log squared magnitude is uniform on a
per-slot interval.  The canonical slot schedule for transmit power P > 1 is

    log x2_max[v] = (v/tau) * log P,
    log x2_min[v] = ((v-1)/tau) * log P + log log P,      v = 1..tau,

which is admissible iff P^(1/tau) > log P; construction fails loudly when
the inequality is violated.  The per-slot mutual-information lower bound and
the resulting rate

    R(snr, tau) = tau/(L+tau) * [ log log(P^(1/tau) / log P) + Xi_P ]

are evaluated from log-SNR throughout (P = SNR * sigma^2), so the scheme can
be analyzed far beyond floating-point power ranges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.special import logsumexp

from .channel import ChannelConfig, aggregate_gain
from .fading import LOG_PI, LOG_PI_E, stats_of


@dataclass(frozen=True)
class LogUniformX2:
    """Law of a circularly-symmetric symbol with log|X|^2 ~ Uniform[log_min, log_max]."""

    log_min: float
    log_max: float

    def __post_init__(self) -> None:
        if not (self.log_min <= self.log_max):
            raise ValueError(f"need log_min <= log_max, got [{self.log_min}, {self.log_max}]")
        if not (math.isfinite(self.log_min) and math.isfinite(self.log_max)):
            raise ValueError("slot bounds must be finite")

    @property
    def spread(self) -> float:
        return self.log_max - self.log_min

    @property
    def mean_log_x2(self) -> float:
        return 0.5 * (self.log_min + self.log_max)

    @property
    def entropy_log_x2(self) -> float:
        """Differential entropy of log|X|^2; -inf for a degenerate slot."""
        return math.log(self.spread) if self.spread > 0.0 else -math.inf

    @property
    def entropy_x(self) -> float:
        """Differential entropy of the complex symbol X itself.

        For circularly-symmetric X:  h(X) = E[log|X|^2] + h(log|X|^2) + log(pi).
        """
        return self.mean_log_x2 + self.entropy_log_x2 + LOG_PI

    @property
    def log_mean_power(self) -> float:
        """log E|X|^2 for the exponentiated-uniform law, stable in log domain.

        E|X|^2 = (x2_max - x2_min) / log(x2_max / x2_min); the degenerate
        slot has E|X|^2 = x2_max.
        """
        a, b = self.log_min, self.log_max
        if b == a:
            return b
        return b + math.log(-math.expm1(a - b)) - math.log(b - a)

    def sample_log_x2(self, rng: np.random.Generator, size=None) -> np.ndarray:
        return rng.uniform(self.log_min, self.log_max, size=size)

    def sample_x(self, rng: np.random.Generator, size=None) -> np.ndarray:
        u = self.sample_log_x2(rng, size)
        phase = rng.uniform(0.0, 2.0 * math.pi, size=size)
        return np.exp(0.5 * u + 1j * phase)


@dataclass(frozen=True)
class SchemeParams:
    """A block scheme: tau slots behind L guard zeros, per-slot magnitude intervals."""

    tau: int
    log_power: float
    num_taps: int
    log_x2_min: Tuple[float, ...]
    log_x2_max: Tuple[float, ...]

    def __post_init__(self) -> None:
        if self.tau < 1:
            raise ValueError(f"tau must be >= 1, got {self.tau}")
        if self.num_taps < 0:
            raise ValueError(f"num_taps must be >= 0, got {self.num_taps}")
        if self.log_power <= 0.0:
            raise ValueError(f"the scheme requires P > 1, got log P = {self.log_power}")
        if len(self.log_x2_min) != self.tau or len(self.log_x2_max) != self.tau:
            raise ValueError("need one (min, max) pair per slot")
        for v, (a, b) in enumerate(zip(self.log_x2_min, self.log_x2_max), start=1):
            if not a < b:
                raise ValueError(f"slot {v} interval is empty: log bounds [{a}, {b}]")

    @property
    def block_len(self) -> int:
        return self.num_taps + self.tau

    def slot_law(self, nu: int) -> LogUniformX2:
        """Magnitude law of slot ``nu`` (1-based)."""
        if not 1 <= nu <= self.tau:
            raise ValueError(f"slot index must lie in 1..{self.tau}, got {nu}")
        return LogUniformX2(self.log_x2_min[nu - 1], self.log_x2_max[nu - 1])


def schedule_is_valid(log_power: float, tau: int) -> bool:
    """Whether the canonical schedule has nonempty slots: P^(1/tau) > log P."""
    return log_power > 0.0 and log_power / tau > math.log(log_power)


def build_scheme(tau: int, log_power: float, num_taps: int) -> SchemeParams:
    """The canonical slot schedule for (tau, P, L); fails if P^(1/tau) <= log P."""
    if tau < 1:
        raise ValueError(f"tau must be >= 1, got {tau}")
    if log_power <= 0.0:
        raise ValueError(f"the scheme requires P > 1, got log P = {log_power}")
    if not schedule_is_valid(log_power, tau):
        raise ValueError(
            f"schedule inversion: P^(1/tau) <= log P "
            f"(log P / tau = {log_power / tau:.6g} <= log log P = {math.log(log_power):.6g}); "
            f"lower tau or raise P"
        )
    log_log_p = math.log(log_power)
    mins = tuple((v - 1) / tau * log_power + log_log_p for v in range(1, tau + 1))
    maxs = tuple(v / tau * log_power for v in range(1, tau + 1))
    return SchemeParams(
        tau=tau, log_power=log_power, num_taps=num_taps, log_x2_min=mins, log_x2_max=maxs
    )


def sample_block(params: SchemeParams, rng: np.random.Generator) -> np.ndarray:
    """One block of length L + tau: L exact zeros, then the tau random slots."""
    block = np.zeros(params.block_len, dtype=complex)
    for nu in range(1, params.tau + 1):
        block[params.num_taps + nu - 1] = params.slot_law(nu).sample_x(rng)
    return block


def log_block_average_power(params: SchemeParams) -> float:
    """log of the block-average power (1/(L+tau)) sum_v E|X_v|^2."""
    slot_logs = [params.slot_law(nu).log_mean_power for nu in range(1, params.tau + 1)]
    return float(logsumexp(slot_logs)) - math.log(params.block_len)


def block_average_power(params: SchemeParams) -> float:
    """Block-average power in linear units (may overflow for astronomical P)."""
    return math.exp(log_block_average_power(params))


@dataclass(frozen=True)
class DirectStats:
    """Channel statistics the achievable-rate bound consumes."""

    mean_log_gain_0: float
    alpha_0: float
    alpha_total: float
    sigma2: float
    num_taps: int

    def __post_init__(self) -> None:
        if not (self.alpha_0 > 0.0):
            raise ValueError("the delay-0 path must carry energy (alpha_0 > 0)")
        if not (self.sigma2 > 0.0):
            raise ValueError("noise variance must be positive")
        if self.alpha_total < self.alpha_0:
            raise ValueError("total variance cannot be smaller than alpha_0")
        if not math.isfinite(self.mean_log_gain_0):
            raise ValueError("mean log gain of the delay-0 path must be finite")

    @classmethod
    def from_config(cls, config: ChannelConfig) -> "DirectStats":
        stats0 = stats_of(config.path_specs[0])
        return cls(
            mean_log_gain_0=stats0.mean_log_gain,
            alpha_0=stats0.alpha,
            alpha_total=aggregate_gain(config),
            sigma2=config.noise_variance,
            num_taps=config.num_paths,
        )


def lemma_mi_lower_bound(
    h_x: float,
    mean_log_x2: float,
    mean_log_h2: float,
    sigma_h: float,
    sigma_w: float,
    x2_law: LogUniformX2,
) -> float:
    """Mutual-information lower bound for the scalar model Y = H*X + W.

    Returns  h(X) - E[log|X|^2] + E[log|H|^2] - E[log(pi e (sigma_h + sigma_w/|X|)^2)],
    valid whenever X is independent of (H, W), X -- H -- W is Markov, and all
    second moments are finite.  The last expectation is a 1-D deterministic
    quadrature over the log-uniform magnitude law (no estimator noise on the
    bound side).
    """
    if sigma_h <= 0.0:
        raise ValueError(f"sigma_h must be positive, got {sigma_h}")
    if sigma_w < 0.0:
        raise ValueError(f"sigma_w must be nonnegative, got {sigma_w}")

    def integrand(u: float) -> float:
        return LOG_PI_E + 2.0 * math.log(sigma_h + sigma_w * math.exp(-0.5 * u))

    a, b = x2_law.log_min, x2_law.log_max
    if b == a:
        last_term = integrand(a)
    else:
        integral, _ = quad(integrand, a, b, epsabs=1e-12, epsrel=1e-12, limit=200)
        last_term = integral / (b - a)
    return h_x - mean_log_x2 + mean_log_h2 - last_term


def log_log_ratio(log_power: float, tau: int) -> float:
    """log log(P^(1/tau) / log P), computed stably from log P."""
    inner = log_power / tau - math.log(log_power)
    if inner <= 0.0:
        raise ValueError(
            f"schedule inversion: P^(1/tau) <= log P "
            f"(log P / tau = {log_power / tau:.6g} <= log log P = {math.log(log_power):.6g})"
        )
    return math.log(inner)


def xi_p(log_power: float, stats: DirectStats) -> float:
    """The SNR-dependent constant of the rate bound.

    Xi_P = E[log|H^(0)|^2] - 1 - 2 log( sqrt(alpha_0)
             + sqrt((alpha_total + sigma^2) / log P) ).
    """
    if log_power <= 0.0:
        raise ValueError(f"requires P > 1, got log P = {log_power}")
    root = math.sqrt((stats.alpha_total + stats.sigma2) / log_power)
    return stats.mean_log_gain_0 - 1.0 - 2.0 * math.log(math.sqrt(stats.alpha_0) + root)


def per_symbol_bound(nu: int, params: SchemeParams, stats: DirectStats) -> float:
    """Slot-uniform per-symbol mutual-information lower bound, in nats.

    The value does not depend on the slot index nu nor on the block index;
    ``sharp_slot_bound`` exposes the slot-dependent sharpening for
    diagnostics.
    """
    if not 1 <= nu <= params.tau:
        raise ValueError(f"slot index must lie in 1..{params.tau}, got {nu}")
    return log_log_ratio(params.log_power, params.tau) + xi_p(params.log_power, stats)


def sharp_slot_bound(nu: int, params: SchemeParams, stats: DirectStats) -> float:
    """Slot-dependent per-symbol bound (sharper than ``per_symbol_bound``).

    Keeps the residual noise term sigma^2 / (P^((nu-1)/tau) log P) instead of
    relaxing it to sigma^2 / log P.
    """
    if not 1 <= nu <= params.tau:
        raise ValueError(f"slot index must lie in 1..{params.tau}, got {nu}")
    log_p = params.log_power
    residual = stats.sigma2 * math.exp(-(nu - 1) / params.tau * log_p) / log_p
    root = math.sqrt(stats.alpha_total / log_p + residual)
    return (
        log_log_ratio(log_p, params.tau)
        + stats.mean_log_gain_0
        - 1.0
        - 2.0 * math.log(math.sqrt(stats.alpha_0) + root)
    )


def lower_bound(log_snr: float, tau: int, stats: DirectStats) -> float:
    """Achievable rate of the scheme, nats per channel use.

    R = tau/(L+tau) * [ log log(P^(1/tau)/log P) + Xi_P ]  with P = SNR * sigma^2.
    Raises when P <= 1 or the slot schedule is inadmissible for this (P, tau);
    callers should then lower tau.
    """
    log_power = log_snr + math.log(stats.sigma2)
    if log_power <= 0.0:
        raise ValueError(f"the scheme requires P > 1, got log P = {log_power}")
    weight = tau / (stats.num_taps + tau)
    return weight * (log_log_ratio(log_power, tau) + xi_p(log_power, stats))


def optimize_tau(
    log_snr: float, stats: DirectStats, tau_max: int
) -> Tuple[int, float]:
    """Exhaustive search of the rate bound over tau = 1..tau_max.

    Returns the maximizing (tau, rate) among schedule-admissible tau, ties
    broken toward the smaller tau.  Raises if no tau is admissible (P too
    small).
    """
    if tau_max < 1:
        raise ValueError(f"tau_max must be >= 1, got {tau_max}")
    log_power = log_snr + math.log(stats.sigma2)
    best: Optional[Tuple[int, float]] = None
    for tau in range(1, tau_max + 1):
        if not schedule_is_valid(log_power, tau):
            break  # admissibility is monotone in tau: larger tau stays inadmissible
        value = lower_bound(log_snr, tau, stats)
        if best is None or value > best[1]:
            best = (tau, value)
    if best is None:
        raise ValueError(
            f"no admissible block length up to tau_max = {tau_max}: "
            f"P^(1/tau) <= log P for every tau (log P = {log_power:.6g})"
        )
    return best
