"""Exact finite-SNR capacity upper bound for the noncoherent multipath channel.

The bound per channel use, in nats, is

    U(snr) = -g + xi * (1 + log(1 + A*SNR) + Psi) + logGamma(xi) - xi*log(xi) + log(pi)

with ``A`` the total path variance, ``g = inf_l (h_l - alpha_l)`` over the
active taps, and the free parameter ``xi`` defaulting to
``1 / (1 + log(1 + A*SNR))``, which collapses the bracket so that

    U(snr) = 1 + xi*Psi + logGamma(xi) - xi*log(xi) + log(pi) - g.

``Psi`` collects the SNR-independent constants

    Psi = log(1/delta^2) + 2*eps(delta, eta) + (2/eta)*(2/e + log(pi*e)) - (2/eta)*g,

where ``eps`` is an injected nonnegative function of ``(delta, eta)``.  With
the default injection ``eps == 0`` the absolute level of the bound is not
certified (``constants_certified`` stays False in all outputs); every
pre-loglog statement is unaffected because ``Psi`` does not grow with SNR.

``logGamma`` is evaluated exactly (no small-argument asymptote), and every
formula consumes log-SNR in nats so that astronomically large SNR values
remain in range.  All operations are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import gammaln

from .channel import ChannelConfig, aggregate_gain, snr_of
from .fading import LOG_PI, LOG_PI_E, stats_of

TWO_OVER_E = 2.0 / math.e


def _zero_eps(delta: float, eta: float) -> float:
    return 0.0


@dataclass(frozen=True)
class ConstEps:
    """A constant injected eps(delta, eta); value-comparable unlike a lambda."""

    value: float

    def __call__(self, delta: float, eta: float) -> float:
        return self.value


@dataclass(frozen=True)
class BoundParams:
    """Free parameters of the upper bound.

    ``eps`` is injected rather than derived here; the default is the zero
    function, recorded by ``constants_certified = False``.  ``xi_override``
    replaces the closed-form default choice of ``xi`` when set.
    """

    delta: float = 1.0
    eta: float = 0.5
    eps: Callable[[float, float], float] = field(default=_zero_eps)
    xi_override: Optional[float] = None
    constants_certified: bool = False

    def __post_init__(self) -> None:
        if not (0.0 < self.delta <= 1.0):
            raise ValueError(f"delta must lie in (0, 1], got {self.delta}")
        if not (0.0 < self.eta < 1.0):
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")
        if self.eps(self.delta, self.eta) < 0.0:
            raise ValueError("eps(delta, eta) must be nonnegative")
        if self.xi_override is not None and not (self.xi_override > 0.0):
            raise ValueError(f"xi override must be positive, got {self.xi_override}")


@dataclass(frozen=True)
class ConverseStats:
    """Channel statistics the upper bound consumes."""

    inf_gap: float
    alpha_total: float
    mean_log_gain_0: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.inf_gap):
            raise ValueError("inf_gap must be finite (every active path needs a finite entropy rate)")
        if not (self.alpha_total > 0.0):
            raise ValueError("total path variance must be positive")

    @classmethod
    def from_config(cls, config: ChannelConfig) -> "ConverseStats":
        per_path = [stats_of(spec) for spec in config.path_specs]
        gaps = [s.entropy_rate - s.alpha for s in per_path if s.active]
        return cls(
            inf_gap=min(gaps),
            alpha_total=aggregate_gain(config),
            mean_log_gain_0=per_path[0].mean_log_gain,
        )


def log1p_alpha_snr(log_snr: float, alpha_total: float) -> float:
    """log(1 + alpha_total * SNR) from log-SNR, stable for any magnitude."""
    if alpha_total <= 0.0:
        raise ValueError(f"alpha_total must be positive, got {alpha_total}")
    return float(np.logaddexp(0.0, math.log(alpha_total) + log_snr))


def xi_default(log_snr: float, alpha_total: float) -> float:
    """The closed-form choice xi = 1 / (1 + log(1 + alpha_total * SNR))."""
    if not math.isfinite(log_snr):
        raise ValueError(f"log_snr must be finite, got {log_snr}")
    return 1.0 / (1.0 + log1p_alpha_snr(log_snr, alpha_total))


def psi(params: BoundParams, inf_gap: float) -> float:
    """The SNR-independent constant block of the bound."""
    return (
        -2.0 * math.log(params.delta)
        + 2.0 * params.eps(params.delta, params.eta)
        + (2.0 / params.eta) * (TWO_OVER_E + LOG_PI_E)
        - (2.0 / params.eta) * inf_gap
    )


def upper_bound(log_snr: float, stats: ConverseStats, params: BoundParams) -> float:
    """Capacity upper bound in nats per channel use at the given log-SNR."""
    xi = params.xi_override if params.xi_override is not None else xi_default(log_snr, stats.alpha_total)
    if xi <= 0.0:
        raise ValueError(f"xi must be positive, got {xi}")
    bracket = 1.0 + log1p_alpha_snr(log_snr, stats.alpha_total) + psi(params, stats.inf_gap)
    return (
        -stats.inf_gap
        + xi * bracket
        + float(gammaln(xi))
        - xi * math.log(xi)
        + LOG_PI
    )


def upsilon(
    config: ChannelConfig,
    per_symbol_powers: Sequence[float],
    params: BoundParams,
    stats: Optional[ConverseStats] = None,
) -> float:
    """The n-letter correction term for an explicit power allocation.

    Evaluates, for powers p_k = E|X_k|^2,

        (1 + (1/n) sum_k log(1 + sum_l alpha_l p_{k-l} / sigma^2) + Psi)
            / (1 + log(1 + alpha_total * SNR))  - inf_gap + log(pi),

    with alpha_l = 0 beyond the last tap (the inner sum truncates at k <= L
    exactly as the channel does).
    """
    powers = np.asarray(per_symbol_powers, dtype=float)
    if powers.ndim != 1 or powers.size < 1:
        raise ValueError("per-symbol powers must be a nonempty 1-D sequence")
    if np.any(powers < 0.0):
        raise ValueError("per-symbol powers must be nonnegative")
    if stats is None:
        stats = ConverseStats.from_config(config)
    n = powers.size
    weighted = np.convolve(powers, np.asarray(config.alphas))[:n]
    interior = float(np.mean(np.log1p(weighted / config.noise_variance)))
    denom = 1.0 + log1p_alpha_snr(snr_of(config), stats.alpha_total)
    return (1.0 + interior + psi(params, stats.inf_gap)) / denom - stats.inf_gap + LOG_PI


def jensen_cap(stats: ConverseStats, params: BoundParams) -> float:
    """Allocation-independent cap on ``upsilon``: 1 + Psi - inf_gap + log(pi)."""
    return 1.0 + psi(params, stats.inf_gap) - stats.inf_gap + LOG_PI


def optimize_xi(
    log_snr: float,
    stats: ConverseStats,
    params: BoundParams,
    lo: float = 1e-12,
    hi: float = 1.0,
    tol: float = 1e-12,
) -> tuple[float, float]:
    """Numerically minimize the bound over xi in (0, 1] by golden-section search.

    Off the default evaluation path; the closed-form xi is canonical.  The
    bound is convex in xi, so the search converges to the global minimum.
    """
    bracket = 1.0 + log1p_alpha_snr(log_snr, stats.alpha_total) + psi(params, stats.inf_gap)

    def value(xi: float) -> float:
        return -stats.inf_gap + xi * bracket + float(gammaln(xi)) - xi * math.log(xi) + LOG_PI

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = value(c), value(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = value(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = value(d)
    xi_star = (a + b) / 2.0
    return xi_star, value(xi_star)
