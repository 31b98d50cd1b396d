"""Discrete-time multipath fading channel with additive Gaussian noise.

The channel output at time k (1-based) for inputs x_1..x_n is

    Y_k = sum_{l=0}^{min(k-1, L)} H_k^(l) * x_{k-l} + Z_k,

where the L+1 path-gain processes are mutually independent stationary
processes (uncorrelated scattering), jointly independent of the IID
``CN(0, sigma^2)`` noise, and independent of the input.  The sum is
truncated for k <= L: no input before time 1 exists.

Transmit power is carried as ``log_power`` (natural log of P) end to end,
so SNR values far beyond direct floating-point range stay representable;
``snr_of`` returns ``log(P) - log(sigma^2)`` in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .fading import PathGainSpec, complex_normal, sample_paths
from .streams import substream


@dataclass(frozen=True)
class ChannelConfig:
    """A channel instance: L+1 path specs, noise variance and log transmit power."""

    path_specs: Tuple[PathGainSpec, ...]
    noise_variance: float
    log_power: float

    def __post_init__(self) -> None:
        if len(self.path_specs) < 1:
            raise ValueError("need at least the delay-0 path")
        object.__setattr__(self, "path_specs", tuple(self.path_specs))
        if self.path_specs[0].alpha <= 0.0:
            raise ValueError("the delay-0 path must carry energy (alpha_0 > 0)")
        if not (0.0 < self.noise_variance < math.inf):
            raise ValueError(f"noise variance must be positive and finite, got {self.noise_variance}")
        if not math.isfinite(self.log_power):
            raise ValueError(f"log_power must be finite, got {self.log_power}")

    @property
    def num_paths(self) -> int:
        """L: number of delayed paths (the channel has L+1 taps)."""
        return len(self.path_specs) - 1

    @property
    def alphas(self) -> Tuple[float, ...]:
        return tuple(spec.alpha for spec in self.path_specs)

    @property
    def active_set(self) -> Tuple[int, ...]:
        """Indices of taps with positive variance; nonempty since alpha_0 > 0."""
        return tuple(i for i, a in enumerate(self.alphas) if a > 0.0)


def snr_of(config: ChannelConfig) -> float:
    """log SNR = log P - log sigma^2, in nats."""
    return config.log_power - math.log(config.noise_variance)


def aggregate_gain(config: ChannelConfig) -> float:
    """Total path variance, sum of alpha_l over all L+1 taps."""
    return float(sum(config.alphas))


@dataclass(frozen=True)
class ChannelRealization:
    """One (or a batch of) joint draws of all path gains and the noise.

    ``gains`` has shape ``(..., L+1, n)`` and ``noise`` shape ``(..., n)``;
    a leading batch dimension holds independent realizations.  Instances are
    immutable after construction.
    """

    gains: np.ndarray
    noise: np.ndarray

    def __post_init__(self) -> None:
        if self.gains.ndim < 2:
            raise ValueError("gains must have shape (..., L+1, n)")
        if self.gains.shape[:-2] + self.gains.shape[-1:] != self.noise.shape:
            raise ValueError(
                f"gains shape {self.gains.shape} inconsistent with noise shape {self.noise.shape}"
            )

    @property
    def n(self) -> int:
        return self.gains.shape[-1]

    @property
    def num_paths(self) -> int:
        return self.gains.shape[-2] - 1


def realize(config: ChannelConfig, n: int, seed: int) -> ChannelRealization:
    """Draw one realization of length ``n`` from independent per-path streams."""
    gains = np.empty((config.num_paths + 1, n), dtype=complex)
    for ell, spec in enumerate(config.path_specs):
        gains[ell] = sample_paths(spec, n, 1, substream(seed, 0, ell))[0]
    noise = complex_normal(substream(seed, 1), n, config.noise_variance)
    return ChannelRealization(gains=gains, noise=noise)


def realize_many(config: ChannelConfig, n: int, n_samples: int, seed: int) -> ChannelRealization:
    """Batch of ``n_samples`` independent realizations, gains shape (n_samples, L+1, n)."""
    gains = np.empty((n_samples, config.num_paths + 1, n), dtype=complex)
    for ell, spec in enumerate(config.path_specs):
        gains[:, ell, :] = sample_paths(spec, n, n_samples, substream(seed, 0, ell))
    noise = complex_normal(substream(seed, 1), (n_samples, n), config.noise_variance)
    return ChannelRealization(gains=gains, noise=noise)


def simulate(config: ChannelConfig, x, realization: ChannelRealization) -> np.ndarray:
    """Channel output for a deterministic input sequence, exactly per the model.

    ``x`` may carry leading batch dimensions matching (or broadcasting
    against) the realization.  The truncated sum for k <= L is realized by
    starting tap l at output index l; no fictitious pre-history is touched.
    Pure function: safe for concurrent use.
    """
    x = np.asarray(x, dtype=complex)
    n = realization.n
    if x.shape[-1] != n:
        raise ValueError(f"input length {x.shape[-1]} != realization length {n}")
    if realization.num_paths != config.num_paths:
        raise ValueError(
            f"realization has {realization.num_paths} delayed paths, config has {config.num_paths}"
        )
    out_shape = np.broadcast_shapes(x.shape, realization.noise.shape)
    y = np.zeros(out_shape, dtype=complex)
    y += realization.noise
    for ell in range(config.num_paths + 1):
        if ell >= n:
            break
        y[..., ell:] = y[..., ell:] + realization.gains[..., ell, ell:] * x[..., : n - ell]
    return y


def average_power(x) -> float:
    """Time-average power (1/n) sum_k E|X_k|^2 of a sequence or sample ensemble.

    For a 1-D deterministic sequence this is the plain time average; leading
    dimensions of a sample ensemble are averaged as the expectation.
    """
    x = np.asarray(x)
    if x.shape[-1] < 1:
        raise ValueError("need at least one symbol")
    return float(np.mean(np.abs(x) ** 2))


def config_to_dict(config: ChannelConfig) -> dict:
    from .fading import path_spec_to_dict

    return {
        "paths": [path_spec_to_dict(spec) for spec in config.path_specs],
        "noise_variance": config.noise_variance,
        "log10_power": config.log_power / math.log(10.0),
    }


def config_from_dict(data: dict) -> ChannelConfig:
    from .fading import _reject_unknown_keys, path_spec_from_dict

    if not isinstance(data, dict):
        raise ValueError(f"channel config must be an object, got {data!r}")
    _reject_unknown_keys(data, {"paths", "noise_variance", "log10_power"})
    paths = data.get("paths")
    if not isinstance(paths, list) or not paths:
        raise ValueError("channel config needs a nonempty 'paths' list")
    return ChannelConfig(
        path_specs=tuple(path_spec_from_dict(p) for p in paths),
        noise_variance=float(data["noise_variance"]),
        log_power=float(data["log10_power"]) * math.log(10.0),
    )
