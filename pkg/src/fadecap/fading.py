"""Stationary complex path-gain processes and their closed-form statistics.

Three families of zero-mean, circularly-symmetric gain processes are
supported:

* ``IidGaussian(alpha)``    -- white complex Gaussian, variance ``alpha``;
* ``Ar1Gaussian(alpha, a)`` -- first-order Gauss-Markov recursion
  ``H[k] = a * H[k-1] + sqrt(alpha * (1 - |a|^2)) * U[k]`` with ``|a| < 1``
  and IID standard circularly-symmetric innovations ``U[k]``, initialised
  from the stationary marginal ``CN(0, alpha)``;
* ``ZeroPath()``            -- the identically-zero tap.

Each non-zero family has a closed-form variance, differential entropy rate
and mean log-magnitude, all in nats.  ``entropy_rate_szego`` provides an
independent quadrature oracle for the entropy rate from the spectral
density (entropy rate of a stationary complex Gaussian process equals
``log(pi*e)`` plus the mean log spectral density).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.signal import lfilter

EULER_GAMMA = 0.5772156649015329
LOG_PI = math.log(math.pi)
LOG_PI_E = LOG_PI + 1.0


@dataclass(frozen=True)
class IidGaussian:
    """White circularly-symmetric complex Gaussian gains with variance ``alpha``."""

    alpha: float

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < math.inf):
            raise ValueError(f"IidGaussian requires 0 < alpha < inf, got {self.alpha}")


@dataclass(frozen=True)
class Ar1Gaussian:
    """Stationary complex Gauss-Markov gains: variance ``alpha``, pole ``a``."""

    alpha: float
    a: complex

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < math.inf):
            raise ValueError(f"Ar1Gaussian requires 0 < alpha < inf, got {self.alpha}")
        if not abs(self.a) < 1.0:
            raise ValueError(f"Ar1Gaussian requires |a| < 1 for stationarity, got |a| = {abs(self.a)}")


@dataclass(frozen=True)
class ZeroPath:
    """The identically-zero tap (no scattered energy on this delay)."""

    alpha = 0.0


PathGainSpec = Union[IidGaussian, Ar1Gaussian, ZeroPath]


@dataclass(frozen=True)
class PathStats:
    """Closed-form per-path statistics, in nats.

    ``entropy_rate`` and ``mean_log_gain`` are ``None`` for the zero tap,
    which carries no statistics and is excluded from every infimum over
    active paths.
    """

    alpha: float
    entropy_rate: Optional[float]
    mean_log_gain: Optional[float]

    @property
    def active(self) -> bool:
        return self.alpha > 0.0


def stats_of(spec: PathGainSpec) -> PathStats:
    """Closed-form variance, entropy rate and mean log squared magnitude.

    The marginal of every non-zero family is ``CN(0, alpha)``, so
    ``E[log|H|^2] = log(alpha) - gamma`` (Euler's constant enters through
    the log of a unit-mean exponential).  Entropy rates: ``log(pi*e*alpha)``
    for the white family, ``log(pi*e*alpha*(1-|a|^2))`` for the Gauss-Markov
    family (the innovation variance is the one-step prediction error).
    """
    if isinstance(spec, ZeroPath):
        return PathStats(alpha=0.0, entropy_rate=None, mean_log_gain=None)
    if isinstance(spec, IidGaussian):
        return PathStats(
            alpha=spec.alpha,
            entropy_rate=LOG_PI_E + math.log(spec.alpha),
            mean_log_gain=math.log(spec.alpha) - EULER_GAMMA,
        )
    if isinstance(spec, Ar1Gaussian):
        return PathStats(
            alpha=spec.alpha,
            entropy_rate=LOG_PI_E + math.log(spec.alpha) + math.log1p(-abs(spec.a) ** 2),
            mean_log_gain=math.log(spec.alpha) - EULER_GAMMA,
        )
    raise TypeError(f"not a path-gain spec: {spec!r}")


def complex_normal(rng: np.random.Generator, shape, variance: float) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with E|Z|^2 = variance."""
    z = rng.standard_normal(size=(2,) + tuple(np.atleast_1d(shape)))
    return math.sqrt(variance / 2.0) * (z[0] + 1j * z[1])


def sample_paths(spec: PathGainSpec, n: int, n_paths: int, rng: np.random.Generator) -> np.ndarray:
    """``n_paths`` independent stationary sample paths of length ``n``, shape (n_paths, n)."""
    if n < 1:
        raise ValueError(f"path length must be >= 1, got {n}")
    if n_paths < 1:
        raise ValueError(f"n_paths must be >= 1, got {n_paths}")
    if isinstance(spec, ZeroPath):
        return np.zeros((n_paths, n), dtype=complex)
    if isinstance(spec, IidGaussian):
        return complex_normal(rng, (n_paths, n), spec.alpha)
    if isinstance(spec, Ar1Gaussian):
        out = np.empty((n_paths, n), dtype=complex)
        out[:, 0] = complex_normal(rng, n_paths, spec.alpha)
        if n > 1:
            innovation_var = spec.alpha * (1.0 - abs(spec.a) ** 2)
            innovations = complex_normal(rng, (n_paths, n - 1), innovation_var)
            state = (spec.a * out[:, 0])[:, None]
            out[:, 1:], _ = lfilter([1.0], [1.0, -spec.a], innovations, axis=1, zi=state)
        return out
    raise TypeError(f"not a path-gain spec: {spec!r}")


def sample_path(spec: PathGainSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """One stationary sample path of length ``n`` (deterministic given the stream)."""
    return sample_paths(spec, n, 1, rng)[0]


def spectral_density(spec: PathGainSpec) -> Callable[[np.ndarray], np.ndarray]:
    """Power spectral density on [-pi, pi] of a non-zero gain process."""
    if isinstance(spec, IidGaussian):
        alpha = spec.alpha
        return lambda lam: np.full_like(np.asarray(lam, dtype=float), alpha)
    if isinstance(spec, Ar1Gaussian):
        return ar1_spectral_density(spec.alpha, spec.a)
    raise ValueError(f"no spectral density for {spec!r}")


def ar1_spectral_density(alpha: float, a: complex) -> Callable[[np.ndarray], np.ndarray]:
    """Spectral density ``alpha (1-|a|^2) / |1 - a e^{-i lam}|^2`` of the AR(1) family."""
    if not abs(a) < 1.0:
        raise ValueError(f"requires |a| < 1, got {abs(a)}")
    top = alpha * (1.0 - abs(a) ** 2)

    def density(lam: np.ndarray) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        return top / np.abs(1.0 - a * np.exp(-1j * lam)) ** 2

    return density


def entropy_rate_szego(
    spectral_density: Callable[[np.ndarray], np.ndarray], grid_points: int
) -> float:
    """Entropy rate ``log(pi e) + (1/2 pi) int log S`` by periodic composite quadrature.

    The integrand is 2*pi-periodic, so the equal-weight rule on a uniform
    grid converges spectrally fast for smooth densities.  Raises if the
    density is not strictly positive and finite on the grid.
    """
    if grid_points < 2:
        raise ValueError(f"grid_points must be >= 2, got {grid_points}")
    lam = -math.pi + 2.0 * math.pi * np.arange(grid_points) / grid_points
    values = np.asarray(spectral_density(lam), dtype=float)
    if values.shape != lam.shape:
        raise ValueError("spectral density must evaluate elementwise on the grid")
    if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
        raise ValueError("spectral density must be strictly positive and finite on the grid")
    return LOG_PI_E + float(np.mean(np.log(values)))


def path_spec_to_dict(spec: PathGainSpec) -> dict:
    """Serialize to the config-schema form ``{kind, alpha, a_re, a_im}``."""
    if isinstance(spec, ZeroPath):
        return {"kind": "zero"}
    if isinstance(spec, IidGaussian):
        return {"kind": "iid", "alpha": spec.alpha}
    if isinstance(spec, Ar1Gaussian):
        return {
            "kind": "ar1",
            "alpha": spec.alpha,
            "a_re": spec.a.real,
            "a_im": spec.a.imag,
        }
    raise TypeError(f"not a path-gain spec: {spec!r}")


def path_spec_from_dict(data: dict) -> PathGainSpec:
    """Parse the config-schema form; unknown kinds and keys are errors."""
    if not isinstance(data, dict) or "kind" not in data:
        raise ValueError(f"path spec must be an object with a 'kind' field, got {data!r}")
    kind = data["kind"]
    if kind == "zero":
        _reject_unknown_keys(data, {"kind"})
        return ZeroPath()
    if kind == "iid":
        _reject_unknown_keys(data, {"kind", "alpha"})
        return IidGaussian(alpha=float(data["alpha"]))
    if kind == "ar1":
        _reject_unknown_keys(data, {"kind", "alpha", "a_re", "a_im"})
        a = complex(float(data.get("a_re", 0.0)), float(data.get("a_im", 0.0)))
        return Ar1Gaussian(alpha=float(data["alpha"]), a=a)
    raise ValueError(f"unknown path kind {kind!r} (expected 'iid', 'ar1' or 'zero')")


def _reject_unknown_keys(data: dict, allowed: set) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown keys {sorted(unknown)} (allowed: {sorted(allowed)})")
