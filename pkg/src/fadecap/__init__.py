"""Capacity bounds and Monte Carlo oracles for noncoherent multipath fading channels.

The channel has a finite number of delayed paths with stationary random
gains unknown to both ends of the link; at high SNR its capacity grows like
log log SNR.  This package evaluates an exact finite-SNR upper bound on
capacity and the rate achieved by a zero-guarded block scheme, audits both
against independent Monte Carlo oracles, and sweeps them over SNR grids of
essentially unbounded dynamic range (everything consumes log-SNR in nats).
"""

__version__ = "0.1.0"

from .channel import (
    ChannelConfig,
    ChannelRealization,
    aggregate_gain,
    average_power,
    realize,
    realize_many,
    simulate,
    snr_of,
)
from .converse import (
    BoundParams,
    ConstEps,
    ConverseStats,
    jensen_cap,
    optimize_xi,
    psi,
    upper_bound,
    upsilon,
    xi_default,
)
from .direct import (
    DirectStats,
    LogUniformX2,
    SchemeParams,
    block_average_power,
    build_scheme,
    lemma_mi_lower_bound,
    log_block_average_power,
    lower_bound,
    optimize_tau,
    per_symbol_bound,
    sample_block,
    schedule_is_valid,
    sharp_slot_bound,
    xi_p,
)
from .fading import (
    EULER_GAMMA,
    Ar1Gaussian,
    IidGaussian,
    PathStats,
    ZeroPath,
    ar1_spectral_density,
    entropy_rate_szego,
    sample_path,
    sample_paths,
    stats_of,
)
from .oracle import (
    CheckReport,
    McEstimate,
    mc_block_power,
    mc_log_gain,
    mi_scalar_gaussian,
    verify_log_moment_bounds,
)
from .streams import substream
