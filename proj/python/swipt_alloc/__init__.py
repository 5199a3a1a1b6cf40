"""Energy-efficiency resource allocation for OFDMA downlinks with
power-splitting receivers. Thin wrapper over the C++ core."""

from ._core import (
    SystemConfig,
    convergence_trace,
    dbm_to_watt,
    default_config,
    desk_config,
    load_config,
    run_cli,
    run_point,
    run_sweep,
    solve,
    validate,
    watt_to_dbm,
)

__all__ = [
    "SystemConfig",
    "convergence_trace",
    "dbm_to_watt",
    "default_config",
    "desk_config",
    "load_config",
    "run_cli",
    "run_point",
    "run_sweep",
    "solve",
    "validate",
    "watt_to_dbm",
]
