"""Photodetachment amplitudes in few-cycle pulses."""

from ._core import (
    AmplitudeEngine,
    BoundState,
    ConfigError,
    DomainError,
    Error,
    ModelError,
    MomentumTables,
    NumericError,
    PotentialParams,
    PulseParams,
    PulseTables,
    QuadratureSpec,
    RunConfig,
    SfaVariant,
    SolverConfig,
    check_gauge,
    echo_config,
    electric_field,
    intensity_fwhm,
    load_config,
    omega_from_period_as,
    omega_from_wavelength_nm,
    parse_config,
    potential,
    run,
    solve_bound_state,
    vector_potential,
)

__all__ = [name for name in dir() if not name.startswith("_")]
