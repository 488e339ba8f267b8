"""Python access to the dmkp_lab solver.

Fields are numpy arrays of physical samples with shape (ny, nx) on the
periodic box [0, lx) x [0, ly).
"""

from ._core import (
    ConfigError,
    DissipationKind,
    Instability,
    ModelParams,
    NonConvergence,
    NumericalError,
    apply_semigroup,
    bourgain_norm_free_wave,
    dispersion,
    dissipation,
    dissipation_gap,
    energy_residuals,
    iterate_norm,
    kernel,
    l2_norm,
    lambda_symbol,
    phi_norm,
    picard,
    preset,
    random_field,
    read_fld1,
    resonance,
    run_cli,
    scan,
    simulate,
    sobolev_norm,
    time_schedule,
    write_fld1,
)

__all__ = [name for name in dir() if not name.startswith("_")]
