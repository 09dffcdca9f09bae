"""Potential recovery from Herglotz-wave pairings (C++ core via pybind11)."""

from ._potrec import (  # noqa: F401
    Error,
    Grid,
    all_norms,
    apply_pv,
    b_norm,
    b_star_norm,
    config_hash,
    fourier_at,
    gamma_modulus,
    herglotz_wave,
    l2_norm,
    potential,
    propagate,
    read_field,
    recover_mode,
    run_criterion,
    solve_correction,
    triple_norm,
    write_field,
)

__version__ = "0.1.0"
