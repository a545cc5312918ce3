"""Numerics for one-dimensional G-normal distributions."""

from ._gnormal import (
    GFunction,
    GNormalError,
    TestFunction,
    TheoremReport,
    beta_of,
    candidate_normal,
    check_eigen_decay,
    check_separation,
    classical_expect,
    convolve,
    eigen_residual,
    expect,
    phi,
    phi_d1,
    phi_d2,
    separation_gap,
    sigma_of,
    solve,
    verify_theorem1,
    verify_theorem2,
)

__all__ = [
    "GFunction",
    "GNormalError",
    "TestFunction",
    "TheoremReport",
    "beta_of",
    "candidate_normal",
    "check_eigen_decay",
    "check_separation",
    "classical_expect",
    "convolve",
    "eigen_residual",
    "expect",
    "phi",
    "phi_d1",
    "phi_d2",
    "separation_gap",
    "sigma_of",
    "solve",
    "verify_theorem1",
    "verify_theorem2",
]
