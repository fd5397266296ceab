"""Python bindings for the S3 quantum double simulator."""

from ._core import (
    InputError,
    LeakageError,
    anyon_letters,
    census,
    charge_transfer_prob,
    fuse,
    inv,
    mc,
    mc_protocols,
    mul,
    quantum_dimension,
    ribbon_violations,
    run_circuit,
    sign_flip_success,
    verify,
)

__all__ = [
    "InputError",
    "LeakageError",
    "anyon_letters",
    "census",
    "charge_transfer_prob",
    "fuse",
    "inv",
    "mc",
    "mc_protocols",
    "mul",
    "quantum_dimension",
    "ribbon_violations",
    "run_circuit",
    "sign_flip_success",
    "verify",
]
