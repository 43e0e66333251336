"""Multiparticle entanglement swapping: a dense state-vector simulator and a
symbolic cat-state calculus that are checked against each other."""

__version__ = "0.1.0"

from .catalg import (
    CatLabel,
    SwapScenario,
    cat_state,
    enumerate_cat_basis,
    identify_cat,
    swap_predict,
    swap_simulate,
)
from .qstate import PauliString, StateVector, new_basis_state

__all__ = [
    "CatLabel",
    "PauliString",
    "StateVector",
    "SwapScenario",
    "cat_state",
    "enumerate_cat_basis",
    "identify_cat",
    "new_basis_state",
    "swap_predict",
    "swap_simulate",
]
