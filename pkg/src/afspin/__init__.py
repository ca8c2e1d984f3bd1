"""Orientability and Spin structures of almost-flat manifolds from polycyclic presentations."""

from .catalog import emit_table, expected_verdict, instantiate_family
from .collector import consistency_check, normal_form
from .presentation import parse_presentation, serialize, validate_structure
from .series import adapted_series, holonomy_representation
from .spin import SpinReport, decide_spin

__all__ = [
    "adapted_series",
    "consistency_check",
    "decide_spin",
    "emit_table",
    "expected_verdict",
    "holonomy_representation",
    "instantiate_family",
    "normal_form",
    "parse_presentation",
    "serialize",
    "SpinReport",
    "validate_structure",
]
