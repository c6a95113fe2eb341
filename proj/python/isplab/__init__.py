"""Instruction stream processing laboratory: python interface."""

from _isplab import (  # noqa: F401
    ThreadSpec,
    check,
    compose_json,
    explore,
    extract_json,
    simulate,
    sweep_csv,
    validate,
)

__all__ = [
    "ThreadSpec",
    "check",
    "compose_json",
    "explore",
    "extract_json",
    "simulate",
    "sweep_csv",
    "validate",
]
