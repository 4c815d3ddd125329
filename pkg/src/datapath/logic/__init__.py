"""Evaluators for walk logic, register logic and its positive nested fragment."""

from .errors import ResourceLimit, UnassignedVariable, PositionOutOfRange  # noqa: F401
