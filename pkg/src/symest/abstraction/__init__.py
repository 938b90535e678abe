"""Symbolic abstraction of sampled ODE flows on a grid."""

from .expr import BinOp, Call, Neg, Num, Var, VectorField, evaluate, parse_expression, parse_field, to_source
from .grid import GridSpec, abstract_grid, abstract_grid_counted, integrate

__all__ = [
    "BinOp", "Call", "Neg", "Num", "Var", "VectorField", "evaluate", "parse_expression", "parse_field",
    "to_source", "GridSpec", "abstract_grid", "abstract_grid_counted", "integrate",
]
