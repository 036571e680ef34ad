"""Continued C-fraction interpolation of functions and integral functionals."""

from ._kernels import available_backends, set_backend
from .cicf import CIcf, evaluate as evaluate_cicf, fit_coefficients
from .expr import EvaluationError, ParseError, derive, eval_at, parse, unparse
from .fraction import (
    BreakdownError,
    FiniteFraction,
    FractionDerivativeInput,
    eval_backward,
    eval_forward,
    eval_with_derivative,
)
from .functional import DegeneracyWarning, Functional, NodeSystem, apply_F, continual_node, moment_and_dF
from .grid import GridFunction, PiecewiseGridFunction, integrate_range, sample_expression, tail_integral_table
from .iicf import (
    KernelSet,
    chain_limit_diagnostic,
    compute_kernels,
    evaluate,
    evaluate_at_node,
    reduce_to_cicf,
    tail_chain,
    tail_fraction,
    verify_interpolation,
)

__version__ = "0.1.0"
