"""Almost periodic pseudodifferential calculus on trigonometric polynomials."""

from .kernels import BACKEND
from .scalars import EXACT, FLOAT, ExactScalar
from .trigpoly import Basis, NormParams, TrigPoly
from .symexpr import (ClassParams, DomainError, NotCollapsible, Sampler, SymbolExpr, bracket, const,
                      poly_symbol, trig, verify_class, xi_mono, xi_var)
from .operators import APFunction, apply_amplitude, apply_symbol, compose_direct
from .calculus import (CutoffFamily, FormalSum, amplitude_reduce, equivalence_check, parametrix,
                       parametrix_residual, residual_decay, symbol_product, transpose_symbol)
from .hypoell import (HypoellParams, PolySymbol, aphs_check, constant_strength_check, s_hypoelliptic_fit,
                      strength_sq, weaker_check)
from .regularity import CoeffData, frequency_condition_check, gevrey_fit
from .bohr import MeanSchedule, numerical_mean
from .counterexample import C0_estimate, growth_witness

__version__ = "0.1.0"
