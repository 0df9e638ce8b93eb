"""Toffoli circuits with ancillary bits: semantics, normal forms, rewriting
and synthesis."""

from .circuit import (
    GCX, Circuit, Init, Swap, Term, compose, dagger, delta, expand_gcnot, identity,
    lower_to_generators, mk_bra0, mk_bra1, mk_cnot, mk_gcnot, mk_ket0, mk_ket1, mk_not,
    mk_swap, mk_tof, omega, restriction, tensor,
)
from .errors import (
    CapExceeded, IndexOutOfRange, NotIdempotent, NotPolynomialForm, ParseError,
    PatternMismatch, StaleMatch, TargetInControls, TofError, WidthMismatch,
)
from .fpinj import BitVec, Nowhere, PartialInjection, TotalPoint, classify_point, equivalent, evaluate, h0
from .poly import Polyform, Polynomial, anf_from_indicator, normalize_idempotent, restriction_polyform
from .synth import synth_partial_iso

__version__ = "0.1.0"
