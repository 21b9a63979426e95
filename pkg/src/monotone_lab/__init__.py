"""Partial-norm entanglement monotones: pure-state measures, convex roofs and monogamy checks."""
from monotone_lab.exceptions import CapabilityError, ValidationError
from monotone_lab.measures import MeasureId, ReducedFunctionId, evaluate, pure_value, reduced_function
from monotone_lab.roof import RoofOptions, RoofResult, convex_roof, roof_value, schmidt_number
from monotone_lab.states import DensityMatrix, PureState, bipartition, partial_trace, partial_transpose

__version__ = "0.1.0"

__all__ = [
    "CapabilityError",
    "DensityMatrix",
    "MeasureId",
    "PureState",
    "ReducedFunctionId",
    "RoofOptions",
    "RoofResult",
    "ValidationError",
    "bipartition",
    "convex_roof",
    "evaluate",
    "partial_trace",
    "partial_transpose",
    "pure_value",
    "reduced_function",
    "roof_value",
    "schmidt_number",
]
