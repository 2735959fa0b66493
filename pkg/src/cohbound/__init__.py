"""Measurable bounds on quantum coherence from two projective measurements."""
from .bounds import BoundInterval, bound, bound_all, bound_from_state, lower_bound, upper_bound
from .errors import CoherenceError
from .oracles import QuantifierKind, exact_value
from .statistics import StatisticsTriple, measurement_statistics

__version__ = "0.1.0"
