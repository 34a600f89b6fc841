"""Limit-cycle uniqueness and existence certificates for generalized Lienard systems."""

__version__ = "0.1.0"

from .exceptions import *  # noqa: F401,F403
from .expr import parse, to_string, differentiate, evaluate
from .poly import Polynomial, SignVerdict, sign_on_interval
from .system import GeneralSystem, StructuredSystem, PlanarSystem
from .transform import ContiFilippov, pushforward, psi_eval
from .dynamics import (Cycle, CycleFinder, Orbit, build_cycle, boundedness_probe, cycle_integral, find_cycles,
                       integrate, log_return_derivative, return_map)
from .conditions import HypothesisChecker, HypothesisReport, boundedness_construction, full_report
from .scan import SignGridScanner, sign_grid, zero_curve_components, annulus_positive_check
from .io import load_system, system_from_dict, system_to_dict
from . import gallery
