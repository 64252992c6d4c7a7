"""Monte-Carlo simulator for hybrid V-band / E-band millimeter-wave HetNets."""

from .errors import CapabilityError, DomainError, ScenarioError, ValidationFailed
from .regulatory import Band
from .scenario import Scenario, load_scenario, parse_scenario
from .sweep import Mode, SweepConfig, run_sweep, run_trial

__version__ = "0.1.0"

__all__ = [
    "Band",
    "CapabilityError",
    "DomainError",
    "Mode",
    "Scenario",
    "ScenarioError",
    "SweepConfig",
    "ValidationFailed",
    "load_scenario",
    "parse_scenario",
    "run_sweep",
    "run_trial",
]
