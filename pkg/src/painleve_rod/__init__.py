"""Rigid rod with one endpoint on a rough horizontal line.

Two contact models side by side: the Coulomb-friction formulation, whose
sliding equations lose existence or uniqueness at large friction
coefficients, and an impulsive reformulation in which friction is a kinetic
constraint reacting through velocity jumps, which keeps the evolution
single-valued for every initial state.
"""

from . import classical, cli, errors, geometry, impact, simulator
from .geometry import (Config, Decomposition, Params, State, VerticalVector,
                       contact_normal, contact_point_velocity,
                       contact_residual, contact_state, decompose,
                       decompose_s, friction_normal, friction_residual,
                       inner, push_pull_indicator, tangent_contact_state)
from .impact import (ImpactClass, ImpactOutcome, ImpactTag,
                     ImpulseCoefficients, Law, LawParams, classify,
                     is_outgoing, kinetic_energy)
from .classical import (ContactResolution, ResolutionKind, critical_mu,
                        normal_lcp_coefficients, paradox_map,
                        resolve_contact, stick_check)
from .simulator import Event, EventKind, Mode, ModeKind, Trajectory, run

__version__ = "0.1.0"
