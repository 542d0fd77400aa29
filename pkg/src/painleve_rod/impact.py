"""Impulsive constitutive laws for the rod's contact and slip constraints.

Any admissible reactive impulse is a combination ``sigma * K_S + beta * K_B``
of the two unit normal generators, so a constitutive law is just a rule
producing the pair ``(sigma, beta)`` from the incoming velocity.  Because the
generators are metric-unit vectors, ``sigma`` and ``beta`` carry
metric-weighted velocity units; they are reported as-is, not converted.

Three law families are implemented:

* ``rebound`` / ``stop``: the slip-normal component is reversed with factor
  ``epsilon`` (rebound) or removed (stop, after which the rod pivots about
  the resting contact point).  An optional detaching variant adds
  ``sigma = sigma_gain * |n_b| > 0`` so the endpoint always leaves the line.
* ``max_braking``: the slip-normal component is removed when its magnitude is
  at most ``mu_cap``; above the cap the law brakes by ``mu_cap`` only and
  must detach (``sigma = sigma_gain * (|n_b| - mu_cap) > 0``).
* ``detach``: the slip constraint acts bilaterally and the endpoint detaches
  in any case, with ``sigma = (lambda1 m + alpha1 A) |n_b|`` on one side of
  the constraint and ``(lambda2 m + alpha2 A) |n_b|`` on the other; braking
  follows ``max_braking`` on the pushed side and is ``-gamma |n_b|`` on the
  pulled side.

Whether a tangent sliding state counts as impacting the slip constraint is a
sign convention.  Two are available (``LawParams.sign_convention``):
``"pushed"`` (impact when slip and cos(theta) have the same sign, i.e. the
sliding drives the rod into the constraint) and ``"n_b"`` (impact when
``n_b > 0``).  The two agree for theta < pi/2 and differ beyond it; all laws
are written against the signed component ``n_b`` so both conventions yield
outgoing, non-reimpacting velocities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .errors import LawRejected, NotAnImpact
from .geometry import (Decomposition, Params, State, VerticalVector,
                       contact_normal, decompose, inner)

SIGN_CONVENTIONS = ("pushed", "n_b")
LAW_FAMILIES = ("rebound", "stop", "max_braking", "detach")


class ImpactTag(Enum):
    APPROACHING_S = "approaching_s"
    SEPARATING_S = "separating_s"
    TANGENT_IMPACT_B = "tangent_impact_b"
    TANGENT_NO_IMPACT_B = "tangent_no_impact_b"
    TANGENT_DEGENERATE = "tangent_degenerate"


IMPACT_TAGS = (ImpactTag.APPROACHING_S, ImpactTag.TANGENT_IMPACT_B)


@dataclass(frozen=True)
class ImpactClass:
    tag: ImpactTag
    n_s: float
    n_b: float

    @property
    def is_impact(self) -> bool:
        return self.tag in IMPACT_TAGS


@dataclass(frozen=True)
class ImpulseCoefficients:
    """Impulse magnitudes along the two unit generators (metric-weighted units)."""

    sigma: float
    beta: float


@dataclass(frozen=True)
class LawParams:
    """Parameters shared by the law families.

    epsilon        restitution-like factor for the rebound law, in [0, 1]
    mu_cap         braking threshold for the capped laws, > 0
    lambda1/2,
    alpha1/2       detachment gains of the detach law, > 0
    gamma          pulled-side braking factor of the detach law, in (0, 1)
    sigma_gain     linear coefficient of the detaching impulse component
    b_unilateral   slip constraint reacts on one side only (False: bilateral)
    sign_convention  which side of the slip constraint impacts ("pushed"/"n_b")
    detach_variant rebound/stop also detach (sigma = sigma_gain |n_b| > 0)
    e_newton       restitution for genuine line impacts (approach speed
                   reversal factor), in [0, 1]
    """

    epsilon: float = 0.5
    mu_cap: float = 1.0
    lambda1: float = 1.0
    lambda2: float = 1.0
    alpha1: float = 1.0
    alpha2: float = 1.0
    gamma: float = 0.5
    sigma_gain: float = 1.0
    b_unilateral: bool = True
    sign_convention: str = "pushed"
    detach_variant: bool = False
    e_newton: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.mu_cap <= 0.0:
            raise ValueError("mu_cap must be positive")
        for name in ("lambda1", "lambda2", "alpha1", "alpha2"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if self.sigma_gain < 0.0:
            raise ValueError("sigma_gain must be nonnegative")
        if self.sign_convention not in SIGN_CONVENTIONS:
            raise ValueError(f"unknown sign convention {self.sign_convention!r}")
        if not 0.0 <= self.e_newton <= 1.0:
            raise ValueError("e_newton must lie in [0, 1]")


@dataclass(frozen=True)
class Law:
    """A law family bound to its parameters; family constraints are checked here."""

    family: str
    params: LawParams

    def __post_init__(self):
        lp = self.params
        if self.family not in LAW_FAMILIES:
            raise ValueError(f"unknown law family {self.family!r}")
        if self.family == "detach":
            if lp.b_unilateral:
                raise ValueError("the detach law needs a bilateral slip "
                                 "constraint (b_unilateral=False)")
        else:
            if not lp.b_unilateral:
                raise ValueError(f"law {self.family!r} needs a unilateral "
                                 "slip constraint (b_unilateral=True)")
        if self.family == "rebound" and not 0.0 < lp.epsilon < 1.0:
            raise ValueError("rebound law needs epsilon strictly inside (0, 1)")
        if self.family in ("rebound", "stop") and lp.detach_variant \
                and lp.sigma_gain <= 0.0:
            raise ValueError("detaching variant needs sigma_gain > 0")
        if self.family == "max_braking" and lp.sigma_gain <= 0.0:
            raise ValueError("max_braking needs sigma_gain > 0 to detach "
                             "above the cap")


@dataclass(frozen=True)
class ImpactOutcome:
    """Result of applying a law: outgoing state, impulse and bookkeeping."""

    p_r: State
    impulse: VerticalVector
    coefficients: ImpulseCoefficients
    regime: str
    energy_delta: float


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def _impacting_side(n_b: float, theta: float, p: Params, lp: LawParams) -> bool:
    """Whether a (near-)tangent state with this n_b impacts the slip constraint."""
    if abs(n_b) <= p.tol:
        return False
    if not lp.b_unilateral:
        return True
    if lp.sign_convention == "n_b":
        return n_b > p.tol
    # "pushed": slip and cos(theta) share a sign; sign(n_b) == sign(slip)
    # on tangent states.  cos(pi/2) is degenerate: neither pushed nor pulled.
    ct = math.cos(theta)
    if abs(ct) <= p.tol:
        return False
    return (n_b > 0.0) == (ct > 0.0)


def _classify(d: Decomposition, theta: float, p: Params,
              lp: LawParams) -> ImpactClass:
    if d.n_s < -p.tol:
        tag = ImpactTag.APPROACHING_S
    elif d.n_s > p.tol:
        tag = ImpactTag.SEPARATING_S
    elif abs(d.n_b) <= p.tol:
        tag = ImpactTag.TANGENT_DEGENERATE
    elif _impacting_side(d.n_b, theta, p, lp):
        tag = ImpactTag.TANGENT_IMPACT_B
    else:
        tag = ImpactTag.TANGENT_NO_IMPACT_B
    return ImpactClass(tag=tag, n_s=d.n_s, n_b=d.n_b)


def classify(s: State, p: Params, lp: LawParams) -> ImpactClass:
    """Classify a contact state against both constraints.

    Raises NotOnContact (via decompose) when the configuration is off the
    line, and OutsideChart when theta is outside (0, pi).
    """
    return _classify(decompose(s, p), s.config.theta, p, lp)


def is_outgoing(s: State, p: Params, lp: LawParams) -> bool:
    """Whether the state leaves the constraint pair without a further impact.

    True when the endpoint separates from the line (n_s > tol) or the state
    is tangent with the slip-normal component on the non-impacting side.
    """
    d = decompose(s, p)
    if d.n_s > p.tol:
        return True
    if d.n_s < -p.tol:
        return False
    return not _impacting_side(d.n_b, s.config.theta, p, lp)


# ---------------------------------------------------------------------------
# law coefficients
# ---------------------------------------------------------------------------

def _coefficients(family: str, lp: LawParams, p: Params,
                  n_b: float) -> tuple[float, float, str]:
    """(sigma, scale, regime) for one slip-constraint impact.

    ``scale`` is the factor applied to the incoming slip-normal component, so
    beta = (scale - 1) * n_b.  Writing the laws against the signed n_b keeps
    them meaningful on either impacting side.
    """
    mag = abs(n_b)
    if family == "rebound":
        sigma = lp.sigma_gain * mag if lp.detach_variant else 0.0
        regime = "rebound_detach" if lp.detach_variant else "rebound"
        return sigma, -lp.epsilon, regime
    if family == "stop":
        sigma = lp.sigma_gain * mag if lp.detach_variant else 0.0
        regime = "stop_detach" if lp.detach_variant else "stop"
        return sigma, 0.0, regime
    if family == "max_braking":
        if mag <= lp.mu_cap:
            return 0.0, 0.0, "brake_stop"
        return lp.sigma_gain * (mag - lp.mu_cap), 1.0 - lp.mu_cap / mag, "brake_cap"
    if family == "detach":
        if n_b > 0.0:
            sigma = (lp.lambda1 * p.m + lp.alpha1 * p.A) * mag
            if mag <= lp.mu_cap:
                return sigma, 0.0, "detach_pushed"
            return sigma, 1.0 - lp.mu_cap / mag, "detach_pushed_cap"
        sigma = (lp.lambda2 * p.m + lp.alpha2 * p.A) * mag
        return sigma, 1.0 + lp.gamma, "detach_pulled"
    raise ValueError(f"unknown law family {family!r}")


def _beta(scale: float, n_b: float) -> float:
    return (scale - 1.0) * n_b


def _require_tangent_impact(s: State, p: Params, lp: LawParams) -> ImpactClass:
    cls = classify(s, p, lp)
    if cls.tag is not ImpactTag.TANGENT_IMPACT_B:
        raise NotAnImpact(f"state classified as {cls.tag.value}; the law "
                          "applies to tangent slip-constraint impacts only")
    return cls


def law_rebound_stop(p_l: State, p: Params, lp: LawParams,
                     stop: bool = False) -> ImpulseCoefficients:
    """Coefficients of the rebound law (or its full-stop variant)."""
    cls = _require_tangent_impact(p_l, p, lp)
    family = "stop" if stop else "rebound"
    sigma, scale, _ = _coefficients(family, lp, p, cls.n_b)
    return ImpulseCoefficients(sigma, _beta(scale, cls.n_b))


def law_max_braking(p_l: State, p: Params, lp: LawParams) -> ImpulseCoefficients:
    """Coefficients of the capped-braking law."""
    cls = _require_tangent_impact(p_l, p, lp)
    sigma, scale, _ = _coefficients("max_braking", lp, p, cls.n_b)
    return ImpulseCoefficients(sigma, _beta(scale, cls.n_b))


def law_detach(p_l: State, p: Params, lp: LawParams) -> ImpulseCoefficients:
    """Coefficients of the always-detaching law (bilateral slip constraint)."""
    lp_bilateral = lp if not lp.b_unilateral else replace(lp, b_unilateral=False)
    cls = _require_tangent_impact(p_l, p, lp_bilateral)
    sigma, scale, _ = _coefficients("detach", lp_bilateral, p, cls.n_b)
    return ImpulseCoefficients(sigma, _beta(scale, cls.n_b))


# ---------------------------------------------------------------------------
# applying a law
# ---------------------------------------------------------------------------

def kinetic_energy(s: State, p: Params) -> float:
    """(m xdot^2 + m ydot^2 + A thetadot^2) / 2."""
    return 0.5 * inner(p, s.vel, s.vel)


def apply(law: Law, p_l: State, p: Params) -> ImpactOutcome:
    """Apply a constitutive law to an impacting state.

    The outgoing velocity is assembled from the metric decomposition,

        p_r = par_b + perp_s + scale * perp_b + sigma * K_S,

    which equals p_l + sigma K_S + beta K_B with beta = (scale - 1) n_b.  The
    configuration is unchanged (instantaneous jump).  Raises NotAnImpact when
    the classification is not an impact and LawRejected if the produced
    velocity fails the outgoing conditions (which would indicate a law bug).
    """
    lp = law.params
    d = decompose(p_l, p)
    theta = p_l.config.theta
    cls = _classify(d, theta, p, lp)
    if not cls.is_impact:
        raise NotAnImpact(f"state classified as {cls.tag.value}")

    if cls.tag is ImpactTag.TANGENT_IMPACT_B:
        sigma, scale, regime = _coefficients(law.family, lp, p, d.n_b)
    else:
        # Genuine line impact: reverse the approach speed with factor
        # e_newton, and brake the slip-normal part with the configured law
        # when that side of the slip constraint is impacting.
        sigma_s = (1.0 + lp.e_newton) * abs(d.n_s)
        if _impacting_side(d.n_b, theta, p, lp):
            sigma_b, scale, regime = _coefficients(law.family, lp, p, d.n_b)
            regime = "line_impact+" + regime
        else:
            sigma_b, scale, regime = 0.0, 1.0, "line_impact"
        sigma = sigma_s + sigma_b

    vel_r = d.par_b + d.perp_s + scale * d.perp_b \
        + sigma * contact_normal(theta, p)
    p_r = State(p_l.config, vel_r)
    if not is_outgoing(p_r, p, lp):
        raise LawRejected(
            f"law {law.family!r} produced a non-outgoing velocity "
            f"(regime {regime}, sigma={sigma!r}, n_b={d.n_b!r})")

    impulse = vel_r - p_l.vel
    coefficients = ImpulseCoefficients(sigma, _beta(scale, d.n_b))
    energy_delta = kinetic_energy(p_r, p) - kinetic_energy(p_l, p)
    return ImpactOutcome(p_r=p_r, impulse=impulse, coefficients=coefficients,
                         regime=regime, energy_delta=energy_delta)
