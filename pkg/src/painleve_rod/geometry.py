"""Mass-metric geometry of a planar rod with one endpoint on a horizontal line.

The rod (mass ``m``, half-length ``L``, central moment of inertia ``A``) moves
in the vertical plane with configuration ``(x, y, theta)``: center-of-mass
position and tilt over the horizontal axis.  The tracked endpoint sits at
``P = (x + L cos(theta), y - L sin(theta))``, so contact with the line means
``y - L sin(theta) = 0`` and the slip is the horizontal velocity of ``P``,
``xdot - L thetadot sin(theta)``.

Velocities and impulses are 3-component "vertical" vectors measured with the
kinetic-energy metric ``diag(m, m, A)``.  Two metric-unit directions organize
the whole model:

* :func:`contact_normal` is orthogonal (in that metric) to every velocity that
  keeps ``P`` on the line -- the only direction a frictionless line can react
  along;
* :func:`friction_normal` is tangent to the line constraint but orthogonal to
  every zero-slip velocity -- the direction a kinetic slip constraint can
  react along.

:func:`decompose` splits a velocity into a zero-slip part, a slip-normal part
and a contact-normal part.  The two scalar normal components ``n_s`` and
``n_b`` drive the contact classification and the impulsive laws in
:mod:`painleve_rod.impact`.

All functions here are pure and all value types are frozen; everything can be
called concurrently without synchronization.  The contact chart is only valid
for ``theta`` in the open interval ``(0, pi)``; projections refuse anything
else rather than extrapolating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NotOnContact, NotTangent, OutsideChart

TOL_DEFAULT = 1e-9


@dataclass(frozen=True)
class Params:
    """Rod and environment constants.

    ``m``, ``L``, ``A`` are the rod's mass, half-length and central moment of
    inertia; ``g`` is the gravity magnitude.  ``mu_s`` / ``mu_d`` are the
    static and dynamic friction coefficients (used by the Coulomb-contact
    model only).  ``tol`` is the absolute tolerance used by the contact and
    tangency predicates.
    """

    m: float
    L: float
    A: float
    g: float = 9.81
    mu_s: float = 0.0
    mu_d: float = 0.0
    tol: float = TOL_DEFAULT

    def __post_init__(self):
        if not (self.m > 0.0 and self.L > 0.0 and self.A > 0.0):
            raise ValueError("m, L and A must be positive")
        if self.g < 0.0:
            raise ValueError("g must be nonnegative")
        if not (self.mu_s >= self.mu_d >= 0.0):
            raise ValueError("need mu_s >= mu_d >= 0")
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")

    @classmethod
    def uniform_rod(cls, m: float = 1.0, L: float = 1.0, **kwargs) -> "Params":
        """Homogeneous rod of mass m and half-length L: A = m L^2 / 3."""
        return cls(m=m, L=L, A=m * L * L / 3.0, **kwargs)


@dataclass(frozen=True)
class VerticalVector:
    """Components along d/dx, d/dy, d/dtheta (velocity or impulse slots)."""

    dx: float
    dy: float
    dtheta: float

    def __add__(self, other: "VerticalVector") -> "VerticalVector":
        return VerticalVector(self.dx + other.dx, self.dy + other.dy,
                              self.dtheta + other.dtheta)

    def __sub__(self, other: "VerticalVector") -> "VerticalVector":
        return VerticalVector(self.dx - other.dx, self.dy - other.dy,
                              self.dtheta - other.dtheta)

    def __mul__(self, c: float) -> "VerticalVector":
        return VerticalVector(c * self.dx, c * self.dy, c * self.dtheta)

    __rmul__ = __mul__

    def __neg__(self) -> "VerticalVector":
        return VerticalVector(-self.dx, -self.dy, -self.dtheta)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.dx, self.dy, self.dtheta)


ZERO_VECTOR = VerticalVector(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Config:
    """Configuration (t, x, y, theta); x, y locate the center of mass."""

    t: float
    x: float
    y: float
    theta: float


@dataclass(frozen=True)
class State:
    """A configuration plus its velocity.

    The time component of the underlying absolute velocity is identically 1
    and is never stored.
    """

    config: Config
    vel: VerticalVector

    def with_velocity(self, vel: VerticalVector) -> "State":
        return State(self.config, vel)


@dataclass(frozen=True)
class Decomposition:
    """Metric-orthogonal split of a velocity at a contact configuration.

    ``par_b`` is the zero-slip (pivoting) part, ``perp_b`` the slip-normal
    part and ``perp_s`` the contact-normal part; they sum back to the input.
    ``n_s`` and ``n_b`` are the signed magnitudes of ``perp_s`` / ``perp_b``
    along :func:`contact_normal` / :func:`friction_normal`.
    """

    par_b: VerticalVector
    perp_b: VerticalVector
    perp_s: VerticalVector
    n_s: float
    n_b: float


# ---------------------------------------------------------------------------
# metric and residuals
# ---------------------------------------------------------------------------

def inner(p: Params, u: VerticalVector, v: VerticalVector) -> float:
    """Kinetic-energy inner product: m u.dx v.dx + m u.dy v.dy + A u.dth v.dth."""
    return p.m * u.dx * v.dx + p.m * u.dy * v.dy + p.A * u.dtheta * v.dtheta


def contact_residual(c: Config, p: Params) -> float:
    """Height of the endpoint P above the line: y - L sin(theta)."""
    return c.y - p.L * math.sin(c.theta)


def friction_residual(s: State, p: Params) -> float:
    """Slip: horizontal velocity of P, xdot - L thetadot sin(theta)."""
    return s.vel.dx - p.L * s.vel.dtheta * math.sin(s.config.theta)


def normal_rate(s: State, p: Params) -> float:
    """Vertical velocity of P: ydot - L thetadot cos(theta)."""
    return s.vel.dy - p.L * s.vel.dtheta * math.cos(s.config.theta)


def contact_point_velocity(s: State, p: Params) -> tuple[float, float]:
    """Velocity of the endpoint P as (vx, vy)."""
    return friction_residual(s, p), normal_rate(s, p)


def on_contact(c: Config, p: Params) -> bool:
    return abs(contact_residual(c, p)) <= p.tol


def is_tangent(s: State, p: Params) -> bool:
    return abs(normal_rate(s, p)) <= p.tol


def push_pull_indicator(s: State, p: Params) -> float:
    """(v_P . e_x) cos(theta) for a tangent state.

    Positive means the rod is pushed against the slip constraint, negative
    pulled, zero degenerate.  Raises NotTangent when the contact point has a
    vertical velocity component beyond tolerance.
    """
    vx, vy = contact_point_velocity(s, p)
    if abs(vy) > p.tol:
        raise NotTangent(f"contact-point vertical velocity {vy!r} exceeds tolerance")
    return vx * math.cos(s.config.theta)


# ---------------------------------------------------------------------------
# unit normal generators
# ---------------------------------------------------------------------------

def contact_normal(theta: float, p: Params) -> VerticalVector:
    """Metric-unit generator of the reactions available to the line contact.

    Proportional to the metric dual of the gradient of the contact residual;
    the denominator m L^2 cos^2(theta) + A never vanishes, so the formula is
    regular on the whole chart (including theta = pi/2).
    """
    ct = math.cos(theta)
    d = p.m * p.L * p.L * ct * ct + p.A
    scale = math.sqrt(d / (p.m * p.A))
    return VerticalVector(0.0,
                          scale * p.A / d,
                          -scale * p.m * p.L * ct / d)


def friction_normal(theta: float, p: Params) -> VerticalVector:
    """Metric-unit generator of the reactions available to the slip constraint.

    Orthogonal to the zero-slip direction and to :func:`contact_normal`.
    """
    ct = math.cos(theta)
    st = math.sin(theta)
    ml2 = p.m * p.L * p.L
    d = ml2 * ct * ct + p.A
    e = ml2 + p.A
    scale = math.sqrt(e / (p.m * d))
    return VerticalVector(scale * d / e,
                          -scale * ml2 * st * ct / e,
                          -scale * p.m * p.L * st / e)


# ---------------------------------------------------------------------------
# decompositions
# ---------------------------------------------------------------------------

def _require_chart(theta: float) -> None:
    if not 0.0 < theta < math.pi:
        raise OutsideChart(f"theta={theta!r} outside the contact chart (0, pi)")


def _require_contact(c: Config, p: Params) -> None:
    r = contact_residual(c, p)
    if abs(r) > p.tol:
        raise NotOnContact(f"contact residual {r!r} exceeds tolerance {p.tol!r}")


def decompose(s: State, p: Params) -> Decomposition:
    """Three-way metric-orthogonal split of the velocity of a contact state.

    Returns the zero-slip part ``par_b``, the slip-normal part ``perp_b`` and
    the contact-normal part ``perp_s``, with scalar components

        n_s = sqrt(m A / D) (ydot - L thetadot cos)
        n_b = sqrt(m D / E) (xdot - L sin (m L ydot cos + A thetadot) / D)

    where D = m L^2 cos^2(theta) + A and E = m L^2 + A.
    """
    theta = s.config.theta
    _require_chart(theta)
    _require_contact(s.config, p)
    ct = math.cos(theta)
    st = math.sin(theta)
    ml2 = p.m * p.L * p.L
    d = ml2 * ct * ct + p.A
    e = ml2 + p.A

    nr = s.vel.dy - p.L * s.vel.dtheta * ct
    perp_s = VerticalVector(0.0,
                            (p.A / d) * nr,
                            -(p.m * p.L * ct / d) * nr)
    n_s = math.sqrt(p.m * p.A / d) * nr

    q = (p.m * p.L * s.vel.dx * st + p.m * p.L * s.vel.dy * ct
         + p.A * s.vel.dtheta) / e
    par_b = VerticalVector(p.L * q * st, p.L * q * ct, q)

    w = s.vel.dx - (p.L * st) * (p.m * p.L * s.vel.dy * ct
                                 + p.A * s.vel.dtheta) / d
    perp_b = VerticalVector((d / e) * w,
                            -(ml2 * st * ct / e) * w,
                            -(p.m * p.L * st / e) * w)
    n_b = math.sqrt(p.m * d / e) * w

    return Decomposition(par_b=par_b, perp_b=perp_b, perp_s=perp_s,
                         n_s=n_s, n_b=n_b)


def decompose_s(s: State, p: Params) -> tuple[VerticalVector, VerticalVector]:
    """Two-way split (par_s, perp_s): line-tangent part plus contact-normal part."""
    theta = s.config.theta
    _require_chart(theta)
    _require_contact(s.config, p)
    ct = math.cos(theta)
    ml2 = p.m * p.L * p.L
    d = ml2 * ct * ct + p.A

    par_s = VerticalVector(
        s.vel.dx,
        (ml2 * ct * ct * s.vel.dy + p.A * p.L * ct * s.vel.dtheta) / d,
        (p.m * p.L * ct * s.vel.dy + p.A * s.vel.dtheta) / d,
    )
    nr = s.vel.dy - p.L * s.vel.dtheta * ct
    perp_s = VerticalVector(0.0,
                            (p.A / d) * nr,
                            -(p.m * p.L * ct / d) * nr)
    return par_s, perp_s


# ---------------------------------------------------------------------------
# state constructors
# ---------------------------------------------------------------------------

def contact_state(theta: float, xdot: float, ydot: float, thetadot: float,
                  p: Params, x: float = 0.0, t: float = 0.0) -> State:
    """State with the endpoint exactly on the line (y = L sin(theta))."""
    return State(Config(t=t, x=x, y=p.L * math.sin(theta), theta=theta),
                 VerticalVector(xdot, ydot, thetadot))


def tangent_contact_state(theta: float, slip: float, thetadot: float,
                          p: Params, x: float = 0.0, t: float = 0.0) -> State:
    """Contact state whose endpoint moves along the line with the given slip.

    ydot is constructed so the tangency residual vanishes exactly in floating
    point, and xdot so the slip equals ``slip`` up to roundoff.
    """
    ydot = p.L * thetadot * math.cos(theta)
    xdot = slip + p.L * thetadot * math.sin(theta)
    return contact_state(theta, xdot, ydot, thetadot, p, x=x, t=t)
