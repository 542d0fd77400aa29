"""Coulomb-contact model of the sliding rod and its indeterminacy regions.

The endpoint P = (x + L cos(theta), y - L sin(theta)) carries a contact force
(F_x, F_y).  The equations of motion are

    m x''     = F_x
    m y''     = -m g + F_y
    A theta'' = -L sin(theta) F_x - L cos(theta) F_y

and the height of P obeys y_P'' = y'' - L theta'' cos(theta)
+ L theta'^2 sin(theta). Tying the tangential force to the normal one by
F_x = mu_d * s * F_y and eliminating the accelerations gives the affine
normal-acceleration relation y_P'' = c + b F_y with

    b = 1/m + (L^2 / A) cos(theta) (cos(theta) + mu_d s sin(theta))
    c = -g + L theta'^2 sin(theta)

Here s in {-1, +1} is the sign of the tangential contact force; sliding
friction opposing a slip of sign sgn corresponds to s = -sgn.

The contact itself is the complementarity problem

    F_y >= 0,   y_P'' >= 0,   F_y * y_P'' = 0.

Its solvability is governed entirely by the sign of b: for b > 0 there is
exactly one solution, while b < 0 leaves either no admissible solution
(c < 0) or two of them (c > 0).  b can only turn negative once mu_d exceeds
a threshold depending on A / (m L^2); for the homogeneous rod that critical
coefficient is 4/3.

Everything in this module is a pure function; grid scans may be evaluated
concurrently cell by cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidGrid, NotOnContact, ZeroSlip
from .geometry import Params, State, contact_residual


class ResolutionKind(Enum):
    UNIQUE = "unique"
    NO_SOLUTION = "no_solution"
    MULTIPLE = "multiple"


@dataclass(frozen=True)
class ContactResolution:
    """Outcome of the normal-force complementarity problem y_P'' = c + b F_y.

    ``candidates`` lists every admissible (F_y, y_P'') pair: one entry for a
    unique solution, two (or one degenerate) when multiple, none when the
    problem is infeasible.
    """

    b: float
    c: float
    kind: ResolutionKind
    candidates: tuple[tuple[float, float], ...]

    @property
    def phi_y(self) -> float:
        if self.kind is not ResolutionKind.UNIQUE:
            raise ValueError(f"no unique normal force: {self.kind.value}")
        return self.candidates[0][0]


def coulomb_tangential(phi_y: float, slip: float, p: Params) -> float:
    """Dynamic friction force -mu_d |phi_y| sign(slip).

    Raises ZeroSlip at slip == 0: the sticking case is a set-valued
    constraint, handled by stick_check instead.
    """
    if slip == 0.0:
        raise ZeroSlip("dynamic friction undefined at zero slip")
    return -p.mu_d * abs(phi_y) * math.copysign(1.0, slip)


def stick_check(fx: float, fy: float, p: Params) -> bool:
    """Static friction cone test |fx| <= mu_s |fy| (closed cone)."""
    return abs(fx) <= p.mu_s * abs(fy)


def lcp_coefficients(theta: float, thetadot: float, p: Params, mu: float,
                     s: int) -> tuple[float, float]:
    """(b, c) of the normal-acceleration relation, with explicit mu and s."""
    ct = math.cos(theta)
    st = math.sin(theta)
    b = 1.0 / p.m + (p.L * p.L / p.A) * ct * (ct + mu * s * st)
    c = -p.g + p.L * thetadot * thetadot * st
    return b, c


def normal_lcp_coefficients(s: State, p: Params,
                            slip_sign: int) -> tuple[float, float]:
    """(b, c) at a contact state for tangential-force sign ``slip_sign``.

    ``slip_sign`` enters as the sign s of F_x = mu_d * s * F_y (see the
    module docstring); friction opposing a slip of sign sgn corresponds to
    s = -sgn.  Raises NotOnContact off the line.
    """
    if slip_sign not in (-1, 1):
        raise ValueError("slip_sign must be -1 or +1")
    r = contact_residual(s.config, p)
    if abs(r) > p.tol:
        raise NotOnContact(f"contact residual {r!r} exceeds tolerance")
    return lcp_coefficients(s.config.theta, s.vel.dtheta, p, p.mu_d, slip_sign)


def resolve_contact(b: float, c: float,
                    zero_b_tol: float = 1e-12) -> ContactResolution:
    """Enumerate the solutions of {F_y >= 0, c + b F_y >= 0, F_y (c + b F_y) = 0}.

    b within ``zero_b_tol`` of zero is treated as exactly zero: the problem
    then detaches for c >= 0 and is infeasible for c < 0.
    """
    if abs(b) <= zero_b_tol:
        if c >= 0.0:
            return ContactResolution(b, c, ResolutionKind.UNIQUE, ((0.0, c),))
        return ContactResolution(b, c, ResolutionKind.NO_SOLUTION, ())
    if b > 0.0:
        if c >= 0.0:
            return ContactResolution(b, c, ResolutionKind.UNIQUE, ((0.0, c),))
        return ContactResolution(b, c, ResolutionKind.UNIQUE, ((-c / b, 0.0),))
    # b < 0
    if c < 0.0:
        return ContactResolution(b, c, ResolutionKind.NO_SOLUTION, ())
    if c > 0.0:
        return ContactResolution(b, c, ResolutionKind.MULTIPLE,
                                 ((0.0, c), (-c / b, 0.0)))
    return ContactResolution(b, c, ResolutionKind.MULTIPLE, ((0.0, 0.0),))


# ---------------------------------------------------------------------------
# paradox threshold and region map
# ---------------------------------------------------------------------------

_THETA_EDGE = 1e-7


def _min_b_over_theta(p: Params, mu: float, s: int, n_grid: int = 4096) -> float:
    """min over theta in (0, pi) of b(theta; mu, s), grid plus golden refine."""
    thetas = np.linspace(_THETA_EDGE, math.pi - _THETA_EDGE, n_grid)
    ct = np.cos(thetas)
    st = np.sin(thetas)
    b = 1.0 / p.m + (p.L * p.L / p.A) * ct * (ct + mu * s * st)
    i = int(np.argmin(b))
    lo = thetas[max(i - 1, 0)]
    hi = thetas[min(i + 1, n_grid - 1)]

    def f(theta: float) -> float:
        return lcp_coefficients(theta, 0.0, p, mu, s)[0]

    # golden-section refinement of the bracketing interval
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, d = lo, hi
    x1 = d - invphi * (d - a)
    x2 = a + invphi * (d - a)
    f1, f2 = f(x1), f(x2)
    while d - a > 1e-12:
        if f1 < f2:
            d, x2, f2 = x2, x1, f1
            x1 = d - invphi * (d - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (d - a)
            f2 = f(x2)
    return min(f1, f2, float(b[i]))


def critical_mu(p: Params, s: int, tol: float = 1e-9,
                mu_limit: float = 1e12) -> float:
    """Smallest mu_d for which b(theta) turns negative somewhere on (0, pi).

    Found by bisection on mu over the grid-refined minimum of b.  Returns
    inf when no mu up to ``mu_limit`` produces a negative b (e.g. A large
    compared to m L^2).  Depends on (m, L, A) only through A / (m L^2).
    """
    if s not in (-1, 1):
        raise ValueError("s must be -1 or +1")
    if _min_b_over_theta(p, 0.0, s) < 0.0:
        return 0.0
    hi = 1.0
    while _min_b_over_theta(p, hi, s) >= 0.0:
        hi *= 2.0
        if hi > mu_limit:
            return math.inf
    lo = 0.0
    # tol is absolute near 1 and relative for large thresholds; the extra
    # stop catches midpoints that degenerate to an endpoint in floats
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _min_b_over_theta(p, mid, s) < 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class MapCell:
    theta: float
    mu: float
    label: str
    b: float
    c: float


def paradox_map(theta_grid, mu_grid, p: Params, s: int,
                thetadot: float = 0.0) -> list[MapCell]:
    """Solvability label of the contact problem over a (theta, mu) grid.

    The sign scenario for c is set physically through ``thetadot``
    (c = -g + L thetadot^2 sin(theta)).  Cells are independent, so the scan
    may be evaluated concurrently; this implementation simply vectorizes.
    Raises InvalidGrid for empty grids or theta outside (0, pi).
    """
    thetas = [float(t) for t in theta_grid]
    mus = [float(m) for m in mu_grid]
    if not thetas or not mus:
        raise InvalidGrid("theta and mu grids must be nonempty")
    if any(not 0.0 < t < math.pi for t in thetas):
        raise InvalidGrid("theta values must lie in (0, pi)")
    if any(m < 0.0 for m in mus):
        raise InvalidGrid("mu values must be nonnegative")
    if s not in (-1, 1):
        raise ValueError("s must be -1 or +1")

    cells = []
    for theta in thetas:
        for mu in mus:
            b, c = lcp_coefficients(theta, thetadot, p, mu, s)
            res = resolve_contact(b, c)
            cells.append(MapCell(theta=theta, mu=mu, label=res.kind.value,
                                 b=b, c=c))
    return cells
