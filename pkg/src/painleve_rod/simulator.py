"""Event-driven hybrid evolution of the rod.

Smooth phases (free flight, sliding contact, pinned rotation about the
resting endpoint) are integrated with fixed-step RK4; events (touchdown,
slip reversal, slip start, lift-off, slip-constraint impacts, Coulomb
indeterminacy) are localized by bisection on guard functions and resolved by
instantaneous transitions.

Two simulation modes are available:

* ``"classical"``: sliding contact carries the Coulomb force
  ``-mu_d |F_y| sign(slip)``; when the normal-force problem loses existence
  or uniqueness the run records a paradox event and terminates.  A pinned
  phase releases into sliding as soon as the static cone is violated.
* ``"rgims"``: friction acts only impulsively, through the configured
  constitutive law; smooth sliding is frictionless and the pin persists
  until lift-off.  The optional ``coulomb_in_rgims`` switch re-enables the
  Coulomb force during smooth phases for comparison runs.

The integrator is deliberately fixed-step (default 1e-4 s) with events
bisected to 1e-10 s, so repeated runs are bit-identical.  Runs terminate
with a recorded reason instead of raising when they hit the Coulomb paradox,
leave the contact chart (theta outside (0, pi)), or when events accumulate
below resolvable spacing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

from . import impact
from .classical import (ResolutionKind, lcp_coefficients, resolve_contact,
                        stick_check)
from .errors import ParadoxEncountered
from .geometry import (Config, Params, State, VerticalVector,
                       contact_normal, contact_residual, decompose,
                       friction_residual)
from .impact import ImpactTag, Law, kinetic_energy

EVENT_TIME_TOL = 1e-10
MIN_EVENT_GAP = 1e-9
_MAX_EVENT_BURST = 8
_MAX_CHAIN = 8

SIM_MODES = ("rgims", "classical")


class ModeKind(Enum):
    FREE_FLIGHT = "free_flight"
    SLIDING = "sliding_contact"
    PINNED = "pinned"
    TERMINATED = "terminated"


@dataclass(frozen=True)
class Mode:
    kind: ModeKind
    slip_sign: int = 0
    reason: str = ""

    @staticmethod
    def free_flight() -> "Mode":
        return Mode(ModeKind.FREE_FLIGHT)

    @staticmethod
    def sliding(slip_sign: int) -> "Mode":
        return Mode(ModeKind.SLIDING, slip_sign=slip_sign)

    @staticmethod
    def pinned() -> "Mode":
        return Mode(ModeKind.PINNED)

    @staticmethod
    def terminated(reason: str) -> "Mode":
        return Mode(ModeKind.TERMINATED, reason=reason)

    def label(self) -> str:
        if self.kind is ModeKind.SLIDING:
            return f"sliding_contact:{'+1' if self.slip_sign > 0 else '-1'}"
        if self.kind is ModeKind.TERMINATED:
            return f"terminated:{self.reason}"
        return self.kind.value


class EventKind(Enum):
    TOUCHDOWN = "touchdown"
    SLIP_STOP = "slip_stop"
    SLIP_START = "slip_start"
    LIFT_OFF = "lift_off"
    B_IMPACT = "b_impact"
    PARADOX = "paradox"


@dataclass(frozen=True)
class Event:
    time: float
    kind: EventKind
    pre_state: State
    post_state: State
    impulse: Optional[VerticalVector]
    energy_delta: float
    regime: str = ""


@dataclass
class Trajectory:
    samples: list[tuple[State, Mode]]
    events: list[Event]
    params: Params
    law: Law
    sim_mode: str
    dt: float
    dt_out: float

    @property
    def final_state(self) -> State:
        return self.samples[-1][0]

    @property
    def final_mode(self) -> Mode:
        return self.samples[-1][1]

    @property
    def terminated_reason(self) -> str:
        m = self.final_mode
        return m.reason if m.kind is ModeKind.TERMINATED else ""


def total_energy(s: State, p: Params) -> float:
    """Kinetic plus gravitational energy, with the line as potential zero."""
    return kinetic_energy(s, p) + p.m * p.g * s.config.y


# ---------------------------------------------------------------------------
# smooth dynamics
# ---------------------------------------------------------------------------

def sliding_normal_force(s: State, p: Params, slip_sign: int,
                         mu: float) -> float:
    """Normal force sustaining sliding contact, from the unique-branch LCP.

    The tangential-force sign is -slip_sign (friction opposes the slip).
    Raises ParadoxEncountered when the problem has no solution or several.
    """
    b, c = lcp_coefficients(s.config.theta, s.vel.dtheta, p, mu, -slip_sign)
    res = resolve_contact(b, c)
    if res.kind is not ResolutionKind.UNIQUE:
        raise ParadoxEncountered(
            f"contact problem is {res.kind.value} (b={b!r}, c={c!r})", b, c)
    return res.phi_y


def pin_forces(s: State, p: Params) -> tuple[float, float,
                                             tuple[float, float, float]]:
    """Reaction (fx, fy) at the pinned endpoint and the rigid accelerations."""
    theta = s.config.theta
    thd = s.vel.dtheta
    ct = math.cos(theta)
    st = math.sin(theta)
    i_p = p.A + p.m * p.L * p.L
    thdd = -(p.m * p.g * p.L * ct) / i_p
    xdd = p.L * thdd * st + p.L * thd * thd * ct
    ydd = p.L * thdd * ct - p.L * thd * thd * st
    fx = p.m * xdd
    fy = p.m * ydd + p.m * p.g
    return fx, fy, (xdd, ydd, thdd)


def smooth_rhs(mode: Mode, s: State, p: Params,
               mu: float = 0.0) -> tuple[float, float, float]:
    """Accelerations (xdd, ydd, thetadd) of the smooth phase ``mode``.

    ``mu`` is the tangential friction coefficient in effect (0 for
    impulsive-mode smooth phases).  Sliding raises ParadoxEncountered when
    the normal-force problem is not uniquely solvable.
    """
    if mode.kind is ModeKind.FREE_FLIGHT:
        return 0.0, -p.g, 0.0
    if mode.kind is ModeKind.PINNED:
        return pin_forces(s, p)[2]
    if mode.kind is ModeKind.SLIDING:
        fy = sliding_normal_force(s, p, mode.slip_sign, mu)
        fx = -mu * fy * mode.slip_sign
        theta = s.config.theta
        thdd = (-p.L * math.sin(theta) * fx - p.L * math.cos(theta) * fy) / p.A
        return fx / p.m, -p.g + fy / p.m, thdd
    return 0.0, 0.0, 0.0


def _accel_total(mode: Mode, p: Params, mu: float) -> Callable[[State],
                                                               tuple]:
    """RHS that stays finite past the paradox boundary.

    RK4 stage points of the crossing step may poke past b = 0; the force is
    dropped there, the step is discarded by the paradox guard anyway.
    """
    def f(s: State):
        try:
            return smooth_rhs(mode, s, p, mu)
        except ParadoxEncountered:
            return 0.0, -p.g, 0.0
    return f


def _offset(s: State, h: float, d: tuple) -> State:
    c = s.config
    return State(
        Config(c.t + h, c.x + h * d[0], c.y + h * d[1], c.theta + h * d[2]),
        VerticalVector(s.vel.dx + h * d[3], s.vel.dy + h * d[4],
                       s.vel.dtheta + h * d[5]))


def _deriv(s: State, accel) -> tuple:
    a = accel(s)
    return (s.vel.dx, s.vel.dy, s.vel.dtheta, a[0], a[1], a[2])


def rk4_step(s: State, h: float, accel) -> State:
    k1 = _deriv(s, accel)
    k2 = _deriv(_offset(s, 0.5 * h, k1), accel)
    k3 = _deriv(_offset(s, 0.5 * h, k2), accel)
    k4 = _deriv(_offset(s, h, k3), accel)
    d = tuple((k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0
              for i in range(6))
    return _offset(s, h, d)


# ---------------------------------------------------------------------------
# guards and event detection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EventHit:
    kind: EventKind
    t_offset: float
    state: State


def _guards(mode: Mode, p: Params, mu: float, classical_stick: bool,
            b_impact_watch: bool):
    """(kind, guard fn, both_directions) triples active in this mode."""
    if mode.kind is ModeKind.FREE_FLIGHT:
        return [(EventKind.TOUCHDOWN,
                 lambda s: contact_residual(s.config, p), False)]
    if mode.kind is ModeKind.SLIDING:
        guards = [
            (EventKind.SLIP_STOP, lambda s: friction_residual(s, p), True),
            (EventKind.LIFT_OFF,
             lambda s: p.g - p.L * s.vel.dtheta ** 2
             * math.sin(s.config.theta), False),
        ]
        if mu > 0.0:
            sgn = mode.slip_sign
            guards.append(
                (EventKind.PARADOX,
                 lambda s: lcp_coefficients(s.config.theta, s.vel.dtheta,
                                            p, mu, -sgn)[0], False))
        if b_impact_watch:
            sgn = mode.slip_sign
            # fires when the sliding side flips to "pushed" as cos(theta)
            # changes sign; the 2 tol offset puts the event state past the
            # degenerate band so it classifies as impacting.
            guards.append(
                (EventKind.B_IMPACT,
                 lambda s: 2.0 * p.tol - sgn * math.cos(s.config.theta),
                 False))
        return guards
    if mode.kind is ModeKind.PINNED:
        guards = [(EventKind.LIFT_OFF, lambda s: pin_forces(s, p)[1], False)]
        if classical_stick:
            def stick_margin(s):
                fx, fy, _ = pin_forces(s, p)
                return p.mu_s * abs(fy) - abs(fx)
            guards.append((EventKind.SLIP_START, stick_margin, False))
        return guards
    return []


def _crosses(g0: float, g1: float, both: bool) -> bool:
    if g0 > 0.0 and g1 <= 0.0:
        return True
    if both and g0 < 0.0 and g1 >= 0.0:
        return True
    return False


def _bisect(s0: State, h: float, accel, guard, g0: float) -> tuple[float,
                                                                   State]:
    """Earliest crossing time offset in (0, h], localized to EVENT_TIME_TOL.

    Returns the post-crossing side so the guard condition holds at the event
    state.
    """
    lo, hi = 0.0, h
    s_hi = rk4_step(s0, h, accel)
    positive0 = g0 > 0.0
    while hi - lo > EVENT_TIME_TOL:
        mid = 0.5 * (lo + hi)
        s_mid = rk4_step(s0, mid, accel)
        if (guard(s_mid) > 0.0) == positive0:
            lo = mid
        else:
            hi = mid
            s_hi = s_mid
    return hi, s_hi


def detect_event(mode: Mode, s0: State, p: Params, h: float,
                 mu: float = 0.0, classical_stick: bool = False,
                 b_impact_watch: bool = False) -> tuple[State,
                                                        Optional[EventHit]]:
    """Integrate one step of size h and localize the earliest guard crossing.

    Returns (end-of-step state, hit); hit is None when no guard crosses.
    """
    accel = _accel_total(mode, p, mu)
    s1 = rk4_step(s0, h, accel)
    best: Optional[EventHit] = None
    for kind, guard, both in _guards(mode, p, mu, classical_stick,
                                     b_impact_watch):
        g0 = guard(s0)
        g1 = guard(s1)
        if not _crosses(g0, g1, both):
            continue
        t_off, s_e = _bisect(s0, h, accel, guard, g0)
        if best is None or t_off < best.t_offset:
            best = EventHit(kind=kind, t_offset=t_off, state=s_e)
    return s1, best


# ---------------------------------------------------------------------------
# transitions
# ---------------------------------------------------------------------------

def _snap_to_line(s: State, p: Params) -> State:
    c = s.config
    return State(Config(c.t, c.x, p.L * math.sin(c.theta), c.theta), s.vel)


def _plain_event(kind: EventKind, s: State, post: State | None = None,
                 regime: str = "") -> Event:
    return Event(time=s.config.t, kind=kind, pre_state=s,
                 post_state=post if post is not None else s,
                 impulse=None, energy_delta=0.0, regime=regime)


def _pin_project(s: State, p: Params) -> State:
    """Remove event-localization residue: velocity onto the zero-slip space."""
    return s.with_velocity(decompose(s, p).par_b)


def _select_smooth(s: State, p: Params, mu: float, classical: bool,
                   events: list[Event]) -> tuple[State, Mode]:
    """Pick the smooth mode for an on-contact, non-impacting state."""
    slip = friction_residual(s, p)
    if abs(slip) <= p.tol:
        fx, fy, _ = pin_forces(s, p)
        if fy <= 0.0:
            return s, Mode.free_flight()
        if classical and not stick_check(fx, fy, p):
            sgn = -1 if fx > 0.0 else 1
            events.append(_plain_event(EventKind.SLIP_START, s))
            return s, Mode.sliding(sgn)
        return _pin_project(s, p), Mode.pinned()
    sgn = 1 if slip > 0.0 else -1
    b, c = lcp_coefficients(s.config.theta, s.vel.dtheta, p, mu, -sgn)
    res = resolve_contact(b, c)
    if res.kind is not ResolutionKind.UNIQUE:
        events.append(_plain_event(EventKind.PARADOX, s,
                                   regime=res.kind.value))
        return s, Mode.terminated("paradox")
    if res.phi_y == 0.0 and c > 0.0:
        return s, Mode.free_flight()
    return s, Mode.sliding(sgn)


def _enter(s: State, p: Params, law: Law, sim_mode: str,
           coulomb_in_rgims: bool,
           events: list[Event]) -> tuple[State, Mode]:
    """Resolve instantaneous transitions until a stable smooth mode holds."""
    classical = sim_mode == "classical"
    mu = p.mu_d if (classical or coulomb_in_rgims) else 0.0
    for _ in range(_MAX_CHAIN):
        theta = s.config.theta
        if not 0.0 < theta < math.pi:
            return s, Mode.terminated("chart_exit")
        r = contact_residual(s.config, p)
        if r > p.tol:
            return s, Mode.free_flight()
        if r < -p.tol:
            return s, Mode.terminated("penetration")
        d = decompose(s, p)
        if classical:
            if d.n_s > p.tol:
                return s, Mode.free_flight()
            if d.n_s < -p.tol:
                # normal-only restitution impulse at touchdown
                sigma = (1.0 + law.params.e_newton) * abs(d.n_s)
                vel_r = s.vel + sigma * contact_normal(theta, p)
                post = s.with_velocity(vel_r)
                events.append(Event(
                    time=s.config.t, kind=EventKind.TOUCHDOWN,
                    pre_state=s, post_state=post, impulse=vel_r - s.vel,
                    energy_delta=kinetic_energy(post, p)
                    - kinetic_energy(s, p),
                    regime="line_impact"))
                s = post
                continue
            return _select_smooth(s, p, mu, True, events)
        cls = impact.classify(s, p, law.params)
        if cls.is_impact:
            outcome = impact.apply(law, s, p)
            kind = (EventKind.TOUCHDOWN
                    if cls.tag is ImpactTag.APPROACHING_S
                    else EventKind.B_IMPACT)
            events.append(Event(
                time=s.config.t, kind=kind, pre_state=s,
                post_state=outcome.p_r, impulse=outcome.impulse,
                energy_delta=outcome.energy_delta, regime=outcome.regime))
            s = outcome.p_r
            continue
        if cls.tag is ImpactTag.SEPARATING_S:
            return s, Mode.free_flight()
        return _select_smooth(s, p, mu, False, events)
    return s, Mode.terminated("non_convergence")


def transition(kind: EventKind, s: State, p: Params, law: Law,
               sim_mode: str,
               coulomb_in_rgims: bool = False) -> tuple[State, Mode,
                                                        list[Event]]:
    """Resolve one detected event into a new state, mode and event records."""
    events: list[Event] = []
    if kind is EventKind.TOUCHDOWN:
        s = _snap_to_line(s, p)
        d = decompose(s, p)
        if d.n_s >= -p.tol:
            events.append(_plain_event(EventKind.TOUCHDOWN, s,
                                       regime="grazing"))
        s, mode = _enter(s, p, law, sim_mode, coulomb_in_rgims, events)
        return s, mode, events
    if kind is EventKind.SLIP_STOP:
        events.append(_plain_event(EventKind.SLIP_STOP, s))
        s, mode = _enter(s, p, law, sim_mode, coulomb_in_rgims, events)
        return s, mode, events
    if kind is EventKind.B_IMPACT:
        s, mode = _enter(s, p, law, sim_mode, coulomb_in_rgims, events)
        return s, mode, events
    if kind is EventKind.LIFT_OFF:
        events.append(_plain_event(EventKind.LIFT_OFF, s))
        return s, Mode.free_flight(), events
    if kind is EventKind.SLIP_START:
        fx, _, _ = pin_forces(s, p)
        sgn = -1 if fx > 0.0 else 1
        events.append(_plain_event(EventKind.SLIP_START, s))
        return s, Mode.sliding(sgn), events
    if kind is EventKind.PARADOX:
        events.append(_plain_event(EventKind.PARADOX, s))
        return s, Mode.terminated("paradox"), events
    raise ValueError(f"unhandled event kind {kind!r}")


# ---------------------------------------------------------------------------
# main loop
# ---------------------------------------------------------------------------

def run(initial: State, p: Params, law: Law, sim_mode: str = "rgims",
        t_max: float = 1.0, dt: float = 1e-4, dt_out: float = 1e-2,
        coulomb_in_rgims: bool = False) -> Trajectory:
    """Integrate from ``initial`` until ``t_max`` or termination.

    Samples are recorded on the dt_out grid plus at every event time; all
    events carry pre/post states and (for impulsive ones) the impulse and
    energy jump.  The run is deterministic: identical inputs give
    bit-identical trajectories.
    """
    if sim_mode not in SIM_MODES:
        raise ValueError(f"sim_mode must be one of {SIM_MODES}")
    if not t_max > initial.config.t:
        raise ValueError("t_max must exceed the initial time")
    if dt <= 0.0 or dt_out <= 0.0:
        raise ValueError("dt and dt_out must be positive")
    if not 0.0 < initial.config.theta < math.pi:
        raise ValueError("initial theta must lie in (0, pi)")
    if contact_residual(initial.config, p) < -p.tol:
        raise ValueError("initial configuration penetrates the line")

    classical = sim_mode == "classical"
    mu = p.mu_d if (classical or coulomb_in_rgims) else 0.0
    b_watch = (sim_mode == "rgims" and law.params.b_unilateral
               and law.params.sign_convention == "pushed")

    events: list[Event] = []
    samples: list[tuple[State, Mode]] = []
    state, mode = _enter(initial, p, law, sim_mode, coulomb_in_rgims, events)
    samples.append((state, mode))

    next_out = initial.config.t + dt_out
    last_event_t = -math.inf
    burst = 0
    seg_start = state
    step_i = 0

    def record(st: State, md: Mode) -> None:
        if samples and samples[-1][0].config.t >= st.config.t:
            samples[-1] = (st, md)
            return
        samples.append((st, md))

    while mode.kind is not ModeKind.TERMINATED:
        t = seg_start.config.t + step_i * dt
        if t >= t_max - 1e-12:
            break
        h = min(dt, t_max - t)
        s1, hit = detect_event(mode, state, p, h, mu=mu,
                               classical_stick=classical,
                               b_impact_watch=b_watch)
        if hit is not None:
            t_e = hit.state.config.t
            if t_e - last_event_t < MIN_EVENT_GAP:
                burst += 1
            else:
                burst = 0
            last_event_t = t_e
            if burst > _MAX_EVENT_BURST:
                mode = Mode.terminated("non_convergence")
                record(hit.state, mode)
                break
            state, mode, evs = transition(hit.kind, hit.state, p, law,
                                          sim_mode, coulomb_in_rgims)
            events.extend(evs)
            record(state, mode)
            while next_out <= t_e + 1e-12:
                next_out += dt_out
            seg_start = state
            step_i = 0
            continue
        state = s1
        step_i += 1
        t_new = state.config.t
        if not 0.0 < state.config.theta < math.pi:
            mode = Mode.terminated("chart_exit")
            record(state, mode)
            break
        if t_new >= next_out - 1e-12:
            record(state, mode)
            while next_out <= t_new + 1e-12:
                next_out += dt_out
    record(state, mode)
    return Trajectory(samples=samples, events=events, params=p, law=law,
                      sim_mode=sim_mode, dt=dt, dt_out=dt_out)
