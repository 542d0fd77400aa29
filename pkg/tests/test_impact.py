import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from painleve_rod import impact
from painleve_rod.errors import LawRejected, NotAnImpact, NotOnContact
from painleve_rod.geometry import (Params, State, VerticalVector,
                                   contact_normal, contact_state, decompose,
                                   friction_normal, friction_residual, inner,
                                   tangent_contact_state)
from painleve_rod.impact import (ImpactTag, Law, LawParams, apply, classify,
                                 is_outgoing, kinetic_energy,
                                 law_detach, law_max_braking,
                                 law_rebound_stop)

P = Params(m=1.0, L=1.0, A=1.0 / 3.0, g=10.0)
LP_NB = LawParams(epsilon=0.5, sign_convention="n_b")
LP_PUSHED = LawParams(epsilon=0.5, sign_convention="pushed")
WORKED = tangent_contact_state(math.pi / 2, 1.0, 0.0, P)


def bilateral(**kw):
    kw.setdefault("b_unilateral", False)
    return LawParams(**kw)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

class TestClassify:
    def test_worked_example_nb_convention(self):
        cls = classify(WORKED, P, LP_NB)
        assert cls.tag is ImpactTag.TANGENT_IMPACT_B
        assert cls.n_b == pytest.approx(0.5, abs=1e-12)

    def test_worked_example_pushed_convention_is_degenerate(self):
        # cos(pi/2) = 0: neither pushed nor pulled, hence no impact
        cls = classify(WORKED, P, LP_PUSHED)
        assert cls.tag is ImpactTag.TANGENT_NO_IMPACT_B

    def test_pushed_convention_tracks_cos_sign(self):
        lo = classify(tangent_contact_state(0.6, 1.0, 0.0, P), P, LP_PUSHED)
        hi = classify(tangent_contact_state(2.5, 1.0, 0.0, P), P, LP_PUSHED)
        assert lo.tag is ImpactTag.TANGENT_IMPACT_B
        assert hi.tag is ImpactTag.TANGENT_NO_IMPACT_B
        hi_neg = classify(tangent_contact_state(2.5, -1.0, 0.0, P), P,
                          LP_PUSHED)
        assert hi_neg.tag is ImpactTag.TANGENT_IMPACT_B

    def test_approaching(self):
        s = contact_state(1.0, 0.0, -1.0, 0.0, P)
        assert classify(s, P, LP_NB).tag is ImpactTag.APPROACHING_S

    def test_separating(self):
        s = contact_state(1.0, 0.0, 1.0, 0.0, P)
        assert classify(s, P, LP_NB).tag is ImpactTag.SEPARATING_S

    def test_degenerate_zero_slip(self):
        s = tangent_contact_state(1.0, 0.0, 2.0, P)
        assert classify(s, P, LP_NB).tag is ImpactTag.TANGENT_DEGENERATE

    def test_bilateral_impacts_both_sides(self):
        lp = bilateral()
        for slip in (1.0, -1.0):
            s = tangent_contact_state(1.0, slip, 0.0, P)
            assert classify(s, P, lp).tag is ImpactTag.TANGENT_IMPACT_B

    def test_off_contact(self):
        s = State(WORKED.config.__class__(0, 0, 3.0, 1.0), WORKED.vel)
        with pytest.raises(NotOnContact):
            classify(s, P, LP_NB)


class TestIsOutgoing:
    def test_separating_is_outgoing(self):
        s = contact_state(1.0, 0.0, 1.0, 0.0, P)
        assert is_outgoing(s, P, LP_NB)

    def test_resting_contact_is_outgoing(self):
        s = tangent_contact_state(1.0, 0.0, 1.5, P)
        assert is_outgoing(s, P, LP_NB)
        assert is_outgoing(s, P, bilateral())

    def test_incoming_impact_is_not_outgoing(self):
        assert not is_outgoing(WORKED, P, LP_NB)
        s = contact_state(1.0, 0.0, -1.0, 0.0, P)
        assert not is_outgoing(s, P, LP_NB)

    def test_sigma_always_makes_outgoing(self):
        lp = LawParams(detach_variant=True, sigma_gain=0.3,
                       sign_convention="n_b")
        out = apply(Law("stop", lp), WORKED, P)
        assert out.coefficients.sigma > 0.0
        assert is_outgoing(out.p_r, P, lp)

    def test_bilateral_needs_zero_nb_at_tangency(self):
        lp = bilateral()
        assert not is_outgoing(tangent_contact_state(1.0, 0.5, 0.0, P), P, lp)
        assert is_outgoing(tangent_contact_state(1.0, 0.0, 0.7, P), P, lp)


# ---------------------------------------------------------------------------
# law parameter validation
# ---------------------------------------------------------------------------

class TestLawValidation:
    def test_epsilon_one_rejected(self):
        with pytest.raises(ValueError):
            Law("rebound", LawParams(epsilon=1.0))

    def test_epsilon_zero_rejected_for_rebound(self):
        with pytest.raises(ValueError):
            Law("rebound", LawParams(epsilon=0.0))

    def test_epsilon_range_checked_at_params(self):
        with pytest.raises(ValueError):
            LawParams(epsilon=1.5)

    def test_gamma_open_interval(self):
        with pytest.raises(ValueError):
            LawParams(gamma=1.0)

    def test_detach_requires_bilateral(self):
        with pytest.raises(ValueError):
            Law("detach", LawParams(b_unilateral=True))

    def test_unilateral_families_reject_bilateral(self):
        with pytest.raises(ValueError):
            Law("rebound", bilateral(epsilon=0.5))

    def test_max_braking_needs_positive_gain(self):
        with pytest.raises(ValueError):
            Law("max_braking", LawParams(sigma_gain=0.0))

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            Law("bounce", LawParams())

    def test_negative_gains_rejected(self):
        with pytest.raises(ValueError):
            LawParams(lambda1=-1.0)
        with pytest.raises(ValueError):
            LawParams(mu_cap=0.0)


# ---------------------------------------------------------------------------
# rebound / stop
# ---------------------------------------------------------------------------

class TestReboundStop:
    def test_worked_rebound(self):
        out = apply(Law("rebound", LP_NB), WORKED, P)
        assert out.coefficients.sigma == 0.0
        assert out.coefficients.beta == pytest.approx(-0.75, abs=1e-12)
        assert out.p_r.vel.as_tuple() == pytest.approx((0.625, 0.0, 1.125),
                                                       abs=1e-12)
        assert friction_residual(out.p_r, P) == pytest.approx(-0.5, abs=1e-12)
        assert out.energy_delta == pytest.approx(-0.09375, abs=1e-12)

    def test_rebound_coefficients_function(self):
        co = law_rebound_stop(WORKED, P, LP_NB)
        assert co.sigma == 0.0
        assert co.beta == pytest.approx(-0.75, abs=1e-12)

    def test_rebound_equals_projection_form(self):
        # sigma/beta route must match par_b - eps * perp_b within 1e-12
        d = decompose(WORKED, P)
        out = apply(Law("rebound", LP_NB), WORKED, P)
        kb = friction_normal(WORKED.config.theta, P)
        sb_form = WORKED.vel + out.coefficients.beta * kb
        proj_form = d.par_b + (-LP_NB.epsilon) * d.perp_b
        assert out.p_r.vel.as_tuple() == pytest.approx(sb_form.as_tuple(),
                                                       abs=1e-12)
        assert out.p_r.vel.as_tuple() == pytest.approx(proj_form.as_tuple(),
                                                       abs=1e-12)

    def test_stop_lands_exactly_on_zero_slip(self):
        out = apply(Law("stop", LP_NB), WORKED, P)
        assert friction_residual(out.p_r, P) == 0.0
        d = decompose(WORKED, P)
        assert out.p_r.vel.as_tuple() == d.par_b.as_tuple()

    def test_detaching_variant_lifts_off(self):
        lp = LawParams(epsilon=0.5, sign_convention="n_b",
                       detach_variant=True, sigma_gain=0.4)
        out = apply(Law("rebound", lp), WORKED, P)
        assert out.coefficients.sigma == pytest.approx(0.4 * 0.5, abs=1e-13)
        d = decompose(out.p_r, P)
        assert d.n_s > P.tol

    def test_pulled_state_raises(self):
        pulled = tangent_contact_state(math.pi / 2, -1.0, 0.0, P)
        with pytest.raises(NotAnImpact):
            apply(Law("rebound", LP_NB), pulled, P)
        with pytest.raises(NotAnImpact):
            law_rebound_stop(pulled, P, LP_NB)


# ---------------------------------------------------------------------------
# max braking
# ---------------------------------------------------------------------------

class TestMaxBraking:
    LAW = Law("max_braking", LawParams(mu_cap=1.0, sigma_gain=0.1,
                                       sign_convention="n_b"))

    def test_below_cap_stops(self):
        out = apply(self.LAW, WORKED, P)  # |n_b| = 0.5 <= 1
        assert out.coefficients.sigma == 0.0
        assert out.coefficients.beta == pytest.approx(-0.5, abs=1e-12)
        d = decompose(WORKED, P)
        assert out.p_r.vel.as_tuple() == d.par_b.as_tuple()
        assert friction_residual(out.p_r, P) == 0.0

    def test_above_cap_detaches(self):
        fast = tangent_contact_state(math.pi / 2, 4.0, 0.0, P)  # n_b = 2
        out = apply(self.LAW, fast, P)
        assert out.coefficients.beta == pytest.approx(-1.0, abs=1e-12)
        assert out.coefficients.sigma == pytest.approx(0.1, abs=1e-12)
        d = decompose(out.p_r, P)
        assert d.n_s > 0.0
        assert is_outgoing(out.p_r, P, self.LAW.params)
        assert out.p_r.vel.as_tuple() == pytest.approx((3.5, 0.1, 1.5),
                                                       abs=1e-12)

    def test_tie_goes_to_full_stop(self):
        tie = tangent_contact_state(math.pi / 2, 2.0, 0.0, P)  # n_b = 1.0
        out = apply(self.LAW, tie, P)
        assert out.regime == "brake_stop"
        assert out.coefficients.sigma == 0.0
        assert friction_residual(out.p_r, P) == 0.0

    def test_coefficients_function(self):
        fast = tangent_contact_state(math.pi / 2, 4.0, 0.0, P)
        co = law_max_braking(fast, P, self.LAW.params)
        assert (co.sigma, co.beta) == pytest.approx((0.1, -1.0), abs=1e-12)


# ---------------------------------------------------------------------------
# detach (bilateral)
# ---------------------------------------------------------------------------

class TestDetach:
    LP = bilateral(lambda1=2.0, alpha1=3.0, lambda2=1.0, alpha2=4.0,
                   gamma=0.5, mu_cap=10.0)
    LAW = Law("detach", LP)

    def test_pushed_branch(self):
        out = apply(self.LAW, WORKED, P)  # n_b = +0.5
        # sigma = (lambda1 m + alpha1 A) |n_b| = (2 + 1) * 0.5
        assert out.coefficients.sigma == pytest.approx(1.5, abs=1e-12)
        assert out.coefficients.beta == pytest.approx(-0.5, abs=1e-12)
        assert out.p_r.vel.as_tuple() == pytest.approx((0.75, 1.5, 0.75),
                                                       abs=1e-12)

    def test_pulled_branch_partial_braking(self):
        pulled = tangent_contact_state(math.pi / 2, -1.0, 0.0, P)  # n_b=-0.5
        out = apply(self.LAW, pulled, P)
        # sigma = (lambda2 m + alpha2 A) |n_b| = (1 + 4/3) * 0.5
        assert out.coefficients.sigma == pytest.approx(7.0 / 6.0, abs=1e-12)
        assert out.coefficients.beta == pytest.approx(-0.25, abs=1e-12)

    def test_pushed_above_cap(self):
        lp = bilateral(lambda1=2.0, alpha1=3.0, mu_cap=1.0, gamma=0.5)
        fast = tangent_contact_state(math.pi / 2, 4.0, 0.0, P)  # n_b = 2
        out = apply(Law("detach", lp), fast, P)
        assert out.coefficients.beta == pytest.approx(-1.0, abs=1e-12)
        assert out.regime == "detach_pushed_cap"

    def test_always_outgoing(self):
        for slip in (3.0, 0.4, -0.4, -3.0):
            s = tangent_contact_state(1.1, slip, 0.7, P)
            out = apply(self.LAW, s, P)
            assert is_outgoing(out.p_r, P, self.LP)
            assert decompose(out.p_r, P).n_s > 0.0

    def test_zero_nb_not_an_impact(self):
        s = tangent_contact_state(1.1, 0.0, 0.7, P)
        with pytest.raises(NotAnImpact):
            law_detach(s, P, self.LP)


# ---------------------------------------------------------------------------
# kinetic energy
# ---------------------------------------------------------------------------

class TestKineticEnergy:
    def test_rest(self):
        s = contact_state(1.0, 0.0, 0.0, 0.0, P)
        assert kinetic_energy(s, P) == 0.0

    def test_worked_state(self):
        assert kinetic_energy(WORKED, P) == pytest.approx(0.5, abs=1e-14)

    def test_after_rebound(self):
        out = apply(Law("rebound", LP_NB), WORKED, P)
        assert kinetic_energy(out.p_r, P) == pytest.approx(0.40625,
                                                           abs=1e-12)


# ---------------------------------------------------------------------------
# line impacts (approaching states)
# ---------------------------------------------------------------------------

class TestLineImpact:
    def test_plastic_touchdown_becomes_tangent(self):
        s = contact_state(1.0, 0.0, -2.0, 0.0, P)
        out = apply(Law("stop", LP_NB), s, P)
        d = decompose(out.p_r, P)
        assert abs(d.n_s) <= 1e-12
        assert is_outgoing(out.p_r, P, LP_NB)
        assert out.regime.startswith("line_impact")

    def test_restitution_reverses_approach(self):
        lp = LawParams(sign_convention="n_b", e_newton=0.5)
        s = contact_state(1.0, 0.0, -2.0, 0.0, P)
        n_s_in = decompose(s, P).n_s
        out = apply(Law("stop", lp), s, P)
        assert decompose(out.p_r, P).n_s == pytest.approx(-0.5 * n_s_in,
                                                          abs=1e-12)

    def test_tangential_law_composed_when_pushed(self):
        s = contact_state(0.8, 3.0, -1.0, 0.0, P)  # approaching, slipping +
        out = apply(Law("stop", LP_NB), s, P)
        assert out.regime == "line_impact+stop"
        assert abs(decompose(out.p_r, P).n_b) <= 1e-12


# ---------------------------------------------------------------------------
# invariant properties
# ---------------------------------------------------------------------------

LAWS_FOR_PROPERTIES = [
    Law("rebound", LawParams(epsilon=0.3, sign_convention="n_b")),
    Law("rebound", LawParams(epsilon=0.7, sign_convention="pushed")),
    Law("stop", LawParams(sign_convention="pushed")),
    Law("max_braking", LawParams(mu_cap=0.8, sigma_gain=0.6,
                                 sign_convention="n_b")),
    Law("detach", bilateral(lambda1=0.7, lambda2=1.3, alpha1=0.9,
                            alpha2=0.5, gamma=0.4, mu_cap=0.9)),
]


def _impacting_state(rng, p, lp):
    """Random tangent state on the impacting side of the slip constraint."""
    while True:
        theta = rng.uniform(0.05, math.pi - 0.05)
        if lp.sign_convention == "pushed" and abs(math.cos(theta)) < 1e-2:
            continue
        mag = rng.uniform(0.1, 4.0)
        if not lp.b_unilateral:
            slip = mag * (1 if rng.uniform() < 0.5 else -1)
        elif lp.sign_convention == "n_b":
            slip = mag
        else:
            slip = mag * math.copysign(1.0, math.cos(theta))
        return tangent_contact_state(theta, slip, rng.uniform(-2, 2), p)


class TestInvariants:
    @pytest.mark.parametrize("law", LAWS_FOR_PROPERTIES,
                             ids=lambda lw: f"{lw.family}-{lw.params.sign_convention}")
    def test_determinism_and_no_reimpact(self, rng, law):
        for _ in range(400):
            s = _impacting_state(rng, P, law.params)
            out = apply(law, s, P)
            assert is_outgoing(out.p_r, P, law.params)
            assert not classify(out.p_r, P, law.params).is_impact
            again = apply(law, s, P)
            assert again.p_r.vel.as_tuple() == out.p_r.vel.as_tuple()

    @pytest.mark.parametrize("law", LAWS_FOR_PROPERTIES,
                             ids=lambda lw: f"{lw.family}-{lw.params.sign_convention}")
    def test_energy_identity(self, rng, law):
        # dT = (sigma^2 + 2 sigma n_s) / 2 + (beta^2 + 2 beta n_b) / 2
        for _ in range(200):
            s = _impacting_state(rng, P, law.params)
            d = decompose(s, P)
            out = apply(law, s, P)
            sig, bet = out.coefficients.sigma, out.coefficients.beta
            predicted = 0.5 * (sig * sig + 2.0 * sig * d.n_s) \
                + 0.5 * (bet * bet + 2.0 * bet * d.n_b)
            assert out.energy_delta == pytest.approx(predicted, abs=1e-10)

    def test_pulled_states_are_fixed_points(self, rng):
        lp = LP_NB
        for _ in range(200):
            theta = rng.uniform(0.05, math.pi - 0.05)
            s = tangent_contact_state(theta, -rng.uniform(0.1, 4.0),
                                      rng.uniform(-2, 2), P)
            assert classify(s, P, lp).tag is ImpactTag.TANGENT_NO_IMPACT_B
            with pytest.raises(NotAnImpact):
                apply(Law("rebound", lp), s, P)

    @pytest.mark.parametrize("law", [
        Law("rebound", LawParams(epsilon=0.3, sign_convention="n_b")),
        Law("detach", bilateral(mu_cap=1e6)),
    ], ids=("rebound", "detach-below-cap"))
    def test_scale_covariance(self, rng, law):
        for _ in range(100):
            theta = rng.uniform(0.05, math.pi - 0.05)
            slip = rng.uniform(0.1, 1.0)
            thd = rng.uniform(-0.5, 0.5)
            c = rng.uniform(0.5, 3.0)
            out1 = apply(law, tangent_contact_state(theta, slip, thd, P), P)
            out2 = apply(law, tangent_contact_state(theta, c * slip,
                                                    c * thd, P), P)
            scaled = (c * out1.p_r.vel).as_tuple()
            assert out2.p_r.vel.as_tuple() == pytest.approx(scaled,
                                                            rel=1e-11,
                                                            abs=1e-11)

    def test_impulse_reconstructs_velocity(self, rng):
        for law in LAWS_FOR_PROPERTIES:
            s = _impacting_state(rng, P, law.params)
            out = apply(law, s, P)
            total = s.vel + out.impulse
            assert total.as_tuple() == pytest.approx(out.p_r.vel.as_tuple(),
                                                     rel=1e-12, abs=1e-12)
            # impulse sits in the span of the two unit generators
            ks = contact_normal(s.config.theta, P)
            kb = friction_normal(s.config.theta, P)
            rebuilt = out.coefficients.sigma * ks + out.coefficients.beta * kb
            assert out.impulse.as_tuple() == pytest.approx(
                rebuilt.as_tuple(), abs=1e-12)
