import math

import numpy as np
import pytest

from cvbell import bell, fock
from cvbell import gaussian as g
from cvbell.errors import InvalidArgumentError

FIG = bell.BellAngles(1.32, 0.93, 3.66, 3.32)
ECS = bell.BellAngles(2.67, 5.59, 1.88, 3.24)


def test_angles_canonicalised():
    a = bell.BellAngles(-0.5, 2 * math.pi, 7.0, 1.0)
    assert a.theta1 == pytest.approx(2 * math.pi - 0.5)
    assert a.theta2 == 0.0
    assert a.theta1p == pytest.approx(7.0 - 2 * math.pi)
    assert all(0.0 <= t < 2 * math.pi for t in a.as_tuple())
    assert bell.BellAngles(-1e-300, 0, 0, 0).theta1 < 2 * math.pi
    with pytest.raises(InvalidArgumentError):
        bell.BellAngles(float("inf"), 0, 0, 0)


@pytest.mark.parametrize("state", [g.vacuum(), fock.vacuum_state(3)], ids=["gaussian", "fock"])
def test_vacuum_has_no_coincidences(state):
    for a, b in ((0.3, 1.2), (None, 0.4), (0.4, None), (None, None)):
        assert bell.coincidence(state, a, b) == pytest.approx(0.0, abs=1e-14)
    r = bell.bell_functional(state, FIG)
    assert r.f == pytest.approx(0.0, abs=1e-14)
    assert not r.violated


def test_both_removed_rates_for_two_photon_states():
    assert bell.coincidence(fock.psi1(), None, None) == pytest.approx(1.0, abs=1e-15)
    assert bell.coincidence(fock.psi2(), None, None) == pytest.approx(0.5, abs=1e-15)


def test_mixed_settings_by_hand():
    """psi2 with one polarizer removed, worked out branch by branch.

    In the basis b = c a1 + s a2, b' = -s a1 + c a2 the branches |10>, |01> and |11>
    of modes 1-2 leave b empty with probability s^2, c^2 and 2 c^2 s^2, so
    Pr[vac_t] = 1/2 + c^2 s^2 / 2, Pr[vac_34] = 1/4 (only |1100>) and
    Pr[vac_t, vac_34] = c^2 s^2 / 2, giving P(t, -) = 1/4 for every t.
    """
    s = fock.psi2()
    for t in (0.0, 0.4, 0.9, 2.5):
        cs2 = (math.cos(t) * math.sin(t)) ** 2
        assert fock.polarizer_vacuum_prob(s, [1], t, 0.0) == pytest.approx(0.5 + cs2 / 2, abs=1e-14)
        assert fock.polarizer_vacuum_prob(s, [1, 3, 4], t, 0.0) == pytest.approx(cs2 / 2, abs=1e-14)
        assert bell.coincidence(s, t, None) == pytest.approx(0.25, abs=1e-14)
        assert bell.coincidence(s, None, t) == pytest.approx(0.25, abs=1e-14)


def test_report_is_consistent():
    r = bell.bell_functional(g.four_mode_squeezed(0.6, -0.6), FIG)
    combo = r.p_t1t2 - r.p_t1t2p + r.p_t1pt2 + r.p_t1pt2p - r.p_t1p_x - r.p_x_t2
    assert r.f == pytest.approx(combo, abs=1e-12)
    assert r.lower_margin == pytest.approx(r.f + r.p_xx, abs=1e-15)
    assert r.upper_margin == -r.f
    assert r.violated and r.f > 0
    assert r.backend == "gaussian"
    for p in r.rates().values():
        assert 0.0 <= p <= 1.0


def test_report_rejects_bad_rates():
    rates = dict.fromkeys(bell.BellReport.RATES, 0.2)
    rates["p_xx"] = 1.5
    with pytest.raises(InvalidArgumentError):
        bell.make_report(rates, "test")


def test_violation_flags_lower_bound():
    rates = dict.fromkeys(bell.BellReport.RATES, 0.0)
    rates.update(p_t1p_x=0.6, p_x_t2=0.5, p_xx=0.3)
    r = bell.make_report(rates, "test")
    assert r.f == pytest.approx(-1.1)
    assert r.lower_margin < 0 and r.violated


def test_periodicity():
    s = g.four_mode_squeezed(0.5, -0.5)
    base = bell.bell_functional(s, FIG).f
    shifted = bell.bell_functional(s, [t + 2 * math.pi * k for t, k in zip(FIG.as_tuple(), (1, -1, 2, 3))]).f
    # t + 2 pi k is itself rounded, so the canonical angles agree to a few ulps
    assert shifted == pytest.approx(base, abs=1e-12)


def test_gaussian_and_fock_agree():
    u = 0.35
    rg = bell.bell_functional(g.four_mode_squeezed(u, -u), ECS)
    rf = bell.bell_functional(fock.squeezed_four_mode(u, -u, 30), ECS)
    for k in bell.BellReport.RATES:
        assert getattr(rg, k) == pytest.approx(getattr(rf, k), abs=1e-9)
    assert rf.backend == "fock" and rf.tail < 1e-10


def test_density_state_functional_matches_gaussian():
    u, t = 0.08, 0.8
    rho = fock.attenuate_fock(fock.truncate(fock.squeezed_four_mode(u, -u, 20), 5, budget=1e-9), t)
    rf = bell.bell_functional(rho, FIG)
    rg = bell.bell_functional(g.four_mode_squeezed(u, -u, transmittance=t), FIG)
    assert rf.f == pytest.approx(rg.f, abs=1e-8)


def test_psi1_factorises():
    s = fock.psi1()
    angles = [0.0, 0.4, 1.3, 2.9, None]
    pi1, pi2, pi12, _, _ = bell.vacuum_table(s, angles, angles)
    joint = 1 - pi1[:, None] - pi2[None, :] + pi12
    assert np.allclose(joint, np.outer(1 - pi1, 1 - pi2), atol=1e-14)


def test_functional_grid_matches_direct_evaluation():
    s = fock.psi2()
    thetas, f = bell.functional_grid(s, 5)
    rng = np.random.default_rng(0)
    for idx in rng.integers(0, 5, size=(6, 4)):
        direct = bell.bell_functional(s, [thetas[i] for i in idx]).f
        assert f[tuple(idx)] == pytest.approx(direct, abs=1e-14)


def test_optimizer_on_psi2():
    angles, report = bell.optimize_angles(fock.psi2(), 8)
    # the best value for this state is (sqrt 2 - 1)/4
    assert report.f == pytest.approx((math.sqrt(2) - 1) / 4, abs=1e-8)
    assert bell.bell_functional(fock.psi2(), angles).f == report.f


def test_optimizer_is_deterministic_and_validates():
    s = g.four_mode_squeezed(0.5, -0.5)
    assert bell.optimize_angles(s, 6) == bell.optimize_angles(s, 6)
    with pytest.raises(InvalidArgumentError):
        bell.optimize_angles(s, 3)


def test_optimizer_on_vacuum():
    _, r = bell.optimize_angles(g.vacuum(), 4)
    assert r.f == pytest.approx(0.0, abs=1e-14)


# --- entangled coherent states ------------------------------------------------


def ecs_direct(d, theta):
    """Vacuum probability of the transmitted mode, summed over the four coherent-state branches."""
    b = d / 2.0  # amplitude of each branch on one mode: alpha/sqrt 2 with alpha = d/sqrt 2
    c, s = math.cos(theta), math.sin(theta)
    n2 = 1.0 / (2.0 - 2.0 * math.exp(-d * d))
    terms = [(-b, -b, 1.0), (b, b, 1.0), (-b, b, -math.exp(-d * d / 2)), (b, -b, -math.exp(-d * d / 2))]
    total = 0.0
    for x1, y1, w1 in terms:
        for x2, y2, w2 in terms:
            xb, yb = c * x1 + s * x2, c * y1 + s * y2
            xp, yp = -s * x1 + c * x2, -s * y1 + c * y2
            total += w1 * w2 * math.exp(-(xb**2) / 2 - yb**2 / 2 - (xp - yp) ** 2 / 2)
    return n2 * n2 * total


# below d ~ 0.1 the branch sum itself cancels catastrophically (errors ~ eps / d^4)
@pytest.mark.parametrize("d", [0.1, 0.3, 1.0, 2.5])
@pytest.mark.parametrize("theta", [0.0, 0.7, 2.67])
def test_ecs_closed_form_against_coherent_sum(d, theta):
    assert bell.ecs_vacuum_prob_closed(d, theta) == pytest.approx(ecs_direct(d, theta), abs=1e-12)


def test_ecs_closed_form_symmetries():
    for d in (0.2, 0.9):
        for t in (0.1, 1.4):
            base = bell.ecs_vacuum_prob_closed(d, t)
            assert bell.ecs_vacuum_prob_closed(d, t + math.pi / 2) == pytest.approx(base, abs=1e-14)
            assert bell.ecs_vacuum_prob_closed(-d, t) == base


def test_ecs_closed_form_small_d_is_continuous():
    for t in (0.0, 0.5):
        below = bell.ecs_vacuum_prob_closed(0.999e-3, t)
        above = bell.ecs_vacuum_prob_closed(1.001e-3, t)
        assert above == pytest.approx(below, abs=1e-6)
    assert bell.ecs_vacuum_prob_closed(0.0, 0.0) == 0.5


def test_ecs_closed_form_printed_amplitude_convention_disagrees():
    """Reading d as Re(alpha) of the Fock amplitude misses the Fock oracle by a visible margin."""
    alpha = 0.8
    s = fock.ecs_pair(fock.EcsParams(alpha), 30)
    oracle = fock.polarizer_vacuum_prob(s, [1], 2.67, 0.0)
    assert abs(bell.ecs_vacuum_prob_closed(alpha, 2.67) - oracle) > 1e-3
    assert bell.ecs_vacuum_prob_closed(math.sqrt(2) * alpha, 2.67) == pytest.approx(oracle, abs=1e-12)


def test_ecs_hybrid_matches_pure_fock():
    e = bell.EcsState.build(0.7, 30)
    hybrid = bell.bell_functional(e, ECS)
    plain = bell.bell_functional(e.fock_state, ECS)
    assert hybrid.backend == "ecs-hybrid"
    assert hybrid.f == pytest.approx(plain.f, abs=1e-12)


def test_ecs_complex_alpha_falls_back_to_fock():
    e = bell.EcsState.build(0.5 + 0.2j, 20)
    assert bell.bell_functional(e, ECS).backend == "fock"


def test_unsupported_state():
    with pytest.raises(InvalidArgumentError):
        bell.bell_functional(np.eye(8), FIG)
