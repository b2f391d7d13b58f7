"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line."""
import math
import time

import numpy as np
import pytest
from scipy.stats import unitary_group

from cvbell import bell, cli, fock
from cvbell import gaussian as g
from cvbell import symplectic as sp

FIG = bell.BellAngles(*cli.FIG_ANGLES)
ECS = bell.BellAngles(*cli.ECS_ANGLES)
U_GRID = np.round(np.arange(0.0, 1.2 + 1e-9, 0.01), 12)


@pytest.fixture
def verdict(capsys):
    def report(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {number:>2}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")
        assert ok, f"criterion {number} ({title}) failed: {detail}"

    return report


def f_curve(us, **kw):
    return np.array([bell.bell_functional(g.four_mode_squeezed(u, -u, **kw), FIG).f for u in us])


def test_criterion_01_symplectic_suite(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        m = sp.identity()
        for _ in range(rng.integers(1, 9)):
            kind = rng.integers(3)
            i, j = rng.choice(4, size=2, replace=False) + 1
            x = rng.uniform(-1.0, 1.0)
            if kind == 0:
                m = sp.beam_splitter(int(i), int(j), math.pi * x) @ m
            elif kind == 1:
                m = sp.phase_shift(int(i), math.pi * x) @ m
            else:
                m = sp.single_mode_squeezer(int(i), x) @ m
        worst = max(worst, sp.symplectic_defect(m.m))
    worst_orth = 0.0
    for _ in range(1000):
        e = sp.embed_passive(unitary_group.rvs(4, random_state=rng)).m
        worst_orth = max(worst_orth, float(np.max(np.abs(e.T @ e - np.eye(8)))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and worst_orth <= 1e-12 and elapsed < 5.0
    verdict(1, "symplectic suite", ok, f"max |S b S^T - b| = {worst:.1e}, max orthogonality defect {worst_orth:.1e}, {elapsed:.2f} s")


def test_criterion_02_cross_backend(verdict):
    t0 = time.perf_counter()
    worst = 0.0
    for u in (0.1, 0.3, 0.5):
        gs = g.four_mode_squeezed(u, -u)
        fs = fock.squeezed_four_mode(u, -u, 40)
        for angles in (FIG, ECS, bell.BellAngles(0.3, 2.0, 4.4, 5.9)):
            rg, rf = bell.bell_functional(gs, angles), bell.bell_functional(fs, angles)
            for k in bell.BellReport.RATES:
                worst = max(worst, abs(getattr(rg, k) - getattr(rf, k)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed < 60.0
    verdict(2, "Gaussian vs Fock rates", ok, f"max rate difference {worst:.1e} over u in (0.1, 0.3, 0.5), {elapsed:.1f} s")


def test_criterion_03_two_photon_dichotomy(verdict):
    _, f1 = bell.functional_grid(fock.psi1(), 12)
    _, f2 = bell.functional_grid(fock.psi2(), 12)
    thetas = [float(t) for t in 2 * np.pi * np.arange(12) / 12] + [None]
    pi1, pi2, pi12, _, _ = bell.vacuum_table(fock.psi1(), thetas, thetas)
    joint = 1 - pi1[:, None] - pi2[None, :] + pi12
    fact = float(np.max(np.abs(joint - np.outer(1 - pi1, 1 - pi2))))
    ok = f1.max() <= 1e-9 and f2.max() > 0 and fact <= 1e-10
    verdict(
        3,
        "two-photon dichotomy",
        ok,
        f"max f(psi1) = {f1.max():.2e}, max f(psi2) = {f2.max():.4f}, factorisation error {fact:.1e} on 12^4 grid",
    )


def test_criterion_04_pure_figure(verdict):
    f_minus = f_curve(U_GRID)
    f_zero = np.array([bell.bell_functional(g.four_mode_squeezed(u, 0.0), FIG).f for u in U_GRID])
    pos = U_GRID[f_minus > 0]
    ok = pos.size > 0 and f_minus.max() > f_zero.max() > 0
    verdict(
        4,
        "pure squeezed vacuum figure",
        ok,
        f"f(v=-u) > 0 for u in [{pos.min():.2f}, {pos.max():.2f}], max f(v=-u) = {f_minus.max():.4f} > max f(v=0) = {f_zero.max():.4f}",
    )


def test_criterion_05_thermal_figure(verdict):
    curves = {k: f_curve(U_GRID, kappa=k) for k in (1.0, 0.8, 0.7)}
    window = curves[1.0] > 0
    mono = bool(
        np.all(curves[1.0][window] >= curves[0.8][window]) and np.all(curves[0.8][window] >= curves[0.7][window])
    )
    # below the threshold no squeezing in [0, 2] produces a violation
    wide = np.round(np.arange(0.0, 2.0 + 1e-9, 0.01), 12)
    cold = {k: f_curve(wide, kappa=k).max() for k in (0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1)}
    lo, hi = 0.7, 0.8
    for _ in range(20):
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if f_curve(wide, kappa=mid).max() > 1e-12 else (mid, hi)
    ok = mono and all(v <= 1e-12 for v in cold.values()) and curves[0.8].max() > 0
    verdict(
        5,
        "squeezed thermal figure",
        ok,
        f"pointwise f(1) >= f(0.8) >= f(0.7) on the violating window: {mono}; "
        f"max_u f <= 0 for kappa <= 0.7 (worst {max(cold.values()):.1e}); kappa* ~ {hi:.4f}",
    )


def test_criterion_06_leakage_figure(verdict):
    curves = {t: f_curve(U_GRID, transmittance=t) for t in (1.0, 0.8, 0.6)}
    peaks = {t: c.max() for t, c in curves.items()}
    mono = bool(np.all(curves[1.0] >= curves[0.8] - 1e-12) and np.all(curves[0.8] >= curves[0.6] - 1e-12))
    ok = all(p > 0 for p in peaks.values()) and mono
    verdict(
        6,
        "leakage figure",
        ok,
        "max_u f = " + ", ".join(f"{p:.4f} (T={t})" for t, p in peaks.items()) + f"; pointwise decreasing in T: {mono}",
    )


def test_criterion_07_ecs_closed_form(verdict):
    # the closed form's d is the quadrature displacement sqrt(2) Re(alpha) of the Fock amplitude
    worst = 0.0
    for d in np.round(np.arange(0.05, 1.0 + 1e-9, 0.05), 12):
        s = fock.ecs_pair(fock.EcsParams(d / math.sqrt(2)), 30)
        for t in (0.0, 0.7, 2.67):
            for modes, t1, t2 in (([1], t, 0.0), ([3], 0.0, t)):
                worst = max(worst, abs(bell.ecs_vacuum_prob_closed(d, t) - fock.polarizer_vacuum_prob(s, modes, t1, t2)))
    limit = max(
        abs(bell.ecs_vacuum_prob_closed(d, t) - (9 - math.cos(4 * t)) / 16)
        for d in (0.0, 1e-6, 1e-5, 1e-4)
        for t in (0.0, 0.7, 2.67, 4.0)
    )
    ecs_small = bell.EcsState.build(0.05, fock.CUTOFF_NONGAUSSIAN)
    gap = max(
        abs(bell.bell_functional(ecs_small, a).f - bell.bell_functional(fock.psi2(), a).f)
        for a in (ECS, FIG, bell.BellAngles(4.646, 0.459, 3.861, 1.244))
    )
    ok = worst <= 1e-8 and limit <= 1e-10 and gap <= 1e-3
    verdict(
        7,
        "ECS closed form",
        ok,
        f"max |closed - Fock| = {worst:.1e} (d in [0.05, 1], cutoff 30), d->0 limit error {limit:.1e}, "
        f"|f(ECS 0.05) - f(psi2)| = {gap:.1e}",
    )


@pytest.mark.slow
def test_criterion_08_pcs_violation(verdict):
    t0 = time.perf_counter()
    best, norm_err = {}, 0.0
    for zeta in np.round(np.arange(0.1, 2.0 + 1e-9, 0.1), 12):
        s = fock.pcs_pair(fock.PcsParams(zeta, 0), 20)
        norm_err = max(norm_err, abs(s.norm - 1.0), s.tail)
        best[zeta] = bell.optimize_angles(s, 12)[1].f
    elapsed = time.perf_counter() - t0
    zeta_star = max(best, key=best.get)
    ok = max(best.values()) > 0 and norm_err < 1e-10 and elapsed < 600
    verdict(
        8,
        "pair coherent state violation",
        ok,
        f"best f = {best[zeta_star]:.4f} at zeta = {zeta_star}, f > 0 for {sum(v > 0 for v in best.values())}/20 zetas, "
        f"norm error {norm_err:.1e}, {elapsed:.0f} s",
    )


def test_criterion_09_pcs_covariance(verdict):
    worst = 0.0
    for zeta in (0.2, 0.5, 1.0):
        p = fock.PcsParams(zeta, 0)
        s = fock.pcs_pair(p, 20)
        for a, b in ((1, 3), (2, 4)):
            v = fock.pair_covariance(s, a, b)
            n1, n2 = np.diag(v)[:2] - 0.5
            worst = max(worst, float(np.max(np.abs(v - fock.pcs_covariance(p, n1, n2)))))
    verdict(9, "pair coherent covariance", worst <= 1e-8, f"max entry difference {worst:.1e}")


@pytest.mark.slow
def test_criterion_10_determinism(verdict, tmp_path):
    runs = {
        "fig-pure": [],
        "fig-ecs": ["--set", "stop=0.5"],
        "fig-pcs": ["--set", "stop=0.3"],
        "two-photon": ["--set", "stop=1.0"],
    }
    same = True
    for preset, extra in runs.items():
        outs = []
        for tag, jobs in (("a", 1), ("b", 1), ("c", 2), ("d", 3)):
            path = tmp_path / f"{preset}-{tag}.csv"
            assert cli.main(["sweep", "--preset", preset, *extra, "--jobs", str(jobs), "--out", str(path)]) == 0
            outs.append(path.read_bytes())
        same = same and all(o == outs[0] for o in outs)
    verdict(10, "determinism", same, "byte-identical CSV for 4 presets across repeated runs and --jobs 1/2/3")
