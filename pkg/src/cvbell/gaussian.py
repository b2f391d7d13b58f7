"""Zero-mean Gaussian states held as 8x8 covariance matrices.

Vacuum projections are evaluated from the phase-space overlap of two Gaussians,
which reduces to a ratio of determinants of the state's quadratic form
``G = V^{-1} / 2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import block_diag

from . import symplectic as sp
from .errors import IllConditionedError, InvalidArgumentError, NumericalFailureError

SYMMETRY_TOL = 1e-12
UNCERTAINTY_TOL = 1e-10
MAX_CONDITION = 1e12
PROB_TOL = 1e-9


def _uncertainty_floor(v):
    return float(np.min(np.linalg.eigvalsh(v + 0.5j * sp.BETA)))


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Covariance ``V_ij = <{dxi_i, dxi_j}>/2`` of a zero-mean four-mode state."""

    v: np.ndarray

    def __post_init__(self):
        v = np.array(self.v, dtype=float, copy=True)
        if v.shape != (sp.DIM, sp.DIM):
            raise InvalidArgumentError(f"covariance must be {sp.DIM}x{sp.DIM}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError("covariance has non-finite entries")
        if np.max(np.abs(v - v.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(v))):
            raise InvalidArgumentError("covariance is not symmetric")
        v = 0.5 * (v + v.T)
        floor = _uncertainty_floor(v)
        if floor < -UNCERTAINTY_TOL * max(1.0, np.max(np.abs(v))):
            raise InvalidArgumentError(f"covariance violates the uncertainty relation (eigenvalue {floor:.3e})")
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    @property
    def mean_photons(self):
        """Mean photon number per mode, ``(V_qq + V_pp - 1) / 2``."""
        d = np.diag(self.v)
        return 0.5 * (d[: sp.NMODES] + d[sp.NMODES :] - 1.0)


@dataclass(frozen=True)
class ThermalParam:
    kappa: float

    def __post_init__(self):
        if not (np.isfinite(self.kappa) and 0.0 < self.kappa <= 1.0):
            raise InvalidArgumentError(f"kappa must lie in (0, 1], got {self.kappa}")


@dataclass(frozen=True, eq=False)
class GMatrix:
    g: np.ndarray

    @property
    def det(self):
        return float(np.linalg.det(self.g))


def thermal_state(t=ThermalParam(1.0)) -> GaussianState:
    if not isinstance(t, ThermalParam):
        t = ThermalParam(float(t))
    return GaussianState(np.eye(sp.DIM) / (2.0 * t.kappa))


def vacuum() -> GaussianState:
    return thermal_state(ThermalParam(1.0))


def apply_symplectic(s: GaussianState, m) -> GaussianState:
    if not isinstance(m, sp.SymplecticMap):
        m = sp.SymplecticMap(m)
    return GaussianState(m.m @ s.v @ m.m.T)


def attenuate(s: GaussianState, t) -> GaussianState:
    """Mix every mode with its own vacuum ancilla at transmittance ``t`` and discard the ancillas."""
    if not (np.isfinite(t) and 0.0 <= t <= 1.0):
        raise InvalidArgumentError(f"transmittance must lie in [0, 1], got {t}")
    return GaussianState(t * s.v + 0.5 * (1.0 - t) * np.eye(sp.DIM))


def four_mode_squeezed(u, v, kappa=1.0, transmittance=1.0) -> GaussianState:
    """``K S(u, v)`` acting on a thermal state, optionally followed by leakage."""
    m = sp.k_matrix() @ sp.squeezer_block(sp.SqueezeParams(u, v))
    s = apply_symplectic(thermal_state(ThermalParam(kappa)), m)
    if transmittance != 1.0:
        s = attenuate(s, transmittance)
    return s


def _condition(a):
    return float(np.linalg.cond(a))


def g_matrix(s: GaussianState) -> GMatrix:
    cond = _condition(s.v)
    if cond > MAX_CONDITION:
        raise IllConditionedError("covariance matrix is numerically singular", cond)
    g = 0.5 * np.linalg.inv(s.v)
    g = 0.5 * (g + g.T)
    g.setflags(write=False)
    return GMatrix(g)


def _logdet_spd(a):
    # Cholesky doubles as the positive-definiteness check
    try:
        l = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError("matrix in the overlap formula is not positive definite") from exc
    return 2.0 * float(np.sum(np.log(np.diag(l))))


def _projector_mask(modes):
    modes = sorted(set(modes))
    if not modes:
        raise InvalidArgumentError("at least one mode must be projected")
    for m in modes:
        if m not in (1, 2, 3, 4):
            raise InvalidArgumentError(f"mode index must be in 1..4, got {m!r}")
    e = np.zeros(sp.DIM)
    for m in modes:
        e[m - 1] = 1.0
        e[m - 1 + sp.NMODES] = 1.0
    return modes, np.diag(e)


def _checked_probability(p):
    if not np.isfinite(p) or p < -PROB_TOL or p > 1.0 + PROB_TOL:
        raise NumericalFailureError(f"vacuum overlap {p!r} is outside [0, 1]")
    return min(max(p, 0.0), 1.0)


def _overlap(g, logdet_g, e, nmodes, rot):
    a = rot.T @ g @ rot + e
    cond = _condition(a)
    if cond > MAX_CONDITION:
        raise IllConditionedError("overlap matrix is numerically singular", cond)
    return _checked_probability(2.0**nmodes * np.exp(0.5 * (logdet_g - _logdet_spd(a))))


def vacuum_overlap(s, modes: Iterable[int], theta1, theta2) -> float:
    """``Tr(rho P)`` for the vacuum projector on ``modes`` after the polarizer rotation.

    Evaluates ``2^n sqrt(det G / det(U^T G U + E))`` where ``U`` is
    :func:`symplectic.polarizer_rotation` and ``E`` puts ones on the ``q`` and
    ``p`` diagonal slots of every projected mode.
    """
    g = s if isinstance(s, GMatrix) else g_matrix(s)
    modes, e = _projector_mask(modes)
    rot = sp.polarizer_rotation(theta1, theta2).m
    return _overlap(g.g, _logdet_spd(g.g), e, len(modes), rot)


def _direction_modes(theta, first):
    # polarizer present -> project the rotated first mode; removed -> both modes
    return ([first], theta) if theta is not None else ([first, first + 1], 0.0)


def vacuum_table(s, thetas1: Sequence, thetas2: Sequence):
    """Vacuum probabilities for every polarizer setting in ``thetas1 x thetas2``.

    ``None`` marks a removed polarizer.  Returns ``(pi1, pi2, pi12)`` holding the
    direction-k projections, the direction-k' projections and the joint ones.
    """
    g = s if isinstance(s, GMatrix) else g_matrix(s)
    logdet_g = _logdet_spd(g.g)

    def one(modes, t1, t2):
        modes, e = _projector_mask(modes)
        r1, r2 = sp.rotation2(t1), sp.rotation2(t2)
        rot = block_diag(r1, r2, r1, r2)
        return _overlap(g.g, logdet_g, e, len(modes), rot)

    dir1 = [_direction_modes(t, 1) for t in thetas1]
    dir2 = [_direction_modes(t, 3) for t in thetas2]
    pi1 = np.array([one(m, t, 0.0) for m, t in dir1])
    pi2 = np.array([one(m, 0.0, t) for m, t in dir2])
    pi12 = np.array([[one(m1 + m2, t1, t2) for m2, t2 in dir2] for m1, t1 in dir1])
    return pi1, pi2, pi12
