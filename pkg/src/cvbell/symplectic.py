"""Linear phase-space maps for the four-mode field.

Quadratures are ordered ``xi = (q1, q2, q3, q4, p1, p2, p3, p4)`` everywhere and
annihilation operators as ``(a1, a2, a3, a4)``.  A passive unitary ``u`` acts in
the Heisenberg picture as ``a -> u a``; its phase-space image is
``[[X, Y], [-Y, X]]`` with ``u = X - iY``.  Mode indices in the public API are
1-based, matching the optical labels.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .errors import InvalidArgumentError

NMODES = 4
DIM = 2 * NMODES

CONSTRUCT_TOL = 1e-10
SQUEEZE_BOUND = 5.0

BETA = np.block(
    [[np.zeros((NMODES, NMODES)), np.eye(NMODES)], [-np.eye(NMODES), np.zeros((NMODES, NMODES))]]
)
BETA.setflags(write=False)


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


def _check_finite(*values):
    for v in values:
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError(f"non-finite parameter: {v!r}")


def mode_index(mode):
    if not isinstance(mode, (int, np.integer)) or not 1 <= mode <= NMODES:
        raise InvalidArgumentError(f"mode index must be an integer in 1..{NMODES}, got {mode!r}")
    return int(mode) - 1


def _check_pair(i, j):
    a, b = mode_index(i), mode_index(j)
    if a == b:
        raise InvalidArgumentError(f"two-mode element needs distinct modes, got ({i}, {j})")
    return a, b


def symplectic_defect(m):
    """Largest entry of ``m @ BETA @ m.T - BETA``."""
    m = np.asarray(m)
    return float(np.max(np.abs(m @ BETA @ m.T - BETA)))


def unitary_defect(u):
    u = np.asarray(u)
    return float(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))))


@dataclass(frozen=True, eq=False)
class SymplecticMap:
    """Real 8x8 symplectic matrix acting on ``xi``."""

    m: np.ndarray

    def __post_init__(self):
        m = _frozen(self.m, float)
        if m.shape != (DIM, DIM):
            raise InvalidArgumentError(f"symplectic map must be {DIM}x{DIM}, got {m.shape}")
        _check_finite(m)
        defect = symplectic_defect(m)
        if defect > CONSTRUCT_TOL:
            raise InvalidArgumentError(f"matrix is not symplectic (defect {defect:.2e})")
        object.__setattr__(self, "m", m)

    def __matmul__(self, other):
        if not isinstance(other, SymplecticMap):
            return NotImplemented
        return SymplecticMap(self.m @ other.m)

    @property
    def is_passive(self):
        """Orthogonal symplectic maps are exactly the photon-number conserving ones."""
        return bool(np.max(np.abs(self.m.T @ self.m - np.eye(DIM))) <= CONSTRUCT_TOL)

    def inverse(self):
        # S^{-1} = -beta S^T beta for symplectic S
        return SymplecticMap(-BETA @ self.m.T @ BETA)

    def to_unitary(self):
        """Recover ``u = X - iY`` for a passive map."""
        if not self.is_passive:
            raise InvalidArgumentError("only passive maps correspond to a 4x4 unitary")
        x = self.m[:NMODES, :NMODES]
        y = self.m[:NMODES, NMODES:]
        return PassiveUnitary(x - 1j * y)


@dataclass(frozen=True, eq=False)
class PassiveUnitary:
    """Complex 4x4 unitary acting on the annihilation operators."""

    u: np.ndarray

    def __post_init__(self):
        u = _frozen(self.u, complex)
        if u.shape != (NMODES, NMODES):
            raise InvalidArgumentError(f"passive unitary must be {NMODES}x{NMODES}, got {u.shape}")
        _check_finite(u)
        defect = unitary_defect(u)
        if defect > CONSTRUCT_TOL:
            raise InvalidArgumentError(f"matrix is not unitary (defect {defect:.2e})")
        object.__setattr__(self, "u", u)

    def __matmul__(self, other):
        if not isinstance(other, PassiveUnitary):
            return NotImplemented
        return PassiveUnitary(self.u @ other.u)

    @property
    def H(self):
        return PassiveUnitary(self.u.conj().T)


@dataclass(frozen=True)
class SqueezeParams:
    u: float
    v: float

    def __post_init__(self):
        _check_finite(self.u, self.v)
        if abs(self.u) > SQUEEZE_BOUND or abs(self.v) > SQUEEZE_BOUND:
            raise InvalidArgumentError(
                f"squeezing |u|, |v| must not exceed {SQUEEZE_BOUND}, got ({self.u}, {self.v})"
            )


def identity():
    return SymplecticMap(np.eye(DIM))


def rotation2(theta):
    """``[[cos, -sin], [sin, cos]]``, the mixing matrix shared by splitters and polarizers."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def squeezer_block(p: SqueezeParams) -> SymplecticMap:
    """Squeeze modes 1-2 by ``p.u`` and modes 3-4 by ``p.v``."""
    if not isinstance(p, SqueezeParams):
        p = SqueezeParams(*p)
    u, v = p.u, p.v
    return SymplecticMap(np.diag(np.exp([-u, -u, -v, -v, u, u, v, v])))


def single_mode_squeezer(mode, u) -> SymplecticMap:
    k = mode_index(mode)
    _check_finite(u)
    d = np.ones(DIM)
    d[k] = np.exp(-u)
    d[k + NMODES] = np.exp(u)
    return SymplecticMap(np.diag(d))


def phase_shift(mode, phi) -> SymplecticMap:
    """Phase rotation ``exp(-i phi n)`` on one mode: ``q -> cos q + sin p``."""
    k = mode_index(mode)
    _check_finite(phi)
    m = np.eye(DIM)
    c, s = np.cos(phi), np.sin(phi)
    m[k, k], m[k, k + NMODES] = c, s
    m[k + NMODES, k], m[k + NMODES, k + NMODES] = -s, c
    return SymplecticMap(m)


def beam_splitter(i, j, theta) -> SymplecticMap:
    """Beam splitter of transmittance ``cos(theta)**2`` between modes ``i`` and ``j``."""
    a, b = _check_pair(i, j)
    _check_finite(theta)
    r = rotation2(theta)
    m = np.eye(DIM)
    for off in (0, NMODES):
        idx = np.array([a + off, b + off])
        m[np.ix_(idx, idx)] = r
    return SymplecticMap(m)


def transmittance_angle(t):
    """Mixing angle with ``cos(theta)**2 == t``."""
    if not 0.0 <= t <= 1.0:
        raise InvalidArgumentError(f"transmittance must lie in [0, 1], got {t}")
    return float(np.arccos(np.sqrt(t)))


def _embed_two_mode(i, j, w) -> PassiveUnitary:
    a, b = _check_pair(i, j)
    u = np.eye(NMODES, dtype=complex)
    idx = np.array([a, b])
    u[np.ix_(idx, idx)] = w
    return PassiveUnitary(u)


def _wave_plate(i, j, phi, eta):
    _check_finite(phi)
    nu = rotation2(phi)
    c = np.diag([np.exp(0.5j * eta), np.exp(-0.5j * eta)])
    return _embed_two_mode(i, j, nu @ c @ nu.T)


def quarter_wave(i, j, phi) -> PassiveUnitary:
    """Quarter-wave plate with slow axis at ``phi`` on the polarization pair (i, j)."""
    return _wave_plate(i, j, phi, np.pi / 2)


def half_wave(i, j, phi) -> PassiveUnitary:
    return _wave_plate(i, j, phi, np.pi)


def _check_block(name, w):
    w = np.asarray(w, dtype=complex)
    if w.shape != (2, 2):
        raise InvalidArgumentError(f"{name} must be 2x2, got {w.shape}")
    if unitary_defect(w) > CONSTRUCT_TOL:
        raise InvalidArgumentError(f"{name} is not unitary")
    return w


def csd_compose(U1, U2, V1, V2, theta1, theta2) -> PassiveUnitary:
    """Assemble ``diag(U1, U2) [[C, S], [-S, C]] diag(V1^T, V2^T)``.

    ``C = diag(cos theta1, cos theta2)`` and ``S = diag(sin theta1, sin theta2)``.
    """
    U1, U2, V1, V2 = (_check_block(n, w) for n, w in zip(("U1", "U2", "V1", "V2"), (U1, U2, V1, V2)))
    _check_finite(theta1, theta2)
    c = np.diag([np.cos(theta1), np.cos(theta2)])
    s = np.diag([np.sin(theta1), np.sin(theta2)])
    d = np.block([[c, s], [-s, c]])
    return PassiveUnitary(block_diag(U1, U2) @ d @ block_diag(V1.T, V2.T))


def embed_passive(u) -> SymplecticMap:
    if isinstance(u, PassiveUnitary):
        u = u.u
    else:
        u = PassiveUnitary(u).u
    x, y = u.real, -u.imag
    return SymplecticMap(np.block([[x, y], [-y, x]]))


def polarizer_rotation(theta1, theta2) -> SymplecticMap:
    """``R(theta1) + R(theta2) + R(theta1) + R(theta2)`` (direct sum)."""
    _check_finite(theta1, theta2)
    r1, r2 = rotation2(theta1), rotation2(theta2)
    return SymplecticMap(block_diag(r1, r2, r1, r2))


def max_entangling_unitary() -> PassiveUnitary:
    """The passive transform that turns ``S(u, -u)`` squeezed vacuum into TMSV(1,3) x TMSV(2,4)."""
    return PassiveUnitary(
        0.5 * np.array([[1, -1, -1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, 1, 1, 1]], dtype=complex)
    )


def k_matrix() -> SymplecticMap:
    return embed_passive(max_entangling_unitary())


def mixing_unitary() -> PassiveUnitary:
    """Balanced mixing of pair (1, 2) with pair (3, 4): ``C = -S = 1/sqrt(2)``."""
    eye = np.eye(2)
    return csd_compose(eye, eye, eye, eye, -np.pi / 4, -np.pi / 4)


def e_matrix() -> SymplecticMap:
    return embed_passive(mixing_unitary())


def psi1_unitary() -> PassiveUnitary:
    h = np.array([[1, -1], [1, 1]]) / np.sqrt(2)
    eye = np.eye(2)
    return csd_compose(h, h, eye, eye, 0.0, 0.0)
