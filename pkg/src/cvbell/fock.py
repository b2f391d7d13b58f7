"""Truncated Fock-space simulation of the four-mode field.

States are amplitude tensors ``amp[n1, n2, n3, n4]`` with a per-mode photon
cutoff.  Passive optics act exactly on each photon-number sector of a mode
pair, so they never create truncation error for states that fit in the box;
squeezing and series-defined states do, and every such operation measures the
probability mass it loses and refuses to exceed ``TRUNCATION_BUDGET``.

Convention: a passive unitary ``u`` is realised by the operator ``U`` with
``U^dag a U = u a``, the same map that :func:`symplectic.embed_passive` sends to
phase space, so both backends agree term by term.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import block_diag, expm
from scipy.special import gammaln

from . import kernels
from . import symplectic as sp
from .errors import InvalidArgumentError, ResourceLimitError, TruncationError

TRUNCATION_BUDGET = 1e-10
MAX_DENSITY_ENTRIES = 1 << 24

CUTOFF_TWO_PHOTON = 6
CUTOFF_NONGAUSSIAN = 20
CUTOFF_SQUEEZE = 40

NMODES = sp.NMODES


@dataclass(frozen=True, eq=False)
class FockState:
    """Pure state; ``tail`` is the probability mass already lost to truncation."""

    amp: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        amp = np.array(self.amp, dtype=np.complex128, copy=True)
        if amp.ndim != NMODES:
            raise InvalidArgumentError(f"amplitude tensor must have {NMODES} axes, got {amp.ndim}")
        if not np.all(np.isfinite(amp)):
            raise InvalidArgumentError("amplitude tensor has non-finite entries")
        amp.setflags(write=False)
        object.__setattr__(self, "amp", amp)

    @property
    def cutoffs(self):
        return tuple(d - 1 for d in self.amp.shape)

    @property
    def norm(self):
        return float(np.vdot(self.amp, self.amp).real)

    def renormalized(self):
        return FockState(self.amp / math.sqrt(self.norm), self.tail)


@dataclass(frozen=True, eq=False)
class DensityFock:
    """Mixed state ``rho[n1..n4, m1..m4]``; used as an oracle at small cutoffs."""

    rho: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        rho = np.array(self.rho, dtype=np.complex128, copy=True)
        if rho.ndim != 2 * NMODES or rho.shape[:NMODES] != rho.shape[NMODES:]:
            raise InvalidArgumentError(f"density tensor must have shape (c1..c4, c1..c4), got {rho.shape}")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def cutoffs(self):
        return tuple(d - 1 for d in self.rho.shape[:NMODES])

    @property
    def trace(self):
        n = int(np.prod(self.rho.shape[:NMODES]))
        return float(np.trace(self.rho.reshape(n, n)).real)

    def matrix(self):
        n = int(np.prod(self.rho.shape[:NMODES]))
        return self.rho.reshape(n, n)


@dataclass(frozen=True)
class PcsParams:
    zeta: complex
    q: int = 0

    def __post_init__(self):
        if not np.isfinite(self.zeta):
            raise InvalidArgumentError("zeta must be finite")
        if int(self.q) != self.q or self.q < 0:
            raise InvalidArgumentError(f"q must be a nonnegative integer, got {self.q!r}")


@dataclass(frozen=True)
class EcsParams:
    alpha: complex

    def __post_init__(self):
        if not np.isfinite(self.alpha) or self.alpha == 0:
            raise InvalidArgumentError("alpha must be finite and nonzero")

    @property
    def d(self):
        """Quadrature displacement ``sqrt(2) Re(alpha)`` used by the closed-form vacuum probability."""
        return math.sqrt(2.0) * float(np.real(self.alpha))


def _cutoffs(cutoffs):
    if np.isscalar(cutoffs):
        cutoffs = (int(cutoffs),) * NMODES
    cutoffs = tuple(int(c) for c in cutoffs)
    if len(cutoffs) != NMODES or min(cutoffs) < 0:
        raise InvalidArgumentError(f"need {NMODES} nonnegative cutoffs, got {cutoffs!r}")
    return cutoffs


def _check_loss(loss, budget, what):
    if loss > budget:
        raise TruncationError(f"{what} moved probability above the cutoff", loss)
    return max(loss, 0.0)


def basis_state(ns, cutoffs=CUTOFF_TWO_PHOTON) -> FockState:
    cutoffs = _cutoffs(cutoffs)
    ns = tuple(int(n) for n in ns)
    if len(ns) != NMODES or any(n < 0 or n > c for n, c in zip(ns, cutoffs)):
        raise InvalidArgumentError(f"photon numbers {ns} do not fit cutoffs {cutoffs}")
    amp = np.zeros([c + 1 for c in cutoffs], dtype=np.complex128)
    amp[ns] = 1.0
    return FockState(amp)


def vacuum_state(cutoffs=CUTOFF_TWO_PHOTON) -> FockState:
    return basis_state((0,) * NMODES, cutoffs)


def truncate(s: FockState, cutoffs, budget=TRUNCATION_BUDGET) -> FockState:
    """Shrink the box, refusing to drop more than ``budget`` of probability."""
    cutoffs = _cutoffs(cutoffs)
    if any(c > d for c, d in zip(cutoffs, s.cutoffs)):
        raise InvalidArgumentError(f"cannot grow cutoffs {s.cutoffs} to {cutoffs} by truncation")
    amp = s.amp[tuple(slice(0, c + 1) for c in cutoffs)]
    loss = s.norm - float(np.vdot(amp, amp).real)
    return FockState(amp, s.tail + _check_loss(loss, budget, "truncation"))


def fidelity(a: FockState, b: FockState) -> float:
    if a.amp.shape != b.amp.shape:
        raise InvalidArgumentError("states live in different boxes")
    return float(abs(np.vdot(a.amp, b.amp)) ** 2)


# --- two-mode sector algebra -------------------------------------------------


def _rotation_generator(n):
    """``a_i a_j^dag - a_i^dag a_j`` on sector ``n`` in the basis ``|k, n-k>``."""
    k = np.arange(1, n + 1)
    up = np.sqrt(k * (n - k + 1.0))
    return np.diag(up, 1) - np.diag(up, -1)


def rotation_blocks(theta, nsec):
    """Sector matrices of ``exp[theta (a_i a_j^dag - a_i^dag a_j)]``, zero padded to ``nsec``."""
    blocks = np.zeros((nsec, nsec, nsec), dtype=np.complex128)
    for n in range(nsec):
        blocks[n, : n + 1, : n + 1] = expm(theta * _rotation_generator(n))
    return blocks


def _phase_diag(alpha, beta, nsec):
    """Sector action of ``diag(e^{i alpha}, e^{i beta})`` on ``|k, n-k>``."""
    out = np.zeros((nsec, nsec), dtype=np.complex128)
    k = np.arange(nsec)
    for n in range(nsec):
        out[n, : n + 1] = np.exp(1j * (alpha * k[: n + 1] + beta * (n - k[: n + 1])))
    return out


_DEGENERATE = 1e-14


def split_unitary2(w):
    """Write a 2x2 unitary as ``diag(e^ia, e^ib) R(theta) diag(e^ic, 1)``.

    Returns ``(a, b, theta, c)`` with ``theta`` in ``[0, pi/2]``.
    """
    w = np.asarray(w, dtype=complex)
    cos_t, sin_t = abs(w[0, 0]), abs(w[1, 0])
    theta = math.atan2(sin_t, cos_t)
    if sin_t < _DEGENERATE:
        return np.angle(w[0, 0]), np.angle(w[1, 1]), 0.0, 0.0
    if cos_t < _DEGENERATE:
        return np.angle(-w[0, 1]), np.angle(w[1, 0]), math.pi / 2, 0.0
    a = np.angle(-w[0, 1])
    c = np.angle(w[0, 0]) - a
    b = np.angle(w[1, 0]) - c
    return a, b, theta, c


def unitary2_blocks(w, nsec):
    """Sector matrices of the metaplectic operator of the 2x2 unitary ``w``."""
    a, b, theta, c = split_unitary2(w)
    blocks = rotation_blocks(theta, nsec)
    left = _phase_diag(a, b, nsec)
    right = _phase_diag(c, 0.0, nsec)
    return left[:, :, None] * blocks * right[:, None, :]


def _move_pair_front(amp, i, j):
    return np.moveaxis(amp, (i, j), (0, 1))


def _apply_two_mode(amp, i, j, w):
    x = _move_pair_front(amp, i, j)
    a, b = x.shape[:2]
    rest = x.shape[2:]
    blocks = unitary2_blocks(w, a + b - 1)
    y = kernels.pair_transform(x.reshape(a, b, -1), blocks).reshape((a, b) + rest)
    return np.moveaxis(y, (0, 1), (i, j))


def _apply_phases(amp, phases):
    out = amp
    for mode, ph in enumerate(phases):
        if ph == 1.0:
            continue
        shape = [1] * NMODES
        shape[mode] = amp.shape[mode]
        out = out * (ph ** np.arange(amp.shape[mode])).reshape(shape)
    return out


def givens_sequence(u):
    """Factor a 4x4 unitary into a diagonal followed by two-mode unitaries.

    Returns ``(phases, ops)``: applying ``diag(phases)`` and then every
    ``(i, j, w)`` in order realises ``u``.  Column elimination gives
    ``G_m .. G_1 u = D`` so ``u = G_1^dag .. G_m^dag D``.
    """
    m = np.array(u, dtype=complex)
    n = m.shape[0]
    gs = []
    for col in range(n - 1):
        for row in range(n - 1, col, -1):
            x, y = m[row - 1, col], m[row, col]
            rho = math.hypot(abs(x), abs(y))
            if abs(y) < _DEGENERATE * max(rho, 1.0):
                continue
            g = np.array([[np.conj(x), np.conj(y)], [-y, x]]) / rho
            m[[row - 1, row], :] = g @ m[[row - 1, row], :]
            gs.append((row - 1, row, g))
    phases = np.diag(m).copy()
    ops = [(i, j, g.conj().T) for i, j, g in reversed(gs)]
    return phases, ops


def apply_passive(s: FockState, u, budget=TRUNCATION_BUDGET) -> FockState:
    """Apply the photon-number conserving operator of the passive unitary ``u``."""
    if not isinstance(u, sp.PassiveUnitary):
        u = sp.PassiveUnitary(u)
    phases, ops = givens_sequence(u.u)
    amp = _apply_phases(s.amp, phases)
    for i, j, w in ops:
        amp = _apply_two_mode(amp, i, j, w)
    loss = s.norm - float(np.vdot(amp, amp).real)
    return FockState(amp, s.tail + _check_loss(loss, budget, "passive transform"))


def squeeze_matrix(u, dim, pad=None):
    """Matrix of ``exp[u (a^2 - a^dag^2) / 2]`` on the first ``dim`` number states.

    The exponential is taken in a larger space so the retained elements are
    converged; the padding is what stands between this and the exact operator.
    """
    if pad is None:
        pad = max(60, 4 * dim)
    big = dim + pad
    n = np.arange(big - 2)
    low2 = np.zeros((big, big))
    low2[n, n + 2] = np.sqrt((n + 1.0) * (n + 2.0))
    gen = 0.5 * u * (low2 - low2.T)
    return expm(gen)[:dim, :dim]


def apply_squeeze(s: FockState, mode, u, budget=TRUNCATION_BUDGET) -> FockState:
    k = sp.mode_index(mode)
    if not np.isfinite(u) or abs(u) > 2.0:
        raise InvalidArgumentError(f"Fock squeezing requires |u| <= 2, got {u}")
    if u == 0:
        return s
    m = squeeze_matrix(u, s.amp.shape[k])
    amp = np.moveaxis(np.tensordot(m, s.amp, axes=([1], [k])), 0, k)
    loss = s.norm - float(np.vdot(amp, amp).real)
    return FockState(amp, s.tail + _check_loss(loss, budget, f"squeezing mode {mode}"))


def squeezed_four_mode(u, v, cutoff=CUTOFF_SQUEEZE, budget=TRUNCATION_BUDGET) -> FockState:
    """``K S(u, v)`` on vacuum, the Fock twin of :func:`gaussian.four_mode_squeezed`."""
    s = vacuum_state(cutoff)
    for mode, r in zip((1, 2, 3, 4), (u, u, v, v)):
        s = apply_squeeze(s, mode, r, budget)
    return apply_passive(s, sp.max_entangling_unitary(), budget)


def psi1(cutoff=CUTOFF_TWO_PHOTON) -> FockState:
    return apply_passive(basis_state((0, 1, 0, 1), cutoff), sp.psi1_unitary())


def psi2(cutoff=CUTOFF_TWO_PHOTON) -> FockState:
    return apply_passive(basis_state((0, 0, 1, 1), cutoff), sp.mixing_unitary())


# --- non-Gaussian families ---------------------------------------------------


def _series_tail(logmag, first, budget_terms=2000):
    """Sum ``exp(2 logmag(n))`` from ``first`` until the terms stop mattering."""
    total = 0.0
    n = first
    while n < first + budget_terms:
        term = math.exp(2.0 * logmag(n))
        total += term
        if term < 1e-300 or (n > first + 10 and term < 1e-20 * total):
            break
        n += 1
    return total


def pcs_coefficients(p: PcsParams, cutoff):
    """Normalised ``c_n`` of ``|zeta, q> = sum_n c_n |n + q, n>`` and the tail mass."""
    q = int(p.q)
    if cutoff < q:
        raise InvalidArgumentError(f"cutoff {cutoff} cannot hold photon difference q={q}")
    z = complex(p.zeta)
    nmax = cutoff - q
    n = np.arange(nmax + 1)
    if z == 0:
        c = np.zeros(nmax + 1, dtype=complex)
        c[0] = 1.0
        return c, 0.0
    logmag = n * math.log(abs(z)) - 0.5 * (gammaln(n + 1) + gammaln(n + q + 1))
    shift = logmag.max()
    c = np.exp(logmag - shift) * np.exp(1j * n * np.angle(z))
    inside = float(np.sum(np.abs(c) ** 2))

    def lm(k):
        return k * math.log(abs(z)) - 0.5 * (math.lgamma(k + 1) + math.lgamma(k + q + 1)) - shift

    outside = _series_tail(lm, nmax + 1)
    return c / math.sqrt(inside), outside / (inside + outside)


def pcs_pair(p: PcsParams, cutoff=CUTOFF_NONGAUSSIAN, budget=TRUNCATION_BUDGET) -> FockState:
    """``|PCS>_{13} |PCS>_{24}`` with identical pair-coherent states on both pairs."""
    c, tail = pcs_coefficients(p, cutoff)
    tail2 = 1.0 - (1.0 - tail) ** 2
    _check_loss(tail2, budget, "pair coherent state")
    q = int(p.q)
    pair = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    idx = np.arange(len(c))
    pair[idx + q, idx] = c
    amp = np.einsum("ac,bd->abcd", pair, pair)
    return FockState(amp, tail2)


def odd_coherent_coefficients(alpha, cutoff):
    """Normalised coefficients of ``|alpha> - |-alpha>`` and the tail mass."""
    alpha = complex(alpha)
    r2 = abs(alpha) ** 2
    n = np.arange(cutoff + 1)
    odd = n % 2 == 1
    # log of |2 alpha^n exp(-|a|^2/2) / sqrt(n!)| up to the analytic normaliser
    lognorm = -0.5 * math.log(2.0 - 2.0 * math.exp(-2.0 * r2))
    logmag = math.log(2.0) - 0.5 * r2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1) + lognorm
    c = np.where(odd, np.exp(logmag) * np.exp(1j * n * np.angle(alpha)), 0.0)
    inside = float(np.sum(np.abs(c) ** 2))
    tail = max(1.0 - inside, 0.0)
    return c / math.sqrt(inside), tail


def ecs_pair(p: EcsParams, cutoff=CUTOFF_NONGAUSSIAN, budget=TRUNCATION_BUDGET) -> FockState:
    """Split two odd coherent states against vacuum: ``|ECS>_{13} |ECS>_{24}``."""
    if not isinstance(p, EcsParams):
        p = EcsParams(p)
    c, tail = odd_coherent_coefficients(p.alpha, cutoff)
    tail2 = 1.0 - (1.0 - tail) ** 2
    _check_loss(tail2, budget, "odd coherent input")
    amp = np.zeros((cutoff + 1,) * NMODES, dtype=complex)
    amp[0, 0] = np.outer(c, c)
    s = apply_passive(FockState(amp), sp.mixing_unitary(), budget)
    return FockState(s.amp, s.tail + tail2)


# --- loss ----------------------------------------------------------------------


def loss_kraus(t, dim):
    """``E[l, k, n]``: ``l`` photons lost to the ancilla, ``k = n - l`` kept."""
    e = np.zeros((dim, dim, dim))
    for n in range(dim):
        for l in range(n + 1):
            e[l, n - l, n] = math.sqrt(math.comb(n, l) * t ** (n - l) * (1.0 - t) ** l)
    return e


def attenuate_fock(s: FockState, t, max_entries=MAX_DENSITY_ENTRIES) -> DensityFock:
    """Mix each mode with vacuum on a splitter of transmittance ``t``; trace out the ancillas."""
    if not (np.isfinite(t) and 0.0 <= t <= 1.0):
        raise InvalidArgumentError(f"transmittance must lie in [0, 1], got {t}")
    size = s.amp.size
    if size * size > max_entries:
        raise ResourceLimitError(f"density tensor with {size * size} entries exceeds limit {max_entries}")
    branches = s.amp
    for mode in range(NMODES):
        e = loss_kraus(t, s.amp.shape[mode])
        # contract n with this mode's axis; kept axis k goes back in place, l is appended
        branches = np.tensordot(e, branches, axes=([2], [mode]))
        branches = np.moveaxis(branches, 1, mode + 1)
        branches = np.moveaxis(branches, 0, -1)
    flat = branches.reshape(size, -1)
    rho = (flat @ flat.conj().T).reshape(s.amp.shape * 2)
    return DensityFock(rho, s.tail)


# --- measurements --------------------------------------------------------------


def polarizer_unitary(theta1, theta2) -> sp.PassiveUnitary:
    """Passive unitary whose mode 1 (3) is the polarizer's transmitted mode ``cos a1 + sin a2``.

    Its phase-space image is the transpose of :func:`symplectic.polarizer_rotation`,
    which is the map the determinant formula applies to the state.
    """
    r = block_diag(sp.rotation2(theta1), sp.rotation2(theta2))
    return sp.PassiveUnitary(r.T)


def vacuum_branch_table(theta, a, b):
    """``phi[N, k]``: amplitudes of ``|0>_b |N>_{b-perp}`` on ``|k, N-k>`` for ``b = cos a1 + sin a2``."""
    nsec = a + b - 1
    n = np.arange(nsec)[:, None]
    k = np.arange(a)[None, :]
    valid = (k <= n) & (n - k < b)
    kk = np.where(valid, k, 0)
    nk = np.where(valid, n - k, 0)
    binom = np.exp(0.5 * (gammaln(n + 1) - gammaln(kk + 1) - gammaln(nk + 1)))
    c, s = math.cos(theta), math.sin(theta)
    phi = binom * np.power(-s, kk) * np.power(c, nk)
    return np.where(valid, phi, 0.0)


def _direction_kind(modes, first, theta):
    sel = {m - first for m in modes if m in (first, first + 1)}
    if not sel:
        return ("none", None)
    if sel == {0, 1}:
        return ("both", None)
    return ("single", theta if sel == {0} else theta + math.pi / 2)


def _project_front(x, kind):
    """Project the two leading axes; the surviving index comes out first."""
    tag, theta = kind
    a, b = x.shape[:2]
    rest = x.shape[2:]
    if tag == "none":
        return x.reshape((a * b,) + rest)
    if tag == "both":
        return x[0, 0][None]
    phi = vacuum_branch_table(theta, a, b)
    return kernels.pair_project(x.reshape(a, b, -1), phi).reshape((a + b - 1,) + rest)


def _pure_prob(amp, kind1, kind2):
    y = _project_front(amp, kind1)
    y = np.moveaxis(y, 0, -1)
    y = _project_front(y, kind2)
    return float(np.vdot(y, y).real)


def _mixed_prob(rho, kind1, kind2):
    y = _project_front(rho, kind1)
    y = _project_front(np.moveaxis(y, 0, -1), kind2)
    y = _project_front(np.moveaxis(y, 0, -1), kind1)
    y = _project_front(np.moveaxis(y, 0, -1), kind2)
    # axes: (bra2, ket1, ket2, bra1)
    return float(np.einsum("baba->", y).real)


def _check_modes(modes):
    modes = set(modes)
    if not modes or not modes <= {1, 2, 3, 4}:
        raise InvalidArgumentError(f"modes must be a nonempty subset of 1..4, got {sorted(modes)!r}")
    return modes


def _prob(s, kind1, kind2):
    if isinstance(s, FockState):
        return _pure_prob(s.amp, kind1, kind2)
    if isinstance(s, DensityFock):
        return _mixed_prob(s.rho, kind1, kind2)
    raise InvalidArgumentError(f"not a Fock-space state: {type(s).__name__}")


def polarizer_vacuum_prob(s, modes: Iterable[int], theta1, theta2) -> float:
    """Probability that every listed mode is empty after the polarizer rotation.

    Mode 1 (3) is the transmitted polarization ``cos(theta) a1 + sin(theta) a2`` of
    direction k (k'), mode 2 (4) its orthogonal partner.
    """
    modes = _check_modes(modes)
    return _prob(s, _direction_kind(modes, 1, theta1), _direction_kind(modes, 3, theta2))


def vacuum_table(s, thetas1: Sequence, thetas2: Sequence):
    """Same contract as :func:`gaussian.vacuum_table`, evaluated in Fock space."""
    kinds1 = [("single", t) if t is not None else ("both", None) for t in thetas1]
    kinds2 = [("single", t) if t is not None else ("both", None) for t in thetas2]
    none = ("none", None)
    if isinstance(s, DensityFock):
        pi1 = np.array([_mixed_prob(s.rho, k, none) for k in kinds1])
        pi2 = np.array([_mixed_prob(s.rho, none, k) for k in kinds2])
        pi12 = np.array([[_mixed_prob(s.rho, k1, k2) for k2 in kinds2] for k1 in kinds1])
        return pi1, pi2, pi12
    if not isinstance(s, FockState):
        raise InvalidArgumentError(f"not a Fock-space state: {type(s).__name__}")
    # project direction k once per angle and reuse it for every joint entry
    firsts = [np.ascontiguousarray(np.moveaxis(_project_front(s.amp, k), 0, -1)) for k in kinds1]
    pi1 = np.array([float(np.vdot(y, y).real) for y in firsts])
    pi2 = np.array([_pure_prob(s.amp, none, k) for k in kinds2])
    pi12 = np.empty((len(kinds1), len(kinds2)))
    for a, y in enumerate(firsts):
        for b, k in enumerate(kinds2):
            z = _project_front(y, k)
            pi12[a, b] = float(np.vdot(z, z).real)
    return pi1, pi2, pi12


# --- moments -------------------------------------------------------------------


def _lower(amp, axis):
    """Amplitudes of ``a_axis |psi>``."""
    n = amp.shape[axis]
    out = np.zeros_like(amp)
    src = [slice(None)] * amp.ndim
    dst = [slice(None)] * amp.ndim
    src[axis] = slice(1, n)
    dst[axis] = slice(0, n - 1)
    shape = [1] * amp.ndim
    shape[axis] = n - 1
    out[tuple(dst)] = amp[tuple(src)] * np.sqrt(np.arange(1, n)).reshape(shape)
    return out


def covariance_matrix(s: FockState) -> np.ndarray:
    """Quadrature covariance ``V_ij = <{dxi_i, dxi_j}>/2`` in the ``(q1..q4, p1..p4)`` order."""
    psi = s.amp / math.sqrt(s.norm)
    low = [_lower(psi, i) for i in range(NMODES)]
    mean_a = np.array([np.vdot(psi, low[i]) for i in range(NMODES)])
    aa = np.array([[np.vdot(psi, _lower(low[j], i)) for j in range(NMODES)] for i in range(NMODES)])
    ada = np.array([[np.vdot(low[i], low[j]) for j in range(NMODES)] for i in range(NMODES)])
    # symmetrised second moments of zeta = (a, a^dag)
    sym = np.zeros((2 * NMODES, 2 * NMODES), dtype=complex)
    sym[:NMODES, :NMODES] = aa
    sym[NMODES:, NMODES:] = aa.conj()
    cross = ada.T + 0.5 * np.eye(NMODES)  # (a_i a_j^dag + a_j^dag a_i)/2
    sym[:NMODES, NMODES:] = cross
    sym[NMODES:, :NMODES] = cross.T
    mean = np.concatenate([mean_a, mean_a.conj()])
    sym -= np.outer(mean, mean)
    eye = np.eye(NMODES)
    t = np.block([[eye, eye], [-1j * eye, 1j * eye]]) / math.sqrt(2.0)
    v = t @ sym @ t.T
    return v.real


def pair_covariance(s: FockState, mode_a, mode_b) -> np.ndarray:
    """4x4 covariance of two modes in the ``(q_a, q_b, p_a, p_b)`` order."""
    v = covariance_matrix(s)
    a, b = sp.mode_index(mode_a), sp.mode_index(mode_b)
    idx = [a, b, a + NMODES, b + NMODES]
    return v[np.ix_(idx, idx)]


def pcs_covariance(p: PcsParams, n1, n2) -> np.ndarray:
    """The closed-form pair coherent covariance for given mean photon numbers."""
    re, im = float(np.real(p.zeta)), float(np.imag(p.zeta))
    return np.array(
        [
            [n1 + 0.5, re, 0.0, im],
            [re, n2 + 0.5, im, 0.0],
            [0.0, im, n1 + 0.5, -re],
            [im, 0.0, -re, n2 + 0.5],
        ]
    )
