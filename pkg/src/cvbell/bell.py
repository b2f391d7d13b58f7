"""Coincidence rates and the multiphoton Bell functional.

Each direction carries a dichotomous observable ``A = 1 - |0><0|``: with the
polarizer in place the vacuum projector acts on the transmitted mode, with the
polarizer removed it acts on both polarization modes.  Joint rates follow by
inclusion-exclusion,

    P(a, b) = 1 - Pr[vac_a] - Pr[vac_b] + Pr[vac_a and vac_b],

and the functional is

    f = P(t1, t2) - P(t1, t2') + P(t1', t2) + P(t1', t2') - P(t1', -) - P(-, t2).

Local models obey ``-P(-, -) <= f <= 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np
from scipy.optimize import minimize

from . import fock, gaussian
from .errors import InvalidArgumentError

TWO_PI = 2.0 * math.pi
VIOLATION_TOL = 1e-9
PROB_TOL = 1e-9
ECS_TAYLOR_BELOW = 1e-3

DEFAULT_GRID = 12
REFINE_STEPS = 500
REFINE_XATOL = 1e-6


def _canonical(theta):
    theta = float(theta)
    if not math.isfinite(theta):
        raise InvalidArgumentError(f"angle must be finite, got {theta!r}")
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2*pi
    return 0.0 if t >= TWO_PI else t


@dataclass(frozen=True)
class BellAngles:
    """Polarizer angles ``(theta1, theta2, theta1', theta2')``, stored in ``[0, 2 pi)``."""

    theta1: float
    theta2: float
    theta1p: float
    theta2p: float

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, _canonical(getattr(self, f.name)))

    def as_tuple(self):
        return (self.theta1, self.theta2, self.theta1p, self.theta2p)


@dataclass(frozen=True)
class BellReport:
    p_t1t2: float
    p_t1t2p: float
    p_t1pt2: float
    p_t1pt2p: float
    p_t1p_x: float
    p_x_t2: float
    p_xx: float
    f: float
    lower_margin: float
    upper_margin: float
    violated: bool
    backend: str
    tail: float = 0.0

    RATES = ("p_t1t2", "p_t1t2p", "p_t1pt2", "p_t1pt2p", "p_t1p_x", "p_x_t2", "p_xx")

    def rates(self):
        return {k: getattr(self, k) for k in self.RATES}

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def functional(p_t1t2, p_t1t2p, p_t1pt2, p_t1pt2p, p_t1p_x, p_x_t2):
    return p_t1t2 - p_t1t2p + p_t1pt2 + p_t1pt2p - p_t1p_x - p_x_t2


def make_report(rates, backend, tail=0.0) -> BellReport:
    """Assemble a report from the seven rates, checking that each is a probability."""
    vals = {}
    for name in BellReport.RATES:
        p = float(rates[name])
        if not (math.isfinite(p) and -PROB_TOL <= p <= 1.0 + PROB_TOL):
            raise InvalidArgumentError(f"rate {name}={p!r} is not a probability")
        vals[name] = p
    f = functional(*(vals[k] for k in BellReport.RATES[:6]))
    lower = f + vals["p_xx"]
    return BellReport(
        **vals,
        f=f,
        lower_margin=lower,
        upper_margin=-f,
        violated=bool(f > VIOLATION_TOL or lower < -VIOLATION_TOL),
        backend=backend,
        tail=float(tail),
    )


# --- entangled coherent states ------------------------------------------------


def ecs_vacuum_prob_closed(d, theta):
    """Probability that the transmitted mode at ``theta`` is empty for the split odd-cat pair.

    ``d`` is the quadrature displacement of the coherent components
    (``sqrt(2) Re alpha``).  Evaluated as

        2 e^x / (e^x - 1)^2 * [cosh(3x/4) cosh(x/4 sin 2t) - cosh(x/4 cos 2t)],  x = d^2,

    with the bracket regrouped into ``cosh - 1`` pieces so that nothing cancels
    for small ``d``; below ``|d| = 1e-3`` the limit ``(9 - cos 4t)/16`` is used.
    """
    d, theta = float(d), float(theta)
    if not (math.isfinite(d) and math.isfinite(theta)):
        raise InvalidArgumentError("d and theta must be finite")
    if abs(d) < ECS_TAYLOR_BELOW:
        return (9.0 - math.cos(4.0 * theta)) / 16.0
    x = d * d

    def cm1(y):  # cosh(y) - 1
        return 2.0 * math.sinh(0.5 * y) ** 2

    a, b, c = 0.75 * x, 0.25 * x * math.sin(2.0 * theta), 0.25 * x * math.cos(2.0 * theta)
    bracket = cm1(a) * math.cosh(b) + cm1(b) - cm1(c)
    # 2 e^x / (e^x - 1)^2 = 1 / (2 sinh^2(x/2))
    return bracket / (2.0 * math.sinh(0.5 * x) ** 2)


@dataclass(frozen=True, eq=False)
class EcsState:
    """Entangled coherent state pair together with its Fock representation."""

    params: fock.EcsParams
    fock_state: fock.FockState

    @classmethod
    def build(cls, alpha, cutoff=fock.CUTOFF_NONGAUSSIAN):
        p = alpha if isinstance(alpha, fock.EcsParams) else fock.EcsParams(alpha)
        return cls(p, fock.ecs_pair(p, cutoff))

    @property
    def closed_form_available(self):
        # the closed form assumes a real amplitude
        return abs(complex(self.params.alpha).imag) == 0.0


def _ecs_table(s: EcsState, thetas1, thetas2):
    pi1, pi2, pi12 = fock.vacuum_table(s.fock_state, thetas1, thetas2)
    if not s.closed_form_available:
        return pi1, pi2, pi12, "fock"
    d = s.params.d
    for i, t in enumerate(thetas1):
        if t is not None:
            pi1[i] = ecs_vacuum_prob_closed(d, t)
    for j, t in enumerate(thetas2):
        if t is not None:
            pi2[j] = ecs_vacuum_prob_closed(d, t)
    return pi1, pi2, pi12, "ecs-hybrid"


# --- dispatch -------------------------------------------------------------------


def vacuum_table(state, thetas1, thetas2):
    """``(pi1, pi2, pi12, backend, tail)`` for any supported state type."""
    if isinstance(state, (gaussian.GaussianState, gaussian.GMatrix)):
        return (*gaussian.vacuum_table(state, thetas1, thetas2), "gaussian", 0.0)
    if isinstance(state, EcsState):
        return (*_ecs_table(state, thetas1, thetas2), state.fock_state.tail)
    if isinstance(state, (fock.FockState, fock.DensityFock)):
        return (*fock.vacuum_table(state, thetas1, thetas2), "fock", state.tail)
    raise InvalidArgumentError(f"unsupported state type {type(state).__name__}")


def _prepare(state):
    # invert the covariance once for repeated Gaussian evaluations
    if isinstance(state, gaussian.GaussianState):
        return gaussian.g_matrix(state)
    return state


def coincidence(state, a, b):
    """``P(a, b)``; ``None`` for either angle means that polarizer is removed."""
    a = None if a is None else _canonical(a)
    b = None if b is None else _canonical(b)
    pi1, pi2, pi12, _, _ = vacuum_table(state, [a], [b])
    return 1.0 - pi1[0] - pi2[0] + pi12[0, 0]


def _joint(pi1, pi2, pi12):
    return 1.0 - pi1[:, None] - pi2[None, :] + pi12


def bell_functional(state, angles: BellAngles) -> BellReport:
    if not isinstance(angles, BellAngles):
        angles = BellAngles(*angles)
    t1, t2, t1p, t2p = angles.as_tuple()
    pi1, pi2, pi12, backend, tail = vacuum_table(_prepare(state), [t1, t1p, None], [t2, t2p, None])
    p = _joint(pi1, pi2, pi12)
    rates = {
        "p_t1t2": p[0, 0],
        "p_t1t2p": p[0, 1],
        "p_t1pt2": p[1, 0],
        "p_t1pt2p": p[1, 1],
        "p_t1p_x": p[1, 2],
        "p_x_t2": p[2, 0],
        "p_xx": p[2, 2],
    }
    return make_report(rates, backend, tail)


def functional_grid(state, density=DEFAULT_GRID):
    """``f`` on the full ``density**4`` grid of angles ``2 pi k / density``.

    Returns ``(thetas, f)`` with ``f[i, j, k, l]`` evaluated at
    ``(thetas[i], thetas[j], thetas[k], thetas[l])``.  Only ``O(density**2)``
    vacuum probabilities are needed; the rest is broadcasting.
    """
    density = int(density)
    if density < 1:
        raise InvalidArgumentError(f"grid density must be positive, got {density}")
    thetas = TWO_PI * np.arange(density) / density
    grid = [float(t) for t in thetas] + [None]
    pi1, pi2, pi12, _, _ = vacuum_table(_prepare(state), grid, grid)
    p = _joint(pi1, pi2, pi12)
    pp = p[:-1, :-1]
    p1x = p[:-1, -1]
    px2 = p[-1, :-1]
    # f[i,j,k,l] = P(i,j) - P(i,l) + P(k,j) + P(k,l) - P(k,-) - P(-,j)
    f = (
        pp[:, :, None, None]
        - pp[:, None, None, :]
        + pp.T[None, :, :, None]
        + pp[None, None, :, :]
        - p1x[None, None, :, None]
        - px2[None, :, None, None]
    )
    return thetas, f


def optimize_angles(state, seed_grid_density=DEFAULT_GRID, maxiter=REFINE_STEPS):
    """Maximise ``f``: grid search over ``[0, 2 pi)^4`` then Nelder-Mead from the best node."""
    if int(seed_grid_density) < 4:
        raise InvalidArgumentError(f"grid density must be at least 4, got {seed_grid_density}")
    prepared = _prepare(state)
    thetas, f = functional_grid(prepared, seed_grid_density)
    best = np.unravel_index(int(np.argmax(f)), f.shape)
    start = BellAngles(*(thetas[i] for i in best))
    best_report = bell_functional(prepared, start)
    best_angles = start

    def neg_f(x):
        return -bell_functional(prepared, BellAngles(*x)).f

    res = minimize(
        neg_f,
        np.array(start.as_tuple()),
        method="Nelder-Mead",
        options={"maxiter": int(maxiter), "xatol": REFINE_XATOL, "fatol": np.inf},
    )
    refined = BellAngles(*res.x)
    report = bell_functional(prepared, refined)
    if report.f > best_report.f:
        best_angles, best_report = refined, report
    return best_angles, best_report
