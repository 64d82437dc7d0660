"""Analytic predictions for the random Horn ensemble.

The limiting backbone fraction is the smallest positive root ``t0`` of the
backbone equation

    F(t) = ln((1 - t) / (1 - d1)) + sum_{j=2..k} d_j t^(j-1) = 0,

and the limiting probability of satisfiability is ``(1 - t0) / (1 - d1)``
whenever ``t0`` is a simple root.  For k = 2 the root has a closed form in
the Lambert W function.  For ``(d1, 0, d3)`` the root jumps along the curve
Gamma where ``F`` touches zero tangentially; Gamma ends at ``(1 - sqrt(e)/2, 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, NoRootFound, StepFailure, ToleranceTooSmall
from .formula import DensityVector
from .kernels import scan_first_crossing

SCAN_STEP = 1e-4
DEFAULT_TOL = 1e-12
MIN_TOL = 1e-15
SIMPLE_SLOPE_TOL = 1e-6
GRAZE_TOL = 1e-8
# grid minima below this are refined; a tangency at most half a grid step away
# from a sample point stays well under it
_DIP_CANDIDATE = 1e-4
ODE_RTOL = 1e-9
ODE_T_MAX = 1.0 - 1e-6

CRITICAL_D1 = 1.0 - math.sqrt(math.e) / 2.0
CRITICAL_D3 = 2.0
CRITICAL_SLOPE = -math.sqrt(math.e) / 8.0


# -- the backbone equation -------------------------------------------------------


def _coeffs(dv: DensityVector) -> tuple[float, ...]:
    return dv.d[1:]


def _lhs(t: float, log1m_d1: float, coeffs) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * t + c
    return math.log1p(-t) - log1m_d1 + acc * t


def backbone_equation(dv: DensityVector, t):
    """``F(t)``; vectorized over ``t`` in ``[0, 1)``."""
    t = np.asarray(t, dtype=float)
    acc = np.zeros_like(t)
    for c in reversed(_coeffs(dv)):
        acc = acc * t + c
    out = np.log1p(-t) - math.log1p(-dv.d1) + acc * t
    return out if out.ndim else float(out)


def backbone_equation_slope(dv: DensityVector, t):
    """``dF/dt = -1/(1-t) + sum_j (j-1) d_j t^(j-2)``."""
    t = np.asarray(t, dtype=float)
    acc = np.zeros_like(t)
    for j in range(dv.k, 1, -1):
        acc = acc * t + (j - 1) * dv[j]
    out = -1.0 / (1.0 - t) + acc
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PredictionResult:
    t0: float
    phi: float
    derivative_at_root: float
    simple: bool
    residual: float = 0.0


def _bisect(g, lo: float, hi: float, tol: float) -> float:
    """Root of ``g`` in ``[lo, hi]`` with ``g(lo) > 0 >= g(hi)``.

    Runs until the bracket is below ``tol`` and the residual below ``tol``, or
    the bracket can no longer be split in floating point.
    """
    glo, ghi = g(lo), g(hi)
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        gm = g(mid)
        if gm > 0.0:
            lo, glo = mid, gm
        else:
            hi, ghi = mid, gm
        if hi - lo <= tol and min(abs(glo), abs(ghi)) < tol:
            break
    return lo if abs(glo) < abs(ghi) else hi


def root_t0(dv: DensityVector, tol: float = DEFAULT_TOL, backend: str | None = None) -> PredictionResult:
    """Smallest root of the backbone equation in ``[0, 1)`` and the implied
    satisfiability probability.

    A grid scan at step 1e-4 finds the first sign change, refined by
    bisection.  Local minima of ``F`` ahead of that change are refined too: a
    minimum at or below zero hides a pair of close roots, and a minimum within
    1e-8 of zero is a near-double root, reported with ``simple=False``.
    With ``d1 = 0`` the root is ``t = 0`` and ``phi = 1``.
    """
    if not tol > 0 or tol < MIN_TOL:
        raise ToleranceTooSmall(f"tol must be >= {MIN_TOL}, got {tol}")
    d1 = dv.d1
    coeffs = _coeffs(dv)
    log1m = math.log1p(-d1)

    def F(t):
        return _lhs(t, log1m, coeffs)

    def dF(t):
        return float(backbone_equation_slope(dv, t))

    if d1 == 0.0:
        s = dF(0.0)
        return PredictionResult(0.0, 1.0, s, abs(s) > SIMPLE_SLOPE_TOL, 0.0)

    i_cross, i_dip = scan_first_crossing(log1m, coeffs, SCAN_STEP, _DIP_CANDIDATE, backend=backend)
    grazing = False
    t0 = None
    if i_dip >= 0:
        a, b = (i_dip - 1) * SCAN_STEP, (i_dip + 1) * SCAN_STEP
        # minimum of F = root of F' (negative at a, non-negative at b)
        tmin = _bisect(lambda t: -dF(t), a, b, 1e-15)
        fmin = F(tmin)
        if abs(fmin) < GRAZE_TOL:
            grazing = True
        if fmin <= 0.0:
            t0 = _bisect(F, a, tmin, tol) if F(a) > 0 else a
        elif grazing:
            t0 = tmin
    if t0 is None:
        if i_cross == 0:  # pragma: no cover - F(0) = -ln(1-d1) > 0 for d1 > 0
            raise NoRootFound("backbone equation is non-positive at t=0 with d1 > 0")
        if i_cross < 0:
            lo, hi = (round(1.0 / SCAN_STEP) - 1) * SCAN_STEP, math.nextafter(1.0, 0.0)
        else:
            lo, hi = (i_cross - 1) * SCAN_STEP, i_cross * SCAN_STEP
        if not F(lo) > 0.0 >= F(hi):  # pragma: no cover
            raise NoRootFound(f"lost the sign change in [{lo}, {hi}]")
        t0 = _bisect(F, lo, hi, tol)
    slope = dF(t0)
    simple = abs(slope) > SIMPLE_SLOPE_TOL and not grazing
    return PredictionResult(t0, (1.0 - t0) / (1.0 - d1), slope, simple, F(t0))


def phi(dv: DensityVector) -> float:
    return root_t0(dv).phi


# -- k = 2: Lambert W ------------------------------------------------------------

_INV_E = math.exp(-1.0)


def lambert_w(x: float) -> float:
    """Principal branch of ``W`` on ``[-1/e, 0]`` (Halley's iteration)."""
    x = float(x)
    if not (-_INV_E - 1e-15 <= x <= 0.0):
        raise DomainError(f"lambert_w is implemented on [-1/e, 0], got {x}")
    if x == 0.0:
        return 0.0
    q = 2.0 * (math.e * x + 1.0)
    if q <= 0.0:
        return -1.0
    if q < 0.5:
        # series about the branch point in p = sqrt(2(ex+1))
        p = math.sqrt(q)
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3 - 43.0 / 540.0 * p ** 4
    else:
        w = math.log1p(x)
    for _ in range(64):
        wp1 = w + 1.0
        if wp1 <= 0.0:
            return -1.0
        ew = math.exp(w)
        f = w * ew - x
        if f == 0.0:
            break
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w_new = max(w - step, -1.0)
        if abs(w_new - w) <= 4e-16 * max(1.0, abs(w)):
            return w_new
        w = w_new
    return w


def phi_12(d1: float, d2: float) -> float:
    """Closed-form satisfiability probability for clause lengths 1 and 2."""
    if not (0.0 <= d1 < 1.0):
        raise DomainError(f"d1 must lie in [0, 1), got {d1}")
    if not d2 > 0.0:
        raise DomainError(f"d2 must be > 0, got {d2}")
    a = (1.0 - d1) * d2
    # a*exp(-d2) <= d2*exp(-d2) <= 1/e, so the argument stays in [-1/e, 0]
    return -lambert_w(-a * math.exp(-d2)) / a


# -- k = 3, d2 = 0: the discontinuity curve --------------------------------------


@dataclass(frozen=True)
class GammaPoint:
    d3: float
    d1: float
    t_tangent: float


def gamma_curve(d3: float) -> GammaPoint:
    """Point of Gamma at ``d3 >= 2``: the ``d1`` where ``(1-d1) exp(-d3 t^2)``
    touches ``1 - t``, and the touching ``t``."""
    d3 = float(d3)
    if not d3 >= 2.0:
        raise DomainError(f"Gamma is only real for d3 >= 2, got {d3}")
    r = math.sqrt(d3 - 2.0)
    sq = math.sqrt(d3)
    # (sqrt(d3) - r)^2 = 4 / (sqrt(d3) + r)^2 ; d3 - sqrt(d3(d3-2)) = 2 d3 / (d3 + sq*r)
    num = math.exp(1.0 / (sq + r) ** 2)
    den = 2.0 * d3 / (d3 + sq * r)
    d1 = 1.0 - num / den
    u = math.sqrt(1.0 - 2.0 / d3)
    t = (1.0 / d3) / (1.0 + u)
    return GammaPoint(d3=d3, d1=d1, t_tangent=t)


def gamma_d3(d1: float, tol: float = 1e-13) -> float:
    """Inverse of Gamma: the ``d3 >= 2`` whose Gamma point has this ``d1``."""
    if not (0.0 < d1 <= CRITICAL_D1):
        raise DomainError(f"Gamma covers d1 in (0, {CRITICAL_D1}], got {d1}")
    lo, hi = 2.0, 4.0
    while gamma_curve(hi).d1 > d1:
        lo, hi = hi, hi * 2.0
        if hi > 1e12:  # pragma: no cover
            raise DomainError(f"d1={d1} too small to invert Gamma")
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if gamma_curve(mid).d1 > d1:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def tangency_f(d1: float, d3: float, t):
    """``f(t) = (1-d1) exp(-d3 t^2)``, the right side of ``1 - t = f(t)``."""
    return (1.0 - d1) * np.exp(-d3 * np.asarray(t) ** 2)


def tangency_f_prime(d1: float, d3: float, t):
    t = np.asarray(t)
    return -2.0 * d3 * t * tangency_f(d1, d3, t)


# -- the differential-equation view ----------------------------------------------


@dataclass(frozen=True)
class TrajectoryPoint:
    t: float
    s: tuple[float, ...]  # (s_1, ..., s_k)


def trajectory_array(dv: DensityVector, t) -> np.ndarray:
    """Closed-form densities, shape ``(len(t), k)``; column ``j-1`` is ``s_j``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    k = dv.k
    out = np.empty((t.size, k))
    for j in range(2, k + 1):
        acc = np.zeros_like(t)
        for ell in range(k, j - 1, -1):
            acc = acc * t + comb(ell - 1, j - 1) * dv[ell]
        out[:, j - 1] = (1.0 - t) ** j * acc
    expo = np.zeros_like(t)
    for j in range(k, 1, -1):
        expo = expo * t + dv[j]
    expo = expo * t
    out[:, 0] = 1.0 - t - (1.0 - dv.d1) * np.exp(-expo)
    return out


def trajectory_closed_form(dv: DensityVector, t: float) -> TrajectoryPoint:
    if not 0.0 <= t < 1.0:
        raise DomainError(f"t must lie in [0, 1), got {t}")
    return TrajectoryPoint(float(t), tuple(float(x) for x in trajectory_array(dv, t)[0]))


def _rhs(k: int):
    jj = np.arange(2, k + 1, dtype=float)

    def f(t, s):
        one = 1.0 - t
        ds = np.empty_like(s)
        nxt = np.append(s[2:], 0.0) if k >= 2 else s[:0]
        ds[1:] = jj * (nxt - s[1:]) / one
        s2 = s[1] if k >= 2 else 0.0
        ds[0] = ((one - s[0]) / one) * (s2 / one) - 1.0
        return ds

    return f


def _integrate(dv: DensityVector, t_end: float, tol: float, t_eval=None):
    if not 0.0 <= t_end < 1.0:
        raise DomainError(f"t_end must lie in [0, 1), got {t_end}")
    t_end = min(t_end, ODE_T_MAX)

    def s1_zero(t, s):
        return s[0]

    s1_zero.terminal = True
    s1_zero.direction = -1
    if t_eval is not None:
        t_eval = np.asarray(t_eval, dtype=float)
        t_eval = t_eval[t_eval <= t_end]
    sol = solve_ivp(
        _rhs(dv.k), (0.0, t_end), np.array(dv.d, dtype=float),
        method="RK45", rtol=tol, atol=tol * 1e-3, t_eval=t_eval,
        events=s1_zero, dense_output=False,
    )
    if sol.status == -1:
        raise StepFailure(sol.message)
    t_halt = float(sol.t_events[0][0]) if sol.t_events[0].size else None
    return sol.t, sol.y.T, t_halt


def trajectory_integrate(dv: DensityVector, t_end: float, tol: float = ODE_RTOL, t_eval=None) -> list[TrajectoryPoint]:
    """Numerically integrate the rescaled propagation dynamics

        ds_j/dt = j (s_{j+1} - s_j) / (1 - t)          (2 <= j <= k, s_{k+1} = 0)
        ds_1/dt = ((1 - t - s_1)/(1 - t)) (s_2/(1 - t)) - 1

    from ``s(0) = d`` with an embedded 5(4) Runge-Kutta pair.  Stops early when
    ``s_1`` reaches zero; never integrates past ``t = 1 - 1e-6``.
    """
    ts, ys, _ = _integrate(dv, t_end, tol, t_eval)
    return [TrajectoryPoint(float(t), tuple(float(x) for x in y)) for t, y in zip(ts, ys)]


def halting_time(dv: DensityVector, tol: float = ODE_RTOL) -> float | None:
    """First ``t`` at which the integrated ``s_1`` reaches zero (None if not before 1 - 1e-6)."""
    return _integrate(dv, ODE_T_MAX, tol)[2]


# -- identifiability in random hypergraphs ---------------------------------------


def hypergraph_params(beta) -> DensityVector:
    """Densities whose backbone equation coincides with the hypergraph
    identifiability equation ``ln(1-t) + sum_j j beta_j t^(j-1) = 0``."""
    beta = [float(b) for b in beta]
    if not beta or any(b < 0 for b in beta):
        raise DomainError(f"beta must be a non-empty list of non-negative numbers, got {beta}")
    d = [-math.expm1(-beta[0])] + [j * b for j, b in enumerate(beta[1:], start=2)]
    return DensityVector(tuple(d))


def identifiability_equation(beta, t: float) -> float:
    return math.log1p(-t) + sum(j * b * t ** (j - 1) for j, b in enumerate(beta, start=1))


__all__ = [
    "CRITICAL_D1",
    "CRITICAL_D3",
    "CRITICAL_SLOPE",
    "GammaPoint",
    "PredictionResult",
    "TrajectoryPoint",
    "backbone_equation",
    "backbone_equation_slope",
    "gamma_curve",
    "gamma_d3",
    "halting_time",
    "hypergraph_params",
    "identifiability_equation",
    "lambert_w",
    "phi",
    "phi_12",
    "root_t0",
    "tangency_f",
    "tangency_f_prime",
    "trajectory_array",
    "trajectory_closed_form",
    "trajectory_integrate",
]
