"""Lyapunov-exponent route to the spreading speed.

For gamma above the self-adjoint principal eigenvalue, the linear problem
(a phi')' + c phi = gamma phi has a unique positive decaying solution whose
exponential decay rate mu(gamma) is computed here without ever forming phi:
the substitution w = a phi'/phi turns the problem into the Riccati equation

    w' = gamma - c - w^2 / a,

whose decaying branch w ~ -sqrt(a (gamma - c)) is attracting under backward
integration.  Averaging -w/a over the window yields mu, and the speed is the
minimum of gamma / mu(gamma).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import medium as med
from . import operators as ops
from .optimize import BracketFailure, bracket_min, golden_section_min
from .results import SpeedEstimate

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None


class GammaBelowThreshold(ValueError):
    """gamma too low: below Lambda_1 + margin or not above max c."""


class StepTooCoarse(RuntimeError):
    """An RK4 stage moved w by more than 20% of its magnitude."""

    def __init__(self, x: float, step: float):
        super().__init__(f"RK4 step {step:g} too coarse near x={x:g}")
        self.x = x
        self.step = step


def default_margin(lambda1: float) -> float:
    return 0.05 * abs(lambda1) + 1e-3


def _rk4_backward_py(avals, cvals, gamma, step, w0):
    """Reference implementation of the backward Riccati sweep.

    Integrates w' = gamma - c - w^2/a from the first grid point toward the
    last (decreasing x); avals/cvals sample the fields at half-step spacing.
    w0 = nan selects the decaying-branch initializer -sqrt(a (gamma - c)).
    """
    nsteps = (len(avals) - 1) // 2
    w = w0 if not np.isnan(w0) else -np.sqrt(avals[0] * (gamma - cvals[0]))
    ws = np.empty(nsteps + 1)
    ws[0] = w
    hs = -step
    bad = -1.0
    for j in range(nsteps):
        a0, c0 = avals[2 * j], cvals[2 * j]
        am, cm = avals[2 * j + 1], cvals[2 * j + 1]
        a1, c1 = avals[2 * j + 2], cvals[2 * j + 2]
        k1 = gamma - c0 - w * w / a0
        w2 = w + 0.5 * hs * k1
        k2 = gamma - cm - w2 * w2 / am
        w3 = w + 0.5 * hs * k2
        k3 = gamma - cm - w3 * w3 / am
        w4 = w + hs * k3
        k4 = gamma - c1 - w4 * w4 / a1
        move = step * max(abs(k1), abs(k2), abs(k3), abs(k4))
        if move > 0.2 * abs(w):
            bad = float(j)
            break
        w = w + (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ws[j + 1] = w
    return ws, bad


if njit is not None:
    _rk4_backward = njit(cache=True)(_rk4_backward_py)
else:  # pragma: no cover
    _rk4_backward = _rk4_backward_py


def _lambda1(m: med.MediumRealization, tol: float = 1e-8) -> float:
    return ops.k_p(m, 0.0, tol=tol).lam


def riccati_mu(m: med.MediumRealization, gamma: float,
               ode_step: float | None = None,
               lambda1_estimate: float | None = None) -> float:
    """Lyapunov exponent mu(gamma) by stable-branch backward integration.

    Integrates w from x = X down to 0 with RK4 at ode_step (default h/2),
    starting on the decaying branch w(X) = -sqrt(a(X)(gamma - c(X))), then
    continues for a second full sweep through the (periodic) window starting
    from the relaxed value; mu is -1 times the average of w/a over the second
    sweep.  Discarding the whole first sweep removes the initializer
    transient, and averaging over exactly one period removes the O(corr/X)
    sampling bias a partial window would leave (the converged w is X-periodic
    here).  Requires gamma > Lambda_1 + margin and gamma > max c (the
    square-root initializer and the branch structure fail otherwise).
    """
    if ode_step is None:
        ode_step = m.h / 2.0
    if ode_step <= 0:
        raise ValueError("ode_step must be positive")
    lam1 = _lambda1(m) if lambda1_estimate is None else lambda1_estimate
    margin = default_margin(lam1)
    if gamma <= lam1 + margin:
        raise GammaBelowThreshold(
            f"gamma={gamma:g} <= Lambda_1 + margin = {lam1 + margin:g}")
    c_max = float(np.max(m.c))
    if gamma <= c_max:
        raise GammaBelowThreshold(
            f"gamma={gamma:g} <= max c = {c_max:g}: sqrt initializer undefined")

    nsteps = int(np.ceil(m.X / ode_step))
    step = m.X / nsteps
    xs = m.X - 0.5 * step * np.arange(2 * nsteps + 1)
    avals = med.field_at(m, "a", xs)
    cvals = med.field_at(m, "c", xs)
    relax, bad = _rk4_backward(avals, cvals, gamma, step, np.nan)
    if bad >= 0:
        raise StepTooCoarse(float(m.X - bad * step), step)
    ws, bad = _rk4_backward(avals, cvals, gamma, step, relax[-1])
    if bad >= 0:
        raise StepTooCoarse(float(m.X - bad * step), step)
    # second-sweep endpoints x_j = X - j*step, j = 1..n: one exact period
    a_nodes = avals[::2]
    return float(-np.mean(ws[1:] / a_nodes[1:]))


@dataclass(frozen=True)
class MuCurve:
    """mu(gamma) samples on an increasing grid, with provenance.

    mu is positive, strictly increasing and concave in gamma: it is the
    inverse function of the convex increasing tilt-to-eigenvalue map, and the
    homogeneous closed form sqrt((gamma - c)/a) shows the curvature sign.
    """

    gamma: np.ndarray
    mu: np.ndarray
    lambda1_estimate: float
    margin: float
    realization_id: int
    X: float
    h: float
    ode_step: float

    def __post_init__(self):
        self.gamma.flags.writeable = False
        self.mu.flags.writeable = False
        if np.any(np.diff(self.gamma) <= 0):
            raise ValueError("gamma grid must be strictly increasing")
        if np.any(self.mu <= 0):
            raise ValueError("mu values must be positive")

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        meta = {
            "lambda1_estimate": self.lambda1_estimate,
            "margin": self.margin,
            "realization_id": self.realization_id,
            "X": self.X,
            "h": self.h,
            "ode_step": self.ode_step,
        }
        lines = ["# " + json.dumps(meta, sort_keys=True), "gamma,mu"]
        lines += [f"{g!r},{u!r}" for g, u in zip(self.gamma, self.mu)]
        path.write_text("\n".join(lines) + "\n")
        return path


def mu_curve(m: med.MediumRealization, gammas, ode_step: float | None = None) -> MuCurve:
    lam1 = _lambda1(m)
    if ode_step is None:
        ode_step = m.h / 2.0
    gammas = np.asarray(sorted(float(g) for g in gammas))
    mus = np.array([riccati_mu(m, g, ode_step, lambda1_estimate=lam1)
                    for g in gammas])
    return MuCurve(gamma=gammas, mu=mus, lambda1_estimate=lam1,
                   margin=default_margin(lam1), realization_id=m.realization_id,
                   X=m.X, h=m.h, ode_step=ode_step)


def speed_freidlin(m: med.MediumRealization, tol: float = 1e-4,
                   ode_step: float | None = None) -> SpeedEstimate:
    """Spreading speed via the Lyapunov formula w* = min_{gamma} gamma/mu(gamma).

    The bracket grows geometrically from gamma_0 = Lambda_1 + 2*margin (never
    below the max-c exclusion threshold); golden-section minimization runs to
    relative tolerance tol in gamma.  The returned provenance records whether
    the minimizer sat against the exclusion boundary.
    """
    lam1 = _lambda1(m)
    margin = default_margin(lam1)
    if ode_step is None:
        ode_step = m.h / 2.0
    c_max = float(np.max(m.c))
    gamma_lo = max(lam1 + 2.0 * margin, c_max + margin)

    def g(gamma: float) -> float:
        return gamma / riccati_mu(m, gamma, ode_step, lambda1_estimate=lam1)

    lo, hi, evals = bracket_min(g, gamma_lo, 2.0 * gamma_lo + 1.0,
                                max_expand=8, lo_floor=gamma_lo)
    gamma_star, w, evals = golden_section_min(g, lo, hi, rel_tol=tol, evals=evals)
    mu_star = gamma_star / w
    gs = sorted(evals)
    i = gs.index(gamma_star)
    nbrs = [evals[q] for q in gs[max(0, i - 1):i + 2]]
    err = max(max(nbrs) - w, 0.0) + tol * w
    at_boundary = gamma_star <= gamma_lo * (1.0 + 2.0 * tol)
    return SpeedEstimate(
        value=w, method="freidlin", optimizer=gamma_star, err=err,
        provenance={
            "realization_id": m.realization_id, "X": m.X, "h": m.h,
            "tol": tol, "ode_step": ode_step, "mu_star": mu_star,
            "lambda1_estimate": lam1, "gamma_lo": gamma_lo,
            "bracket_at_exclusion_boundary": bool(at_boundary),
        })


def roundtrip_error(m: med.MediumRealization, gamma: float,
                    ode_step: float | None = None) -> float:
    """Forward re-integration diagnostic (the unstable direction).

    Integrates the Riccati equation forward from the converged w(0) and
    returns the relative mismatch at x = X.  Useful only on well-conditioned
    gamma and short windows; not an acceptance gate.
    """
    if ode_step is None:
        ode_step = m.h / 2.0
    lam1 = _lambda1(m)
    nsteps = int(np.ceil(m.X / ode_step))
    step = m.X / nsteps
    xs = m.X - 0.5 * step * np.arange(2 * nsteps + 1)
    avals = med.field_at(m, "a", xs)
    cvals = med.field_at(m, "c", xs)
    margin = default_margin(lam1)
    if gamma <= lam1 + margin or gamma <= float(np.max(m.c)):
        raise GammaBelowThreshold(f"gamma={gamma:g} out of range")
    ws, bad = _rk4_backward(avals, cvals, gamma, step, np.nan)
    if bad >= 0:
        raise StepTooCoarse(float(m.X - bad * step), step)
    # forward sweep reuses the same kernel on reversed field arrays with the
    # sign of w flipped: v(y) = -w(X - y) satisfies v' = gamma - c~ - v^2/a~
    # for the reversed coefficients, and starts from the converged w(0)
    ws_fwd, bad = _rk4_backward(avals[::-1].copy(), cvals[::-1].copy(),
                                gamma, step, -ws[-1])
    if bad >= 0:
        raise StepTooCoarse(float(bad * step), step)
    w_fwd_at_X = -ws_fwd[-1]
    return float(abs(w_fwd_at_X - ws[0]) / abs(ws[0]))
