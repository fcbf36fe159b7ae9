"""Discrete tilted operators on the periodized window and their Perron roots.

The exponentially tilted generator

    L_p u = (a u')' - 2 p a u' + (p^2 a - p a' + c) u

is discretized in flux/skew form on the X-periodic grid: diffusion uses the
half-node coefficients a_half, and the first-order term is split as
-2pau' = -p (au)' - p a u' + p a' u before central differencing, which folds
the p a' term into the potential.  Row i of the resulting cyclic tridiagonal
matrix reads

    sub[i]  = a_half[i-1/2] * (1/h^2 + p/h)
    sup[i]  = a_half[i+1/2] * (1/h^2 - p/h)
    diag[i] = -(a_half[i-1/2] + a_half[i+1/2]) / h^2 + p^2 a[i] + c[i]

This discretization makes the matrix for tilt -p the exact transpose of the
matrix for +p, so the even symmetry k_p = k_{-p} holds at solver tolerance on
every medium (a plain one-sided p*a[i]/h advection term satisfies it only up
to O(h^2) when a varies).  Off-diagonals are positive iff h|p| < 1, giving an
irreducible nonnegative matrix after a diagonal shift and hence a simple
Perron root with positive eigenvector.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from . import medium as med
from .optimize import BracketFailure, bracket_min, golden_section_min
from .results import SpeedEstimate
from .tridiag import CyclicTridiagonalSolver

_DENSE_CUTOFF = 192


class PositivityViolation(ValueError):
    """Tilt too large for the grid: an off-diagonal entry would be <= 0."""

    def __init__(self, p: float, h: float, row: int):
        super().__init__(
            f"off-diagonal positivity fails at row {row}: need h*|p| < 1, "
            f"got h={h:g}, p={p:g}")
        self.p = p
        self.h = h
        self.row = row


class NoConvergence(RuntimeError):
    """Eigen-solver iteration budget exhausted."""

    def __init__(self, max_iters: int, residual: float):
        super().__init__(
            f"no convergence after {max_iters} iterations "
            f"(last residual {residual:.3e})")
        self.max_iters = max_iters
        self.residual = residual


@dataclass(frozen=True)
class DiscreteOperator:
    """Cyclic tridiagonal matrix of the tilted operator on one window."""

    N: int
    h: float
    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    p: float
    source: int  # realization_id
    X: float

    def __post_init__(self):
        for arr in (self.sub, self.diag, self.sup):
            arr.flags.writeable = False

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.sub * np.roll(v, 1) + self.diag * v + self.sup * np.roll(v, -1)

    def dense(self) -> np.ndarray:
        a = np.diag(self.diag)
        idx = np.arange(self.N)
        a[idx, (idx - 1) % self.N] += self.sub
        a[idx, (idx + 1) % self.N] += self.sup
        return a


@dataclass(frozen=True)
class EigenResult:
    """Principal eigenvalue with positive eigenfunction (max-normalized)."""

    lam: float
    phi: np.ndarray
    residual: float
    iters: int
    p: float
    N: int
    h: float
    X: float
    source: int

    def __post_init__(self):
        self.phi.flags.writeable = False

    def to_dict(self, include_phi: bool = False) -> dict:
        d = {
            "lambda": self.lam,
            "residual": self.residual,
            "iters": self.iters,
            "p": self.p,
            "N": self.N,
            "h": self.h,
            "X": self.X,
            "realization_id": self.source,
        }
        if include_phi:
            d["phi"] = self.phi.tolist()
        return d


def _assemble(m: med.MediumRealization, p: float, zero_order: np.ndarray) -> DiscreteOperator:
    h = m.h
    if h * abs(p) >= 1.0:
        row = 0
        raise PositivityViolation(p, h, row)
    inv_h2 = 1.0 / (h * h)
    tilt = p / h
    ah_r = m.a_half                # a at i + 1/2
    ah_l = np.roll(m.a_half, 1)    # a at i - 1/2
    flux_l = ah_l * inv_h2
    flux_r = ah_r * inv_h2
    sub = flux_l + tilt * ah_l
    sup = flux_r - tilt * ah_r
    # the diagonal reuses the rounded flux terms so that row sums vanish
    # exactly (in floating point) when p = 0 and the zero-order term is 0
    diag = -(flux_l + flux_r) + (p * p) * m.a + zero_order
    return DiscreteOperator(N=m.N, h=h, sub=sub, diag=diag, sup=sup, p=p,
                            source=m.realization_id, X=m.X)


def assemble_tilted(m: med.MediumRealization, p: float) -> DiscreteOperator:
    """Matrix of L_p for the realization's own reaction-rate field c."""
    return _assemble(m, p, m.c)


def assemble_symmetric(m: med.MediumRealization, potential: np.ndarray) -> DiscreteOperator:
    """Self-adjoint p = 0 operator with a supplied zero-order coefficient.

    Used by the variational formula, where the potential is c + a (p+theta)^2.
    """
    potential = np.asarray(potential, dtype=float)
    if potential.shape != (m.N,):
        raise ValueError("potential has wrong shape")
    return _assemble(m, 0.0, potential)


def rayleigh_quotient(op: DiscreteOperator, v: np.ndarray) -> float:
    av = op.matvec(v)
    return float(np.dot(v, av) / np.dot(v, v))


def _dense_principal(op: DiscreteOperator) -> tuple[float, np.ndarray]:
    vals, vecs = np.linalg.eig(op.dense())
    i = int(np.argmax(vals.real))
    lam = float(vals[i].real)
    v = vecs[:, i].real
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return lam, v


def _arnoldi_jump(solver, v, dim):
    """One-shot Arnoldi on the shift-inverted operator, from vector v.

    Returns the dominant Ritz vector; a Krylov space of modest dimension
    resolves the near-degenerate clusters that stall plain inverse iteration.
    """
    n = v.shape[0]
    q = v / np.linalg.norm(v)
    Q = [q]
    H = np.zeros((dim + 1, dim))
    m = dim
    for j in range(dim):
        w = solver.solve(Q[j])
        for _ in range(2):  # modified Gram-Schmidt with one reorthogonalization
            for i in range(j + 1):
                c = np.dot(Q[i], w)
                H[i, j] += c
                w -= c * Q[i]
        beta = np.linalg.norm(w)
        H[j + 1, j] = beta
        if beta <= 1e-14 * max(1.0, abs(H[j, j])):
            m = j + 1
            break
        Q.append(w / beta)
    theta, S = np.linalg.eig(H[:m, :m])
    k = int(np.argmax(np.abs(theta)))
    basis = np.column_stack(Q[:m])
    return basis @ S[:, k].real


def principal_eigen(op: DiscreteOperator, tol: float = 1e-8,
                    max_iters: int = 5000, v0: np.ndarray | None = None) -> EigenResult:
    """Principal (Perron) eigenvalue and positive eigenfunction.

    Inverse (shift-invert) power iteration on sigma*I - A with the shift
    steered by Collatz-Wielandt bounds: for any positive vector v the Perron
    root lies in [min_i (Av)_i/v_i, max_i (Av)_i/v_i], so sigma can sit just
    above the upper bound, and the resolvent of the shifted matrix stays
    entrywise positive, keeping every iterate positive.  Each sweep costs one
    O(N) cyclic tridiagonal factorization and solve.  When subdominant modes
    cluster against the Perron root (long windows), the sweep contracts by
    only 1 - O(gap) and a short Arnoldi run on the same factorization is used
    to jump across the cluster.  Converged when successive eigenvalue
    estimates differ by < tol and the residual
    ||A phi - lam phi||_inf / ||phi||_inf is < tol.
    """
    n = op.N
    if np.any(op.sub <= 0) or np.any(op.sup <= 0):
        bad = int(np.argmax((op.sub <= 0) | (op.sup <= 0)))
        raise PositivityViolation(op.p, op.h, bad)

    if n <= _DENSE_CUTOFF:
        lam, v = _dense_principal(op)
        v = v / np.max(v)
        if np.min(v) <= 0:
            raise NoConvergence(0, np.inf)
        resid = float(np.max(np.abs(op.matvec(v) - lam * v)))
        return EigenResult(lam=lam, phi=v, residual=resid, iters=1, p=op.p,
                           N=n, h=op.h, X=op.X, source=op.source)

    rowsum = op.sub + op.diag + op.sup
    scale = max(1.0, float(np.max(np.abs(rowsum))))
    # rounding floor of the residual: ||A phi - lam phi|| cannot beat a few
    # ulps of the largest matrix entry
    tol_eff = max(tol, 128.0 * np.finfo(float).eps * float(np.max(np.abs(op.diag))))

    v = np.ones(n) if v0 is None else np.abs(np.asarray(v0, dtype=float))
    v = v / np.max(v)
    ratios0 = op.matvec(v) / np.maximum(v, 1e-300)
    cw_hi = float(np.max(ratios0))
    width = max(cw_hi - float(np.min(ratios0)), 1e-15 * scale)
    sigma = cw_hi + max(0.01 * width, 1e-14 * scale)
    solver = CyclicTridiagonalSolver(-op.sub, sigma - op.diag, -op.sup)

    lam = 0.5 * (float(np.min(rowsum)) + cw_hi)
    lam_prev = np.inf
    resid = np.inf
    resid_prev = np.inf
    stall = 0
    jump_dim = 12
    iters = 0
    while iters < max_iters:
        iters += 1
        y = solver.solve(v)
        ymax = np.max(np.abs(y))
        if not np.isfinite(ymax) or ymax == 0.0:
            raise NoConvergence(iters, resid)
        v = np.abs(y) / ymax
        av = op.matvec(v)
        ratios = av / np.maximum(v, 1e-300)
        cw_lo, cw_hi = float(np.min(ratios)), float(np.max(ratios))
        lam = float(np.dot(v, av) / np.dot(v, v))
        resid = float(np.max(np.abs(av - lam * v)))
        if resid < tol_eff and abs(lam - lam_prev) < tol_eff:
            break
        lam_prev = lam

        # steer the shift toward the Perron root; cw_hi >= lam1 keeps it safe
        width = max(cw_hi - cw_lo, 1e-15 * scale)
        target = cw_hi + max(0.01 * width, 1e-14 * scale)
        if target < sigma - 1e-3 * (sigma - cw_hi):
            sigma = target
            solver = CyclicTridiagonalSolver(-op.sub, sigma - op.diag, -op.sup)

        ratio = resid / resid_prev if resid_prev < np.inf else 0.0
        resid_prev = resid
        if ratio > 0.55:
            stall += 1
        else:
            stall = 0
        if stall >= 4 and iters >= 4:
            stall = 0
            dim = min(jump_dim, n - 2, max_iters - iters)
            if dim >= 2:
                u = _arnoldi_jump(solver, v, dim)
                iters += dim
                umax = np.max(np.abs(u))
                if umax > 0 and np.all(np.isfinite(u)):
                    v = np.abs(u) / umax
                jump_dim = min(jump_dim + 6, 30)
    else:
        raise NoConvergence(max_iters, resid)

    phi = v / np.max(v)
    if np.min(phi) <= 0:
        raise NoConvergence(iters, resid)
    return EigenResult(lam=lam, phi=phi, residual=resid, iters=iters, p=op.p,
                       N=n, h=op.h, X=op.X, source=op.source)


# ---------------------------------------------------------------------------
# memoized eigenvalue map p -> k_p
# ---------------------------------------------------------------------------

_KP_MEMO: dict[tuple, EigenResult] = {}
_KP_LOCK = threading.Lock()


def clear_kp_memo() -> None:
    with _KP_LOCK:
        _KP_MEMO.clear()


def k_p(m: med.MediumRealization, p: float, tol: float = 1e-8,
        max_iters: int = 5000, v0: np.ndarray | None = None) -> EigenResult:
    """Principal eigenvalue k_p of the tilted operator on the window.

    Results are memoized per (realization_id, p, N, h, tol); writes are
    serialized and last-write-wins, so concurrent solves of the same key are
    harmless.  ``v0`` only seeds the iteration (warm start), it does not enter
    the key.
    """
    key = (m.realization_id, float(p), m.N, float(m.h), float(tol))
    with _KP_LOCK:
        hit = _KP_MEMO.get(key)
    if hit is not None:
        return hit
    res = principal_eigen(assemble_tilted(m, p), tol=tol, max_iters=max_iters,
                          v0=v0)
    with _KP_LOCK:
        _KP_MEMO[key] = res
    return res


def speed_from_kp(m: med.MediumRealization, p_lo: float = 0.2, p_hi: float = 5.0,
                  tol: float = 1e-4, eig_tol: float | None = None,
                  v0: np.ndarray | None = None) -> SpeedEstimate:
    """Spreading speed from the eigenvalue formula w* = min_{p>0} k_p / p.

    The bracket is validated (the map must be decreasing at p_lo and
    increasing at p_hi) and expanded geometrically up to 8 times per side
    before golden-section minimization to relative tolerance tol in p.
    ``v0`` primes the first eigen solve (e.g. with the eigenfunction of a
    paired realization); later solves warm-start from each other.
    """
    if not (0 < p_lo < p_hi):
        raise ValueError("need 0 < p_lo < p_hi")
    if eig_tol is None:
        eig_tol = min(1e-8, tol * 1e-2)

    warm: dict[str, np.ndarray | None] = {"phi": v0}

    def g(p: float) -> float:
        res = k_p(m, p, tol=eig_tol, v0=warm["phi"])
        warm["phi"] = res.phi
        return res.lam / p

    lo, hi, evals = bracket_min(g, p_lo, p_hi, max_expand=8, lo_floor=0.0)
    p_star, w, evals = golden_section_min(g, lo, hi, rel_tol=tol, evals=evals)
    resid = k_p(m, p_star, tol=eig_tol).residual
    ps = sorted(evals)
    i = ps.index(p_star)
    nbrs = [evals[q] for q in ps[max(0, i - 1):i + 2]]
    err = max(max(nbrs) - w, 0.0) + resid / p_star
    return SpeedEstimate(
        value=w, method="eigen", optimizer=p_star, err=err,
        provenance={
            "realization_id": m.realization_id, "X": m.X, "h": m.h,
            "tol": tol, "eig_tol": eig_tol, "eig_residual": resid,
            "kp_evals": {repr(q): evals[q] * q for q in ps},
        })


def kp_curve(m: med.MediumRealization, ps, tol: float = 1e-8) -> np.ndarray:
    """Array of (p, k_p) rows for a grid of tilts."""
    return np.array([[p, k_p(m, p, tol=tol).lam] for p in ps])
