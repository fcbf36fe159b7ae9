"""One-dimensional bracketing and golden-section minimization."""

from __future__ import annotations

import math

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class BracketFailure(RuntimeError):
    """Raised when geometric bracket expansion fails to enclose a minimum."""

    def __init__(self, lo: float, hi: float, expansions: int):
        super().__init__(
            f"no interior minimum bracketed in [{lo:g}, {hi:g}] "
            f"after {expansions} expansions"
        )
        self.lo = lo
        self.hi = hi
        self.expansions = expansions


def bracket_min(f, lo: float, hi: float, grow: float = 2.0, max_expand: int = 8,
                lo_floor: float = 0.0):
    """Expand [lo, hi] geometrically until the midpoint value undercuts both ends.

    The map must be decreasing at lo and increasing at hi for a valid bracket;
    each side is expanded at most max_expand times, the left one never below
    lo_floor.  Returns (lo, hi, evals) where evals is a dict of cached f values.
    """
    evals: dict[float, float] = {}

    def fv(x: float) -> float:
        if x not in evals:
            evals[x] = f(x)
        return evals[x]

    expansions = 0
    while True:
        mid = math.sqrt(lo * hi) if lo > 0 else 0.5 * (lo + hi)
        f_lo, f_mid, f_hi = fv(lo), fv(mid), fv(hi)
        if f_mid < f_lo and f_mid < f_hi:
            return lo, hi, evals
        if expansions >= max_expand:
            raise BracketFailure(lo, hi, expansions)
        if f_lo <= f_mid:
            # still decreasing toward lo: push the left end down
            lo = max(lo_floor + (lo - lo_floor) / grow, lo_floor)
            if lo == lo_floor:
                lo = lo_floor + (hi - lo_floor) * 1e-6
        if f_hi <= f_mid:
            hi = hi * grow if hi > 0 else hi + (hi - lo)
        expansions += 1


def golden_section_min(f, lo: float, hi: float, rel_tol: float = 1e-4,
                       max_iters: int = 200, evals: dict | None = None):
    """Golden-section search for the minimum of a unimodal f on [lo, hi].

    Stops when the bracket width falls below rel_tol * |midpoint|.  Returns
    (x_min, f_min, evals) with evals the dict of all evaluated points.
    """
    if evals is None:
        evals = {}

    def fv(x: float) -> float:
        if x not in evals:
            evals[x] = f(x)
        return evals[x]

    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = fv(c), fv(d)
    for _ in range(max_iters):
        if (b - a) <= rel_tol * max(abs(a + b) / 2.0, 1e-300):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = fv(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = fv(d)
    x = c if fc < fd else d
    return x, evals[x], evals
