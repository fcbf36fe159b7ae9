"""Seeded realizations of heterogeneous diffusion/reaction coefficient fields.

A realization holds gridded fields a, a', c on a window [0, X) treated as
X-periodic (the finite-volume surrogate for the infinite line).  Four ensemble
kinds are supported:

* ``constant``            -- homogeneous a0, c0.
* ``periodic_piecewise``  -- two plateaus per period, C2-smoothed edges.
* ``dimer_random``        -- alternating random-length blocks of two phases
                             (the classic two-phase patchy landscape),
                             C2-smoothed edges.
* ``random_trig``         -- a positive floor plus random-phase cosine modes
                             snapped to the window so the field is exactly
                             X-periodic.

Piecewise kinds are smoothed by convolving each plateau jump with a C1 bump
(quartic kernel) of width eps, so a' exists and is bounded.  Fields of the
piecewise kinds are evaluated analytically at arbitrary points; this makes
rescaling exact at shared sample points and keeps plateau floors exact.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .hashutil import canonical_json, content_hash64, hash64

FORMAT_MAGIC = b"KPPM"
FORMAT_VERSION = 1

# header: magic, version, N, h, X, master_seed, stream_id, realization_id, scale
_HEADER = struct.Struct("<4sHQddQQQd")


# ---------------------------------------------------------------------------
# ensemble specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantSpec:
    """Homogeneous medium a = a0, c = c0."""

    a0: float
    c0: float
    kind: str = field(default="constant", init=False)

    def __post_init__(self):
        if self.a0 <= 0 or self.c0 <= 0:
            raise ValueError("constant ensemble requires a0 > 0 and c0 > 0")

    @property
    def a_floor(self) -> float:
        return self.a0

    @property
    def c_floor(self) -> float:
        return self.c0

    @property
    def corr_length(self) -> float:
        return 1.0


@dataclass(frozen=True)
class PeriodicPiecewiseSpec:
    """Deterministic two-plateau periodic medium with smoothing width eps.

    Each period of length `period` carries (a_plus, c_plus) on the first half
    and (a_minus, c_minus) on the second half.
    """

    period: float
    a_plus: float
    a_minus: float
    c_plus: float
    c_minus: float
    eps: float
    kind: str = field(default="periodic_piecewise", init=False)

    def __post_init__(self):
        for name in ("period", "a_plus", "a_minus", "c_plus", "c_minus", "eps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def a_floor(self) -> float:
        return min(self.a_plus, self.a_minus)

    @property
    def c_floor(self) -> float:
        return min(self.c_plus, self.c_minus)

    @property
    def corr_length(self) -> float:
        return self.period


@dataclass(frozen=True)
class DimerSpec:
    """Random two-phase medium with alternating i.i.d. block lengths.

    Blocks alternate between phase (+): (a_plus, c_plus) with mean length len1
    and phase (-): (a_minus, c_minus) with mean length len2.  With
    length_dist="fixed" the lengths are exactly len1/len2 (the field is then
    (len1+len2)-periodic); with "uniform" each length is jittered by
    U(-jitter, +jitter).
    """

    a_plus: float
    a_minus: float
    c_plus: float
    c_minus: float
    len1: float
    len2: float
    eps: float
    length_dist: str = "fixed"
    jitter: float = 0.0
    kind: str = field(default="dimer_random", init=False)

    def __post_init__(self):
        for name in ("a_plus", "a_minus", "c_plus", "c_minus", "len1", "len2", "eps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.length_dist not in ("fixed", "uniform"):
            raise ValueError("length_dist must be 'fixed' or 'uniform'")
        if self.length_dist == "uniform":
            if not (0 < self.jitter < min(self.len1, self.len2)):
                raise ValueError("jitter must lie in (0, min(len1, len2))")
        elif self.jitter != 0.0:
            raise ValueError("jitter requires length_dist='uniform'")

    @property
    def a_floor(self) -> float:
        return min(self.a_plus, self.a_minus)

    @property
    def c_floor(self) -> float:
        return min(self.c_plus, self.c_minus)

    @property
    def corr_length(self) -> float:
        return self.len1 + self.len2


@dataclass(frozen=True)
class RandomTrigSpec:
    """Random-phase trigonometric medium above positive floors.

    a(x) = a_min + sum_m amps_a[m] * (1 + cos(k_m x + phi_m)) and likewise for
    c with an independent phase draw.  Each nonnegative cosine term keeps the
    floors exact.  The requested base_freqs are snapped to the nearest nonzero
    multiple of 2*pi/X at sampling time so the field is exactly X-periodic.
    """

    base_freqs: tuple[float, ...]
    amps_a: tuple[float, ...]
    amps_c: tuple[float, ...]
    a_min: float
    c_min: float
    kind: str = field(default="random_trig", init=False)

    def __post_init__(self):
        object.__setattr__(self, "base_freqs", tuple(float(f) for f in self.base_freqs))
        object.__setattr__(self, "amps_a", tuple(float(v) for v in self.amps_a))
        object.__setattr__(self, "amps_c", tuple(float(v) for v in self.amps_c))
        m = len(self.base_freqs)
        if m < 1:
            raise ValueError("random_trig needs at least one mode")
        if len(self.amps_a) != m or len(self.amps_c) != m:
            raise ValueError("amplitude vectors must match base_freqs length")
        if self.a_min <= 0 or self.c_min <= 0:
            raise ValueError("floors a_min and c_min must be positive")
        if any(f <= 0 for f in self.base_freqs):
            raise ValueError("base frequencies must be positive")
        if any(v < 0 for v in self.amps_a + self.amps_c):
            raise ValueError("amplitudes must be nonnegative")

    @property
    def a_floor(self) -> float:
        return self.a_min

    @property
    def c_floor(self) -> float:
        return self.c_min

    @property
    def corr_length(self) -> float:
        return 2.0 * np.pi / min(self.base_freqs)


EnsembleSpec = ConstantSpec | PeriodicPiecewiseSpec | DimerSpec | RandomTrigSpec

_SPEC_KINDS = {
    "constant": ConstantSpec,
    "periodic_piecewise": PeriodicPiecewiseSpec,
    "dimer_random": DimerSpec,
    "random_trig": RandomTrigSpec,
}


def spec_to_dict(spec: EnsembleSpec) -> dict:
    d = {"kind": spec.kind}
    for name in spec.__dataclass_fields__:
        if name == "kind":
            continue
        v = getattr(spec, name)
        d[name] = list(v) if isinstance(v, tuple) else v
    return d


def spec_from_dict(d: dict) -> EnsembleSpec:
    d = dict(d)
    kind = d.pop("kind")
    cls = _SPEC_KINDS.get(kind)
    if cls is None:
        raise ValueError(f"unknown ensemble kind {kind!r}")
    return cls(**d)


# ---------------------------------------------------------------------------
# continuous field profiles (deterministic functions of spec, seed, window)
# ---------------------------------------------------------------------------

def _smooth_step(u: np.ndarray) -> np.ndarray:
    # integral of the quartic bump (15/16)(1-u^2)^2; maps [-1,1] -> [0,1], C2
    return 0.5 + (15.0 / 16.0) * (u - 2.0 * u**3 / 3.0 + u**5 / 5.0)


def _quartic_bump(u: np.ndarray) -> np.ndarray:
    return (15.0 / 16.0) * (1.0 - u * u) ** 2


class _ConstantProfile:
    def __init__(self, a0: float, c0: float):
        self.a0, self.c0 = a0, c0

    def a(self, x):
        return np.full_like(x, self.a0, dtype=float)

    def a_prime(self, x):
        return np.zeros_like(x, dtype=float)

    def c(self, x):
        return np.full_like(x, self.c0, dtype=float)


class _PiecewiseProfile:
    """X-periodic plateau field with C2-smoothed jumps.

    starts[j] is the left endpoint of block j (starts[0] == 0); block j holds
    (a_vals[j], c_vals[j]) until the next start, the last block wrapping to X.
    Every jump (including the wrap at 0/X) is smoothed over [e-eps/2, e+eps/2]
    by the quartic-kernel step; the smoothed field stays inside the plateau
    range because the step response is monotone.
    """

    def __init__(self, starts, a_vals, c_vals, eps, X):
        self.starts = np.asarray(starts, dtype=float)
        self.a_vals = np.asarray(a_vals, dtype=float)
        self.c_vals = np.asarray(c_vals, dtype=float)
        self.eps = float(eps)
        self.X = float(X)
        prev_a = np.roll(self.a_vals, 1)
        prev_c = np.roll(self.c_vals, 1)
        self.jump_a = self.a_vals - prev_a
        self.jump_c = self.c_vals - prev_c

    def _eval(self, x, vals, jumps, derivative):
        x = np.asarray(x, dtype=float)
        xm = np.mod(x, self.X)
        half = self.eps / 2.0
        if derivative:
            out = np.zeros_like(xm)
        else:
            idx = np.searchsorted(self.starts, xm, side="right") - 1
            out = vals[idx]
        order = np.argsort(xm, kind="stable")
        xs = xm[order]
        add = np.zeros_like(xs)
        for e, jump in zip(self.starts, jumps):
            if jump == 0.0:
                continue
            for image in (e - self.X, e, e + self.X):
                i0 = np.searchsorted(xs, image - half, side="left")
                i1 = np.searchsorted(xs, image + half, side="right")
                if i1 <= i0:
                    continue
                u = (xs[i0:i1] - image) / half
                if derivative:
                    add[i0:i1] += jump * _quartic_bump(u) / half
                else:
                    add[i0:i1] += jump * (_smooth_step(u) - (u >= 0.0))
        corr = np.empty_like(add)
        corr[order] = add
        if derivative:
            return out + corr
        # the monotone step response keeps the exact field inside the plateau
        # range; clipping removes only last-ulp rounding dust so the declared
        # floors hold exactly
        return np.clip(out + corr, np.min(vals), np.max(vals))

    def a(self, x):
        return self._eval(x, self.a_vals, self.jump_a, derivative=False)

    def a_prime(self, x):
        return self._eval(x, None, self.jump_a, derivative=True)

    def c(self, x):
        return self._eval(x, self.c_vals, self.jump_c, derivative=False)


class _TrigProfile:
    def __init__(self, ks, amps_a, phases_a, amps_c, phases_c, a_min, c_min):
        self.ks = np.asarray(ks, dtype=float)
        self.amps_a = np.asarray(amps_a, dtype=float)
        self.phases_a = np.asarray(phases_a, dtype=float)
        self.amps_c = np.asarray(amps_c, dtype=float)
        self.phases_c = np.asarray(phases_c, dtype=float)
        self.a_min = float(a_min)
        self.c_min = float(c_min)

    def _series(self, x, amps, phases, floor):
        x = np.asarray(x, dtype=float)
        out = np.full_like(x, floor)
        for k, amp, ph in zip(self.ks, amps, phases):
            out += amp * (1.0 + np.cos(k * x + ph))
        return out

    def a(self, x):
        return self._series(x, self.amps_a, self.phases_a, self.a_min)

    def a_prime(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for k, amp, ph in zip(self.ks, self.amps_a, self.phases_a):
            out -= amp * k * np.sin(k * x + ph)
        return out

    def c(self, x):
        return self._series(x, self.amps_c, self.phases_c, self.c_min)


def _build_profile(spec: EnsembleSpec, child_seed: int, X: float):
    """Continuous X-periodic profile; a pure function of (spec, seed, X)."""
    rng = np.random.Generator(np.random.PCG64(child_seed))
    if isinstance(spec, ConstantSpec):
        return _ConstantProfile(spec.a0, spec.c0)
    if isinstance(spec, PeriodicPiecewiseSpec):
        n_per = X / spec.period
        if abs(n_per - round(n_per)) > 1e-9 or round(n_per) < 1:
            raise ValueError("window X must be an integer number of periods")
        n_per = int(round(n_per))
        starts, a_vals, c_vals = [], [], []
        for j in range(n_per):
            starts += [j * spec.period, j * spec.period + spec.period / 2.0]
            a_vals += [spec.a_plus, spec.a_minus]
            c_vals += [spec.c_plus, spec.c_minus]
        return _PiecewiseProfile(starts, a_vals, c_vals, spec.eps, X)
    if isinstance(spec, DimerSpec):
        # draw alternating block lengths until the window is covered by an
        # even count, then tile the circle exactly (lengths scaled by X/total,
        # a 1 - O(corr/X) distortion) so the two phases alternate across the
        # wrap as well; a truncated wrap would occasionally fuse two
        # same-phase blocks into an artificial double-width patch that can
        # dominate the principal eigenvalue
        lengths: list[float] = []
        total = 0.0
        while total < X or len(lengths) % 2 == 1:
            mean_len = spec.len1 if len(lengths) % 2 == 0 else spec.len2
            if spec.length_dist == "uniform":
                length = mean_len + rng.uniform(-spec.jitter, spec.jitter)
            else:
                length = mean_len
            lengths.append(length)
            total += length
        factor = X / total
        starts, a_vals, c_vals = [], [], []
        acc = 0.0
        for j, length in enumerate(lengths):
            starts.append(acc * factor)
            plus_phase = j % 2 == 0
            a_vals.append(spec.a_plus if plus_phase else spec.a_minus)
            c_vals.append(spec.c_plus if plus_phase else spec.c_minus)
            acc += length
        return _PiecewiseProfile(starts, a_vals, c_vals, spec.eps, X)
    if isinstance(spec, RandomTrigSpec):
        ns = [max(1, round(f * X / (2.0 * np.pi))) for f in spec.base_freqs]
        ks = [2.0 * np.pi * n / X for n in ns]
        m = len(ks)
        phases_a = rng.uniform(0.0, 2.0 * np.pi, size=m)
        phases_c = rng.uniform(0.0, 2.0 * np.pi, size=m)
        return _TrigProfile(ks, spec.amps_a, phases_a, spec.amps_c, phases_c,
                            spec.a_min, spec.c_min)
    raise TypeError(f"unsupported spec {type(spec)!r}")


# ---------------------------------------------------------------------------
# realizations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MediumRealization:
    """One sampled medium on an X-periodic window with N = X/h nodes.

    Arrays are read-only; a_half[i] is the flux coefficient at node i + 1/2,
    defined as the arithmetic mean of the neighbouring node values so that the
    serialized (a, a', c) triple reconstructs the realization exactly.
    ``scale`` records accumulated rescalings x -> x/scale of the parent
    profile (scale == 1 for a fresh sample).
    """

    h: float
    X: float
    N: int
    a: np.ndarray
    a_prime: np.ndarray
    c: np.ndarray
    a_half: np.ndarray
    master_seed: int
    stream_id: int
    realization_id: int
    ensemble: EnsembleSpec | None
    scale: float = 1.0

    def __post_init__(self):
        for arr in (self.a, self.a_prime, self.c, self.a_half):
            arr.flags.writeable = False
        if np.any(self.a <= 0) or np.any(self.a_half <= 0):
            raise ValueError("diffusion field must be strictly positive")

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.N) * self.h


@dataclass(frozen=True)
class EmpiricalMeans:
    """Window (Birkhoff) averages of c, a and 1/a."""

    mean_c: float
    mean_a: float
    mean_inv_a: float


def _make_realization(spec, master_seed, stream_id, X, h, scale, profile,
                      rid) -> MediumRealization:
    n = int(round(X / h))
    x = np.arange(n) * h
    args = np.mod(x / scale, X / scale) if scale != 1.0 else x
    a = profile.a(args)
    a_prime = profile.a_prime(args) / scale
    c = profile.c(args)
    a_half = 0.5 * (a + np.roll(a, -1))
    return MediumRealization(
        h=float(h), X=float(X), N=n, a=a, a_prime=a_prime, c=c, a_half=a_half,
        master_seed=int(master_seed), stream_id=int(stream_id),
        realization_id=rid, ensemble=spec, scale=float(scale),
    )


def sample_realization(spec: EnsembleSpec, master_seed: int, stream_id: int,
                       X: float, h: float) -> MediumRealization:
    """Sample one realization; a deterministic function of all its arguments.

    The child seed is hash64(master_seed, stream_id).  X/h must be integral,
    and for the piecewise kinds the smoothing width must satisfy eps >= 4h so
    the transition layers are resolved.
    """
    if X <= 0 or h <= 0:
        raise ValueError("X and h must be positive")
    n = X / h
    if abs(n - round(n)) > 1e-9 * max(1.0, n):
        raise ValueError(f"X/h = {n!r} is not integral")
    if int(round(n)) < 8:
        raise ValueError("window must contain at least 8 nodes")
    if isinstance(spec, (PeriodicPiecewiseSpec, DimerSpec)) and spec.eps < 4.0 * h:
        raise ValueError(
            f"smoothing width eps={spec.eps:g} < 4h={4 * h:g} is unresolved")
    child_seed = hash64(master_seed, stream_id)
    profile = _build_profile(spec, child_seed, X)
    rid = content_hash64(
        canonical_json(spec_to_dict(spec)),
        canonical_json([int(master_seed), int(stream_id)]),
        np.float64(X).tobytes(), np.float64(h).tobytes(),
    )
    return _make_realization(spec, master_seed, stream_id, X, h, 1.0, profile, rid)


def _profile_for(m: MediumRealization):
    if m.ensemble is None:
        raise ValueError("realization has no ensemble spec; cannot rebuild profile")
    child_seed = hash64(m.master_seed, m.stream_id)
    return _build_profile(m.ensemble, child_seed, m.X / m.scale)


def rescale(m: MediumRealization, L: float) -> MediumRealization:
    """Return the rescaled medium a_L(x) = a(x/L), c_L(x) = c(x/L).

    The parent profile is re-sampled at x/L on an L*N-node grid with the same
    spacing h (window length L*X); L*N must be integral.  At shared sample
    points the child fields equal the parent fields exactly, and
    a_L'(x) = a'(x/L)/L.
    """
    if L <= 0:
        raise ValueError("rescale factor L must be positive")
    n_new = m.N * L
    if abs(n_new - round(n_new)) > 1e-9 * max(1.0, n_new):
        raise ValueError(f"L*N = {n_new!r} is not integral")
    profile = _profile_for(m)
    rid = content_hash64(
        np.uint64(m.realization_id).tobytes(), b"rescale", np.float64(L).tobytes())
    return _make_realization(
        m.ensemble, m.master_seed, m.stream_id, m.X * L, m.h,
        m.scale * L, profile, rid)


def empirical_means(m: MediumRealization) -> EmpiricalMeans:
    """Trapezoid window averages of c, a and 1/a.

    On a uniform periodic grid the trapezoid rule reduces to the plain node
    mean.  The invariant mean_a * mean_inv_a >= 1 (Cauchy-Schwarz) holds up to
    rounding.
    """
    return EmpiricalMeans(
        mean_c=float(np.mean(m.c)),
        mean_a=float(np.mean(m.a)),
        mean_inv_a=float(np.mean(1.0 / m.a)),
    )


def replace_c(m: MediumRealization, new_c: np.ndarray, tag: str) -> MediumRealization:
    """Derived realization with the reaction-rate field replaced.

    Used by suites that evaluate eigenvalues for modified zero-order terms
    (e.g. L^2 * c, demeaned c, c + shift).  The derived realization has a new
    id and no generating profile, so it cannot be rescaled further.
    """
    new_c = np.ascontiguousarray(new_c, dtype=float)
    if new_c.shape != (m.N,):
        raise ValueError("replacement c has wrong shape")
    rid = content_hash64(
        np.uint64(m.realization_id).tobytes(), tag.encode(), new_c.tobytes())
    return MediumRealization(
        h=m.h, X=m.X, N=m.N, a=m.a.copy(), a_prime=m.a_prime.copy(), c=new_c,
        a_half=m.a_half.copy(), master_seed=m.master_seed, stream_id=m.stream_id,
        realization_id=rid, ensemble=None, scale=m.scale)


def scale_a(m: MediumRealization, kappa: float) -> MediumRealization:
    """Derived realization with the diffusion field scaled by kappa > 0."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    rid = content_hash64(
        np.uint64(m.realization_id).tobytes(), b"scale_a",
        np.float64(kappa).tobytes())
    return MediumRealization(
        h=m.h, X=m.X, N=m.N, a=kappa * m.a, a_prime=kappa * m.a_prime,
        c=m.c.copy(), a_half=kappa * m.a_half, master_seed=m.master_seed,
        stream_id=m.stream_id, realization_id=rid, ensemble=None, scale=m.scale)


def field_at(m: MediumRealization, name: str, xs: np.ndarray) -> np.ndarray:
    """Periodic linear interpolation of a gridded field at arbitrary points."""
    arr = getattr(m, name)
    t = np.mod(np.asarray(xs, dtype=float), m.X) / m.h
    i0 = np.floor(t).astype(np.int64) % m.N
    frac = t - np.floor(t)
    i1 = (i0 + 1) % m.N
    return arr[i0] * (1.0 - frac) + arr[i1] * frac


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def realization_bytes(m: MediumRealization) -> bytes:
    """Binary container: header then little-endian f64 arrays a, a', c."""
    head = _HEADER.pack(FORMAT_MAGIC, FORMAT_VERSION, m.N, m.h, m.X,
                        m.master_seed, m.stream_id, m.realization_id, m.scale)
    body = b"".join(np.ascontiguousarray(arr, dtype="<f8").tobytes()
                    for arr in (m.a, m.a_prime, m.c))
    return head + body


def save_realization(m: MediumRealization, path: str | Path) -> Path:
    """Write the binary container plus a JSON sidecar with the EnsembleSpec."""
    path = Path(path)
    path.write_bytes(realization_bytes(m))
    sidecar = {
        "ensemble": spec_to_dict(m.ensemble) if m.ensemble is not None else None,
        "master_seed": m.master_seed,
        "stream_id": m.stream_id,
        "realization_id": m.realization_id,
        "X": m.X,
        "h": m.h,
        "scale": m.scale,
    }
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return path


def load_realization(path: str | Path) -> MediumRealization:
    """Read a realization back; arrays are authoritative, the sidecar supplies
    the EnsembleSpec needed to rebuild the generating profile for rescaling."""
    path = Path(path)
    raw = path.read_bytes()
    magic, version, n, h, X, master_seed, stream_id, rid, scale = _HEADER.unpack_from(raw)
    if magic != FORMAT_MAGIC:
        raise ValueError("not a KPPM container")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported container version {version}")
    off = _HEADER.size
    stride = 8 * n
    a = np.frombuffer(raw, dtype="<f8", count=n, offset=off).astype(float)
    a_prime = np.frombuffer(raw, dtype="<f8", count=n, offset=off + stride).astype(float)
    c = np.frombuffer(raw, dtype="<f8", count=n, offset=off + 2 * stride).astype(float)
    spec = None
    sidecar_path = path.with_suffix(path.suffix + ".json")
    if sidecar_path.exists():
        meta = json.loads(sidecar_path.read_text())
        if meta.get("ensemble") is not None:
            spec = spec_from_dict(meta["ensemble"])
    a_half = 0.5 * (a + np.roll(a, -1))
    return MediumRealization(
        h=h, X=X, N=n, a=a, a_prime=a_prime, c=c, a_half=a_half,
        master_seed=master_seed, stream_id=stream_id, realization_id=rid,
        ensemble=spec, scale=scale)
