"""Orchestration: multi-method speed estimation and theorem-verification suites.

A run config is a plain JSON-able dict; see DEFAULT_CONFIG for the knobs.
Seeds are paired across parameter values (stream ids 0..S-1 regardless of the
parameter grid, common random numbers), so monotonicity claims compare the
same realizations.  "Almost sure" statements become ensemble claims with
three-valued verdicts: verified, violated, or inconclusive when the
confidence interval straddles the gate.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import freidlin as fr
from . import medium as med
from . import operators as ops
from . import pde
from . import variational as var
from .manifest import ResultCache, RunManifest
from .results import SpeedEstimate

DEFAULT_CONFIG: dict = {
    "ensemble": {"kind": "dimer_random", "a_plus": 1.0, "a_minus": 1.0,
                 "c_plus": 1.5, "c_minus": 0.5, "len1": 1.0, "len2": 1.0,
                 "eps": 0.2, "length_dist": "uniform", "jitter": 0.3},
    "X": 400.0,
    "h": 0.01,
    "seeds": 8,
    "master_seed": 20260810,
    "methods": ["eigen", "freidlin"],
    "tol": 1e-8,
    "p_lo": 0.3,
    "p_hi": 3.0,
    "speed_tol": 1e-4,
    "pde": {"h": 0.05, "T": 160.0, "dt": 0.05, "snapshot_every": 1.0,
            "fit_fraction": 0.5},
    "kappa_grid": [1.0, 2.0, 4.0],
    "B_grid": [0.0, 0.2, 0.4],
    "reaction_r": 1.0,
    "c_shift": 0.5,
    "L_grid": [0.5, 1.0, 2.0, 4.0],
    "identity_p_grid": [0.3, 0.7, 1.2],
    "p_grid": [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0],
    "duality_p_grid": [0.8, 1.0, 1.2, 1.5, 1.8],
    "attainment_max_iters": 300,
}


def make_config(**overrides) -> dict:
    cfg = json.loads(json.dumps(DEFAULT_CONFIG))
    for k, v in overrides.items():
        if k == "pde" and isinstance(v, dict):
            cfg["pde"].update(v)
        else:
            cfg[k] = v
    return cfg


def _spec(cfg: dict) -> med.EnsembleSpec:
    return med.spec_from_dict(cfg["ensemble"])


def _realization(cfg: dict, stream_id: int, h: float | None = None,
                 X: float | None = None) -> med.MediumRealization:
    return med.sample_realization(
        _spec(cfg), cfg["master_seed"], stream_id,
        X if X is not None else cfg["X"], h if h is not None else cfg["h"])


def statistical_slack(spec: med.EnsembleSpec, c_values: np.ndarray, X: float) -> float:
    """Allowance for comparing window averages against ensemble quantities.

    3 * (window std of c) / sqrt(X / corr_length), with the correlation-length
    proxy taken from the ensemble kind (block period for dimers, longest mode
    for trigonometric media).  Zero for constant media.
    """
    std = float(np.std(c_values))
    if std == 0.0:
        return 0.0
    return 3.0 * std / np.sqrt(X / spec.corr_length)


def _parallel(tasks, threads: int):
    """Deterministic-order map over tasks (list of zero-arg callables)."""
    if threads <= 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(t) for t in tasks]
        return [f.result() for f in futures]


# ---------------------------------------------------------------------------
# speed estimation across methods
# ---------------------------------------------------------------------------

@dataclass
class MethodStats:
    values: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def mean(self) -> float:
        return float(np.mean(self.values)) if self.values else float("nan")

    @property
    def stderr(self) -> float:
        if len(self.values) < 2:
            return 0.0
        return float(np.std(self.values, ddof=1) / np.sqrt(len(self.values)))


@dataclass
class SpeedReport:
    config: dict
    per_method: dict[str, MethodStats]
    estimates: dict[str, list]  # method -> list of SpeedEstimate dicts

    @property
    def max_pairwise_gap(self) -> float:
        means = [s.mean for s in self.per_method.values() if s.values]
        if len(means) < 2:
            return 0.0
        return float(max(means) - min(means))

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "methods": {
                name: {"mean": s.mean, "stderr": s.stderr, "values": s.values,
                       "failures": s.failures}
                for name, s in self.per_method.items()
            },
            "max_pairwise_gap": self.max_pairwise_gap,
            "estimates": self.estimates,
        }


def _eigen_speed(cfg, m, v0=None) -> SpeedEstimate:
    return ops.speed_from_kp(m, cfg["p_lo"], cfg["p_hi"],
                             tol=cfg["speed_tol"],
                             eig_tol=min(cfg["tol"], 1e-7), v0=v0)


def _pde_speed(cfg, stream_id) -> SpeedEstimate:
    pcfg = cfg["pde"]
    mp = _realization(cfg, stream_id, h=pcfg["h"])
    trace = pde.simulate(mp, pde.ReactionSpec("logistic_c"), T=pcfg["T"],
                         dt=pcfg["dt"], snapshot_every=pcfg["snapshot_every"])
    return pde.front_speed(trace, pcfg["fit_fraction"])


def estimate_speed(config: dict, threads: int = 1,
                   cache: ResultCache | None = None) -> SpeedReport:
    """Run each configured method on paired realizations.

    Stream ids are 0..seeds-1 independent of the method, so per-seed
    estimates are cross-method comparable.  Failures are recorded per method
    and do not abort the remaining work.
    """
    methods = config["methods"]
    stats = {name: MethodStats() for name in methods}
    estimates = {name: [] for name in methods}

    def run_one(stream_id):
        out = {}
        realz = _realization(config, stream_id)
        for name in methods:
            params = {"method": name, "stream": stream_id,
                      "speed_tol": config["speed_tol"],
                      "pde": config["pde"] if name == "pde" else None}
            key = None
            if cache is not None:
                key = cache.key(med.realization_bytes(realz), "estimate_speed",
                                params)
                hit = cache.get(key)
                if hit is not None:
                    out[name] = hit
                    continue
            try:
                if name == "eigen":
                    est = _eigen_speed(config, realz)
                elif name == "freidlin":
                    est = fr.speed_freidlin(realz, tol=config["speed_tol"])
                elif name == "pde":
                    est = _pde_speed(config, stream_id)
                else:
                    raise ValueError(f"unknown method {name!r}")
                out[name] = est.to_dict()
                if cache is not None:
                    cache.put(key, out[name])
            except Exception as exc:  # noqa: BLE001 - partial results persist
                out[name] = {"error": f"{type(exc).__name__}: {exc}"}
        return out

    results = _parallel([lambda s=s: run_one(s) for s in range(config["seeds"])],
                        threads)
    for stream_id, out in enumerate(results):
        for name in methods:
            rec = out[name]
            if "error" in rec:
                stats[name].failures.append({"stream": stream_id,
                                             "error": rec["error"]})
            else:
                stats[name].values.append(rec["value"])
                estimates[name].append(rec)
    return SpeedReport(config=config, per_method=stats, estimates=estimates)


# ---------------------------------------------------------------------------
# suite machinery
# ---------------------------------------------------------------------------

@dataclass
class Verdict:
    claim: str
    inequality: str
    tolerance: float
    verdict: str  # verified | violated | inconclusive
    margin: float
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"claim": self.claim, "inequality": self.inequality,
                "tolerance": self.tolerance, "verdict": self.verdict,
                "margin": self.margin, "details": self.details}


@dataclass
class SuiteReport:
    name: str
    config: dict
    points: list
    verdicts: list[Verdict]
    manifest_hash: str = ""

    @property
    def all_verified(self) -> bool:
        return all(v.verdict == "verified" for v in self.verdicts)

    @property
    def any_violated(self) -> bool:
        return any(v.verdict == "violated" for v in self.verdicts)

    def to_dict(self) -> dict:
        return {"suite": self.name, "config": self.config,
                "points": self.points,
                "verdicts": [v.to_dict() for v in self.verdicts],
                "manifest_hash": self.manifest_hash}


def _ensemble_verdict(claim, inequality, margins, gate, tolerance,
                      frac_required=1.0, details=None) -> Verdict:
    """Three-valued verdict for per-seed margins against a gate.

    verified: required fraction of seeds clears the gate; violated: the
    ensemble mean sits below the gate by more than its CI; inconclusive
    otherwise (CI straddles the gate).
    """
    margins = np.asarray(margins, dtype=float)
    ok = margins > gate
    frac = float(np.mean(ok))
    mean = float(np.mean(margins))
    ci = (1.96 * float(np.std(margins, ddof=1) / np.sqrt(margins.size))
          if margins.size > 1 else 0.0)
    det = {"gate": gate, "fraction_ok": frac, "mean_margin": mean,
           "ci95": ci, "n": int(margins.size)}
    if details:
        det.update(details)
    if frac >= frac_required:
        verdict = "verified"
    elif mean - ci > gate:
        verdict = "inconclusive"  # seeds fail but the mean clears the gate
    elif mean + ci < gate:
        verdict = "violated"
    else:
        verdict = "inconclusive"
    return Verdict(claim=claim, inequality=inequality, tolerance=tolerance,
                   verdict=verdict, margin=mean - gate, details=det)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def suite_homogenized_bound(config: dict, threads: int = 1) -> SuiteReport:
    """Speed never falls below the harmonic-mean homogenized speed.

    Per seed, compares the eigen-method w* against 2 sqrt(mean_c/mean_inv_a)
    computed from the same window.  Strictness (margin beyond 3x the
    statistical slack) is asserted only when a is constant and c is not.
    """
    spec = _spec(config)
    seeds = config["seeds"]

    def run_one(stream_id):
        m = _realization(config, stream_id)
        em = med.empirical_means(m)
        bound = 2.0 * np.sqrt(em.mean_c / em.mean_inv_a)
        est = _eigen_speed(config, m)
        slack = statistical_slack(spec, m.c, m.X)
        a_const = float(np.max(m.a) - np.min(m.a)) <= 1e-12 * float(np.max(m.a))
        c_const = float(np.max(m.c) - np.min(m.c)) <= 1e-12 * float(np.max(m.c))
        return {"stream": stream_id, "w": est.value, "p_star": est.optimizer,
                "bound": bound, "slack": slack, "margin": est.value - bound,
                "a_const": a_const, "c_const": c_const}

    points = _parallel([lambda s=s: run_one(s) for s in range(seeds)], threads)
    # the slack is purely statistical and vanishes for constant media, where
    # the only play left is optimizer tolerance; keep a numeric floor
    slack = points[0]["slack"]
    floor = max(slack, 1e-6)
    verdicts = [_ensemble_verdict(
        "homogenized lower bound",
        "w* >= 2*sqrt(mean_c/mean_inv_a) - slack",
        [p["margin"] for p in points], gate=-floor, tolerance=floor)]
    if points and points[0]["a_const"] and not points[0]["c_const"]:
        verdicts.append(_ensemble_verdict(
            "strict bound for constant a, nonconstant c",
            "w* - 2*sqrt(mean_c/mean_inv_a) > 3*slack",
            [p["margin"] for p in points], gate=3.0 * slack, tolerance=slack,
            frac_required=0.95))
    return SuiteReport(name="homogenized_bound", config=config, points=points,
                       verdicts=verdicts)


def suite_diffusion_monotonicity(config: dict, threads: int = 1) -> SuiteReport:
    """kappa -> w*(kappa a, c) increases when c is constant.

    Also checks the exact linearity k_p(kappa a, c) = kappa k_p(a, 0) + c at
    the assembled-matrix level (tolerance 5*tol).  Configs with nonconstant c
    are rejected: the monotonicity can fail in that generality.
    """
    probe = _realization(config, 0)
    c_span = float(np.max(probe.c) - np.min(probe.c))
    if c_span > 1e-12 * max(1.0, float(np.max(probe.c))):
        raise ValueError("suite_diffusion_monotonicity requires constant c")
    c_val = float(probe.c[0])
    kappas = list(config["kappa_grid"])
    tol = config["tol"]
    eig_tol = min(tol, 1e-10)
    p_id = config["identity_p_grid"][len(config["identity_p_grid"]) // 2]

    def run_one(stream_id):
        m = _realization(config, stream_id)
        rec = {"stream": stream_id, "w": {}, "identity_gap": {}}
        for kappa in kappas:
            mk = med.scale_a(m, kappa)
            rec["w"][repr(kappa)] = _eigen_speed(config, mk).value
            lhs = ops.k_p(mk, p_id, tol=eig_tol).lam
            m0 = med.replace_c(m, np.zeros(m.N), "czero")
            rhs = kappa * ops.k_p(m0, p_id, tol=eig_tol).lam + c_val
            rec["identity_gap"][repr(kappa)] = abs(lhs - rhs)
        return rec

    points = _parallel([lambda s=s: run_one(s) for s in range(config["seeds"])],
                       threads)
    id_gaps = [g for p in points for g in p["identity_gap"].values()]
    verdicts = [_ensemble_verdict(
        "diffusion linearity identity",
        "|k_p(kappa a, c) - kappa k_p(a, 0) - c| <= 5*tol",
        [-g for g in id_gaps], gate=-5.0 * tol, tolerance=5.0 * tol)]
    diffs = []
    for p in points:
        ws = [p["w"][repr(k)] for k in kappas]
        diffs.extend(np.diff(ws))
    noise = 3.0 * config["speed_tol"]
    verdicts.append(_ensemble_verdict(
        "speed increases with diffusion (constant c)",
        "w*(kappa2 a) > w*(kappa1 a) for kappa2 > kappa1, beyond paired noise",
        diffs, gate=noise, tolerance=noise))
    return SuiteReport(name="diffusion_monotonicity", config=config,
                       points=points, verdicts=verdicts)


def suite_reaction_monotonicity(config: dict, threads: int = 1) -> SuiteReport:
    """Larger reaction means faster fronts; zero-mean perturbations help.

    Part 1: per paired seed, w*(a, c + shift) >= w*(a, c) for shift >= 0.
    Part 2: with a == 1 and g the window-demeaned c, B -> w* of rate
    r + B*(c - mean_c) is nondecreasing on the B grid (strictly increasing
    beyond paired noise when c is nonconstant); B values at or above the
    admissibility threshold B* are rejected.
    """
    shift = float(config["c_shift"])
    if shift < 0:
        raise ValueError("c_shift must be nonnegative")
    r = float(config["reaction_r"])
    b_grid = [float(b) for b in config["B_grid"]]

    probe = _realization(config, 0)
    demeaned = probe.c - float(np.mean(probe.c))
    b_star = r / abs(float(np.min(demeaned))) if np.min(demeaned) < 0 else np.inf
    if max(b_grid) >= b_star:
        raise ValueError(f"B grid reaches the admissibility threshold B*={b_star:g}")

    def run_one(stream_id):
        m = _realization(config, stream_id)
        w_base = _eigen_speed(config, m).value
        w_shift = _eigen_speed(
            config, med.replace_c(m, m.c + shift, "cshift")).value
        dem = m.c - float(np.mean(m.c))
        w_b = {}
        for b in b_grid:
            mb = med.replace_c(m, r + b * dem, "bdem")
            w_b[repr(b)] = _eigen_speed(config, mb).value
        return {"stream": stream_id, "w_base": w_base, "w_shifted": w_shift,
                "w_B": w_b}

    points = _parallel([lambda s=s: run_one(s) for s in range(config["seeds"])],
                       threads)
    noise = 3.0 * config["speed_tol"]
    verdicts = [_ensemble_verdict(
        "comparison w*(a, c) <= w*(a, c + shift)",
        "w*(c + shift) - w*(c) >= 0 on all paired seeds",
        [p["w_shifted"] - p["w_base"] for p in points],
        gate=-noise, tolerance=noise)]
    b_diffs = []
    for p in points:
        ws = [p["w_B"][repr(b)] for b in b_grid]
        b_diffs.extend(np.diff(ws))
    verdicts.append(_ensemble_verdict(
        "B-monotonicity of w*(1, r + B (c - mean c))",
        "w* nondecreasing across the B grid on paired seeds",
        b_diffs, gate=-noise, tolerance=noise))
    c_const = float(np.max(probe.c) - np.min(probe.c)) <= 1e-12
    if not c_const:
        verdicts.append(_ensemble_verdict(
            "strict B-monotonicity for nonconstant c",
            "w* increases across the B grid beyond paired noise",
            b_diffs, gate=noise, tolerance=noise))
    return SuiteReport(name="reaction_monotonicity", config=config,
                       points=points, verdicts=verdicts)


def admissible_amplitude(f: pde.ReactionSpec, m: med.MediumRealization,
                         s_grid_size: int = 64) -> float:
    """Largest B keeping f + B g positive on (0, 1), for g = c(x) s (1 - s).

    For the logistic kinds the threshold is exact: +inf when min c >= 0,
    otherwise r / |min c|.  Other tabulated reactions go through
    admissible_amplitude_scan.
    """
    c_min = float(np.min(m.c))
    if f.kind == "logistic_c":
        # base reaction is itself c(x) s (1-s); adding B of the same g
        return np.inf if c_min >= 0 else 1.0
    if f.kind == "shifted_combo":
        return np.inf if c_min >= 0 else f.r / abs(c_min)
    raise ValueError(f"unsupported reaction kind {f.kind!r}")


def admissible_amplitude_scan(f_of_s, g_of_x_s, x_grid, s_grid_size: int = 64,
                              b_hi: float = 1e6, tol: float = 1e-6) -> float:
    """Bisection for B* = sup{B >= 0 : f(s) + B g(x, s) > 0 on the grid}.

    Scans an s-times-x grid; the feasible set in B is an interval because g
    enters linearly.
    """
    s = np.linspace(0.0, 1.0, s_grid_size + 2)[1:-1]
    xs = np.asarray(x_grid, dtype=float)
    fv = f_of_s(s)[None, :]
    gv = np.array([g_of_x_s(x, s) for x in xs])

    def feasible(b):
        return bool(np.all(fv + b * gv > 0))

    if not feasible(0.0):
        return 0.0
    if feasible(b_hi):
        return np.inf
    lo, hi = 0.0, b_hi
    while hi - lo > tol * max(1.0, lo):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def suite_scaling_monotonicity(config: dict, threads: int = 1) -> SuiteReport:
    """Coarser media are faster: L -> w*(a_L, c_L) is nondecreasing.

    Verifies the exact rescaling identity k_p(a_L, c_L) =
    k_{pL}(a, L^2 c) / L^2 at 5*tol per (L, p) sample (the right side is
    evaluated on the parent sampled at spacing h/L, the same physical points
    the rescaled window uses), then checks monotonicity of w* over the L
    grid on paired seeds; strict increase is asserted only for constant a
    with nonconstant c and reported otherwise.
    """
    l_grid = [float(v) for v in config["L_grid"]]
    id_ls = [v for v in l_grid if v >= 1.0] or l_grid
    tol = config["tol"]
    eig_tol = min(tol, 1e-10)
    spec = _spec(config)

    def run_one(stream_id):
        m = _realization(config, stream_id)
        rec = {"stream": stream_id, "w": {}, "identity_gap": {}}
        for L in l_grid:
            mL = med.rescale(m, L)
            rec["w"][repr(L)] = _eigen_speed(config, mL).value
            if L in id_ls:
                gaps = {}
                fine = med.sample_realization(spec, config["master_seed"],
                                              stream_id, config["X"],
                                              config["h"] / L)
                fine2 = med.replace_c(fine, L * L * fine.c, "scalesq")
                for p in config["identity_p_grid"]:
                    lhs = ops.k_p(mL, p, tol=eig_tol).lam
                    rhs = ops.k_p(fine2, p * L, tol=eig_tol).lam / (L * L)
                    gaps[repr(p)] = abs(lhs - rhs)
                rec["identity_gap"][repr(L)] = gaps
        return rec

    points = _parallel([lambda s=s: run_one(s) for s in range(config["seeds"])],
                       threads)
    id_gaps = [g for p in points for gs in p["identity_gap"].values()
               for g in gs.values()]
    verdicts = [_ensemble_verdict(
        "window rescaling identity",
        "|k_p(a_L, c_L) - k_{pL}(a, L^2 c)/L^2| <= 5*tol",
        [-g for g in id_gaps], gate=-5.0 * tol, tolerance=5.0 * tol)]
    probe = _realization(config, 0)
    noise = 3.0 * config["speed_tol"]
    diffs = []
    for p in points:
        ws = [p["w"][repr(L)] for L in l_grid]
        diffs.extend(np.diff(ws))
    verdicts.append(_ensemble_verdict(
        "speed nondecreasing under coarsening",
        "w*(a_L, c_L) nondecreasing over the L grid on paired seeds",
        diffs, gate=-noise, tolerance=noise))
    a_const = float(np.max(probe.a) - np.min(probe.a)) <= 1e-12 * float(np.max(probe.a))
    c_const = float(np.max(probe.c) - np.min(probe.c)) <= 1e-12 * float(np.max(probe.c))
    if a_const and not c_const:
        verdicts.append(_ensemble_verdict(
            "strict increase for constant a, nonconstant c",
            "w* increases across the L grid beyond paired noise",
            diffs, gate=noise, tolerance=noise))
    return SuiteReport(name="scaling_monotonicity", config=config,
                       points=points, verdicts=verdicts)


def suite_eigen_properties(config: dict, threads: int = 1,
                           include_variational: bool = True) -> SuiteReport:
    """Property battery for the eigenvalue map p -> k_p on one ensemble.

    Parity k_p = k_{-p}; convexity of p -> k_p; k_p >= k_0; the window-mean
    lower bounds k_0 >= mean_c and k_p >= mean_c + p^2/mean_inv_a (with
    statistical slack); Lyapunov duality mu(k_p) = p where gamma = k_p is
    admissible; attainment of the variational formula at p = 1.5 p*.
    """
    p_grid = [float(p) for p in config["p_grid"]]
    tol = config["tol"]
    eig_tol = min(tol, 1e-10)
    spec = _spec(config)

    def run_one(stream_id):
        m = _realization(config, stream_id)
        em = med.empirical_means(m)
        kp = {repr(p): ops.k_p(m, p, tol=eig_tol).lam for p in p_grid}
        k0 = ops.k_p(m, 0.0, tol=eig_tol).lam
        rec = {"stream": stream_id, "k_p": kp, "k0": k0,
               "mean_c": em.mean_c, "mean_inv_a": em.mean_inv_a,
               "slack": statistical_slack(spec, m.c, m.X)}
        c_max = float(np.max(m.c))
        dual = {}
        for p in config["duality_p_grid"]:
            lam = ops.k_p(m, p, tol=eig_tol).lam
            if lam > c_max + fr.default_margin(k0):
                mu = fr.riccati_mu(m, lam, lambda1_estimate=k0)
                dual[repr(p)] = abs(mu - p)
        rec["duality_gap"] = dual
        if include_variational:
            est = _eigen_speed(config, m)
            p_att = 1.5 * est.optimizer
            res = var.minimize_theta(m, p_att,
                                     max_iters=config["attainment_max_iters"])
            kpa = ops.k_p(m, p_att, tol=eig_tol).lam
            rec["attainment"] = {"p": p_att,
                                 "rel_gap": res.gap_vs_direct / kpa,
                                 "iters": res.iters}
        return rec

    points = _parallel([lambda s=s: run_one(s) for s in range(config["seeds"])],
                       threads)
    verdicts = []
    parity = [-abs(p["k_p"][repr(q)] - p["k_p"][repr(-q)])
              for p in points for q in p_grid if q > 0 and -q in p_grid]
    verdicts.append(_ensemble_verdict(
        "parity of the eigenvalue in the tilt", "|k_p - k_{-p}| <= 5*tol",
        parity, gate=-5.0 * tol, tolerance=5.0 * tol))
    second = []
    for p in points:
        ks = np.array([p["k_p"][repr(q)] for q in p_grid])
        second.extend(np.diff(ks, 2))
    verdicts.append(_ensemble_verdict(
        "convexity of p -> k_p", "second differences >= -1e-6",
        second, gate=-1e-6, tolerance=1e-6))
    above = [p["k_p"][repr(q)] - p["k0"] for p in points for q in p_grid]
    verdicts.append(_ensemble_verdict(
        "zero tilt minimizes the eigenvalue", "k_p >= k_0 - 5*tol",
        above, gate=-5.0 * tol, tolerance=5.0 * tol))
    k0_lb = [p["k0"] - p["mean_c"] + p["slack"] for p in points]
    verdicts.append(_ensemble_verdict(
        "mean-reaction lower bound", "k_0 >= mean_c - slack",
        k0_lb, gate=0.0, tolerance=points[0]["slack"]))
    homog = [p["k_p"][repr(q)] - (p["mean_c"] + q * q / p["mean_inv_a"])
             + p["slack"] for p in points for q in p_grid]
    verdicts.append(_ensemble_verdict(
        "homogenized eigenvalue bound",
        "k_p >= mean_c + p^2/mean_inv_a - slack",
        homog, gate=0.0, tolerance=points[0]["slack"]))
    duality = [-g for p in points for g in p["duality_gap"].values()]
    if duality:
        verdicts.append(_ensemble_verdict(
            "Lyapunov duality", "|mu(k_p) - p| <= 2e-3",
            duality, gate=-2e-3, tolerance=2e-3))
    if include_variational:
        att = [p["attainment"]["rel_gap"] for p in points]
        verdicts.append(_ensemble_verdict(
            "variational attainment (upper side)",
            "(min_theta k_0 - k_p)/k_p <= 1e-3",
            [-a for a in att], gate=-1e-3, tolerance=1e-3))
        verdicts.append(_ensemble_verdict(
            "variational attainment (lower side)",
            "(min_theta k_0 - k_p)/k_p >= -1e-6",
            att, gate=-1e-6, tolerance=1e-6))
    return SuiteReport(name="eigen_properties", config=config, points=points,
                       verdicts=verdicts)


SUITES = {
    "homogenized_bound": suite_homogenized_bound,
    "diffusion_monotonicity": suite_diffusion_monotonicity,
    "reaction_monotonicity": suite_reaction_monotonicity,
    "scaling_monotonicity": suite_scaling_monotonicity,
    "eigen_properties": suite_eigen_properties,
}


def run_suite(name: str, config: dict, out_dir: str | Path | None = None,
              threads: int = 1) -> SuiteReport:
    """Run a named suite, optionally persisting payloads and a manifest."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    manifest = RunManifest(config={"suite": name, **config},
                           master_seed=config["master_seed"]).start()
    report = SUITES[name](config, threads=threads)
    report.manifest_hash = manifest.content_key()
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        payload = out / f"{name}_report.json"
        payload.write_text(json.dumps(report.to_dict(), indent=2,
                                      sort_keys=True) + "\n")
        manifest.record_output(payload)
        csv_path = out / f"{name}_verdicts.csv"
        lines = ["claim,verdict,margin,tolerance"]
        lines += [f"\"{v.claim}\",{v.verdict},{v.margin!r},{v.tolerance!r}"
                  for v in report.verdicts]
        csv_path.write_text("\n".join(lines) + "\n")
        manifest.record_output(csv_path)
        manifest.finish().write(out)
    return report
