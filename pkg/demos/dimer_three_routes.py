"""Cross-method speed estimation on a random two-phase landscape.

Samples a patchy medium (alternating good/bad blocks with random lengths),
then measures the invasion speed three independent ways.  Heterogeneity in
the growth rate speeds the front up: every estimate lands strictly above the
homogeneous value 2*sqrt(mean_c).

Writes the (p, k_p) and front-position curves into demos/out/ as
gnuplot-ready .dat files.
"""

from pathlib import Path

import numpy as np

from kpplab import (DimerSpec, ReactionSpec, empirical_means, front_speed,
                    kp_curve, sample_realization, simulate, speed_freidlin,
                    speed_from_kp)

MASTER = 2026
OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

spec = DimerSpec(a_plus=1.0, a_minus=1.0, c_plus=1.5, c_minus=0.5,
                 len1=1.0, len2=1.0, eps=0.2, length_dist="uniform",
                 jitter=0.3)

m = sample_realization(spec, MASTER, 0, 400.0, 0.01)
em = empirical_means(m)
print(f"window means: c = {em.mean_c:.4f}, 1/a = {em.mean_inv_a:.4f}")
print(f"homogenized speed 2*sqrt(mean_c/mean_inv_a) = "
      f"{2 * np.sqrt(em.mean_c / em.mean_inv_a):.4f}\n")

eig = speed_from_kp(m, 0.3, 3.0, tol=1e-4)
print(f"eigenvalue route  w* = {eig.value:.5f} at p* = {eig.optimizer:.4f}")

lyap = speed_freidlin(m, tol=1e-4)
print(f"Lyapunov route    w* = {lyap.value:.5f} at gamma* = {lyap.optimizer:.4f}")

mp = sample_realization(spec, MASTER, 0, 400.0, 0.05)
trace = simulate(mp, ReactionSpec("logistic_c"), T=160.0, dt=0.05,
                 snapshot_every=1.0)
direct = front_speed(trace, 0.5)
print(f"direct simulation w* = {direct.value:.5f} +- {direct.err:.4f}")

gap = abs(eig.value - lyap.value) / eig.value
print(f"\neigen-vs-Lyapunov relative gap: {gap:.2e}")
print(f"simulation sits {(eig.value - direct.value) / eig.value:.2%} low "
      "(finite-time front delay)")

curve = kp_curve(m, np.linspace(0.4, 2.4, 21), tol=1e-8)
np.savetxt(OUT / "kp_curve.dat", curve, header="p  k_p")
np.savetxt(OUT / "front.dat",
           np.column_stack([trace.times, trace.positions]),
           header="t  position")
print(f"\nwrote {OUT / 'kp_curve.dat'} and {OUT / 'front.dat'}")
