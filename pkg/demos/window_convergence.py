"""Window-size convergence of the eigenvalue route.

The infinite-line eigenvalue is approximated on periodized windows; this
study doubles the window from X = 100 to X = 800 and reports the spread of
k_p and w* across seeds at each size.  No convergence rate is asserted --
the numbers are reported for inspection (the spread shrinks roughly like
X^{-1/2}, the Birkhoff scale of the landscape averages).
"""

import numpy as np

from kpplab import DimerSpec, k_p, sample_realization, speed_from_kp

MASTER = 2026
SEEDS = 12

spec = DimerSpec(a_plus=1.0, a_minus=1.0, c_plus=1.5, c_minus=0.5,
                 len1=1.0, len2=1.0, eps=0.2, length_dist="uniform",
                 jitter=0.3)

print(f"{'X':>6} {'mean k_1':>12} {'std k_1':>10} {'mean w*':>12} {'std w*':>10}")
for X in (100.0, 200.0, 400.0, 800.0):
    kps, ws = [], []
    for s in range(SEEDS):
        m = sample_realization(spec, MASTER, s, X, 0.02)
        kps.append(k_p(m, 1.0, tol=1e-8).lam)
        ws.append(speed_from_kp(m, 0.3, 3.0, tol=1e-4).value)
    print(f"{X:6g} {np.mean(kps):12.6f} {np.std(kps):10.2e} "
          f"{np.mean(ws):12.6f} {np.std(ws):10.2e}")
