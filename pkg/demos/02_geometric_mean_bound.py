"""The maximum-ratio-combining upper bound in action.

The sum of N branch SNRs is bounded below by N times their geometric mean,
so the CDF of the geometric-mean variable upper-bounds the MRC outage.  This
script evaluates the multi-aperture CDF law for N = 1, 2, 3, verifies it
against the sampled geometric-mean distribution, and shows the growing gap
to the exact-sum receiver as N increases.

Run:  python demos/02_geometric_mean_bound.py
"""

import numpy as np

from uwoc import presets
from uwoc.channel import gamma0
from uwoc.diversity import ApertureArray, mc_scheme_for, mrc_cdf_bound
from uwoc.experiment import select_prefactor
from uwoc.montecarlo import SimConfig, simulate

egg = presets.EGG
pe = presets.POINTING["significant"]
g0 = gamma0(presets.link_at(0.0))

conv, masses = select_prefactor(egg, pe)
print("== mixture-coefficient convention selected by normalization ==")
for pref, mass in masses.items():
    marker = " <-- selected" if pref == conv.prefactor else ""
    print(f"  {pref:12s}: density mass {mass:.6f}{marker}")

print("\n== bound CDF vs sampled geometric mean (400k trials) ==")
grid = g0 * np.logspace(-2, 1, 5)
for n in (1, 2, 3):
    arr = ApertureArray.iid(n, egg, pe, g0)
    _, ests = simulate(
        SimConfig(trials=400_000, seed=2, arr=arr, gamma_th=float(grid[-1]),
                  scheme=mc_scheme_for(conv)),
        gamma_grid=grid,
    )
    print(f"  N = {n}:")
    for g, est in zip(grid, ests):
        ana = mrc_cdf_bound(float(g), arr, conv)
        print(f"    F({g / g0:6.2f} gamma0) = {ana:.5f}   sampled {est.p_hat:.5f}")

print("\n== gap between the bound and the exact-sum receiver ==")
gamma_th = 10.0 ** (presets.GAMMA_TH_DB / 10.0)
for n in (1, 2, 3):
    for pt in (0.0, 10.0, 20.0):
        g0_pt = gamma0(presets.link_at(pt))
        arr = ApertureArray.iid(n, egg, pe, g0_pt)
        bound = mrc_cdf_bound(gamma_th, arr, conv)
        exact = simulate(
            SimConfig(trials=400_000, seed=3, arr=arr, gamma_th=gamma_th,
                      scheme="mrc_exact_sum")
        ).p_hat
        print(f"  N={n} Pt={pt:+5.1f} dBm:  bound {bound:.4e}  exact-sum MC "
              f"{exact:.4e}  (ratio {bound / max(exact, 1e-300):.2f})")
print("\nThe bound is valid at every point and tightens toward N = 1;")
print("the widening multi-aperture gap mirrors the bound's known looseness.")
