# Stability sweeps: small mass means close to flat delta.
#
# Two families are measured against the flat model annulus. The first is
# round Schwarzschild flows with m halving each step. The second is squashed
# flat spheres with the squash halving each step. Both W^{1,2} distances
# shrink, roughly linearly in the parameter.

import numpy as np

from imcf_lab import AxisymGrid, WarpedProfile, convergence_study, exact_round_flow, perturbed_sphere, run_imcf

T, N_t, N_theta = 2.0, 256, 64

# %% Schwarzschild family
ms = [0.2 * 2.0**-i for i in range(6)]
fam = [(m, exact_round_flow(WarpedProfile.schwarzschild(m), 2.0, T, N_t, N_theta)) for m in ms]
study = convergence_study(fam, "pmt-flat", 0.0)
print("   m        W12       vol err")
for m, w, v in zip(study.parameters, study.w12, study.vol_rel_err):
    print(f"{m:.5f}  {w:.5f}  {v:.2e}")
print("log-log slope", round(study.fit_slope, 3), " strictly decreasing:", study.monotonic)

# %% perturbation family
grid = AxisymGrid(N_theta)
eps = [0.1 * 2.0**-i for i in range(5)]
fam = [(e, run_imcf(WarpedProfile.flat(), perturbed_sphere(grid, 1.0, 2, e), T, N_t)) for e in eps]
study = convergence_study(fam, "pmt-flat", 0.0)
print("  eps      W12      m_H(S_T)")
for e, w, m in zip(study.parameters, study.w12, study.final_mass):
    print(f"{e:.5f}  {w:.5f}  {m:+.3e}")
print("slope", round(study.fit_slope, 3), " |m_H| shrinking:", study.mass_monotonic)

# distance goes like eps; the final mass falls at least like eps^2
print("m_H ratios", np.round(np.array(study.final_mass[:-1]) / study.final_mass[1:], 2))
