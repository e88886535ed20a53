"""
Open-loop instability of the linearized FitzHugh-Nagumo system
==============================================================

With a = -11 the reaction outweighs diffusion in the first sine mode, so the
uncontrolled system grows.  The fitted growth rate is compared with the
first-mode eigenvalue.
"""

from eventfhn import (
    SystemParams,
    build_grid,
    build_system,
    decay_rate_fit,
    instability_check,
    mode_spectrum,
    run,
    sample_initial,
)

params = SystemParams()
grid = build_grid(40, 2000, 6.0)
system = build_system(grid, params)

# the first mode is the only unstable one
for n in (1, 2, 3):
    print(f"mode {n}: lambda_n = {mode_spectrum(n, params).lambda_n:+.4f}")
print("unstable:", instability_check(params))

traj, _ = run(system, grid, params, sample_initial(grid), mode="uncontrolled")
norm = traj.total_norm()
print(f"||v|| + ||w||: {norm[0]:.4f} -> {norm[-1]:.4f}")
print(f"fitted growth on [2, 6]: {decay_rate_fit(traj, (2.0, 6.0)):.4f}")
