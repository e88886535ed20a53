"""
Stability certificate and dwell time
====================================

Phi_e = 2 beta vartheta ||k(1,.)|| ||Pi^-1|| < 1 certifies exponential
stability of the event-triggered loop, and tau bounds the gap between events
from below, which excludes Zeno behaviour.
"""

from dataclasses import replace

from eventfhn import SystemParams, build_grid, certificate_phi, dwell_time_bound, iss_gain
from eventfhn.kernel import gain_norm, transform_matrices

params = SystemParams()
kp = params.kernel_params()
knorm = gain_norm(kp)
tm = transform_matrices(build_grid(40, 1, 1.0), kp)
vartheta = iss_gain(params)

print(f"||k(1,.)|| = {knorm:.5f}")
print(f"||Pi^-1|| <= {tm.pi_inv_norm:.5f}  (matrix 2-norm {tm.pi_inv_spectral_norm:.4f})")
print(f"vartheta  = {vartheta:.4f}")
print(f"Phi_e     = {certificate_phi(params.beta, vartheta, knorm, tm.pi_inv_norm):.4f}")

# the dwell-time bound needs a sine truncation of the gain within beta of it
tau, consts = dwell_time_bound(replace(params, beta=0.05))
print(f"beta=0.05: N={consts.n_trunc} modes, a0={consts.a0:.3e}, tau={tau:.3e}")
try:
    dwell_time_bound(params)
except ValueError as exc:
    print(f"beta=0.001: {exc}")
