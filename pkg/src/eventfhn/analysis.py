"""Spectral quantities, stability certificates and dwell-time bounds."""

from dataclasses import dataclass
from math import exp, pi, sqrt

import numpy as np
from scipy.integrate import simpson

from .kernel import kernel_grid

__all__ = [
    "ModeSpectrum",
    "DwellTimeConstants",
    "mode_spectrum",
    "instability_check",
    "iss_gain",
    "certificate_phi",
    "gronwall_constant",
    "sup_norm_constant",
    "sine_coefficients",
    "dwell_time_bound",
    "decay_rate_fit",
]

QUAD_PANELS = 2000


@dataclass(frozen=True)
class ModeSpectrum:
    """Eigenvalues of the per-mode matrix ``[[-(kappa + n^2 pi^2), -rho], [gamma, -delta]]``.

    ``lambda_n`` is the slow (larger) branch.  Adding ``delta`` to either value
    gives the spectrum of the ``delta``-shifted matrix used in ISS estimates.
    """

    n: int
    lambda_n: float
    mu_n: float


@dataclass(frozen=True)
class DwellTimeConstants:
    a0: float
    a1: float
    a2: float
    c: float
    f_n: float
    g_n: float
    n_trunc: int
    gain_norm: float
    tail_norm: float

    def alpha(self, s):
        """``a1 s + a2 s exp(c s / 2)``; strictly increasing from 0."""
        return self.a1 * s + self.a2 * s * exp(0.5 * self.c * s)


def mode_spectrum(n, params, use_damping=False):
    """Mode-``n`` eigenvalues of the raw system (``kappa = a``) or target system (``kappa = lambda``)."""
    kappa = params.lambda_damp if use_damping else params.a
    lap = n * n * pi * pi
    disc = (kappa + lap - params.delta) ** 2 - 4.0 * params.rho * params.gamma
    if not disc > 0:
        raise ValueError(f"mode {n} has nonpositive discriminant {disc!r}")
    root = sqrt(disc)
    trace = kappa + lap + params.delta
    det = (kappa + lap) * params.delta + params.rho * params.gamma
    # the branch without cancellation first, the other from the root product
    if trace >= 0:
        mu = -0.5 * (trace + root)
        lam = det / mu if mu != 0 else 0.5 * (-trace + root)
    else:
        lam = 0.5 * (-trace + root)
        mu = det / lam if lam != 0 else 0.5 * (-trace - root)
    return ModeSpectrum(n=n, lambda_n=lam, mu_n=mu)


def instability_check(params):
    """True when the first uncontrolled mode grows (``lambda_1 > 0``)."""
    shifted = params.a + pi * pi
    disc = (shifted - params.delta) ** 2 - 4.0 * params.rho * params.gamma
    return bool(disc > 0 and sqrt(disc) > shifted + params.delta)


def iss_gain(params):
    """ISS gain of the target system against the boundary deviation."""
    lam, delta, eps = params.lambda_damp, params.delta, params.epsilon
    if not 0 < eps < delta:
        raise ValueError(f"epsilon must lie in (0, delta), got {eps!r}")
    denom = (lam + pi * pi - delta) ** 2 - 4.0 * params.rho * params.gamma
    if not denom > 0:
        raise ValueError(f"(lambda + pi^2 - delta)^2 - 4 rho gamma must be positive, got {denom!r}")
    tail = pi * pi + lam - delta + eps
    if not tail > 0:
        raise ValueError("pi^2 + lambda - delta + epsilon must be positive")
    return 2.0 * pi * pi / denom * (1.0 + (1.0 / eps + 1.0 / tail))


def certificate_phi(beta, vartheta, gain_norm, pi_inv_norm):
    """``2 beta vartheta ||k(1,.)|| ||Pi^{-1}||``; closed-loop stability needs it below 1."""
    for name, value in (("beta", beta), ("vartheta", vartheta), ("gain_norm", gain_norm), ("pi_inv_norm", pi_inv_norm)):
        if value < 0:
            raise ValueError(f"{name} must be >= 0, got {value!r}")
    return 2.0 * beta * vartheta * gain_norm * pi_inv_norm


def gronwall_constant(params):
    # explicit upper bound for the energy growth rate between events
    return 1.0 + params.rho + 2.0 * params.gamma + abs(params.a)


def sup_norm_constant(params, gain_norm, gap, c=None):
    """Bound ``M_j`` on ``sup V(s) / V(t_j)`` over an inter-event interval of length ``gap``."""
    if gap < 0:
        raise ValueError(f"gap must be >= 0, got {gap!r}")
    c = gronwall_constant(params) if c is None else c
    if not c > 0:
        raise ValueError(f"c must be positive, got {c!r}")
    k = gain_norm
    return sqrt(2.0) * exp(0.5 * c * gap) * (1.0 + k + k / sqrt(c)) + k


def sine_coefficients(kernel_params, cap_n, panels=QUAD_PANELS):
    """Sine coefficients of ``k(1, .)`` against ``sqrt(2) sin(n pi y)``, ``n = 1..cap_n``.

    Returns ``(coeffs, gain_norm, tail_norms)`` where ``tail_norms[N-1]`` is
    ``||k(1,.) - g_N||`` computed by direct quadrature of the residual.
    """
    y = np.linspace(0.0, 1.0, panels + 1)
    k1 = kernel_grid(np.ones_like(y), y, kernel_params)
    modes = np.arange(1, cap_n + 1)
    phi = sqrt(2.0) * np.sin(np.outer(modes, np.pi * y))
    coeffs = simpson(phi * k1, x=y, axis=1)
    partial = np.cumsum(coeffs[:, None] * phi, axis=0)
    tails = np.sqrt(simpson((k1 - partial) ** 2, x=y, axis=1))
    norm = sqrt(simpson(k1 * k1, x=y))
    return coeffs, norm, tails


def _bisect(f, target, hi=1.0):
    """Root of the increasing ``f(s) = target`` on ``s > 0``, to full float precision."""
    lo = 0.0
    while f(hi) < target:
        hi *= 2.0
        if hi > 1e300:
            raise OverflowError("could not bracket the dwell-time root")
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return mid
        if f(mid) < target:
            lo = mid
        else:
            hi = mid


def dwell_time_bound(params, kernel_params=None, cap_n=200, c=None):
    """Guaranteed lower bound ``tau`` on the gap between consecutive events.

    The smallest truncation ``N <= cap_n`` with ``||k(1,.) - g_N|| < beta ||k(1,.)||``
    fixes ``a0, a1, a2``; ``tau`` solves ``a1 s + a2 s exp(c s/2) = a0``.

    Raises
    ------
    ValueError
        If ``beta <= 0`` or no truncation up to ``cap_n`` makes ``a0`` positive.
    """
    if not params.beta > 0:
        raise ValueError("dwell-time bound needs beta > 0")
    kp = params.kernel_params() if kernel_params is None else kernel_params
    c = gronwall_constant(params) if c is None else c
    coeffs, knorm, tails = sine_coefficients(kp, cap_n)
    ok = np.nonzero(tails < params.beta * knorm)[0]
    if ok.size == 0:
        raise ValueError(
            f"no truncation up to cap_n={cap_n} gives ||k - g|| < beta ||k|| "
            f"(best {tails.min():.4g} vs {params.beta * knorm:.4g})"
        )
    n_trunc = int(ok[0]) + 1
    kn = coeffs[:n_trunc]
    modes = np.arange(1, n_trunc + 1)
    f_n = float(np.sum(np.abs(kn * sqrt(2.0) * modes * np.pi * np.cos(modes * np.pi))))
    g_n = float(np.sum(np.abs(kn * (modes**2 * np.pi**2 + params.a + params.rho))))
    tail = float(tails[n_trunc - 1])
    consts = DwellTimeConstants(
        a0=params.beta * knorm - tail,
        a1=knorm * f_n + g_n * knorm,
        a2=sqrt(2.0) * g_n * (1.0 + knorm + knorm / sqrt(c)),
        c=c,
        f_n=f_n,
        g_n=g_n,
        n_trunc=n_trunc,
        gain_norm=knorm,
        tail_norm=tail,
    )
    tau = _bisect(consts.alpha, consts.a0)
    return tau, consts


def decay_rate_fit(traj, window):
    """Least-squares slope of ``ln(||v|| + ||w||)`` over ``t_start <= t <= t_end``."""
    t0, t1 = window
    t = np.asarray(traj.times)
    if t0 < t[0] or t1 > t[-1] + 1e-12 or t1 <= t0:
        raise ValueError(f"window {window} not inside [{t[0]}, {t[-1]}]")
    mask = (t >= t0 - 1e-12) & (t <= t1 + 1e-12)
    if mask.sum() < 3:
        raise ValueError("decay fit needs at least 3 samples in the window")
    norms = traj.total_norm()[mask]
    if np.any(norms <= 0):
        raise ValueError("norms must be positive on the fit window")
    slope, _ = np.polyfit(t[mask], np.log(norms), 1)
    return float(slope)
