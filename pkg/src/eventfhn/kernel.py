"""Backstepping kernels and the discrete Volterra transforms.

The direct kernel ``k`` solves the Klein-Gordon type Goursat problem on the
triangle ``0 <= y <= x <= 1`` with reaction ``c = lambda - a``; the inverse
kernel ``l`` solves the same problem with the reaction sign flipped.  Both
share the diagonal trace ``-c x / 2``.

Writing ``s = c (x^2 - y^2)`` the two kernels are

    k(x, y) = -(c / 2) y F(s),     l(x, y) = -(c / 2) y F(-s),

with ``F(s) = sum_n (s / 4)^n / (n! (n + 1)!)``.  For ``s > 0`` this is
``2 I1(sqrt(s)) / sqrt(s)`` and for ``s < 0`` it is ``2 J1(sqrt(-s)) / sqrt(-s)``.
"""

from dataclasses import dataclass
from math import factorial, isfinite

import numpy as np
from scipy import special
from scipy.integrate import simpson

__all__ = [
    "KernelParams",
    "TransformMatrices",
    "bessel_series",
    "kernel_series",
    "kernel_value",
    "inverse_kernel_value",
    "kernel_grid",
    "inverse_kernel_grid",
    "gain_vector",
    "gain_norm",
    "kernel_hs_norm",
    "transform_matrices",
    "operator_norm",
]

Z_SWITCH = 1e-6
SERIES_RTOL = 1e-16


@dataclass(frozen=True)
class KernelParams:
    """Reaction coefficient ``a``, damping ``lam`` and series truncation order."""

    a: float
    lam: float
    n_terms: int = 40

    def __post_init__(self):
        if self.n_terms < 1:
            raise ValueError(f"n_terms must be >= 1, got {self.n_terms}")
        if not (isfinite(self.a) and isfinite(self.lam)):
            raise ValueError("a and lam must be finite")

    @property
    def c(self):
        """Reaction gap ``lambda - a`` entering the kernel equation."""
        return self.lam - self.a


@dataclass(frozen=True, eq=False)
class TransformMatrices:
    """Discrete forward/inverse Volterra transforms on the interior nodes.

    ``pi_norm`` and ``pi_inv_norm`` are the Hilbert-Schmidt bounds
    ``1 + ||k||_{L2(T)}`` and ``1 + ||l||_{L2(T)}`` of the continuous
    operators.  The largest singular values of the assembled matrices are kept
    separately in ``pi_spectral_norm`` and ``pi_inv_spectral_norm``.
    """

    pi: np.ndarray
    pi_inv: np.ndarray
    pi_norm: float
    pi_inv_norm: float
    pi_spectral_norm: float
    pi_inv_spectral_norm: float


def bessel_series(q, n_terms=40):
    """Evaluate ``F(q) = sum_{n < n_terms} (q/4)^n / (n! (n+1)!)`` elementwise.

    Summation stops early once every term falls below ``1e-16`` of the
    partial sum.
    """
    q = np.asarray(q, dtype=float)
    term = np.ones_like(q)
    total = term.copy()
    ratio = q / 4.0
    for n in range(1, n_terms):
        term = term * ratio / (n * (n + 1))
        total = total + term
        if np.all(np.abs(term) <= SERIES_RTOL * np.abs(total)):
            break
    return total


def _bessel_ratio(q, n_terms=40):
    """``F(q)`` through scipy's I1/J1; removable singularity handled by series."""
    q = np.asarray(q, dtype=float)
    shape = q.shape
    q = q.ravel()
    z = np.sqrt(np.abs(q))
    out = np.empty_like(q)
    small = z < Z_SWITCH
    pos = (~small) & (q > 0)
    neg = (~small) & (q < 0)
    out[small] = bessel_series(q[small], n_terms)
    out[pos] = 2.0 * special.i1(z[pos]) / z[pos]
    out[neg] = 2.0 * special.j1(z[neg]) / z[neg]
    return out.reshape(shape)


def kernel_series(x, y, c, n_terms=60):
    """Direct power series for ``k`` with reaction gap ``c`` (no Bessel calls).

    Kept independent of :func:`kernel_value` so the two can be cross-checked.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    total = np.zeros(np.broadcast(x, y).shape)
    for n in range(n_terms):
        total = total + (c / 4.0) ** (n + 1) * 2.0 * y * (x * x - y * y) ** n / (
            factorial(n) ** 2 * (n + 1)
        )
    return -total


def _check_domain(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any((x < 0) | (x > 1) | (y < 0) | (y > 1)):
        raise ValueError("kernel arguments must lie in [0, 1]")
    if np.any(y > x):
        raise ValueError("kernel is defined only for 0 <= y <= x")
    return x, y


def _kernel(x, y, c, sign, n_terms):
    s = sign * c * (x * x - y * y)
    return -0.5 * c * y * _bessel_ratio(s, n_terms)


def kernel_grid(x, y, p):
    """Vectorised ``k(x, y)``; arrays broadcast, domain is validated."""
    x, y = _check_domain(x, y)
    return _kernel(x, y, p.c, 1.0, p.n_terms)


def kernel_value(x, y, p):
    """Backstepping kernel ``k(x, y)`` for ``0 <= y <= x <= 1``.

    Uses the modified Bessel form and falls back to the power series when the
    Bessel argument is below ``Z_SWITCH``.

    >>> kernel_value(1.0, 1.0, KernelParams(a=-11.0, lam=1.0))
    -6.0
    """
    return float(kernel_grid(x, y, p))


def inverse_kernel_grid(x, y, p):
    x, y = _check_domain(x, y)
    return _kernel(x, y, p.c, -1.0, p.n_terms)


def inverse_kernel_value(x, y, p):
    """Inverse-transform kernel ``l(x, y)``.

    Same Goursat data as ``k`` but with the reaction term of opposite sign,
    so the Bessel argument flips sign (I1 <-> J1) while the prefactor
    ``-(lambda - a) y / 2`` is unchanged.
    """
    return float(inverse_kernel_grid(x, y, p))


def gain_vector(grid, p):
    """Boundary gain ``K_i = k(1, x_i)`` on the interior nodes (length N)."""
    x = np.asarray(grid.x_nodes, dtype=float)
    return kernel_grid(np.ones_like(x), x, p)


def gain_norm(p, panels=2000):
    """Continuous ``||k(1, .)||_{L2(0,1)}`` by composite Simpson quadrature."""
    y = np.linspace(0.0, 1.0, panels + 1)
    k1 = kernel_grid(np.ones_like(y), y, p)
    return float(np.sqrt(simpson(k1 * k1, x=y)))


def kernel_hs_norm(p, inverse=False, order=64):
    """``L2`` norm of ``k`` (or ``l``) over the triangle.

    Gauss-Legendre on the unit square pulled back by ``y = x t``.
    """
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes = 0.5 * (nodes + 1.0)
    weights = 0.5 * weights
    xx, tt = np.meshgrid(nodes, nodes, indexing="ij")
    ww = np.outer(weights, weights) * xx
    f = inverse_kernel_grid if inverse else kernel_grid
    vals = f(xx, xx * tt, p)
    return float(np.sqrt(np.sum(ww * vals * vals)))


def operator_norm(mat, rtol=1e-10, max_iter=10_000):
    """Largest singular value by power iteration on ``M^T M``.

    Starts from the all-ones vector so results are reproducible.
    """
    mat = np.asarray(mat, dtype=float)
    gram = mat.T @ mat
    v = np.ones(gram.shape[1])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(max_iter):
        w = gram @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        if abs(nw - est) <= rtol * nw:
            est = nw
            break
        est = nw
    return float(np.sqrt(est))


def transform_matrices(grid, p):
    """Assemble ``Pi`` and ``Pi^{-1}`` with the left-closed rectangle rule.

    ``(Pi s)_i = s_i - h sum_{j<=i} k(x_i, x_j) s_j`` and
    ``(Pi^{-1} s)_i = s_i + h sum_{j<=i} l(x_i, x_j) s_j``.
    """
    x = np.asarray(grid.x_nodes, dtype=float)
    n = x.size
    xi, xj = np.meshgrid(x, x, indexing="ij")
    lower = np.tril(np.ones((n, n), dtype=bool))
    xj_safe = np.where(lower, xj, 0.0)
    k = np.where(lower, kernel_grid(xi, xj_safe, p), 0.0)
    l = np.where(lower, inverse_kernel_grid(xi, xj_safe, p), 0.0)
    pi = np.eye(n) - grid.h * k
    pi_inv = np.eye(n) + grid.h * l
    return TransformMatrices(
        pi=pi,
        pi_inv=pi_inv,
        pi_norm=1.0 + kernel_hs_norm(p),
        pi_inv_norm=1.0 + kernel_hs_norm(p, inverse=True),
        pi_spectral_norm=operator_norm(pi),
        pi_inv_spectral_norm=operator_norm(pi_inv),
    )
