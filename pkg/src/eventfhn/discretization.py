"""Uniform grids, the implicit Euler operator and discrete norms.

The state is stacked as ``Z = (v_1..v_N, w_1..w_N)``.  The spatial operator is

    A_h = diag(1, 0) (x) A_D + C (x) I_N,      C = [[a, rho], [-gamma, delta]],

with ``A_D`` the Dirichlet matrix of ``-d^2/dx^2``.  The boundary control
enters only the last interior ``v`` row through ``b_h = e_N / h^2``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .kernel import KernelParams, gain_vector

__all__ = [
    "Grid",
    "DiscreteSystem",
    "build_grid",
    "build_system",
    "dirichlet_laplacian",
    "implicit_euler_solve",
    "discrete_l2_norm",
]


@dataclass(frozen=True, eq=False)
class Grid:
    n_interior: int
    n_steps: int
    horizon: float
    h: float
    dt: float
    x_nodes: np.ndarray
    t_nodes: np.ndarray


def build_grid(n_interior, n_steps, horizon):
    """Uniform grid with ``h = 1/(N+1)`` and ``dt = T/M``.

    >>> g = build_grid(3, 1, 1.0)
    >>> g.h, g.dt
    (0.25, 1.0)
    """
    if int(n_interior) != n_interior or n_interior < 3:
        raise ValueError(f"n_interior must be an integer >= 3, got {n_interior!r}")
    if int(n_steps) != n_steps or n_steps < 1:
        raise ValueError(f"n_steps must be an integer >= 1, got {n_steps!r}")
    if not horizon > 0:
        raise ValueError(f"horizon must be positive, got {horizon!r}")
    n, m = int(n_interior), int(n_steps)
    h = 1.0 / (n + 1)
    dt = float(horizon) / m
    x = np.arange(1, n + 1) * h
    t = np.arange(m + 1) * dt
    x.setflags(write=False)
    t.setflags(write=False)
    return Grid(n, m, float(horizon), h, dt, x, t)


def dirichlet_laplacian(n, h):
    """Tridiagonal ``A_D`` with ``(A_D y)_i = -(y_{i+1} - 2 y_i + y_{i-1}) / h^2``."""
    main = np.full(n, 2.0 / h**2)
    off = np.full(n - 1, -1.0 / h**2)
    return sparse.diags([off, main, off], [-1, 0, 1], format="csc")


@dataclass(frozen=True, eq=False)
class DiscreteSystem:
    """Assembled matrices for one grid and one parameter set.

    ``solver`` factors ``I + dt A_h`` and ``feedback_solver`` factors the
    lumped closed loop ``I + dt (A_h - h b_h K^T)``; both are built once and
    only read afterwards.
    """

    a_h: sparse.csc_matrix
    b_h: np.ndarray
    coupling: np.ndarray
    gain: np.ndarray
    h: float
    dt: float
    solver: object = field(repr=False)
    feedback_solver: object = field(repr=False)

    @property
    def n(self):
        return self.b_h.size // 2

    @property
    def gain_norm(self):
        """Discrete ``||K|| = sqrt(h K^T K)`` used by the trigger threshold."""
        return float(np.sqrt(self.h * self.gain @ self.gain))


def build_system(grid, params):
    """Assemble ``A_h``, ``b_h``, the padded gain and both step factorizations.

    ``params`` needs ``a, rho, gamma, delta, lambda_damp``; it is not
    re-validated here so degenerate couplings can be assembled for testing.
    """
    n = grid.n_interior
    coupling = np.array([[params.a, params.rho], [-params.gamma, params.delta]], dtype=float)
    lap = dirichlet_laplacian(n, grid.h)
    embed = sparse.csc_matrix(np.array([[1.0, 0.0], [0.0, 0.0]]))
    a_h = (sparse.kron(embed, lap) + sparse.kron(coupling, sparse.identity(n))).tocsc()

    b_h = np.zeros(2 * n)
    b_h[n - 1] = 1.0 / grid.h**2
    gain = np.zeros(2 * n)
    gain[:n] = gain_vector(grid, KernelParams(a=params.a, lam=params.lambda_damp))

    eye = sparse.identity(2 * n, format="csc")
    step = (eye + grid.dt * a_h).tocsc()
    closed = (step - grid.dt * grid.h * sparse.csc_matrix(np.outer(b_h, gain))).tocsc()
    return DiscreteSystem(
        a_h=a_h,
        b_h=b_h,
        coupling=coupling,
        gain=gain,
        h=grid.h,
        dt=grid.dt,
        solver=splu(step),
        feedback_solver=splu(closed),
    )


def implicit_euler_solve(sys, grid, z_prev, q):
    """One step of ``(I + dt A_h) Z = z_prev + dt b_h q``.

    Uses the factorization cached on ``sys`` when ``grid.dt`` matches the step
    it was built for.
    """
    z_prev = np.asarray(z_prev, dtype=float)
    if z_prev.shape != sys.b_h.shape:
        raise ValueError(f"state must have length {sys.b_h.size}, got {z_prev.shape}")
    rhs = z_prev + grid.dt * sys.b_h * q
    if grid.dt == sys.dt:
        out = sys.solver.solve(rhs)
    else:
        step = sparse.identity(sys.b_h.size, format="csc") + grid.dt * sys.a_h
        out = splu(step.tocsc()).solve(rhs)
    if not np.all(np.isfinite(out)):
        raise np.linalg.LinAlgError("implicit Euler step produced non-finite values")
    return out


def discrete_l2_norm(vec, h):
    """``sqrt(h * sum v_i^2)``."""
    vec = np.asarray(vec, dtype=float)
    return float(np.sqrt(h * vec @ vec))
