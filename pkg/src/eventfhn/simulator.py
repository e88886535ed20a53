"""Closed-loop time stepping: uncontrolled, continuous and event-triggered.

Every mode advances ``(I + dt A_h) Z^{n+1} = Z^n + dt b_h q^{n+1}``.  In the
event-triggered mode the control ``q = h K^T z_held`` is computed from a held
sample, which is refreshed whenever

    |h K^T (z_held - Z^{n+1})| > beta ||K|| (V(t_{n+1}) + V(t_held)),

with ``V = ||v|| + ||w||`` in the discrete L2 norm.
"""

from dataclasses import dataclass, field

import numpy as np

from .discretization import discrete_l2_norm, implicit_euler_solve
from .params import SystemParams

__all__ = [
    "SystemParams",
    "Trajectory",
    "EventLog",
    "MODES",
    "deviation",
    "trigger_fired",
    "state_norm",
    "run",
    "sample_initial",
]

MODES = ("uncontrolled", "continuous", "event_triggered", "continuous_implicit")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States ``Z^0..Z^M`` with the control applied in each step.

    ``controls[n]`` is the value used to produce ``states[n + 1]``.
    """

    states: np.ndarray
    controls: np.ndarray
    grid: object = field(repr=False)

    @property
    def v(self):
        return self.states[:, : self.grid.n_interior]

    @property
    def w(self):
        return self.states[:, self.grid.n_interior :]

    @property
    def times(self):
        return self.grid.t_nodes

    def norms(self):
        """``(||v||, ||w||)`` at every time level, discrete L2 norms."""
        h = self.grid.h
        nv = np.sqrt(h * np.einsum("ij,ij->i", self.v, self.v))
        nw = np.sqrt(h * np.einsum("ij,ij->i", self.w, self.w))
        return nv, nw

    def total_norm(self):
        nv, nw = self.norms()
        return nv + nw


@dataclass(frozen=True)
class EventLog:
    """Triggering instants ``t_j`` (``t_0 = 0``), their step indices and held controls.

    ``held_controls[j]`` is applied on ``[t_j, t_{j+1})``.
    """

    trigger_times: tuple
    trigger_steps: tuple
    held_controls: tuple
    dt: float

    @property
    def gaps(self):
        # step counts times dt, so a one-step gap equals dt exactly
        return tuple(float(k) * self.dt for k in np.diff(self.trigger_steps))

    @property
    def count(self):
        """Number of triggers after the initial event ``t_0 = 0``."""
        return len(self.trigger_times) - 1


def state_norm(z, n, h):
    """``V = ||v|| + ||w||`` for a stacked state."""
    return discrete_l2_norm(z[:n], h) + discrete_l2_norm(z[n:], h)


def deviation(sys, grid, z_held, z_now):
    """``d = h K^T (z_held - z_now)``."""
    return float(grid.h * sys.gain @ (np.asarray(z_held) - np.asarray(z_now)))


def trigger_fired(sys, grid, params, z_held, z_now):
    """Strict threshold test; an all-zero state never fires."""
    n = grid.n_interior
    d = deviation(sys, grid, z_held, z_now)
    threshold = params.beta * sys.gain_norm * (
        state_norm(z_now, n, grid.h) + state_norm(z_held, n, grid.h)
    )
    return abs(d) > threshold


def sample_initial(grid, profile="paper_default", table=None):
    """Initial ``(v0, w0)`` sampled on the interior nodes.

    ``profile`` is ``"paper_default"`` (``sin(pi x)``, ``sin(2 pi x)``),
    ``"zero"``, or ``"custom"`` with ``table=(v0, w0)`` of length N each.
    """
    x = np.asarray(grid.x_nodes)
    n = grid.n_interior
    if profile == "paper_default":
        return np.sin(np.pi * x), np.sin(2.0 * np.pi * x)
    if profile == "zero":
        return np.zeros(n), np.zeros(n)
    if profile == "custom":
        if table is None:
            raise ValueError("custom profile needs a (v0, w0) table")
        v0, w0 = (np.asarray(c, dtype=float) for c in table)
        if v0.shape != (n,) or w0.shape != (n,):
            raise ValueError(
                f"custom table must hold two vectors of length {n}, "
                f"got {v0.shape} and {w0.shape}"
            )
        return v0.copy(), w0.copy()
    raise ValueError(f"unknown initial profile {profile!r}")


def run(sys, grid, params, initial, mode="event_triggered"):
    """Integrate the closed loop over ``grid`` and log the triggering instants.

    Parameters
    ----------
    sys : DiscreteSystem
    grid : Grid
    params : SystemParams
        Only ``beta`` is read here; the dynamics are already in ``sys``.
    initial : tuple of array_like
        ``(v0, w0)`` on the interior nodes.
    mode : str
        ``"uncontrolled"`` (q = 0), ``"continuous"`` (``q^{n+1} = h K^T Z^n``
        every step), ``"event_triggered"`` (held sample, refreshed by the
        trigger) or ``"continuous_implicit"`` (lumped
        ``(I + dt (A_h - h b_h K^T)) Z^{n+1} = Z^n``).

    Returns
    -------
    (Trajectory, EventLog)
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    n, m, h = grid.n_interior, grid.n_steps, grid.h
    v0, w0 = (np.asarray(c, dtype=float) for c in initial)
    if v0.shape != (n,) or w0.shape != (n,):
        raise ValueError(f"initial data must be two vectors of length {n}")

    states = np.empty((m + 1, 2 * n))
    controls = np.zeros(m)
    states[0, :n] = v0
    states[0, n:] = w0

    z = states[0].copy()
    held = z.copy()
    times = [0.0]
    steps = [0]
    held_q = [float(h * sys.gain @ held)] if mode == "event_triggered" else [0.0]

    for i in range(m):
        if mode == "uncontrolled":
            q = 0.0
            z = implicit_euler_solve(sys, grid, z, q)
        elif mode == "continuous":
            q = float(h * sys.gain @ z)
            z = implicit_euler_solve(sys, grid, z, q)
        elif mode == "continuous_implicit":
            z = sys.feedback_solver.solve(z)
            q = float(h * sys.gain @ z)
        else:
            q = float(h * sys.gain @ held)
            z = implicit_euler_solve(sys, grid, z, q)
            if trigger_fired(sys, grid, params, held, z):
                held = z.copy()
                times.append(float(grid.t_nodes[i + 1]))
                steps.append(i + 1)
                held_q.append(float(h * sys.gain @ held))
        controls[i] = q
        states[i + 1] = z

    states.setflags(write=False)
    controls.setflags(write=False)
    log = EventLog(tuple(times), tuple(steps), tuple(held_q), grid.dt)
    return Trajectory(states, controls, grid), log
