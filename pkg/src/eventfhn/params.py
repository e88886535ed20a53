"""Physical and design coefficients shared by every module."""

from dataclasses import asdict, dataclass
from math import isfinite

from .kernel import KernelParams


@dataclass(frozen=True)
class SystemParams:
    """Coefficients of the linearized FitzHugh-Nagumo system and its controller.

    ``a, rho, gamma, delta`` enter ``v_t = v_xx - a v - rho w`` and
    ``w_t = gamma v - delta w``.  ``lambda_damp`` is the backstepping damping,
    ``beta`` the trigger parameter and ``epsilon`` the decay margin.
    Defaults reproduce the unstable desk experiment (coupling ``[[-11, 1], [-1, 1]]``).
    """

    a: float = -11.0
    rho: float = 1.0
    gamma: float = 1.0
    delta: float = 1.0
    lambda_damp: float = 1.0
    beta: float = 0.001
    epsilon: float = 0.05

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        for name in ("rho", "gamma", "delta"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not 0 < self.epsilon < self.delta:
            raise ValueError(
                f"epsilon must satisfy 0 < epsilon < delta, got epsilon={self.epsilon!r}"
                f" with delta={self.delta!r}"
            )
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta!r}")

    def kernel_params(self, n_terms=40):
        return KernelParams(a=self.a, lam=self.lambda_damp, n_terms=n_terms)

    @property
    def coupling(self):
        """Coupling matrix ``[[a, rho], [-gamma, delta]]`` as nested tuples."""
        return ((self.a, self.rho), (-self.gamma, self.delta))
