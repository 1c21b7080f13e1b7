"""Exception types shared across the package.

ConfigError maps to CLI exit code 2, NumericsError (and subclasses) to 3.
"""

from __future__ import annotations


class ConfigError(ValueError):
    """A configuration value violates a validated precondition."""


class NumericsError(RuntimeError):
    """A numerical procedure failed in a diagnosable way."""


class BlowUpError(NumericsError):
    """Solution norm exceeded the blow-up guard during time stepping."""

    def __init__(self, step: int, norm: float, limit: float):
        self.step = step
        self.norm = norm
        self.limit = limit
        super().__init__(
            f"norm {norm:.3e} exceeded blow-up guard {limit:.3e} at step {step}"
        )


class NonConvergenceError(NumericsError):
    """Fixed-point iteration failed to reach tolerance."""

    def __init__(self, iterations: int, residuals: list[float], tol: float):
        self.iterations = iterations
        self.residuals = list(residuals)
        self.tol = tol
        last = residuals[-1] if residuals else float("nan")
        super().__init__(
            f"no convergence after {iterations} iterations "
            f"(last residual {last:.3e}, tol {tol:.1e}); "
            "the contraction argument needs a smaller time horizon - try halving T"
        )
