"""Exception types raised by the spin-lattice integrators."""

from __future__ import annotations


class SpinLatticeError(Exception):
    """Base class for all errors raised by this package.

    ``step`` is filled in by :func:`spinlattice.integrator.integrate` when the
    failure happens inside a time loop.
    """

    step: int | None = None

    def __str__(self) -> str:
        msg = super().__str__()
        if self.step is not None:
            msg = f"step {self.step}: {msg}"
        return msg


class ZeroSpin(SpinLatticeError, ValueError):
    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class NonpositiveSeparation(SpinLatticeError, ValueError):
    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class NoConvergence(SpinLatticeError, RuntimeError):
    """The implicit fixed-point iteration ran out of iterations."""

    def __init__(self, message: str, iterations: int, residual: float):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class StageMismatch(SpinLatticeError, ValueError):
    pass
