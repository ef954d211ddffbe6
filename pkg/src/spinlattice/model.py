"""Hamiltonians for spin-lattice systems.

The integrators only need the split

    H(w, q, p) = T(p) + H1(w, q),    H1(w, q) = U(q) + Hm(w / |w|, q)

with analytic derivatives of ``H1``. :class:`ExtendedHamiltonian` fixes that
interface and :class:`SleChainModel` is the periodic one-dimensional chain with
a Lennard-Jones lattice potential and cubic cut-off spin coupling.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from spinlattice.errors import NonpositiveSeparation
from spinlattice.geometry import SpinLatticeState, normalize_spins

__all__ = [
    "lennard_jones",
    "coupling",
    "MassMatrix",
    "EnergyTerms",
    "ExtendedHamiltonian",
    "SleChainModel",
]


def lennard_jones(r, u0: float = 1.0, r_m: float = 1.0):
    """Lennard-Jones energy ``u0 [(r_m/r)^12 - 2 (r_m/r)^6]`` and its derivative.

    ``r_m`` is the location of the minimum, where the energy is ``-u0``.

    Raises:
        NonpositiveSeparation: if any ``r <= 0``.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        idx = int(np.flatnonzero(np.atleast_1d(r) <= 0.0)[0])
        raise NonpositiveSeparation(f"separation {np.atleast_1d(r)[idx]!r} is not positive", idx)
    s6 = (r_m / r) ** 6
    s12 = s6 * s6
    energy = u0 * (s12 - 2.0 * s6)
    deriv = u0 * 12.0 * (s6 - s12) / r
    return energy, deriv


def coupling(r, j0: float, r_c: float):
    """Cubic cut-off exchange strength ``j0 (1 - r/r_c)^3`` for ``r < r_c``, else 0.

    Returns the strength and its derivative in ``r``; both vanish continuously
    at the cut-off.
    """
    r = np.asarray(r, dtype=float)
    x = np.clip(1.0 - r / r_c, 0.0, None)
    x2 = x * x
    return j0 * x2 * x, -3.0 * j0 / r_c * x2


@dataclass(frozen=True, eq=False)
class MassMatrix:
    """Block-diagonal mass matrix: mass ``masses[i]`` repeated ``block`` times."""

    masses: np.ndarray
    block: int = 1

    def __post_init__(self):
        m = np.array(self.masses, dtype=float).reshape(-1)
        if np.any(m <= 0.0):
            raise ValueError("masses must be positive")
        if self.block < 1:
            raise ValueError("block size must be at least 1")
        object.__setattr__(self, "masses", m)

    @property
    def diagonal(self) -> np.ndarray:
        return np.repeat(self.masses, self.block)

    def solve(self, p: np.ndarray) -> np.ndarray:
        """Velocities ``M^{-1} p``."""
        return p / self.diagonal


class EnergyTerms(NamedTuple):
    kinetic: float
    potential: float
    magnetic: float

    @property
    def total(self) -> float:
        return self.magnetic + self.potential + self.kinetic


class ExtendedHamiltonian(ABC):
    """Interface consumed by the integrators.

    Spin arguments of :meth:`magnetic`, :meth:`grad_q` and
    :meth:`effective_field` are taken at face value; callers pass unit spins.
    :meth:`h1` normalizes first, which makes it constant along rays ``w -> c w``.
    """

    mass: MassMatrix

    @property
    @abstractmethod
    def n_spins(self) -> int: ...

    @property
    @abstractmethod
    def dim(self) -> int: ...

    def kinetic(self, p: np.ndarray) -> float:
        p = np.asarray(p, dtype=float)
        return 0.5 * float(np.dot(p, self.mass.solve(p)))

    @abstractmethod
    def potential(self, q: np.ndarray) -> float: ...

    @abstractmethod
    def magnetic(self, spins: np.ndarray, q: np.ndarray) -> float: ...

    @abstractmethod
    def grad_q(self, spins: np.ndarray, q: np.ndarray) -> np.ndarray:
        """Derivative of ``H1`` with respect to the positions."""

    @abstractmethod
    def effective_field(self, spins: np.ndarray, q: np.ndarray) -> np.ndarray:
        """Derivative of the magnetic energy with respect to each spin, shape ``(n, 3)``."""

    def h1(self, spins, q) -> float:
        return self.potential(q) + self.magnetic(normalize_spins(spins), q)

    def energy_terms(self, state: SpinLatticeState) -> EnergyTerms:
        return EnergyTerms(
            self.kinetic(state.p),
            self.potential(state.q),
            self.magnetic(state.spins, state.q),
        )


@dataclass(frozen=True, eq=False)
class SleChainModel(ExtendedHamiltonian):
    """Periodic chain of ``n`` particles on a line, each carrying a spin.

    Neighbours interact through a Lennard-Jones potential and an exchange term
    ``coupling_sign * J(gap) <w_i, w_{i+1}>``, bonds counted once. The default
    ``coupling_sign=+1`` is the chain experiment's form; ``-1`` gives the
    ``-1/2 sum_ij J_ij <w_i, w_j>`` form with a symmetric nearest-neighbour
    ``J_ij``.

    Gaps are ``q[i+1] - q[i]`` with ``q[n] = q[0] + period``; particles must
    keep their order. With ``n == 2`` both bonds join the same two particles,
    so each spin feels the other twice.
    """

    n: int = 30
    period: float = 30.0
    masses: np.ndarray | float = 1.0
    u0: float = 1.0
    r_m: float = 1.0
    j0: float = 10.0
    r_c: float = 1.5
    coupling_sign: float = 1.0
    mass: MassMatrix = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("the chain needs at least two particles")
        if self.period <= 0 or self.r_m <= 0 or self.r_c <= 0:
            raise ValueError("period, r_m and r_c must be positive")
        masses = np.broadcast_to(np.asarray(self.masses, dtype=float), (self.n,)).copy()
        object.__setattr__(self, "mass", MassMatrix(masses))

    @property
    def n_spins(self) -> int:
        return self.n

    @property
    def dim(self) -> int:
        return self.n

    def gaps(self, q: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        gaps = np.empty_like(q)
        gaps[:-1] = q[1:] - q[:-1]
        gaps[-1] = q[0] + self.period - q[-1]
        if np.any(gaps <= 0.0):
            i = int(np.flatnonzero(gaps <= 0.0)[0])
            raise NonpositiveSeparation(
                f"particles {i} and {(i + 1) % self.n} crossed (gap {gaps[i]:.3e})", i
            )
        return gaps

    def potential(self, q) -> float:
        u, _ = lennard_jones(self.gaps(q), self.u0, self.r_m)
        return float(u.sum())

    def magnetic(self, spins, q) -> float:
        j, _ = coupling(self.gaps(q), self.j0, self.r_c)
        dots = np.einsum("ij,ij->i", spins, np.roll(spins, -1, axis=0))
        return self.coupling_sign * float(np.dot(j, dots))

    def grad_q(self, spins, q) -> np.ndarray:
        gaps = self.gaps(q)
        _, du = lennard_jones(gaps, self.u0, self.r_m)
        _, dj = coupling(gaps, self.j0, self.r_c)
        dots = np.einsum("ij,ij->i", spins, np.roll(spins, -1, axis=0))
        # bond i stretches when q[i+1] moves right and q[i] moves left
        bond = du + self.coupling_sign * dj * dots
        return np.roll(bond, 1) - bond

    def effective_field(self, spins, q) -> np.ndarray:
        j, _ = coupling(self.gaps(q), self.j0, self.r_c)
        left = np.roll(j, 1)[:, None] * np.roll(spins, 1, axis=0)
        right = j[:, None] * np.roll(spins, -1, axis=0)
        return self.coupling_sign * (left + right)
