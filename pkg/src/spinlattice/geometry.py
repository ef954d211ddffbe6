r"""Maps between the spin-lattice phase space and its Poisson and canonical covers.

Three spaces are involved:

* ``M = (S^2)^n x T*R^m``, the physical phase space (unit spins, positions,
  momenta), represented by :class:`SpinLatticeState`;
* ``P = (R^3)^n x T*R^m``, the same with spins allowed any nonzero length;
* ``N = C^{2n} x T*R^m``, where every spin is replaced by a pair of complex
  numbers ``(z1, z2)``, represented by :class:`CollectiveState`.

The Hopf map :func:`hopf` sends a pair to the spin

.. math::

    J(z_1, z_2) = \tfrac14 \bigl(2\,\mathrm{Re}(z_1 \bar z_2),\;
        2\,\mathrm{Im}(z_1 \bar z_2),\; |z_1|^2 - |z_2|^2\bigr)

so that ``|J(z1, z2)| = (|z1|^2 + |z2|^2) / 4``. A spin of length ``r`` is
therefore covered by the 3-sphere ``|z1|^2 + |z2|^2 = 4 r``.

Canonical coordinates on each ``C^2`` factor take the real parts as positions
and the imaginary parts as momenta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from spinlattice.errors import ZeroSpin

__all__ = [
    "LatticeState",
    "SpinLatticeState",
    "CollectiveState",
    "hopf",
    "hopf_all",
    "lift",
    "lift_state",
    "normalize_spins",
    "project",
    "hopf_gradients",
    "verify_hopf_poisson",
]


def _as_spins(spins) -> np.ndarray:
    arr = np.array(spins, dtype=float)
    if arr.size == 0:
        return arr.reshape(0, 3)
    if arr.ndim == 1:
        arr = arr.reshape(1, 3)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"spins must have shape (n, 3), got {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class LatticeState:
    """Positions ``q`` and momenta ``p`` of the lattice, both of length m."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float).reshape(-1)
        p = np.array(self.p, dtype=float).reshape(-1)
        if q.shape != p.shape:
            raise ValueError(
                f"positions and momenta differ in length ({q.size} != {p.size})"
            )
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def dim(self) -> int:
        return self.q.size


@dataclass(frozen=True, eq=False)
class SpinLatticeState:
    """A point ``(w, q, p)`` of the spin-lattice phase space.

    ``spins`` is an ``(n, 3)`` array. Spins are expected to have unit length;
    use :meth:`is_on_leaf` to check, or :func:`project` to build a state from
    arbitrary nonzero spins.
    """

    spins: np.ndarray
    lattice: LatticeState

    def __post_init__(self):
        object.__setattr__(self, "spins", _as_spins(self.spins))

    @classmethod
    def from_arrays(cls, spins, q, p) -> SpinLatticeState:
        return cls(spins, LatticeState(q, p))

    @property
    def q(self) -> np.ndarray:
        return self.lattice.q

    @property
    def p(self) -> np.ndarray:
        return self.lattice.p

    @property
    def n_spins(self) -> int:
        return self.spins.shape[0]

    def is_on_leaf(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(np.linalg.norm(self.spins, axis=1) - 1.0) <= tol))

    def flatten(self) -> np.ndarray:
        """Concatenation ``(w, q, p)`` as one real vector."""
        return np.concatenate([self.spins.reshape(-1), self.q, self.p])


@dataclass(frozen=True, eq=False)
class CollectiveState:
    """A point ``(z1, z2, q, p)`` of the canonical cover.

    ``z1[i], z2[i]`` are the complex coordinates lifting spin ``i``.
    """

    z1: np.ndarray
    z2: np.ndarray
    lattice: LatticeState

    def __post_init__(self):
        z1 = np.array(self.z1, dtype=complex).reshape(-1)
        z2 = np.array(self.z2, dtype=complex).reshape(-1)
        if z1.shape != z2.shape:
            raise ValueError("z1 and z2 must have the same length")
        object.__setattr__(self, "z1", z1)
        object.__setattr__(self, "z2", z2)

    @property
    def n_spins(self) -> int:
        return self.z1.size

    def to_real(self) -> np.ndarray:
        """Canonical coordinates ``(Re z, q, Im z, p)`` with ``z = (z1, z2)``.

        Positions come first and momenta second, so the symplectic matrix is
        the standard ``[[0, I], [-I, 0]]``.
        """
        z = np.concatenate([self.z1, self.z2])
        return np.concatenate([z.real, self.lattice.q, z.imag, self.lattice.p])

    @classmethod
    def from_real(cls, x: np.ndarray, n_spins: int) -> CollectiveState:
        x = np.asarray(x, dtype=float)
        half = x.size // 2
        pos, mom = x[:half], x[half:]
        nz = 2 * n_spins
        z = pos[:nz] + 1j * mom[:nz]
        return cls(z[:n_spins], z[n_spins:], LatticeState(pos[nz:], mom[nz:]))


def hopf(z1, z2) -> np.ndarray:
    """Hopf map of one pair, or of arrays of pairs (result has a trailing axis of 3)."""
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    c = z1 * np.conj(z2)
    return 0.25 * np.stack(
        [2.0 * c.real, 2.0 * c.imag, np.abs(z1) ** 2 - np.abs(z2) ** 2], axis=-1
    )


def hopf_all(state: CollectiveState) -> tuple[np.ndarray, LatticeState]:
    """Apply :func:`hopf` to every pair; the lattice part is passed through."""
    return hopf(state.z1, state.z2).reshape(-1, 3), state.lattice


def lift(spin) -> tuple[np.ndarray | complex, np.ndarray | complex]:
    """A right inverse of :func:`hopf`.

    Picks the branch dividing by the larger of ``sqrt(2r + 2w3)`` and
    ``sqrt(2r - 2w3)``, so both poles are handled without cancellation.
    Works on a single spin or on an ``(n, 3)`` array.

    Raises:
        ZeroSpin: if a spin has zero length.
    """
    w = np.asarray(spin, dtype=float)
    single = w.ndim == 1
    w = _as_spins(w)
    r = np.linalg.norm(w, axis=1)
    bad = np.flatnonzero(r == 0.0)
    if bad.size:
        raise ZeroSpin(f"cannot lift zero spin at index {bad[0]}", int(bad[0]))
    w1, w2, w3 = w.T
    north = w3 >= 0.0
    a = np.sqrt(2.0 * r + 2.0 * np.abs(w3))
    z1 = np.where(north, a, 2.0 * (w1 + 1j * w2) / a)
    z2 = np.where(north, 2.0 * (w1 - 1j * w2) / a, a)
    if single:
        return complex(z1[0]), complex(z2[0])
    return z1.astype(complex), z2.astype(complex)


def lift_state(state: SpinLatticeState) -> CollectiveState:
    z1, z2 = lift(state.spins)
    return CollectiveState(z1, z2, state.lattice)


def normalize_spins(spins) -> np.ndarray:
    """Scale every spin to unit length.

    Raises:
        ZeroSpin: naming the first zero spin.
    """
    w = _as_spins(spins)
    r = np.linalg.norm(w, axis=1)
    bad = np.flatnonzero(r == 0.0)
    if bad.size:
        raise ZeroSpin(f"spin {bad[0]} has zero length", int(bad[0]))
    return w / r[:, None]


def project(ambient_spins, lattice: LatticeState) -> SpinLatticeState:
    """Ray projection from the Poisson space onto the phase space."""
    return SpinLatticeState(normalize_spins(ambient_spins), lattice)


def hopf_gradients(z1: complex, z2: complex) -> np.ndarray:
    """Gradients of the three Hopf components in canonical coordinates.

    Returns a ``(3, 4)`` array; row ``a`` is ``dJ_a / d(x1, x2, y1, y2)`` where
    ``z_k = x_k + i y_k``.
    """
    x1, y1 = z1.real, z1.imag
    x2, y2 = z2.real, z2.imag
    return 0.5 * np.array(
        [
            [x2, x1, y2, y1],
            [-y2, y1, x2, -x1],
            [x1, -x2, y1, -y2],
        ]
    )


def verify_hopf_poisson(z1: complex, z2: complex) -> np.ndarray:
    """Residuals of the Poisson property of the Hopf map at one point.

    Entry ``(a, b)`` is ``{J_a, J_b} - <w, e_a x e_b>`` with ``w = hopf(z1, z2)``.
    The canonical bracket is oriented as ``{f, g} = sum(f_y g_x - f_x g_y)``
    (positions ``x``, momenta ``y``), the orientation for which the Hamiltonian
    vector field acts as ``X_H f = {H, f}``. This is the orientation under which
    the collective flow reduces to ``dw/dt = w x dH/dw``.
    """
    grads = hopf_gradients(complex(z1), complex(z2))
    gx, gy = grads[:, :2], grads[:, 2:]
    bracket = gy @ gx.T - gx @ gy.T
    w = hopf(z1, z2)
    target = np.array([[np.dot(w, np.cross(ea, eb)) for eb in np.eye(3)] for ea in np.eye(3)])
    return bracket - target
