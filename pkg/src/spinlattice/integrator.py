"""Collective symplectic integrator for spin-lattice dynamics.

Spins are advanced with the spherical midpoint rule and the lattice with
Stormer-Verlet; the two are coupled through a single implicit stage solved by
fixed-point iteration. :func:`step_reduced` works directly on unit spins and
is the production stepper. :func:`step_collective` advances the lifted
coordinates ``(z1, z2)`` with the implicit midpoint rule, written as a
reducible two-stage method so that it pairs stage-by-stage with Verlet.
Projected back through the Hopf map the two steppers give the same result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from spinlattice.errors import NoConvergence, SpinLatticeError, ZeroSpin
from spinlattice.geometry import CollectiveState, LatticeState, SpinLatticeState, hopf
from spinlattice.model import EnergyTerms, ExtendedHamiltonian

__all__ = [
    "SolverSettings",
    "StepReport",
    "IntegrationResult",
    "step_reduced",
    "step_collective",
    "collective_vector_field",
    "integrate",
]

# below this length w + w~ is treated as antipodal breakdown
ANTIPODAL_THRESHOLD = 1e-8

Observer = Callable[[float, SpinLatticeState, EnergyTerms], None]


@dataclass(frozen=True)
class SolverSettings:
    """Step size and stopping rule of the implicit solve.

    Args:
        h: Time step. Negative values step backwards in time.
        fp_tolerance: Iteration stops once the max-norm change of the implicit
            unknowns between two sweeps is at most this.
        max_iterations: Number of sweeps before giving up.
    """

    h: float
    fp_tolerance: float = 1e-12
    max_iterations: int = 200

    def __post_init__(self):
        if self.h == 0 or not math.isfinite(self.h):
            raise ValueError("step size must be finite and nonzero")
        if not self.fp_tolerance > 0:
            raise ValueError("fp_tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass(frozen=True, eq=False)
class StepReport:
    state: SpinLatticeState | CollectiveState
    iterations: int
    residual: float


@dataclass(frozen=True, eq=False)
class IntegrationResult:
    state: SpinLatticeState
    steps: int
    max_iterations: int
    max_residual: float


def step_reduced(
    model: ExtendedHamiltonian, state: SpinLatticeState, settings: SolverSettings
) -> StepReport:
    """Advance ``(w, q, p)`` by one step of size ``settings.h``.

    Solves, with ``W = (w + w~) / |w + w~|`` per spin and ``g`` the effective
    field,

        P  = p - h/2 dH1/dq(q, W)
        q~ = q + h M^{-1} P
        w~ = w + h/2 W x [g(W, q) + g(W, q~)]
        p~ = P - h/2 dH1/dq(q~, W)

    The spin update is a rotation about an axis parallel to ``w + w~``, so spin
    lengths are kept up to the solver tolerance.

    Raises:
        NoConvergence: if the iteration does not settle within
            ``settings.max_iterations`` sweeps.
        ZeroSpin: if ``w + w~`` nearly vanishes for some spin (step too large).
    """
    h = settings.h
    w, q, p = state.spins, state.q, state.p
    minv = 1.0 / model.mass.diagonal

    W = w
    q_new = q + h * minv * p
    residual = math.inf
    for it in range(1, settings.max_iterations + 1):
        P = p - 0.5 * h * model.grad_q(W, q)
        q_prev, q_new = q_new, q + h * minv * P
        field = model.effective_field(W, q) + model.effective_field(W, q_new)
        w_new = w + 0.5 * h * np.cross(W, field)
        W_next = _midpoint_axis(w + w_new)
        residual = max(np.max(np.abs(W_next - W), initial=0.0), np.max(np.abs(q_new - q_prev), initial=0.0))
        W = W_next
        if residual <= settings.fp_tolerance:
            break
    else:
        raise NoConvergence(
            f"spherical midpoint stage did not converge in {settings.max_iterations} "
            f"iterations (residual {residual:.3e})",
            settings.max_iterations,
            residual,
        )

    # final sweep so every output is consistent with the converged axis
    P = p - 0.5 * h * model.grad_q(W, q)
    q_new = q + h * minv * P
    field = model.effective_field(W, q) + model.effective_field(W, q_new)
    w_new = w + 0.5 * h * np.cross(W, field)
    p_new = P - 0.5 * h * model.grad_q(W, q_new)
    return StepReport(SpinLatticeState(w_new, LatticeState(q_new, p_new)), it, residual)


def _midpoint_axis(s: np.ndarray) -> np.ndarray:
    r = np.linalg.norm(s, axis=1)
    bad = np.flatnonzero(r < ANTIPODAL_THRESHOLD)
    if bad.size:
        raise ZeroSpin(
            f"spin {bad[0]} flipped to its antipode within one step; reduce h",
            int(bad[0]),
        )
    return s / r[:, None]


def _spin_gradient(model: ExtendedHamiltonian, unit: np.ndarray, r: np.ndarray, q):
    """Gradient of ``H1(w, q)`` in the ambient spin ``w = r * unit``.

    ``H1`` only sees ``w / |w|``, so the field is projected onto the tangent
    plane and scaled by ``1/r``.
    """
    g = model.effective_field(unit, q)
    radial = np.einsum("ij,ij->i", g, unit)
    return (g - radial[:, None] * unit) / r[:, None]


def _hopf_pullback(z1, z2, grad_w):
    """Canonical vector field on ``(z1, z2)`` from the spin gradient ``grad_w``.

    With ``x = Re z`` as position, Hamilton's equations read
    ``dz/dt = -i (dH/dx + i dH/dy)``; the bracket is the chain rule through
    the Hopf map.
    """
    g1, g2, g3 = grad_w.T
    d1 = 0.5 * ((g1 + 1j * g2) * z2 + g3 * z1)
    d2 = 0.5 * ((g1 - 1j * g2) * z1 - g3 * z2)
    return -1j * d1, -1j * d2


def _ambient_spins(z1, z2):
    w = hopf(z1, z2).reshape(-1, 3)
    r = np.linalg.norm(w, axis=1)
    bad = np.flatnonzero(~(r > np.finfo(float).tiny))
    if bad.size:
        raise ZeroSpin(f"collective pair {bad[0]} collapsed to zero", int(bad[0]))
    return w / r[:, None], r


def collective_vector_field(model: ExtendedHamiltonian, state: CollectiveState):
    """Time derivatives ``(dz1, dz2, dq, dp)`` of the lifted Hamiltonian flow."""
    unit, r = _ambient_spins(state.z1, state.z2)
    q, p = state.lattice.q, state.lattice.p
    dz1, dz2 = _hopf_pullback(state.z1, state.z2, _spin_gradient(model, unit, r, q))
    return dz1, dz2, model.mass.solve(p), -model.grad_q(unit, q)


def step_collective(
    model: ExtendedHamiltonian, state: CollectiveState, settings: SolverSettings
) -> StepReport:
    """Advance the lifted state ``(z1, z2, q, p)`` by one step.

    The ``z`` part uses the two-stage tableau ``a = [[1/4, 1/4], [1/4, 1/4]]``,
    ``b = [1/2, 1/2]`` (implicit midpoint written with two identical stages),
    the lattice uses Verlet. Both stages share the midpoint value ``Z``:

        P  = p - h/2 dH2/dq(q, Z)
        Z  = z + h/4 X(q, Z) + h/4 X(q~, Z)
        q~ = q + h M^{-1} P
        p~ = P - h/2 dH2/dq(q~, Z)
        z~ = 2 Z - z

    where ``X`` is the canonical vector field of ``H2 = H1 o hopf`` in ``z``.

    Raises:
        NoConvergence: if the stage iteration does not settle.
        ZeroSpin: if a pair collapses to the origin.
    """
    h = settings.h
    z1, z2 = state.z1, state.z2
    q, p = state.lattice.q, state.lattice.p
    minv = 1.0 / model.mass.diagonal

    Z1, Z2 = z1, z2
    q_new = q + h * minv * p
    residual = math.inf
    for it in range(1, settings.max_iterations + 1):
        unit, r = _ambient_spins(Z1, Z2)
        P = p - 0.5 * h * model.grad_q(unit, q)
        q_prev, q_new = q_new, q + h * minv * P
        grad = _spin_gradient(model, unit, r, q) + _spin_gradient(model, unit, r, q_new)
        v1, v2 = _hopf_pullback(Z1, Z2, grad)
        N1 = z1 + 0.25 * h * v1
        N2 = z2 + 0.25 * h * v2
        residual = max(
            np.max(np.abs(N1 - Z1), initial=0.0),
            np.max(np.abs(N2 - Z2), initial=0.0),
            np.max(np.abs(q_new - q_prev), initial=0.0),
        )
        Z1, Z2 = N1, N2
        if residual <= settings.fp_tolerance:
            break
    else:
        raise NoConvergence(
            f"collective midpoint stage did not converge in {settings.max_iterations} "
            f"iterations (residual {residual:.3e})",
            settings.max_iterations,
            residual,
        )

    unit, _ = _ambient_spins(Z1, Z2)
    P = p - 0.5 * h * model.grad_q(unit, q)
    q_new = q + h * minv * P
    p_new = P - 0.5 * h * model.grad_q(unit, q_new)
    new = CollectiveState(2.0 * Z1 - z1, 2.0 * Z2 - z2, LatticeState(q_new, p_new))
    return StepReport(new, it, residual)


def integrate(
    model: ExtendedHamiltonian,
    state: SpinLatticeState,
    settings: SolverSettings,
    t_end: float,
    observer: Optional[Observer] = None,
    stride: int = 1,
    t_start: float = 0.0,
) -> IntegrationResult:
    """Run :func:`step_reduced` from ``t_start`` to ``t_end``.

    ``observer(t, state, energies)`` is called on the initial state and then
    after every ``stride`` steps. Errors raised by a step carry the step index
    in their ``step`` attribute.
    """
    if stride < 1:
        raise ValueError("stride must be at least 1")
    ratio = (t_end - t_start) / settings.h
    n_steps = round(ratio)
    if abs(ratio - n_steps) > 1e-9 or n_steps < 0:
        raise ValueError(
            f"interval {t_end - t_start!r} is not a whole number of steps of {settings.h!r}"
        )

    if observer is not None:
        observer(t_start, state, model.energy_terms(state))
    max_iter, max_res = 0, 0.0
    for k in range(1, n_steps + 1):
        try:
            report = step_reduced(model, state, settings)
        except SpinLatticeError as exc:
            exc.step = k
            raise
        state = report.state
        max_iter = max(max_iter, report.iterations)
        max_res = max(max_res, report.residual)
        if observer is not None and k % stride == 0:
            observer(t_start + k * settings.h, state, model.energy_terms(state))
    return IntegrationResult(state, n_steps, max_iter, max_res)
