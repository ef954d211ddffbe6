"""Collective symplectic integration of spin-lattice dynamics.

Spins live on unit spheres and are coupled to a classical lattice. They are
advanced with the spherical midpoint rule, which is the Hopf-lifted implicit
midpoint rule in disguise. The lattice is advanced with Stormer-Verlet.
"""

from spinlattice.errors import (
    NoConvergence,
    NonpositiveSeparation,
    SpinLatticeError,
    StageMismatch,
    ZeroSpin,
)
from spinlattice.geometry import (
    CollectiveState,
    LatticeState,
    SpinLatticeState,
    hopf,
    hopf_all,
    lift,
    lift_state,
    normalize_spins,
    project,
    verify_hopf_poisson,
)
from spinlattice.integrator import (
    IntegrationResult,
    SolverSettings,
    StepReport,
    integrate,
    step_collective,
    step_reduced,
)
from spinlattice.model import (
    EnergyTerms,
    ExtendedHamiltonian,
    MassMatrix,
    SleChainModel,
    coupling,
    lennard_jones,
)

__version__ = "0.1.0"
