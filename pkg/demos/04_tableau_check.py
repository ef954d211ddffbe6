"""Exact symplecticity conditions for partitioned Runge-Kutta schemes.

The production scheme pairs a two-stage midpoint rule for the lifted spins
with the Lobatto IIIA/IIIB pair (Stormer-Verlet) for the lattice. The checks
run in exact rational arithmetic, so a pass is a proof and a failure names
the offending coefficients. The numerical harness then watches a quadratic
invariant of random linear systems.
"""

from fractions import Fraction

from spinlattice.tableau import (
    ButcherTableau,
    PartitionedScheme,
    check_scheme,
    empirical_invariant_test,
    explicit_euler,
    production_scheme,
    stormer_verlet,
)

good = production_scheme()
print("production:", "symplectic" if check_scheme(good) else "not symplectic")

euler = PartitionedScheme([explicit_euler(), (explicit_euler(), explicit_euler())])
print("explicit Euler:")
for v in check_scheme(euler).violations:
    print("   ", v)

# nudge one weight of the spin tableau
spin = good.components[0]
nudged = ButcherTableau(spin.a, [spin.b[0] + Fraction(1, 100), spin.b[1]])
mutant = PartitionedScheme([nudged, stormer_verlet()])
print("mutant fails:", sorted(check_scheme(mutant).failed_conditions()))

for name, scheme in [("production", good), ("euler", euler), ("mutant", mutant)]:
    drift = empirical_invariant_test(scheme, trials=100, h=0.1, seed=0)
    print(f"invariant drift, {name:>10}: {drift:.2e}")
