"""Lifting spins to C^2 and back.

Each unit spin has a circle of preimages under the Hopf map. We lift a few
spins, check that the map returns them, and then spin the lift around its
fiber to see that the image does not move.
"""

import numpy as np

from spinlattice import hopf, lift, verify_hopf_poisson

rng = np.random.default_rng(1)
spins = rng.normal(size=(4, 3))
spins /= np.linalg.norm(spins, axis=1, keepdims=True)

for w in spins:
    z1, z2 = lift(w)
    back = hopf(z1, z2)
    # a unit spin lifts onto the sphere |z|^2 = 4
    print(f"w = {np.round(w, 4)}  |z|^2 = {abs(z1)**2 + abs(z2)**2:.12f}  "
          f"error = {np.max(np.abs(back - w)):.1e}")

z1, z2 = lift(spins[0])
drift = max(np.max(np.abs(hopf(np.exp(1j * t) * z1, np.exp(1j * t) * z2) - spins[0]))
            for t in np.linspace(0, 2 * np.pi, 50))
print(f"largest image movement along the fiber: {drift:.1e}")

# the map carries the canonical bracket to the cross-product bracket
res = verify_hopf_poisson(z1, z2)
print(f"Poisson residual at the first lift: {np.max(np.abs(res)):.1e}")
