"""Independent reference computations used to freeze expected values.

Nothing here imports the code under test except for plain data containers.
"""

import math

import numpy as np


def chain_energies(q, p, spins, period, masses=1.0, u0=1.0, r_m=1.0, j0=10.0, r_c=1.5):
    """(T, U, Hm) of the periodic chain by explicit loops over bonds."""
    n = len(q)
    masses = [masses] * n if np.isscalar(masses) else list(masses)
    kinetic = sum(p[i] ** 2 / (2.0 * masses[i]) for i in range(n))
    potential = 0.0
    magnetic = 0.0
    for i in range(n):
        j = (i + 1) % n
        r = q[j] - q[i] + (period if j == 0 else 0.0)
        potential += u0 * ((r_m / r) ** 12 - 2.0 * (r_m / r) ** 6)
        strength = j0 * (1.0 - r / r_c) ** 3 if r < r_c else 0.0
        magnetic += strength * sum(spins[i][k] * spins[j][k] for k in range(3))
    return kinetic, potential, magnetic


def twisted_spins(n):
    out = []
    for k in range(1, n + 1):
        v = [
            0.8 * math.cos(2 * math.pi * k / n) + 0.5 * math.sin(4 * math.pi * k / n),
            0.8 * math.sin(2 * math.pi * k / n) + 0.5 * math.cos(4 * math.pi * k / n),
            1.0,
        ]
        a = 1.0 / math.sqrt(sum(x * x for x in v))
        out.append([a * x for x in v])
    return out


def central_gradient(f, x, step):
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        e = np.zeros_like(x)
        e[idx] = step
        g[idx] = (f(x + e) - f(x - e)) / (2.0 * step)
    return g


def verlet_step(grad_u, q, p, h, masses):
    """Textbook kick-drift-kick."""
    half = p - 0.5 * h * grad_u(q)
    q_new = q + h * half / masses
    return q_new, half - 0.5 * h * grad_u(q_new)
