"""Random states, Hamiltonians and generators for property checks.

Every function takes a ``numpy.random.Generator`` so that results are
reproducible from a seed.
"""

import numpy as np

from .dynamics import LindbladGenerator, superoperator
from .linalg import dag


def ginibre(d, rng, cols=None):
    cols = d if cols is None else cols
    return (rng.standard_normal((d, cols)) + 1j * rng.standard_normal((d, cols))) / np.sqrt(2)


def random_hermitian(d, rng, scale=1.0):
    g = ginibre(d, rng)
    h = 0.5 * (g + dag(g))
    return scale * h / max(np.linalg.norm(h, 2), 1e-300)


def random_ket(d, rng):
    psi = ginibre(d, rng, 1).ravel()
    return psi / np.linalg.norm(psi)


def random_density_matrix(d, rng, rank=None, floor=0.0):
    """Ginibre-ensemble state of the given rank, mixed with ``floor * I/d``."""
    g = ginibre(d, rng, d if rank is None else rank)
    rho = g @ dag(g)
    rho /= np.trace(rho).real
    if floor:
        rho = (1.0 - floor) * rho + floor * np.eye(d) / d
    return 0.5 * (rho + dag(rho))


def random_generator(d, rng, n_jumps=2, max_rate=1.0):
    """Random Lindblad generator with constant nonnegative rates."""
    h = random_hermitian(d, rng)
    jumps = []
    for _ in range(n_jumps):
        a = ginibre(d, rng)
        a /= np.linalg.norm(a, 2)
        jumps.append((a, float(rng.uniform(0.0, max_rate))))
    return LindbladGenerator(h, jumps)


def random_superoperator(d, rng, target_norm=None, **kwargs):
    """Superoperator of :func:`random_generator`, optionally rescaled in 2-norm."""
    gen = random_generator(d, rng, **kwargs)
    lsup = superoperator(gen)
    if target_norm is not None:
        lsup = lsup * (target_norm / np.linalg.norm(lsup, 2))
    return lsup
