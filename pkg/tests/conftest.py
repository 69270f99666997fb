import numpy as np

from udcvqkd import CovMatrix


def random_symmetric(rng, n_modes: int, scale: float = 1.0) -> np.ndarray:
    d = 2 * n_modes
    a = rng.normal(size=(d, d)) * scale
    return a @ a.T


def random_physical_cm(rng, n_modes: int = 2) -> CovMatrix:
    """gamma >= identity is always physical."""
    return CovMatrix(random_symmetric(rng, n_modes) + np.eye(2 * n_modes))


def random_pd_cm(rng, n_modes: int = 2) -> CovMatrix:
    """Positive definite but only sometimes physical."""
    shift = rng.uniform(0.3, 2.0)
    return CovMatrix(random_symmetric(rng, n_modes, scale=0.5) + shift * np.eye(2 * n_modes))
