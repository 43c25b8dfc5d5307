import numpy as np


def cgauss(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def eig_singular_values(A):
    """Singular values from the Hermitian eigenproblem of A* A (independent of any SVD)."""
    w = np.linalg.eigvalsh(A.conj().T @ A)
    return np.sqrt(np.clip(w, 0, None))[::-1]


def pnorm_from(sv, p):
    sv = np.asarray(sv, dtype=float)
    return sv.max() if np.isinf(p) else float(np.sum(sv ** p) ** (1.0 / p))
