"""Classical (Torgerson) multidimensional scaling."""

import numpy as np

from ..exceptions import NonSymmetricInput


def mds_embed(D, dim: int = 2, tol: float = 1e-9) -> np.ndarray:
    """Embed a distance matrix in ``dim`` dimensions by classical MDS.

    The doubly centred Gram matrix ``-1/2 J (D*D) J`` is diagonalised and the
    top ``dim`` eigenvectors are scaled by the square roots of the
    (nonnegative part of the) eigenvalues.  Each axis is oriented so that its
    first nonzero coordinate is positive.

    Parameters
    ----------
    D : array-like, shape (n, n)
        Symmetric distance matrix.
    dim : int
        Embedding dimension.

    Returns
    -------
    X : ndarray, shape (n, dim)
    """
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise NonSymmetricInput(f"distance matrix must be square, got {D.shape}")
    scale = max(np.abs(D).max(), 1.0)
    if np.abs(D - D.T).max() > tol * scale:
        raise NonSymmetricInput("distance matrix is not symmetric")
    n = D.shape[0]
    J = np.eye(n) - 1.0 / n
    B = -0.5 * J @ (D * D) @ J
    B = 0.5 * (B + B.T)
    evals, evecs = np.linalg.eigh(B)
    order = np.argsort(evals)[::-1][:dim]
    lam = np.clip(evals[order], 0.0, None)
    # eigenvalues at roundoff level would otherwise give sqrt(eps)-sized axes
    lam[lam <= tol * max(evals[-1], 0.0)] = 0.0
    X = evecs[:, order] * np.sqrt(lam)
    if X.shape[1] < dim:
        X = np.hstack([X, np.zeros((n, dim - X.shape[1]))])
    X[np.abs(X) < 1e-12 * scale] = 0.0
    for k in range(dim):
        nz = np.flatnonzero(X[:, k])
        if nz.size and X[nz[0], k] < 0:
            X[:, k] = -X[:, k]
    return X
