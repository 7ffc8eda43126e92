"""Second eigenpair of the weight-normalized Laplacian ``D^-1/2 L D^-1/2``."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components

from .errors import EigenNoConvergence

DENSE_LIMIT = 600
RESIDUAL_TOL = 1e-8


def laplacian(A: sp.spmatrix) -> sp.csr_matrix:
    A = sp.csr_matrix(A)
    deg = np.asarray(A.sum(axis=1)).ravel()
    return (sp.diags(deg) - A).tocsr()


def normalized_laplacian(A: sp.spmatrix, d: np.ndarray) -> sp.csr_matrix:
    scale = sp.diags(1.0 / np.sqrt(d))
    return (scale @ laplacian(A) @ scale).tocsr()


def components(A: sp.spmatrix) -> tuple[int, np.ndarray]:
    return connected_components(sp.csr_matrix(A), directed=False)


def fiedler(
    A: sp.spmatrix,
    d: np.ndarray,
    v0: np.ndarray | None = None,
    method: str = "auto",
    max_applications: int = 5000,
) -> tuple[float, np.ndarray]:
    """``(lambda_2, y)`` for the normalized Laplacian of the symmetric weights ``A``.

    The null vector ``sqrt(d)`` is deflated by shifting it to the top of the
    spectrum. Dense ``eigh`` is used up to ``DENSE_LIMIT`` nodes (or with
    ``method="dense"``); otherwise Lanczos with ``v0`` as warm start. The
    returned ``y`` has unit norm, is orthogonal to ``sqrt(d)`` and satisfies
    ``||Ly - lambda y|| <= 1e-8``.
    """
    d = np.asarray(d, dtype=float)
    n = len(d)
    L = normalized_laplacian(A, d)
    u = np.sqrt(d)
    u /= np.linalg.norm(u)
    # Gershgorin on D^-1/2 L D^-1/2
    deg = np.asarray(sp.csr_matrix(A).sum(axis=1)).ravel()
    shift = 2.0 * float(np.max(2 * deg / d)) + 1.0

    if method == "dense" or (method == "auto" and n <= DENSE_LIMIT):
        Ld = L.toarray() + shift * np.outer(u, u)
        vals, vecs = np.linalg.eigh(Ld)
        lam, y = float(vals[0]), vecs[:, 0]
    elif method in ("auto", "lanczos"):
        applications = 0

        def matvec(x):
            nonlocal applications
            applications += 1
            if applications > max_applications:
                raise EigenNoConvergence(f"no convergence within {max_applications} matrix applications")
            x = np.ravel(x)
            return L @ x + shift * u * (u @ x)

        op = spla.LinearOperator((n, n), matvec=matvec, dtype=float)
        start = None
        if v0 is not None and len(v0) == n:
            start = np.asarray(v0, dtype=float) - u * (u @ v0)
            if np.linalg.norm(start) < 1e-12:
                start = None
        try:
            vals, vecs = spla.eigsh(op, k=1, which="SA", v0=start, tol=1e-12, ncv=min(n, 40))
        except spla.ArpackNoConvergence as exc:
            raise EigenNoConvergence(str(exc)) from exc
        lam, y = float(vals[0]), vecs[:, 0]
    else:
        raise ValueError(f"unknown eigensolver method {method!r}")

    y = y - u * (u @ y)
    y /= np.linalg.norm(y)
    lam = float(y @ (L @ y))
    resid = np.linalg.norm(L @ y - lam * y)
    if resid > RESIDUAL_TOL:
        raise EigenNoConvergence(f"eigen residual {resid:.2e} above {RESIDUAL_TOL:g}")
    # deterministic sign: first clearly nonzero entry is positive
    j = int(np.argmax(np.abs(y) > 1e-6 * np.abs(y).max()))
    if y[j] < 0:
        y = -y
    return max(lam, 0.0), y
