"""Graph Laplacian, trace objective, and the low-dimensional eigenmap.

The embedding X minimizes tr(X^T L X) subject to X^T D X = I, where
L = D - S is the Laplacian of the similarity graph.  The constrained minimum
is the matrix of eigenvectors for the smallest eigenvalues of the generalized
problem L x = lambda D x, after discarding the trivial constant eigenvector;
a projected gradient descent solver is provided as an alternative route to
the same optimum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonFiniteValue, NonSymmetricInput, RankDeficient
from .similarity import SimilarityMatrix

SYMMETRY_TOL = 1e-12
DEGREE_EPSILON = 1e-8
DEGENERATE_GAP = 1e-12


@dataclass(frozen=True)
class Laplacian:
    """L = D - S with D the diagonal degree matrix of S.

    ``degrees`` carries the regularized diagonal of D: zero-degree rows
    (isolated sentinel documents) get DEGREE_EPSILON so the generalized
    eigenproblem stays well-posed; ``matrix`` is built from the raw degrees,
    so its rows sum to zero exactly.
    """

    matrix: np.ndarray
    degrees: np.ndarray
    ids: tuple[str, ...] | None = None

    @property
    def m(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Embedding:
    """Row-per-document coordinates in the reduced space."""

    vectors: np.ndarray
    ids: tuple[str, ...] | None = None

    @property
    def m(self) -> int:
        return self.vectors.shape[0]

    @property
    def dims(self) -> int:
        return self.vectors.shape[1]


def build_laplacian(similarity: SimilarityMatrix | np.ndarray) -> Laplacian:
    if isinstance(similarity, SimilarityMatrix):
        s = similarity.values
        ids = similarity.ids
    else:
        s = np.asarray(similarity, dtype=float)
        ids = None
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DimensionMismatch(f"similarity matrix must be square, got {s.shape}")
    if np.max(np.abs(s - s.T)) > SYMMETRY_TOL:
        raise NonSymmetricInput("similarity matrix is not symmetric")
    raw_degrees = s.sum(axis=1)
    lap = np.diag(raw_degrees) - s
    degrees = np.where(raw_degrees > 0.0, raw_degrees, DEGREE_EPSILON)
    return Laplacian(matrix=lap, degrees=degrees, ids=ids)


def _as_matrix(x) -> np.ndarray:
    return x.vectors if isinstance(x, Embedding) else np.asarray(x, dtype=float)


def objective_phi(x, lap: Laplacian) -> float:
    """tr(X^T L X): the similarity-weighted spread of the embedding."""
    xv = _as_matrix(x)
    if xv.ndim != 2 or xv.shape[0] != lap.m:
        raise DimensionMismatch(f"embedding rows {xv.shape} vs laplacian size {lap.m}")
    val = float(np.einsum("ij,ij->", xv, lap.matrix @ xv))
    if not np.isfinite(val):
        raise NonFiniteValue("objective is not finite")
    return val


def phi_gradient(x, lap: Laplacian) -> np.ndarray:
    """d tr(X^T L X) / dX = 2 L X."""
    xv = _as_matrix(x)
    if xv.ndim != 2 or xv.shape[0] != lap.m:
        raise DimensionMismatch(f"embedding rows {xv.shape} vs laplacian size {lap.m}")
    return 2.0 * (lap.matrix @ xv)


def d_orthonormalize(x: np.ndarray, degrees: np.ndarray) -> np.ndarray:
    """Closest basis of span(X) with X^T D X = I (symmetric Loewdin factor)."""
    c = x.T @ (degrees[:, None] * x)
    s, v = np.linalg.eigh((c + c.T) / 2.0)
    if s[0] <= 0.0 or s[0] <= 1e-14 * s[-1]:
        raise RankDeficient("embedding columns are dependent under the D metric")
    inv_sqrt = (v * (1.0 / np.sqrt(s))) @ v.T
    return x @ inv_sqrt


def _deflate_constant(x: np.ndarray, degrees: np.ndarray) -> np.ndarray:
    """Remove the D-metric component along the all-ones direction."""
    comp = degrees @ x / degrees.sum()
    return x - comp[None, :]


def solve_eigenmap(lap: Laplacian, dims: int) -> Embedding:
    """Bottom non-trivial eigenvectors of L x = lambda D x, D-orthonormalized.

    The symmetric reduction M = D^(-1/2) L D^(-1/2) is solved densely.  The
    constant direction (always a null vector of M) is pushed above the
    spectrum by a rank-one shift before the solve, so the lowest dims
    eigenvectors of the shifted matrix are exactly the non-trivial ones; this
    stays correct on disconnected graphs where several eigenvalues vanish.
    Column signs are fixed so each column's largest-magnitude entry is
    positive.
    """
    m = lap.m
    if dims < 1 or dims > m - 1:
        raise RankDeficient(f"need 1 <= dims <= m-1, got dims={dims}, m={m}")
    dsqrt = np.sqrt(lap.degrees)
    reduced = lap.matrix / dsqrt[:, None] / dsqrt[None, :]
    reduced = (reduced + reduced.T) / 2.0
    v0 = dsqrt / np.linalg.norm(dsqrt)
    shift = float(np.max(np.sum(np.abs(reduced), axis=1))) + 1.0
    eigvals, eigvecs = np.linalg.eigh(reduced + shift * np.outer(v0, v0))
    # indices 0..m-2 are the non-trivial pairs; the shifted constant sits last
    if dims <= m - 2 and eigvals[dims] - eigvals[dims - 1] < DEGENERATE_GAP:
        raise RankDeficient(
            "requested dimension cuts a numerically degenerate eigenvalue cluster")
    x = eigvecs[:, :dims] / dsqrt[:, None]
    for j in range(dims):
        i = int(np.argmax(np.abs(x[:, j])))
        if x[i, j] < 0.0:
            x[:, j] = -x[:, j]
    return Embedding(vectors=x, ids=lap.ids)


def _descent_direction(x: np.ndarray, grad: np.ndarray, degrees: np.ndarray) -> np.ndarray:
    """Gradient projected onto the constraint manifold's tangent space.

    Uses the D-metric gradient D^(-1) G and the D-metric tangent projection,
    which vanishes exactly at eigenvector frames: a converged embedding is a
    true fixed point of the iteration.
    """
    w = grad / degrees[:, None]
    a = x.T @ grad
    z = w - x @ ((a + a.T) / 2.0)
    return _deflate_constant(z, degrees)


def descend_eigenmap(lap: Laplacian, dims: int, init, steps: int = 2000,
                     step_size: float | None = None, rel_tol: float = 1e-14) -> Embedding:
    """Projected gradient descent on tr(X^T L X) over {X : X^T D X = I}.

    Each step moves against the projected gradient, re-imposes the constraint
    by D-weighted orthonormalization, and backtracks (halving the step) when
    the objective would increase.  Iterates are kept D-orthogonal to the
    constant direction so the attainable optimum matches
    :func:`solve_eigenmap`.  The trial step defaults to the exact minimizer
    of the quadratic model along the search direction.
    """
    x = _as_matrix(init).astype(float, copy=True)
    m = lap.m
    if x.shape != (m, dims):
        raise DimensionMismatch(f"init must be {(m, dims)}, got {x.shape}")
    degrees = lap.degrees
    if step_size is not None and step_size == 0.0:
        return Embedding(vectors=d_orthonormalize(x, degrees), ids=lap.ids)
    x = d_orthonormalize(_deflate_constant(x, degrees), degrees)
    phi = objective_phi(x, lap)
    lmat = lap.matrix
    stall = 0
    for _ in range(steps):
        grad = 2.0 * (lmat @ x)
        z = _descent_direction(x, grad, degrees)
        lz = lmat @ z
        num = float(np.einsum("ij,ij->", z, lmat @ x))
        den = float(np.einsum("ij,ij->", z, lz))
        if step_size is not None:
            eta = step_size
        elif den > 0.0:
            eta = num / den
        else:
            eta = 1.0 / (np.max(degrees) + 1.0)
        accepted = False
        for _ in range(60):
            try:
                candidate = d_orthonormalize(x - eta * z, degrees)
            except RankDeficient:
                eta *= 0.5
                continue
            phi_new = objective_phi(candidate, lap)
            if not np.isfinite(phi_new):
                raise NonFiniteValue("objective became non-finite during descent")
            if phi_new <= phi:
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            break
        moved = phi - phi_new
        x, phi = candidate, phi_new
        if moved <= rel_tol * max(1.0, abs(phi)):
            stall += 1
            if stall >= 3:
                break
        else:
            stall = 0
    return Embedding(vectors=x, ids=lap.ids)
