# spectral/flow.py

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import linear_sum_assignment

from ..errors import DomainError
from ..operator.principal import PrincipalMatrix
from ..types.spectral import EigenFlow

logger = logging.getLogger(__name__)

# Below this matched overlap the tracker treats a step as ambiguous
_AMBIGUOUS_OVERLAP = 0.5


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip eigenvector columns so that their component sum is positive"""
    sums = vectors.sum(axis=0)
    pivot = vectors[np.argmax(np.abs(vectors), axis=0), np.arange(vectors.shape[1])]
    signs = np.where(np.abs(sums) > 1e-12, np.sign(sums), np.sign(pivot))
    signs[signs == 0] = 1.0
    return vectors * signs


def _decompose(matrix: PrincipalMatrix, E: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    values, vectors = eigh(matrix.evaluate(E))
    vectors = fix_signs(vectors)
    dphi = matrix.derivative(E)
    slopes = np.einsum("ik,ij,jk->k", vectors, dphi, vectors)
    return values, vectors, slopes


def eigen_flow(matrix: PrincipalMatrix, energies: Sequence[float]) -> EigenFlow:
    """Eigenvalues, eigenvectors and Feynman-Hellman slopes of Phi(E) over a grid"""
    grid = np.asarray(energies, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("energy grid must be a non-empty 1-d sequence")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("energy grid must be strictly increasing")
    if np.any(grid >= matrix.energy_ceiling):
        raise DomainError(f"energy grid must stay below {matrix.energy_ceiling}")

    if matrix.threads > 1 and grid.size > 1:
        with ThreadPoolExecutor(max_workers=matrix.threads) as pool:
            results = list(pool.map(lambda E: _decompose(matrix, E), grid))
    else:
        results = [_decompose(matrix, E) for E in grid]

    n = matrix.size
    eigenvalues = np.array([r[0] for r in results])
    eigenvectors = np.array([r[1] for r in results])
    slopes = np.array([r[2] for r in results])

    tracks = np.empty((grid.size, n), dtype=int)
    tracks[0] = np.arange(n)
    crossings: List[Tuple[int, int, int]] = []
    warnings: List[str] = []
    for m in range(1, grid.size):
        overlap = np.abs(eigenvectors[m - 1].T @ eigenvectors[m])
        rows, cols = linear_sum_assignment(-overlap)
        assignment = cols[np.argsort(rows)]
        if np.min(overlap[np.arange(n), assignment]) < _AMBIGUOUS_OVERLAP:
            # near-degenerate step: keep value order
            for level in range(n - 1):
                if abs(eigenvalues[m, level + 1] - eigenvalues[m, level]) < 1e-8 * max(1.0, abs(eigenvalues[m, level])):
                    crossings.append((m, level, level + 1))
            assignment = np.arange(n)
            message = f"ambiguous eigenvector tracking at E={grid[m]:.12g}; levels re-sorted by value"
            logger.warning(message)
            warnings.append(message)
        tracks[m] = assignment[tracks[m - 1]]
        for a in range(n):
            for b in range(a + 1, n):
                if (tracks[m - 1, a] - tracks[m - 1, b]) * (tracks[m, a] - tracks[m, b]) < 0:
                    crossings.append((m, a, b))

    if np.any(slopes >= 0):
        message = "non-negative eigenvalue slope on the grid; eigenvalues should decrease with E"
        logger.warning(message)
        warnings.append(message)

    return EigenFlow(
        energies=grid,
        eigenvalues=eigenvalues,
        slopes=slopes,
        eigenvectors=eigenvectors,
        tracks=tracks,
        crossings=crossings,
        warnings=warnings,
    )


def excited_crossings(flow: EigenFlow) -> List[Dict[str, Any]]:
    """Grid brackets of the zeros of every tracked eigenvalue"""
    values = flow.tracked_eigenvalues
    brackets = []
    for k in range(values.shape[1]):
        column = values[:, k]
        for m in range(column.size - 1):
            lo, hi = column[m], column[m + 1]
            if lo == 0.0:
                brackets.append({"track": k, "E_lo": float(flow.energies[m]), "E_hi": float(flow.energies[m])})
            elif lo * hi < 0:
                brackets.append({"track": k, "E_lo": float(flow.energies[m]), "E_hi": float(flow.energies[m + 1])})
        if column[-1] == 0.0:
            brackets.append({"track": k, "E_lo": float(flow.energies[-1]), "E_hi": float(flow.energies[-1])})
    return brackets
