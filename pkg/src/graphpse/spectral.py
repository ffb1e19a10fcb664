"""Dense symmetric eigensolver and the Laplacian-spectrum encodings.

The solver is a cyclic Jacobi method. Each sweep visits every off-diagonal
pair once, in round-robin order: a round is a set of disjoint ``(p, q)``
pairs, and all the rotations in a round are applied together as numpy
slices. The pair order is fixed, so identical input gives identical output.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NoConvergence, NonPositiveTime, NotSymmetric
from .graph import Graph, laplacian

OFF_DIAGONAL_TOL = 1e-12
MAX_SWEEPS = 100


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # columns, orthonormal
    zero_threshold: float

    @property
    def nontrivial(self) -> np.ndarray:
        """Boolean mask of eigenvalues above ``zero_threshold``."""
        return self.eigenvalues > self.zero_threshold

    def num_trivial(self) -> int:
        return int(np.count_nonzero(~self.nontrivial))


def check_symmetric(m: np.ndarray) -> None:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {m.shape}")
    if m.size == 0:
        return
    scale = np.max(np.abs(m))
    if np.max(np.abs(m - m.T)) > 1e-12 * scale:
        raise NotSymmetric("matrix is not symmetric within 1e-12 relative tolerance")


@lru_cache(maxsize=64)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    # circle method; a padding index n plays "bye" when n is odd
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _off_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def eigh(m: np.ndarray, max_sweeps: int = MAX_SWEEPS, tol: float = OFF_DIAGONAL_TOL) -> EigenDecomposition:
    """Full eigendecomposition of a real symmetric matrix by Jacobi rotations.

    Converged when the off-diagonal Frobenius norm falls below
    ``tol * ||m||_F``. Eigenvalues come back ascending; each eigenvector's
    first entry with magnitude above 1e-8 is made positive.
    """
    m = np.asarray(m, dtype=float)
    check_symmetric(m)
    n = m.shape[0]
    a = 0.5 * (m + m.T)
    v = np.eye(n)
    scale = float(np.linalg.norm(a))
    if n > 1 and scale > 0.0:
        rounds = _round_robin(n)
        for _ in range(max_sweeps):
            if _off_norm(a) <= tol * scale:
                break
            for p, q in rounds:
                apq = a[p, q]
                active = apq != 0.0
                if not np.any(active):
                    continue
                safe = np.where(active, apq, 1.0)
                with np.errstate(over="ignore"):
                    tau = (a[q, q] - a[p, p]) / (2.0 * safe)
                sign = np.where(tau >= 0.0, 1.0, -1.0)
                t = np.where(active, sign / (np.abs(tau) + np.hypot(1.0, tau)), 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c

                ap, aq = a[:, p], a[:, q]
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap, aq = a[p, :], a[q, :]
                a[p, :] = c[:, None] * ap - s[:, None] * aq
                a[q, :] = s[:, None] * ap + c[:, None] * aq
                a[p, q] = 0.0
                a[q, p] = 0.0

                vp, vq = v[:, p], v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        else:
            if _off_norm(a) > tol * scale:
                raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")

    vals = np.diag(a).copy()
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = v[:, order]
    for i in range(n):
        big = np.flatnonzero(np.abs(vecs[:, i]) > 1e-8)
        if big.size and vecs[big[0], i] < 0:
            vecs[:, i] = -vecs[:, i]
    top = abs(vals[-1]) if n else 0.0
    return EigenDecomposition(vals, vecs, 1e-8 * max(1.0, top))


def laplacian_eigh(g: Graph) -> EigenDecomposition:
    return eigh(laplacian(g))


def _normalized_columns(u: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(u, axis=0)
    return u / np.where(norms > 0, norms, 1.0)


def lap_pe(g: Graph, m: int = 4, decomposition: EigenDecomposition | None = None) -> np.ndarray:
    """Absolute normalized eigenvectors of the first ``m`` non-trivial eigenvalues.

    Returns an ``(num_nodes, m)`` array; columns beyond the available
    non-trivial eigenvalues are zero.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    ed = decomposition or laplacian_eigh(g)
    u = ed.eigenvectors[:, ed.nontrivial][:, :m]
    out = np.zeros((g.num_nodes, m))
    out[:, : u.shape[1]] = np.abs(_normalized_columns(u))
    return out


def lap_eigenvalues(g: Graph, m: int = 4, decomposition: EigenDecomposition | None = None) -> np.ndarray:
    """First ``m`` non-trivial Laplacian eigenvalues, zero-padded."""
    if m < 1:
        raise ValueError("m must be >= 1")
    ed = decomposition or laplacian_eigh(g)
    lam = np.abs(ed.eigenvalues[ed.nontrivial][:m])
    out = np.zeros(m)
    out[: lam.size] = lam
    return out


def pseudoinverse(lap: np.ndarray) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a symmetric PSD matrix via its spectrum."""
    ed = eigh(lap)
    keep = ed.nontrivial
    u = ed.eigenvectors[:, keep]
    return (u / ed.eigenvalues[keep]) @ u.T


def hk_diag_se(g: Graph, times=(0.5, 1.0, 2.0, 4.0), decomposition: EigenDecomposition | None = None) -> np.ndarray:
    """Heat-kernel diagonal over the non-trivial spectrum, one column per time."""
    times = np.asarray(list(times), dtype=float)
    if times.size == 0:
        raise NonPositiveTime("at least one diffusion time is required")
    if np.any(times <= 0):
        raise NonPositiveTime(f"diffusion times must be positive, got {times.tolist()}")
    ed = decomposition or laplacian_eigh(g)
    keep = ed.nontrivial
    u2 = _normalized_columns(ed.eigenvectors[:, keep]) ** 2
    weights = np.exp(-np.outer(ed.eigenvalues[keep], times))  # (k, T)
    return u2 @ weights
