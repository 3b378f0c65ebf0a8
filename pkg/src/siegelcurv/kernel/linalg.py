"""Dense linear algebra with explicit rank certificates."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import AmbiguousRank, NotPositiveDefinite

GAP_THRESHOLD = 1e4


@dataclass(frozen=True)
class RankDecision:
    singular_values: tuple
    rank: int
    gap: float
    threshold: float = GAP_THRESHOLD

    @property
    def ambiguous(self):
        return self.gap < self.threshold

    def as_dict(self):
        return {
            "rank": self.rank,
            "gap": self.gap if np.isfinite(self.gap) else "inf",
            "threshold": self.threshold,
            "ambiguous": self.ambiguous,
            "singular_values": [float(s) for s in self.singular_values],
        }


def decide_rank(singular_values, threshold=GAP_THRESHOLD, floor=None) -> RankDecision:
    """Pick the rank at the widest relative gap of the singular spectrum.

    A full-rank matrix is measured against the roundoff floor
    ``n * eps * s[0]``, so a well-conditioned square matrix is certified full
    rank rather than ambiguous.
    """
    s = np.sort(np.abs(np.asarray(singular_values, dtype=float)))[::-1]
    n = s.size
    if n == 0 or s[0] == 0:
        return RankDecision(tuple(s), 0, np.inf, threshold)
    if floor is None:
        floor = max(n, 1) * np.finfo(float).eps * s[0]
    tail = np.append(s, 0.0)
    best_r, best_gap = n, -1.0
    for r in range(1, n + 1):
        denom = max(tail[r], floor) if r == n else tail[r]
        gap = np.inf if denom == 0 else s[r - 1] / denom
        if gap > best_gap:
            best_r, best_gap = r, gap
    return RankDecision(tuple(float(v) for v in s), best_r, float(best_gap), threshold)


def nullspace(M, threshold=GAP_THRESHOLD, raise_ambiguous=True):
    """Orthonormal nullspace basis (columns) of ``M`` with a rank certificate."""
    M = np.asarray(M, dtype=complex)
    m, n = M.shape
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    if m == 0:
        return np.eye(n, dtype=complex), RankDecision((), 0, np.inf, threshold)
    _, s, vh = np.linalg.svd(M, full_matrices=True)
    decision = decide_rank(s, threshold)
    if decision.ambiguous and raise_ambiguous:
        raise AmbiguousRank(
            f"spectral gap {decision.gap:.3g} below threshold {threshold:.3g}", decision)
    basis = vh[decision.rank:].conj().T
    return basis, decision


def numerical_rank(M, threshold=GAP_THRESHOLD, raise_ambiguous=True) -> RankDecision:
    s = np.linalg.svd(np.asarray(M, dtype=complex), compute_uv=False)
    decision = decide_rank(s, threshold)
    if decision.ambiguous and raise_ambiguous:
        raise AmbiguousRank(
            f"spectral gap {decision.gap:.3g} below threshold {threshold:.3g}", decision)
    return decision


def cholesky_hpd(G, herm_tol=1e-10, min_eig_ratio=0.0):
    """Lower-triangular ``L`` with ``L @ L^* = G``.

    ``min_eig_ratio`` rejects matrices whose diagonally equilibrated smallest
    eigenvalue falls below ``min_eig_ratio * trace``.
    """
    G = np.asarray(G, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(G))))
    if np.max(np.abs(G - G.conj().T)) > herm_tol * scale:
        raise NotPositiveDefinite("matrix is not Hermitian")
    G = 0.5 * (G + G.conj().T)
    d = np.real(np.diag(G))
    if np.any(d <= 0):
        raise NotPositiveDefinite("nonpositive diagonal entry")
    if min_eig_ratio > 0:
        Dm = 1.0 / np.sqrt(d)
        E = G * np.outer(Dm, Dm)
        lam = np.linalg.eigvalsh(E)
        if lam[0] < min_eig_ratio * np.trace(E).real:
            raise NotPositiveDefinite(
                f"smallest equilibrated eigenvalue {lam[0]:.3e} below {min_eig_ratio:g} * trace")
    try:
        return np.linalg.cholesky(G)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
