"""Quadrics through the canonical curve: the kernel of ``S^2 H^0(K) -> H^0(2K)``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import curves
from .errors import AmbiguousRank, QuadricError, TooFewPoints
from .hodge import HodgeFrame
from .kernel.linalg import GAP_THRESHOLD, RankDecision, nullspace, numerical_rank

SQRT2 = math.sqrt(2.0)


def expected_dim(curve) -> int:
    g = curve.genus
    if curve.family == curves.HYPERELLIPTIC:
        return g * (g + 1) // 2 - (2 * g - 1)
    return g * (g + 1) // 2 - (3 * g - 3)


def expected_image_dim(curve) -> int:
    g = curve.genus
    if g == 2:
        return 3
    return 2 * g - 1 if curve.family == curves.HYPERELLIPTIC else 3 * g - 3


def pair_index(g):
    return [(i, j) for i in range(g) for j in range(i, g)]


def evaluation_matrix(frame: HodgeFrame, points):
    """Rows ``f_i f_j`` at each point (off-diagonal weight sqrt 2), scaled by ``1/alpha``.

    With unknowns ``v_ii = a_ii`` and ``v_ij = sqrt(2) a_ij`` a row times ``v``
    is ``sum a_ij f_i f_j / alpha_PP``.
    """
    pairs = pair_index(frame.genus)
    rows = []
    for P in points:
        f = frame.values(P)
        alpha = float(np.sum(np.abs(f) ** 2))
        rows.append([(f[i] * f[j] * (1.0 if i == j else SQRT2)) / alpha for i, j in pairs])
    return np.array(rows, dtype=complex).reshape(len(points), len(pairs))


def vector_to_matrix(v, g):
    A = np.zeros((g, g), dtype=complex)
    for (i, j), val in zip(pair_index(g), v):
        if i == j:
            A[i, i] = val
        else:
            A[i, j] = A[j, i] = val / SQRT2
    return A


def matrix_to_vector(A):
    g = A.shape[0]
    return np.array([A[i, j] * (1.0 if i == j else SQRT2) for i, j in pair_index(g)])


def quadric_inner(A, B):
    """Induced metric ``<Q, Q'> = 2 sum a conj(a')``."""
    return complex(2.0 * np.sum(np.asarray(A) * np.conj(B)))


@dataclass
class QuadricSpace:
    frame: HodgeFrame
    A: np.ndarray  # (dim, g, g), symmetric coefficient matrices
    decision: RankDecision
    seed: int | None = None
    points: list = field(default_factory=list, repr=False)

    @property
    def dim(self):
        return self.A.shape[0]

    @property
    def expected_dim(self):
        return expected_dim(self.frame.curve)

    def gram(self):
        return np.array([[quadric_inner(a, b) for b in self.A] for a in self.A]).reshape(self.dim, self.dim)

    def residuals(self, points):
        """``max_k |sum a_ij f_i f_j| / (||a|| alpha_PP)`` at each point."""
        out = []
        for P in points:
            f = self.frame.values(P)
            alpha = float(np.sum(np.abs(f) ** 2))
            vals = [abs(f @ a @ f) / (np.linalg.norm(a) * alpha) for a in self.A]
            out.append(max(vals, default=0.0))
        return np.array(out)

    def derivative_residuals(self, points):
        """``max_k |sum a_ij f_i' f_j|``, normalized by ``||a|| |f| |f'|``."""
        out = []
        for P in points:
            J = self.frame.jets(P, 1)
            f, df = J[:, 0], J[:, 1]
            scale = np.linalg.norm(f) * max(np.linalg.norm(df), 1e-300)
            vals = [abs(df @ a @ f) / (np.linalg.norm(a) * scale) for a in self.A]
            out.append(max(vals, default=0.0))
        return np.array(out)

    def certificate(self):
        return {
            "dim": self.dim,
            "expected_dim": self.expected_dim,
            "seed": self.seed,
            "rank": self.decision.as_dict(),
        }


def default_points(frame, seed=0, factor=4):
    return curves.sample_points(frame.curve, factor * frame.genus, seed)


def i2_basis(frame: HodgeFrame, points=None, seed=0, threshold=GAP_THRESHOLD) -> QuadricSpace:
    """Orthonormal basis of I2 from an evaluation nullspace."""
    g = frame.genus
    if points is None:
        points = default_points(frame, seed)
    if len(points) < 4 * g:
        raise TooFewPoints(f"need at least {4 * g} points, got {len(points)}")
    M = evaluation_matrix(frame, points)
    N, decision = nullspace(M, threshold)
    # unit Euclidean v has <Q, Q> = 2, hence the 1/sqrt 2
    A = np.array([vector_to_matrix(N[:, k] / SQRT2, g) for k in range(N.shape[1])])
    A = A.reshape(N.shape[1], g, g)
    return QuadricSpace(frame, A, decision, seed, list(points))


def multiplication_image_dim(frame, points=None, seed=0, threshold=GAP_THRESHOLD) -> RankDecision:
    if points is None:
        points = default_points(frame, seed)
    return numerical_rank(evaluation_matrix(frame, points), threshold)


def principal_angles(A1, A2):
    """Principal angles between the spans of two quadric bases."""
    if A1.shape[0] == 0 and A2.shape[0] == 0:
        return np.zeros(0)
    U1 = np.array([matrix_to_vector(a) for a in A1]).T
    U2 = np.array([matrix_to_vector(a) for a in A2]).T
    q1, _ = np.linalg.qr(U1)
    q2, _ = np.linalg.qr(U2)
    s = np.clip(np.linalg.svd(q1.conj().T @ q2, compute_uv=False), -1.0, 1.0)
    return np.arccos(s)


def check_dimension(space: QuadricSpace):
    if space.dim != space.expected_dim:
        raise QuadricError(
            f"I2 has dimension {space.dim}, expected {space.expected_dim}")


__all__ = [
    "AmbiguousRank",
    "QuadricSpace",
    "check_dimension",
    "evaluation_matrix",
    "expected_dim",
    "expected_image_dim",
    "i2_basis",
    "multiplication_image_dim",
    "principal_angles",
    "quadric_inner",
]
