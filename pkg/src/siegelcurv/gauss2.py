"""Second Gaussian map on I2: pointwise values, norms and rank."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import curves
from .curves import ChartPoint
from .kernel.linalg import GAP_THRESHOLD, RankDecision, numerical_rank
from .quadrics import QuadricSpace


@dataclass(frozen=True)
class Mu2Evaluation:
    index: int
    point: ChartPoint
    value: complex       # sum a_ij f''_i f_j
    alt_value: complex   # -sum a_ij f'_i f'_j
    discrepancy: float
    scale: float         # alpha_PP^2 times ||a||, the natural size of a weight-4 value


def _values(Q: QuadricSpace, P):
    J = Q.frame.jets(P, 2)
    f, df, d2f = J[:, 0], J[:, 1], J[:, 2]
    main = np.array([d2f @ a @ f for a in Q.A], dtype=complex)
    alt = np.array([-(df @ a @ df) for a in Q.A], dtype=complex)
    alpha = float(np.sum(np.abs(f) ** 2))
    return main, alt, alpha


def mu2_vector(Q: QuadricSpace, P) -> np.ndarray:
    """``mu2(Q_k)(P)`` for every basis quadric."""
    return _values(Q, P)[0]


def mu2_eval(Q: QuadricSpace, k, P) -> Mu2Evaluation:
    main, alt, alpha = _values(Q, P)
    scale = alpha ** 2 * float(np.linalg.norm(Q.A[k]))
    return Mu2Evaluation(k, P, complex(main[k]), complex(alt[k]),
                         float(abs(main[k] - alt[k])), scale)


def mu2_all(Q: QuadricSpace, P):
    main, alt, alpha = _values(Q, P)
    return [Mu2Evaluation(k, P, complex(main[k]), complex(alt[k]), float(abs(main[k] - alt[k])),
                          alpha ** 2 * float(np.linalg.norm(Q.A[k])))
            for k in range(Q.dim)]


def mu2_norm_sq(Q: QuadricSpace, P) -> float:
    return float(np.sum(np.abs(mu2_vector(Q, P)) ** 2))


def mu2_norm_sq_normalized(Q: QuadricSpace, P) -> float:
    """Chart-invariant ratio ``sum |mu2|^2 / alpha^4``."""
    main, _, alpha = _values(Q, P)
    return float(np.sum(np.abs(main) ** 2)) / alpha ** 4


def mu2_matrix(Q: QuadricSpace, points):
    """``[mu2(Q_k)(P_m) / alpha_m^2]`` so every column carries chart weight zero."""
    cols = []
    for P in points:
        main, _, alpha = _values(Q, P)
        cols.append(main / alpha ** 2)
    return np.array(cols, dtype=complex).T.reshape(Q.dim, len(points))


def mu2_rank(Q: QuadricSpace, points=None, seed=1, threshold=GAP_THRESHOLD,
             raise_ambiguous=True) -> RankDecision:
    g = Q.frame.genus
    if Q.dim == 0:
        return RankDecision((), 0, float("inf"), threshold)
    if points is None:
        points = curves.sample_points(Q.frame.curve, 8 * g, seed, min_dist=1e-2)
    return numerical_rank(mu2_matrix(Q, points), threshold, raise_ambiguous)


PROFILE_COLUMNS = ["point_id", "x_re", "x_im", "sheet", "alpha", "mu2_norm_sq",
                   "mu2_norm_sq_normalized"]


def fmt(v):
    return "%.17g" % v


def profile_rows(Q: QuadricSpace, points):
    rows = []
    for P in points:
        main, _, alpha = _values(Q, P)
        n2 = float(np.sum(np.abs(main) ** 2))
        rows.append({
            "point_id": P.label,
            "x_re": P.x0.real,
            "x_im": P.x0.imag,
            "sheet": P.sheet,
            "alpha": alpha,
            "mu2_norm_sq": n2,
            "mu2_norm_sq_normalized": n2 / alpha ** 2 / alpha ** 2,
        })
    return rows


def write_profile_csv(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PROFILE_COLUMNS)
        for r in rows:
            w.writerow([r[c] if isinstance(r[c], (str, int)) else fmt(r[c]) for c in PROFILE_COLUMNS])
