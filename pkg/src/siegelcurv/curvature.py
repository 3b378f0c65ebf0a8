"""Curvature along Schiffer variations: Hodge bundle, ambient Siegel term,
second fundamental form, holomorphic sectional curvature."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__, curves
from .curves import ChartPoint
from .errors import OffDiagonalUnsupported, ZeroDirection
from .gauss2 import fmt, mu2_vector
from .hodge import HodgeFrame, alpha_from, sym_inner
from .kernel.linalg import GAP_THRESHOLD, RankDecision, numerical_rank
from .quadrics import QuadricSpace
from .second_kind import EtaForm, eta_form, psi_eval, same_point

PI2 = math.pi ** 2
PI4 = math.pi ** 4


def hodge_curvature(frame: HodgeFrame, j, l, R: ChartPoint, T: ChartPoint) -> complex:
    """``4 pi^2 alpha_{R,T} f_j(R) conj(f_l(T))``."""
    fR, fT = frame.values(R), frame.values(T)
    return complex(4 * PI2 * alpha_from(fR, fT) * fR[j] * np.conj(fT[l]))


def ambient_curvature(frame: HodgeFrame, P, P1, S, T) -> complex:
    """``-64 pi^4 alpha_{S,T} alpha_{P,T} alpha_{P,P'} alpha_{S,P'}``."""
    f = {id(p): frame.values(p) for p in (P, P1, S, T)}
    a = lambda u, v: alpha_from(f[id(u)], f[id(v)])
    return complex(-64 * PI4 * a(S, T) * a(P, T) * a(P, P1) * a(S, P1))


class PsiSource:
    """Lazily built ``eta_P`` forms for off-diagonal Psi values."""

    def __init__(self, Q: QuadricSpace, rtol=1e-9):
        self.Q = Q
        self.rtol = rtol
        self._eta: dict = {}

    def eta(self, P) -> EtaForm:
        key = (P.x0, P.y0, P.kind, P.scale)
        if key not in self._eta:
            self._eta[key] = eta_form(self.Q.frame, P, self.rtol)
        return self._eta[key]

    def psi(self, P, S) -> np.ndarray:
        Q = self.Q
        if Q.dim == 0:
            return np.zeros(0, dtype=complex)
        if same_point(P, S):
            return np.array([psi_eval(Q, None, k, P, S) for k in range(Q.dim)])
        if Q.frame.curve.family != curves.HYPERELLIPTIC:
            raise OffDiagonalUnsupported(
                "off-diagonal Psi is available for hyperelliptic curves only")
        eta = self.eta(P)
        return np.array([psi_eval(Q, eta, k, P, S) for k in range(Q.dim)])


def sigma_inner(Q: QuadricSpace, P, P1, S, T, source: PsiSource | None = None) -> complex:
    """``4 pi^2 sum_i Psi^i_P(S) conj(Psi^i_P'(T))``."""
    if Q.dim == 0:
        return 0j
    diagonal = same_point(P, S) and same_point(P1, T)
    if source is None:
        if not diagonal:
            raise OffDiagonalUnsupported("off-diagonal arguments need a PsiSource")
        source = PsiSource(Q)
    a = source.psi(P, S)
    b = source.psi(P1, T)
    return complex(4 * PI2 * np.sum(a * np.conj(b)))


def full_curvature(frame, Q, P, P1, S, T, source=None) -> complex:
    return ambient_curvature(frame, P, P1, S, T) - sigma_inner(Q, P, P1, S, T, source)


def _alpha_pp(frame, P):
    f = frame.values(P)
    return float(np.sum(np.abs(f) ** 2))


def sectional_H(frame, Q: QuadricSpace, P) -> float:
    """``-1 - sum |mu2(Q_i)(P)|^2 / (64 pi^2 alpha_PP^4)``."""
    alpha = _alpha_pp(frame, P)
    if Q.dim == 0:
        return -1.0
    n2 = float(np.sum(np.abs(mu2_vector(Q, P)) ** 2))
    return -1.0 - n2 / (64 * PI2 * alpha ** 4)


def sectional_from_tensor(frame, Q, P) -> float:
    """Full tensor on the diagonal divided by the squared Schiffer norm."""
    R = full_curvature(frame, Q, P, P, P, P)
    A = 2 * math.pi * np.outer(frame.values(P), frame.values(P))
    return float((R / sym_inner(A, A) ** 2).real)


def variation_rank(A, threshold=GAP_THRESHOLD, raise_ambiguous=True) -> RankDecision:
    A = np.asarray(A, dtype=complex)
    if np.max(np.abs(A - A.T), initial=0.0) > 1e-10 * max(1.0, float(np.max(np.abs(A)))):
        raise ValueError("variation matrix must be symmetric")
    return numerical_rank(A, threshold, raise_ambiguous)


def siegel_sectional(A) -> float:
    """``-tr(A Abar A Abar) / tr(A Abar)^2``; rank one gives -1, identity -1/g."""
    A = np.asarray(A, dtype=complex)
    M = A @ A.conj()
    t = np.trace(M).real
    if t <= 0:
        raise ZeroDirection("zero direction has no sectional curvature")
    return float(-np.trace(M @ M).real / t ** 2)


def rho_matrix(Q: QuadricSpace, points):
    """Columns ``sum_i a_ij f_i(P)`` (all j, all P) for each quadric row.

    ``rho(Q)(xi_P)`` vanishes exactly when every such entry does, so this
    matrix has rank ``dim I2`` iff rho is injective on the sampled directions.
    """
    blocks = []
    for P in points:
        f = Q.frame.values(P)
        alpha = float(np.sum(np.abs(f) ** 2))
        blocks.append(np.array([a @ f for a in Q.A]).reshape(Q.dim, -1) / math.sqrt(alpha))
    return np.concatenate(blocks, axis=1) if blocks else np.zeros((Q.dim, 0))


def rho_injectivity(Q: QuadricSpace, points=None, seed=3, threshold=GAP_THRESHOLD):
    curve = Q.frame.curve
    if points is None:
        if curve.family == curves.HYPERELLIPTIC:
            points = curves.special_points(curve)
        else:
            points = curves.sample_points(curve, 4 * Q.frame.genus, seed)
    if Q.dim == 0:
        return RankDecision((), 0, float("inf"), threshold)
    return numerical_rank(rho_matrix(Q, points), threshold, raise_ambiguous=False)


# ---------------------------------------------------------------------------
# reports

CURVATURE_COLUMNS = ["point_id", "x_re", "x_im", "sheet", "alpha", "mu2_norm_sq", "H",
                     "gap_to_minus_one"]


@dataclass
class CurvatureRow:
    point: ChartPoint
    alpha: float
    mu2_norm_sq: float
    H: float
    flag: str = ""

    @property
    def gap(self):
        return -1.0 - self.H

    def as_dict(self):
        x = self.point.x0
        finite = np.isfinite(x)
        return {
            "point_id": self.point.label,
            "x_re": x.real if finite else float("inf"),
            "x_im": x.imag if finite else 0.0,
            "sheet": self.point.sheet,
            "alpha": self.alpha,
            "mu2_norm_sq": self.mu2_norm_sq,
            "H": self.H,
            "gap_to_minus_one": self.gap,
        }


@dataclass
class CurvatureReport:
    curve_id: str
    frame_hash: str
    rows: list = field(default_factory=list)
    tensor: list = field(default_factory=list)
    certificates: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def near_minus_one(self, tol=1e-3):
        return sum(1 for r in self.rows if not r.flag and abs(r.H + 1) <= tol)

    def max_H(self):
        return max((r.H for r in self.rows if not r.flag), default=float("nan"))

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CURVATURE_COLUMNS)
            for r in self.rows:
                d = r.as_dict()
                w.writerow([d[c] if isinstance(d[c], (str, int)) else fmt(d[c]) for c in CURVATURE_COLUMNS])

    def to_json(self):
        doc = {
            "tool_version": __version__,
            "curve_hash": self.curve_id,
            "frame_hash": self.frame_hash,
            "config": self.config,
            "certificates": self.certificates,
            "rows": [dict(r.as_dict(), flag=r.flag) for r in self.rows],
            "tensor": self.tensor,
        }
        return json.dumps(_floats17(doc), indent=1, sort_keys=True)


def _floats17(obj):
    """Floats as 17-significant-digit strings so documents round-trip exactly."""
    if isinstance(obj, float):
        return fmt(obj)
    if isinstance(obj, complex):
        return [fmt(obj.real), fmt(obj.imag)]
    if isinstance(obj, dict):
        return {k: _floats17(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_floats17(v) for v in obj]
    if isinstance(obj, np.generic):
        return _floats17(obj.item())
    return obj


def profile_F(frame, Q, points, tol=1e-3) -> CurvatureReport:
    """H along a sweep; bad points are flagged, never fatal."""
    report = CurvatureReport(frame.curve.hash, frame.hash)
    for P in points:
        if "unsupported_chart" in P.flags:
            report.rows.append(CurvatureRow(P, float("nan"), float("nan"), float("nan"), "unsupported_chart"))
            continue
        try:
            alpha = _alpha_pp(frame, P)
            n2 = float(np.sum(np.abs(mu2_vector(Q, P)) ** 2)) if Q.dim else 0.0
            H = -1.0 - n2 / (64 * PI2 * alpha ** 4)
            report.rows.append(CurvatureRow(P, alpha, n2, H))
        except Exception as exc:  # keep sweeping
            report.rows.append(CurvatureRow(P, float("nan"), float("nan"), float("nan"),
                                            type(exc).__name__))
    report.certificates["near_minus_one"] = {"tol": tol, "count": report.near_minus_one(tol)}
    return report
