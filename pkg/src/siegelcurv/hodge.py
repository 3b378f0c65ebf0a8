"""Hodge inner product, orthonormal frames and Schiffer variations."""
from __future__ import annotations

import hashlib
import json
import logging
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import curves
from .curves import CurveModel, ChartPoint
from .errors import NotPositiveDefinite
from .kernel import QuadratureSpec, Singularity, cholesky_hpd, integrate_plane

log = logging.getLogger(__name__)

MIN_EIG_RATIO = 1e-6
MAX_REFINEMENTS = 3


def gram_quadrature_spec(curve: CurveModel, rtol=1e-7) -> QuadratureSpec:
    """Singularity layout for the sheet-summed Gram integrands of ``curve``."""
    n = curve.n_sheets
    sings = []
    for a, e in zip(curve.branch_points, curve.branch_orders):
        if curve.is_superelliptic:
            sings.append(Singularity(complex(a), power=n, strength=2.0 * (n - 1) / n))
        else:
            sings.append(Singularity(complex(a), power=e, strength=2.0 * (e - 1) / e))
    kinf = n if curve.is_superelliptic else 1
    return QuadratureSpec(rtol=rtol, singularities=tuple(sings), infinity_power=kinf)


def gram_integrand(curve, basis):
    g = len(basis)

    def fn(x):
        H = curves.sheet_values(curve, x, basis)
        # 2 * sum over sheets of h_i * conj(h_j)
        G = 2.0 * np.einsum("nsi,nsj->nij", H, H.conj())
        return G.reshape(x.size, g * g)

    return fn


@dataclass
class GramResult:
    G: np.ndarray
    error: float
    cells: int
    evaluations: int
    rtol: float
    cached: bool = False


class GramCache:
    """Content-addressed store of Gram matrices (decimal strings, exact round trip)."""

    def __init__(self, directory):
        self.dir = Path(directory)

    @staticmethod
    def key(curve, basis, spec: QuadratureSpec):
        blob = json.dumps({
            "curve": curve.spec,
            "basis": [[w.a, w.b] for w in basis],
            "quadrature": spec.key(),
        }, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def path(self, key):
        return self.dir / f"gram-{key}.json"

    def load(self, key) -> Optional[GramResult]:
        p = self.path(key)
        if not p.exists():
            return None
        doc = json.loads(p.read_text())
        G = np.array([[complex(float(re), float(im)) for re, im in row] for row in doc["G"]])
        return GramResult(G, float(doc["error"]), doc["cells"], doc["evaluations"],
                          float(doc["rtol"]), cached=True)

    def store(self, key, res: GramResult):
        self.dir.mkdir(parents=True, exist_ok=True)
        doc = {
            "G": [[[repr(float(v.real)), repr(float(v.imag))] for v in row] for row in res.G],
            "error": repr(float(res.error)),
            "cells": res.cells,
            "evaluations": res.evaluations,
            "rtol": repr(float(res.rtol)),
        }
        tmp = self.path(key).with_suffix(".tmp")
        tmp.write_text(json.dumps(doc, indent=1, sort_keys=True))
        os.replace(tmp, self.path(key))


def gram_matrix(curve, basis, spec: Optional[QuadratureSpec] = None, cache: Optional[GramCache] = None) -> GramResult:
    """``G_ij = i * int_X eta_i ^ conj(eta_j)`` by direct surface integration."""
    if spec is None:
        spec = gram_quadrature_spec(curve)
    key = None
    if cache is not None:
        key = GramCache.key(curve, basis, spec)
        hit = cache.load(key)
        if hit is not None:
            return hit
    g = len(basis)
    res = integrate_plane(gram_integrand(curve, basis), spec)
    G = np.asarray(res.value).reshape(g, g)
    G = 0.5 * (G + G.conj().T)
    out = GramResult(G, float(res.error), res.cells, res.evaluations, spec.rtol)
    if cache is not None:
        cache.store(key, out)
    return out


def orthonormal_frame(G) -> np.ndarray:
    """``T`` with ``T G T^* = I`` (inverse of the Cholesky factor)."""
    L = cholesky_hpd(G)
    return np.linalg.solve(L, np.eye(L.shape[0], dtype=complex))


@dataclass
class HodgeFrame:
    curve: CurveModel
    basis: list
    G: np.ndarray
    T: np.ndarray
    report: dict = field(default_factory=dict)

    @property
    def genus(self):
        return len(self.basis)

    @property
    def hash(self):
        h = hashlib.sha256()
        h.update(self.curve.hash.encode())
        h.update(np.ascontiguousarray(self.G).tobytes())
        return h.hexdigest()[:16]

    def rotated(self, U):
        """Frame post-composed with a unitary ``U`` (still orthonormal)."""
        return replace(self, T=np.asarray(U) @ self.T)

    def jets(self, pt: ChartPoint, order=2):
        """Orthonormal-frame jets: array ``(g, order+1)`` of ``f_i^(k)(P)``."""
        raw = curves.jets(self.curve, pt, self.basis, order)
        return self.T @ raw

    def values(self, pt: ChartPoint):
        return self.jets(pt, 0)[:, 0]

    def alpha(self, P: ChartPoint, Q: ChartPoint):
        return alpha_from(self.values(P), self.values(Q))

    def schiffer(self, P: ChartPoint):
        return schiffer_matrix(self, P)


def alpha_from(fP, fQ):
    return complex(np.sum(np.asarray(fP) * np.conj(fQ)))


def build_frame(curve: CurveModel, rtol=1e-7, cache: Optional[GramCache] = None, basis=None) -> HodgeFrame:
    """Gram matrix plus orthonormalization, refining the quadrature on failure."""
    if basis is None:
        basis = curves.differential_basis(curve)
    tol = rtol
    last = None
    for attempt in range(MAX_REFINEMENTS + 1):
        res = gram_matrix(curve, basis, gram_quadrature_spec(curve, tol), cache)
        try:
            cholesky_hpd(res.G, min_eig_ratio=MIN_EIG_RATIO)
            T = orthonormal_frame(res.G)
        except NotPositiveDefinite as exc:
            last = exc
            log.warning("Gram matrix rejected at rtol=%g (%s); refining", tol, exc)
            tol *= 1e-2
            continue
        report = {
            "rtol": tol,
            "error": res.error,
            "relative_error": res.error / float(np.max(np.abs(res.G))),
            "cells": res.cells,
            "evaluations": res.evaluations,
            "cached": res.cached,
            "refinements": attempt,
            "condition": float(np.linalg.cond(res.G)),
        }
        return HodgeFrame(curve, basis, res.G, T, report)
    raise last


# ---------------------------------------------------------------------------
# Schiffer variations and the S^2 inner product


@dataclass(frozen=True)
class SchifferMatrix:
    point: ChartPoint
    A: np.ndarray  # A_ij = 2 pi f_i(P) f_j(P)


def schiffer_matrix(frame: HodgeFrame, P: ChartPoint) -> SchifferMatrix:
    f = frame.values(P)
    return SchifferMatrix(P, 2.0 * math.pi * np.outer(f, f))


def sym_inner(A, B):
    """Positive Hermitian product on symmetric coefficient matrices: ``2 sum A conj(B)``."""
    A = A.A if isinstance(A, SchifferMatrix) else np.asarray(A)
    B = B.A if isinstance(B, SchifferMatrix) else np.asarray(B)
    return complex(2.0 * np.sum(A * np.conj(B)))


def schiffer_norm(frame, P):
    """``|xi_P| = 2 sqrt(2) pi alpha_{P,P}``."""
    return 2.0 * math.sqrt(2.0) * math.pi * frame.alpha(P, P).real
