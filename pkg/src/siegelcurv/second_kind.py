"""Second-kind differentials ``eta_P`` on hyperelliptic curves and the values ``Psi``.

``eta_P`` has a double pole at ``P`` with principal part ``-1/z^2`` and no
other poles; its cohomology class is anti-holomorphic.  It is built from the
rational ansatz

    (A(x) + B(x) y) / ((x - x0)^2 y) dx,   deg A <= g + 1, deg B <= 1,

with the pole conditions imposed on Taylor coefficients, followed by removal
of its holomorphic component through principal-value surface pairings.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import curves
from .curves import ChartPoint
from .errors import ChartInvalid, PVNoConvergence, WeierstrassPoleUnsupported
from .hodge import HodgeFrame, gram_quadrature_spec
from .kernel import integrate_plane
from .kernel.quadrature import QuadratureSpec
from .series import Series, poly_at_series

NTERMS = 6
PV_RTOL = 1e-9


@dataclass
class EtaForm:
    frame: HodgeFrame
    point: ChartPoint
    A: np.ndarray          # ascending coefficients, deg <= g+1
    B: np.ndarray          # ascending coefficients, deg <= 1
    c: np.ndarray          # holomorphic correction in the orthonormal frame
    principal: complex     # z^-2 coefficient at P (chart scale included)
    residue: complex       # z^-1 coefficient at P
    conjugate_jet: tuple   # value and derivative of the numerator at sigma(P)
    pv_error: float
    pv_values: list = field(default_factory=list, repr=False)

    def raw_coefficient(self, x, y):
        """Coefficient of ``dx`` of the uncorrected ansatz at ``(x, y)``."""
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        num = np.polyval(self.A[::-1], x) + np.polyval(self.B[::-1], x) * y
        return self.point.scale * num / ((x - self.point.x0) ** 2 * y)

    def coefficient(self, S: ChartPoint):
        """Local coefficient ``G_P(S)`` of ``eta_P`` in the chart of ``S``."""
        if S.kind != "x":
            raise ChartInvalid("eta_P is evaluated in x-charts only")
        if abs(S.x0 - self.point.x0) == 0 and abs(S.y0 - self.point.y0) < 1e-12:
            raise ChartInvalid("eta_P has its pole at this point")
        fS = self.frame.values(S)
        return complex(S.scale * self.raw_coefficient(S.x0, S.y0) - np.dot(self.c, fS))

    def pairings(self, spec=None):
        """PV pairings ``<eta_P, omega_j>`` against the orthonormal frame."""
        return _pv_pairings(self.frame, self.point, self.A, self.B, self.c, spec)[0]


def _numerator_series(curve, x0, y0, A, B, sign=1.0, N=NTERMS):
    """Taylor series of ``(A + B y)/y`` along the sheet through ``(x0, sign*y0)``."""
    xs = Series.var(N, x0)
    ratio = poly_at_series(curve.poly, xs) / complex(np.polyval(curve.poly[::-1], x0))
    y = ratio.power(0.5) * (sign * y0)
    return poly_at_series(A, xs) / y + poly_at_series(B, xs)


def _condition_rows(curve, x0, y0, g):
    """Linear conditions on the unknowns ``(A_0..A_{g+1}, B_0, B_1)``."""
    nA = g + 2
    rows, rhs = [], []
    unit = np.eye(nA + 2)
    at_p, at_s = [], []
    for k in range(nA + 2):
        A, B = unit[k, :nA], unit[k, nA:]
        at_p.append(_numerator_series(curve, x0, y0, A, B, 1.0).c[:2])
        at_s.append(_numerator_series(curve, x0, y0, A, B, -1.0).c[:2])
    at_p = np.array(at_p).T
    at_s = np.array(at_s).T
    rows += [at_p[0], at_p[1], at_s[0], at_s[1]]
    rhs += [-1.0, 0.0, 0.0, 0.0]
    # x dx / (x - x0)^2 has a simple pole over infinity: no B_1 term.
    inf_row = np.zeros(nA + 2)
    inf_row[nA + 1] = 1.0
    rows.append(inf_row)
    rhs.append(0.0)
    return np.array(rows, dtype=complex), np.array(rhs, dtype=complex)


def _pv_spec(frame, P, rtol):
    base = gram_quadrature_spec(frame.curve, rtol)
    # pairings can vanish by symmetry; the frame is orthonormal and the
    # principal part has unit size, so rtol is also the absolute floor
    return QuadratureSpec(rtol=rtol, atol=rtol, singularities=base.singularities,
                          infinity_power=base.infinity_power, pv_point=P.x0)


def _pv_pairings(frame, P, A, B, c, spec=None):
    curve = frame.curve
    basis = frame.basis
    T = frame.T
    g = frame.genus
    if spec is None:
        spec = _pv_spec(frame, P, PV_RTOL)

    def integrand(x):
        H = curves.sheet_values(curve, x, basis)          # (n, 2, g) raw
        Hf = np.einsum("jk,nsk->nsj", T, H)                # orthonormal frame
        ys = np.power(np.polyval(curve.poly[::-1], x), 0.5)[:, None] * np.array([1.0, -1.0])[None, :]
        num = np.polyval(A[::-1], x)[:, None] + np.polyval(B[::-1], x)[:, None] * ys
        eta = P.scale * num / ((x[:, None] - P.x0) ** 2 * ys)
        eta = eta - np.einsum("j,nsj->ns", c, Hf)
        return 2.0 * np.einsum("ns,nsj->nj", eta, Hf.conj())

    res = integrate_plane(integrand, spec)
    return np.asarray(res.value).reshape(g), res


def eta_form(frame: HodgeFrame, P: ChartPoint, rtol=PV_RTOL, max_error=1e-6) -> EtaForm:
    curve = frame.curve
    if curve.family != curves.HYPERELLIPTIC:
        raise WeierstrassPoleUnsupported("eta_P is implemented for hyperelliptic curves only")
    if P.kind != "x":
        raise WeierstrassPoleUnsupported("pole points must be finite non-Weierstrass points")
    fx0 = complex(np.polyval(curve.poly[::-1], P.x0))
    if abs(fx0) <= 1e-10 * max(1.0, float(np.max(np.abs(curve.poly)))):
        raise WeierstrassPoleUnsupported("pole point is a Weierstrass point")
    g = frame.genus
    M, rhs = _condition_rows(curve, P.x0, P.y0, g)
    sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    A, B = sol[: g + 2], sol[g + 2:]
    Np = _numerator_series(curve, P.x0, P.y0, A, B, 1.0)
    Ns = _numerator_series(curve, P.x0, P.y0, A, B, -1.0)
    # Scaled chart z = c w: the principal part -1/w^2 needs eta scaled by c.
    c0 = np.zeros(g, dtype=complex)
    spec = _pv_spec(frame, P, rtol)
    coef, res = _pv_pairings(frame, P, A, B, c0, spec)
    if not np.isfinite(res.error) or res.error > max_error * max(1.0, float(np.max(np.abs(coef)))):
        raise PVNoConvergence(f"principal-value pairing error {res.error:.3g}")
    return EtaForm(
        frame=frame, point=P, A=A, B=B, c=coef,
        principal=complex(Np.c[0]), residue=complex(Np.c[1]),
        conjugate_jet=(complex(Ns.c[0]), complex(Ns.c[1])),
        pv_error=float(res.error), pv_values=res.pv_values or [],
    )


def quadric_factor(Q, k, P: ChartPoint, S: ChartPoint):
    """``sum a_ij f_i(P) f_j(S)``."""
    fP = Q.frame.values(P)
    fS = Q.frame.values(S)
    return complex(fP @ Q.A[k] @ fS)


def same_point(P: ChartPoint, S: ChartPoint):
    # plain equality, so the points over infinity (x0 = inf) compare equal
    return P.kind == S.kind and P.scale == S.scale and P.x0 == S.x0 and P.y0 == S.y0


def psi_eval(Q, eta: EtaForm | None, k, P: ChartPoint, S: ChartPoint) -> complex:
    """``Psi^{Q_k}_P(S)``: weight two in the chart at ``S``."""
    if same_point(P, S):
        J = Q.frame.jets(P, 2)
        return complex(0.5 * (J[:, 2] @ Q.A[k] @ J[:, 0]))
    if eta is None:
        raise WeierstrassPoleUnsupported("off-diagonal Psi needs eta_P")
    if not same_point(eta.point, P):
        raise ValueError("eta_P was built for a different point")
    return complex(-eta.coefficient(S) * quadric_factor(Q, k, P, S))


def psi_limit(Q, eta: EtaForm, k, P: ChartPoint, distances=(1e-1, 1e-2, 1e-3), direction=1.0):
    """``Psi(S_m)`` along a ray into ``P`` and a linear extrapolation to ``S = P``."""
    direction = complex(direction) / abs(direction)
    vals = []
    for h in distances:
        S = curves.nearby_point(Q.frame.curve, P, h * direction * P.scale, label=f"S{h:g}")
        vals.append(psi_eval(Q, eta, k, P, S))
    h1, h2 = distances[-2], distances[-1]
    v1, v2 = vals[-2], vals[-1]
    extrapolated = v2 - (v1 - v2) * h2 / (h1 - h2)
    return np.array(vals), complex(extrapolated)


__all__ = ["EtaForm", "eta_form", "psi_eval", "psi_limit", "quadric_factor"]
