"""Explicit curve families, their holomorphic differentials and local jets.

Three families are supported:

* ``hyperelliptic``  -- ``y**2 = f(x)``
* ``cyclic_trigonal`` -- ``y**3 = f(x)``
* ``plane_smooth``   -- ``F(x, y) = 0`` of degree ``d``

Polynomials are stored with ascending coefficients: ``f[k]`` multiplies
``x**k`` and ``F[i][j]`` multiplies ``x**i y**j``.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import (
    BasisVerificationFailed,
    ChartInvalid,
    RepeatedRoot,
    SingularPlaneCurve,
    UnsupportedDegree,
)
from .series import Series, poly_at_series

HYPERELLIPTIC = "hyperelliptic"
CYCLIC_TRIGONAL = "cyclic_trigonal"
PLANE_SMOOTH = "plane_smooth"
FAMILIES = (HYPERELLIPTIC, CYCLIC_TRIGONAL, PLANE_SMOOTH)

ROOT_SEPARATION = 1e-8
ON_CURVE_RTOL = 1e-10
# Terms carried in local expansions; jets need at most order 3 plus the
# spare terms consumed by divisions by powers of the uniformizer.
SERIES_TERMS = 12


def _parse_complex(entry):
    if isinstance(entry, (list, tuple)):
        re = Decimal(str(entry[0]))
        im = Decimal(str(entry[1])) if len(entry) > 1 else Decimal(0)
        return complex(float(re), float(im))
    if isinstance(entry, str):
        return complex(entry.replace(" ", "").replace("i", "j"))
    return complex(entry)


def _fmt(z):
    z = complex(z)
    return [repr(z.real), repr(z.imag)]


def _trim(coeffs, tol=0.0):
    c = np.asarray(coeffs, dtype=complex)
    while c.size > 1 and abs(c[-1]) <= tol:
        c = c[:-1]
    return c


def poly_roots(coeffs):
    """Roots of an ascending-coefficient polynomial (companion eigenvalues)."""
    c = _trim(coeffs)
    if c.size <= 1:
        return np.zeros(0, dtype=complex)
    return np.roots(c[::-1])


def min_root_separation(roots):
    r = np.asarray(roots)
    if r.size < 2:
        return math.inf
    d = np.abs(r[:, None] - r[None, :])
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


@dataclass(frozen=True)
class RawDifferential:
    """Monomial differential.

    Superelliptic families: ``x**a * y**(-b) dx``.
    Plane curves: ``x**a * y**b dx / F_y``.
    """

    a: int
    b: int

    def describe(self, family):
        if family == PLANE_SMOOTH:
            return f"x^{self.a} y^{self.b} dx/F_y"
        return f"x^{self.a} dx/y^{self.b}"


@dataclass(frozen=True)
class ChartPoint:
    """A point of the curve together with a local uniformizer.

    ``kind`` is ``"x"`` (``z = x - x0``), ``"y"`` (``z = y - y0``, used at
    ramification points of the x-projection) or ``"inf"`` (a designated
    uniformizer at a point over ``x = infinity``).  The chart coordinate is
    ``w`` with ``z = scale * w``.
    """

    x0: complex
    y0: complex
    kind: str = "x"
    scale: complex = 1.0
    label: str = ""
    sheet: int = -1
    flags: tuple = ()

    def rescaled(self, c):
        return ChartPoint(self.x0, self.y0, self.kind, self.scale * c,
                          self.label, self.sheet, self.flags)


@dataclass(frozen=True)
class Jet:
    values: np.ndarray  # f(P), f'(P), f''(P), ...
    point: ChartPoint

    @property
    def f(self):
        return self.values[0]

    @property
    def df(self):
        return self.values[1]

    @property
    def d2f(self):
        return self.values[2]


@dataclass(frozen=True, eq=False)
class CurveModel:
    family: str
    coeffs: tuple  # ascending f (superelliptic) or F[i][j] rows (plane)
    genus: int
    branch_points: tuple
    label: str = ""
    branch_orders: tuple = ()
    spec: dict = field(default_factory=dict, repr=False)

    @property
    def n_sheets(self):
        if self.family == HYPERELLIPTIC:
            return 2
        if self.family == CYCLIC_TRIGONAL:
            return 3
        return self.plane_degree

    @property
    def is_superelliptic(self):
        return self.family in (HYPERELLIPTIC, CYCLIC_TRIGONAL)

    @property
    def poly(self):
        return np.array(self.coeffs, dtype=complex)

    @property
    def degree(self):
        if self.is_superelliptic:
            return len(self.coeffs) - 1
        return self.plane_degree

    @property
    def plane_degree(self):
        F = self.plane_array
        idx = np.argwhere(np.abs(F) > 0)
        return int(idx.sum(axis=1).max())

    @property
    def plane_array(self):
        return np.array(self.coeffs, dtype=complex)

    @property
    def hash(self):
        blob = json.dumps(self.spec, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def to_spec(self):
        return dict(self.spec)

    # --- plane helpers -------------------------------------------------

    def F(self, x, y):
        return _plane_eval(self.plane_array, x, y)

    def F_x(self, x, y):
        return _plane_eval(_dx(self.plane_array), x, y)

    def F_y(self, x, y):
        return _plane_eval(_dy(self.plane_array), x, y)

    def y_poly_at(self, x):
        """Ascending coefficients in ``y`` of ``F(x, y)``."""
        F = self.plane_array
        powers = x ** np.arange(F.shape[0])
        return powers @ F


def _plane_eval(F, x, y):
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    out = np.zeros(np.broadcast(x, y).shape, dtype=complex)
    for i in range(F.shape[0] - 1, -1, -1):
        row = np.zeros_like(out)
        for j in range(F.shape[1] - 1, -1, -1):
            row = row * y + F[i, j]
        out = out * x + row
    return out


def _dx(F):
    if F.shape[0] == 1:
        return np.zeros_like(F)
    return F[1:] * np.arange(1, F.shape[0])[:, None]


def _dy(F):
    if F.shape[1] == 1:
        return np.zeros_like(F)
    return F[:, 1:] * np.arange(1, F.shape[1])[None, :]


def _plane_at_series(F, xs: Series, ys: Series) -> Series:
    out = Series.const(0.0, xs.order)
    for i in range(F.shape[0] - 1, -1, -1):
        row = poly_at_series(F[i], ys)
        out = out * xs + row
    return out


# ---------------------------------------------------------------------------
# construction


def superelliptic_genus(n, m):
    """Genus of ``y**n = f(x)`` with ``f`` squarefree of degree ``m``."""
    return (m * (n - 1) - n - math.gcd(n, m) + 2) // 2


def build_curve(spec) -> CurveModel:
    """Validate a curve spec (dict or JSON path) and return a :class:`CurveModel`."""
    if isinstance(spec, (str, bytes)) or hasattr(spec, "read_text"):
        with open(spec) as fh:
            spec = json.load(fh)
    family = spec["family"].lower()
    label = spec.get("label", "")
    if family in (HYPERELLIPTIC, CYCLIC_TRIGONAL):
        coeffs = _trim([_parse_complex(c) for c in spec["coefficients"]])
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")
        return _build_superelliptic(family, coeffs, label)
    if family == PLANE_SMOOTH:
        rows = [[_parse_complex(c) for c in row] for row in spec["coefficients"]]
        width = max(len(r) for r in rows)
        F = np.zeros((len(rows), width), dtype=complex)
        for i, r in enumerate(rows):
            F[i, : len(r)] = r
        if not np.all(np.isfinite(F)):
            raise ValueError("coefficients must be finite")
        return _build_plane(F, label)
    raise ValueError(f"unknown family {spec['family']!r}")


def _canonical_spec(family, coeffs, label):
    if family == PLANE_SMOOTH:
        c = [[_fmt(v) for v in row] for row in coeffs]
    else:
        c = [_fmt(v) for v in coeffs]
    spec = {"family": family, "coefficients": c}
    if label:
        spec["label"] = label
    return spec


def _build_superelliptic(family, f, label):
    n = 2 if family == HYPERELLIPTIC else 3
    m = f.size - 1
    if m < 3:
        raise UnsupportedDegree(f"degree {m} < 3 gives genus < 1")
    roots = poly_roots(f)
    if min_root_separation(roots) <= ROOT_SEPARATION:
        raise RepeatedRoot("f(x) is not squarefree (roots closer than 1e-8)")
    g = superelliptic_genus(n, m)
    if g < 1:
        raise UnsupportedDegree(f"degree {m} gives genus {g}")
    roots = tuple(sorted(roots.tolist(), key=lambda z: (round(z.real, 12), round(z.imag, 12))))
    return CurveModel(
        family=family,
        coeffs=tuple(complex(c) for c in f),
        genus=g,
        branch_points=roots,
        label=label,
        branch_orders=tuple(n for _ in roots),
        spec=_canonical_spec(family, f, label),
    )


def _sylvester_det(p, q):
    """Resultant of two ascending-coefficient polynomials via Sylvester."""
    p = _trim(p)
    q = _trim(q)
    m, n = p.size - 1, q.size - 1
    size = m + n
    S = np.zeros((size, size), dtype=complex)
    for i in range(n):
        S[i, i: i + m + 1] = p[::-1]
    for i in range(m):
        S[n + i, i: i + n + 1] = q[::-1]
    return np.linalg.det(S)


def _cluster(values, tol):
    """Group nearby complex numbers; returns list of (mean, count)."""
    vals = list(values)
    out = []
    used = [False] * len(vals)
    for i, v in enumerate(vals):
        if used[i]:
            continue
        group = [v]
        used[i] = True
        for j in range(i + 1, len(vals)):
            if not used[j] and abs(vals[j] - v) <= tol:
                group.append(vals[j])
                used[j] = True
        out.append((complex(np.mean(group)), len(group)))
    return out


def _build_plane(F, label):
    d = int(np.argwhere(np.abs(F) > 0).sum(axis=1).max())
    if d < 3:
        raise UnsupportedDegree(f"plane curve of degree {d} < 3")
    F = F[: d + 1, : d + 1] if F.shape[0] > d + 1 or F.shape[1] > d + 1 else F
    Fp = np.zeros((d + 1, d + 1), dtype=complex)
    Fp[: F.shape[0], : F.shape[1]] = F
    F = Fp
    if abs(F[0, d]) == 0:
        raise UnsupportedDegree("coefficient of y^d must be nonzero (no vertical asymptotes)")
    top = np.array([F[d - j, j] for j in range(d + 1)])  # F_d(1, t) in t = y/x
    scale = np.max(np.abs(F))
    tops = poly_roots(top)
    if min_root_separation(tops) <= ROOT_SEPARATION * max(1.0, np.max(np.abs(tops))):
        raise UnsupportedDegree("curve must meet the line at infinity transversally")
    Fy = _dy(F)
    # Discriminant in x: resultant of F and F_y sampled on a circle.
    deg_disc = d * (d - 1)
    npts = deg_disc + 1
    rho = 1.0 + np.max(np.abs(F[:, d])) / abs(F[0, d])
    xs = rho * np.exp(2j * np.pi * np.arange(npts) / npts)
    vals = []
    for x in xs:
        py = (x ** np.arange(F.shape[0])) @ F
        qy = (x ** np.arange(Fy.shape[0])) @ Fy
        vals.append(_sylvester_det(py, qy))
    coeffs = np.fft.fft(np.array(vals)) / npts / rho ** np.arange(npts)
    coeffs = _trim(coeffs, tol=1e-9 * np.max(np.abs(coeffs)))
    approx = poly_roots(coeffs)
    # A branch fibre with one ramified point of index e is an (e-1)-fold
    # discriminant root; rounding spreads it by ~noise**(1/(e-1)), so cluster
    # loosely and use the cluster mean, which is a stable symmetric function.
    branch, orders = [], []
    for x_b, mult in _cluster(approx, 2e-2 * max(1.0, float(np.max(np.abs(approx), initial=0.0)))):
        e = mult + 1
        ys = poly_roots((x_b ** np.arange(F.shape[0])) @ F)
        y_b = _tightest_group(ys, e)
        x_b, y_b = _polish_branch(F, x_b, y_b, e)
        gx = abs(_plane_eval(_dx(F), x_b, y_b))
        if gx <= 1e-7 * scale * max(1.0, abs(x_b), abs(y_b)) ** (d - 1):
            raise SingularPlaneCurve(
                f"F, F_x, F_y vanish together near ({x_b:.6g}, {y_b:.6g})")
        branch.append(complex(x_b))
        orders.append(e)
    key = sorted(range(len(branch)), key=lambda k: (round(branch[k].real, 10), round(branch[k].imag, 10)))
    return CurveModel(
        family=PLANE_SMOOTH,
        coeffs=tuple(tuple(complex(v) for v in row) for row in F),
        genus=(d - 1) * (d - 2) // 2,
        branch_points=tuple(branch[k] for k in key),
        label=label,
        branch_orders=tuple(orders[k] for k in key),
        spec=_canonical_spec(PLANE_SMOOTH, F, label),
    )


def _tightest_group(ys, e):
    """Mean of the ``e`` mutually closest roots (the ramified cluster)."""
    ys = np.asarray(ys)
    best, center = np.inf, ys[0]
    for y in ys:
        near = ys[np.argsort(np.abs(ys - y))[:e]]
        spread = np.max(np.abs(near - near.mean()))
        if spread < best:
            best, center = spread, near.mean()
    return complex(center)


def _polish_branch(F, x, y, e=2, steps=12):
    """Newton on ``F = d^(e-1)F/dy^(e-1) = 0``, nonsingular at an index-e point."""
    G = F
    for _ in range(e - 1):
        G = _dy(G)
    Fx, Fy = _dx(F), _dy(F)
    Gx, Gy = _dx(G), _dy(G)
    for _ in range(steps):
        r = np.array([_plane_eval(F, x, y), _plane_eval(G, x, y)])
        J = np.array([[_plane_eval(Fx, x, y), _plane_eval(Fy, x, y)],
                      [_plane_eval(Gx, x, y), _plane_eval(Gy, x, y)]])
        if abs(np.linalg.det(J)) < 1e-10 * (np.abs(J).max() ** 2 + 1e-300):
            break
        step = np.linalg.solve(J, r)
        x, y = x - step[0], y - step[1]
        if np.max(np.abs(step)) < 1e-15 * (1 + abs(x) + abs(y)):
            break
    return complex(x), complex(y)


def _entry(c):
    if isinstance(c, (int, np.integer)):
        return [str(int(c)), "0"]
    c = complex(c)
    return [repr(c.real), repr(c.imag)]


def hyperelliptic(coeffs, label=""):
    return build_curve({"family": HYPERELLIPTIC, "coefficients": [_entry(c) for c in coeffs],
                        "label": label})


def trigonal(coeffs, label=""):
    return build_curve({"family": CYCLIC_TRIGONAL, "coefficients": [_entry(c) for c in coeffs],
                        "label": label})


def plane(terms, label=""):
    """Plane curve from ``{(i, j): coeff}`` meaning ``coeff * x**i * y**j``."""
    d = max(i + j for i, j in terms)
    rows = [[["0", "0"] for _ in range(d + 1)] for _ in range(d + 1)]
    for (i, j), c in terms.items():
        rows[i][j] = _entry(c)
    return build_curve({"family": PLANE_SMOOTH, "coefficients": rows, "label": label})


def fermat_quintic():
    return plane({(5, 0): 1, (0, 5): 1, (0, 0): 1}, label="fermat-quintic")


# ---------------------------------------------------------------------------
# differentials


def _superelliptic_infinity(curve):
    n = curve.n_sheets
    m = curve.degree
    return n // math.gcd(n, m), m


def differential_basis(curve: CurveModel) -> list:
    """Standard basis of holomorphic differentials, verified pole-free."""
    g = curve.genus
    basis = []
    if curve.is_superelliptic:
        n = curve.n_sheets
        e, m = _superelliptic_infinity(curve)
        for b in range(1, n):
            a = 0
            # order at infinity: b*m*e/n - e*(a+1) - 1 >= 0
            while b * m * e - n * (e * (a + 1) + 1) >= 0:
                basis.append(RawDifferential(a, b))
                a += 1
    else:
        d = curve.plane_degree
        for k in range(d - 2):
            for b in range(k + 1):
                basis.append(RawDifferential(k - b, b))
    if len(basis) != g:
        raise BasisVerificationFailed(f"found {len(basis)} differentials for genus {g}")
    _verify_basis(curve, basis)
    return basis


def order_at_infinity(curve, diff: RawDifferential):
    if curve.is_superelliptic:
        n = curve.n_sheets
        e, m = _superelliptic_infinity(curve)
        num = diff.b * m * e - n * (e * (diff.a + 1) + 1)
        return num // n
    return curve.plane_degree - 3 - diff.a - diff.b


def _verify_basis(curve, basis):
    for w in basis:
        if order_at_infinity(curve, w) < 0:
            raise BasisVerificationFailed(f"{w.describe(curve.family)} has a pole at infinity")
    for bp in ramification_points(curve):
        coeffs = local_coefficients(curve, bp, basis, 4)
        if not np.all(np.isfinite(coeffs)):
            raise BasisVerificationFailed(f"pole at branch point {bp.x0}")


# ---------------------------------------------------------------------------
# points and charts


def ramification_points(curve) -> list:
    """Finite ramification points of the x-projection, with y-charts."""
    pts = []
    if curve.is_superelliptic:
        for k, r in enumerate(curve.branch_points):
            pts.append(ChartPoint(complex(r), 0j, "y", 1.0, f"branch{k}", -1, ("ramification",)))
    else:
        F = curve.plane_array
        for k, (x_b, e) in enumerate(zip(curve.branch_points, curve.branch_orders)):
            y_b = _tightest_group(poly_roots(curve.y_poly_at(x_b)), e)
            y_b = _polish_branch(F, x_b, y_b, e)[1]
            pts.append(ChartPoint(complex(x_b), complex(y_b), "y", 1.0,
                                  f"branch{k}", -1, ("ramification",)))
    return pts


def infinity_points(curve) -> list:
    """Points over ``x = infinity`` for superelliptic curves (designated charts)."""
    if not curve.is_superelliptic:
        return []
    e, m = _superelliptic_infinity(curve)
    n = curve.n_sheets
    count = n // e
    flags = ("infinity",) + (("ramification",) if e > 1 else ())
    return [ChartPoint(complex("inf"), complex("inf"), "inf", 1.0, f"inf{k}", k, flags)
            for k in range(count)]


def special_points(curve) -> list:
    """Weierstrass points (hyperelliptic) or g^1_3 ramification points (trigonal)."""
    if curve.family == HYPERELLIPTIC:
        pts = [p for p in ramification_points(curve)]
        pts = [ChartPoint(p.x0, p.y0, p.kind, p.scale, f"W{k}", -1, ("weierstrass",))
               for k, p in enumerate(pts)]
        if curve.degree % 2 == 1:
            (inf,) = infinity_points(curve)
            pts.append(ChartPoint(inf.x0, inf.y0, "inf", 1.0, f"W{len(pts)}", 0,
                                  ("weierstrass", "infinity")))
        return pts
    if curve.family == CYCLIC_TRIGONAL:
        pts = [ChartPoint(p.x0, p.y0, p.kind, p.scale, f"R{k}", -1, ("g13_ramification",))
               for k, p in enumerate(ramification_points(curve))]
        if curve.degree % 3 != 0:
            (inf,) = infinity_points(curve)
            pts.append(ChartPoint(inf.x0, inf.y0, "inf", 1.0, f"R{len(pts)}", 0,
                                  ("g13_ramification", "infinity", "unsupported_chart")))
        return pts
    return []


def sheet_ys(curve, x0):
    """All y-values over ``x0`` in a deterministic sheet order."""
    if curve.is_superelliptic:
        n = curve.n_sheets
        base = complex(np.polyval(curve.poly[::-1], x0)) ** (1.0 / n)
        return np.array([base * np.exp(2j * np.pi * k / n) for k in range(n)])
    ys = poly_roots(curve.y_poly_at(x0))
    return np.sort_complex(ys)


def point_at(curve, x0, sheet=0, scale=1.0, label="") -> ChartPoint:
    """Regular point over ``x0`` on the given sheet, with an x-chart."""
    x0 = complex(x0)
    y0 = complex(sheet_ys(curve, x0)[sheet])
    if curve.family == PLANE_SMOOTH:
        y0 = _newton_y(curve, x0, y0)
    return ChartPoint(x0, y0, "x", scale, label, sheet)


def nearby_point(curve, P: ChartPoint, dx, label="") -> ChartPoint:
    """Point over ``P.x0 + dx`` on the sheet continued from ``P`` (same chart scale)."""
    x1 = P.x0 + complex(dx)
    ys = sheet_ys(curve, x1)
    y1 = complex(ys[int(np.argmin(np.abs(ys - P.y0)))])
    if curve.family == PLANE_SMOOTH:
        y1 = _newton_y(curve, x1, y1)
    return ChartPoint(x1, y1, "x", P.scale, label, P.sheet)


def _newton_y(curve, x0, y0, steps=4):
    for _ in range(steps):
        fy = complex(curve.F_y(x0, y0))
        if fy == 0:
            break
        y0 = y0 - complex(curve.F(x0, y0)) / fy
    return y0


def branch_distance(curve, x0):
    if not curve.branch_points:
        return math.inf
    return float(np.min(np.abs(np.asarray(curve.branch_points) - x0)))


def sample_points(curve, count, seed, min_dist=1e-2, radius=None, label="P"):
    """Seeded random regular points away from branch points."""
    rng = np.random.default_rng(seed)
    bp = np.asarray(curve.branch_points) if curve.branch_points else np.zeros(1)
    if radius is None:
        radius = 1.25 * max(1.0, float(np.max(np.abs(bp))))
    pts = []
    while len(pts) < count:
        r = radius * math.sqrt(rng.random())
        t = 2 * math.pi * rng.random()
        x0 = complex(r * math.cos(t), r * math.sin(t))
        sheet = int(rng.integers(curve.n_sheets))
        if branch_distance(curve, x0) < min_dist:
            continue
        p = point_at(curve, x0, sheet, label=f"{label}{len(pts)}")
        if curve.family == PLANE_SMOOTH and abs(curve.F_y(p.x0, p.y0)) < 1e-6:
            continue
        pts.append(p)
    return pts


def on_curve_residual(curve, pt: ChartPoint):
    if pt.kind == "inf":
        return 0.0
    if curve.is_superelliptic:
        fx = complex(np.polyval(curve.poly[::-1], pt.x0))
        lhs = pt.y0 ** curve.n_sheets
        return abs(lhs - fx) / max(1.0, abs(fx), abs(lhs))
    val = complex(curve.F(pt.x0, pt.y0))
    mags = np.abs(curve.plane_array) * np.abs(
        np.power.outer(max(1.0, abs(pt.x0)), np.arange(curve.plane_array.shape[0]))[:, None]
        * np.power(max(1.0, abs(pt.y0)), np.arange(curve.plane_array.shape[1]))[None, :])
    return abs(val) / max(1.0, float(mags.sum()))


# ---------------------------------------------------------------------------
# local expansions


def _check_point(curve, pt):
    if on_curve_residual(curve, pt) > ON_CURVE_RTOL:
        raise ChartInvalid(f"point ({pt.x0}, {pt.y0}) is not on the curve")


def local_coefficients(curve, pt: ChartPoint, basis, nterms=4, terms=SERIES_TERMS):
    """Taylor coefficients of each differential's coefficient in the chart.

    Returns an array of shape ``(len(basis), nterms)`` where entry ``[i, k]``
    is the coefficient of ``w**k`` in ``omega_i / dw``.
    """
    _check_point(curve, pt)
    N = terms
    if curve.is_superelliptic:
        rows = _superelliptic_local(curve, pt, basis, N)
    else:
        rows = _plane_local(curve, pt, basis, N)
    out = np.array([r.c[:nterms] for r in rows])
    c = complex(pt.scale)
    if c != 1:
        # z = c*w: omega = h(z) dz = c*h(c*w) dw
        out = out * (c ** (np.arange(nterms) + 1))[None, :]
    return out


def _superelliptic_local(curve, pt, basis, N):
    n = curve.n_sheets
    f = curve.poly
    if pt.kind == "x":
        fx0 = complex(np.polyval(f[::-1], pt.x0))
        if abs(fx0) <= 1e-12 * max(1.0, np.max(np.abs(f))):
            raise ChartInvalid("x-chart requested at a ramification point of the x-projection")
        xs = Series.var(N, pt.x0)
        ratio = poly_at_series(f, xs) / fx0
        y = ratio.power(1.0 / n) * pt.y0
        yinv = y.inverse()
        return [poly_at_series(_mono(w.a), xs) * yinv ** w.b for w in basis]
    if pt.kind == "y":
        if abs(pt.y0) > 1e-12:
            raise ChartInvalid("superelliptic y-charts are only used at branch points")
        # Solve f(x0 + u) = z**n for u as a series in z.
        fshift = _taylor_shift(f, pt.x0)
        if abs(fshift[0]) > 1e-9 * max(1.0, np.max(np.abs(f))):
            raise ChartInvalid("y-chart base point is not a branch point")
        phi = Series(np.concatenate([[0.0], fshift[1:]]), N)
        u_of_w = phi.reversion()  # u as series in w = z**n
        u = Series(np.zeros(N), N)
        uc = np.zeros(N, dtype=complex)
        for k in range(N):
            if k * n < N:
                uc[k * n] = u_of_w.c[k]
        u = Series(uc)
        xs = u + pt.x0
        dx = u.deriv()
        out = []
        for w in basis:
            s = poly_at_series(_mono(w.a), xs) * dx
            if s.valuation(1e-14 * max(1.0, np.max(np.abs(s.c)))) < w.b:
                raise BasisVerificationFailed("differential has a pole at a branch point")
            out.append(s.shift_down(w.b))
        return out
    if pt.kind == "inf":
        e, m = _superelliptic_infinity(curve)
        # x = t**-e, y = t**(-m e / n) * P(t)**(1/n), P(t) = t**(m e) f(t**-e)
        pc = np.zeros(N, dtype=complex)
        for k, ck in enumerate(f):
            p = e * (m - k)
            if p < N:
                pc[p] += ck
        P = Series(pc)
        branch = np.exp(2j * np.pi * max(pt.sheet, 0) / n)
        u = P.power(1.0 / n) * branch
        uinv = u.inverse()
        out = []
        for w in basis:
            expo = order_at_infinity(curve, w)
            if expo < 0:
                raise BasisVerificationFailed("differential has a pole at infinity")
            s = (uinv ** w.b) * (-e)
            out.append(s.shift_up(expo))
        return out
    raise ChartInvalid(f"unknown chart kind {pt.kind!r}")


def _mono(a):
    c = np.zeros(a + 1)
    c[a] = 1.0
    return c


def _taylor_shift(f, x0):
    """Ascending coefficients of ``f(x0 + u)`` in ``u``."""
    m = len(f) - 1
    out = np.zeros(m + 1, dtype=complex)
    for k, ck in enumerate(f):
        for j in range(k + 1):
            out[j] += ck * math.comb(k, j) * x0 ** (k - j)
    return out


def _plane_local(curve, pt, basis, N):
    F = curve.plane_array
    if pt.kind == "x":
        fy = complex(curve.F_y(pt.x0, pt.y0))
        scale = max(1.0, abs(pt.x0), abs(pt.y0)) ** (curve.plane_degree - 1)
        if abs(fy) <= 1e-10 * scale * np.max(np.abs(F)):
            raise ChartInvalid("x-chart requested where F_y vanishes")
        xs = Series.var(N, pt.x0)
        ys = _newton_series(F, xs, Series.const(pt.y0, N), _dy(F))
        denom = _plane_at_series(_dy(F), xs, ys)
        sign = 1.0
    elif pt.kind == "y":
        fx = complex(curve.F_x(pt.x0, pt.y0))
        if abs(fx) == 0:
            raise ChartInvalid("y-chart requested where F_x vanishes")
        ys = Series.var(N, pt.y0)
        xs = _newton_series(F, Series.const(pt.x0, N), ys, _dx(F), solve_x=True)
        denom = _plane_at_series(_dx(F), xs, ys)
        sign = -1.0
    else:
        raise ChartInvalid("plane curves support x- and y-charts only")
    dinv = denom.inverse() * sign
    out = []
    for w in basis:
        out.append(poly_at_series(_mono(w.a), xs) * poly_at_series(_mono(w.b), ys) * dinv)
    return out


def _newton_series(F, xs, ys, dF, solve_x=False, iters=6):
    """Series Newton for ``F(x(z), y(z)) = 0`` in the unknown coordinate."""
    for _ in range(iters):
        val = _plane_at_series(F, xs, ys)
        der = _plane_at_series(dF, xs, ys)
        step = val / der
        if solve_x:
            xs = xs - step
        else:
            ys = ys - step
    return xs if solve_x else ys


def jets(curve, pt: ChartPoint, basis, order=2):
    """Derivatives ``[f_i, f_i', f_i'', ...]`` at ``pt`` for every differential."""
    coeffs = local_coefficients(curve, pt, basis, max(order + 1, 3))
    fact = np.array([math.factorial(k) for k in range(coeffs.shape[1])])
    return (coeffs * fact[None, :])[:, : order + 1]


def jet_at(curve, pt: ChartPoint, differential, order=2) -> Jet:
    if order > 3:
        raise ValueError("jets are provided up to order 3")
    return Jet(jets(curve, pt, [differential], order)[0], pt)


# ---------------------------------------------------------------------------
# evaluation on all sheets (quadrature path)


def sheet_values(curve, xs, basis):
    """Coefficients of ``dx`` for each differential on every sheet.

    Returns ``(len(xs), n_sheets, len(basis))``.
    """
    xs = np.asarray(xs, dtype=complex).ravel()
    if curve.is_superelliptic:
        n = curve.n_sheets
        fx = np.polyval(curve.poly[::-1], xs)
        base = np.power(fx, 1.0 / n)
        ys = base[:, None] * np.exp(2j * np.pi * np.arange(n) / n)[None, :]
        a = np.array([w.a for w in basis])
        b = np.array([w.b for w in basis])
        return xs[:, None, None] ** a[None, None, :] * ys[:, :, None] ** (-b[None, None, :])
    F = curve.plane_array
    ys = plane_sheets(curve, xs)
    fy = _plane_eval(_dy(F), xs[:, None], ys)
    a = np.array([w.a for w in basis])
    b = np.array([w.b for w in basis])
    return (xs[:, None, None] ** a[None, None, :] * ys[:, :, None] ** b[None, None, :]) / fy[:, :, None]


def plane_sheets(curve, xs):
    """All roots ``y`` of ``F(x, y) = 0`` for each ``x`` (batched)."""
    F = curve.plane_array
    xs = np.asarray(xs, dtype=complex).ravel()
    powers = xs[:, None] ** np.arange(F.shape[0])[None, :]
    polys = powers @ F  # (npts, d+1) ascending in y
    return kernels.batch_roots(polys)
