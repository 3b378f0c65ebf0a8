"""Adaptive two-dimensional quadrature over the complex plane.

The plane is covered by a smooth partition of unity:

* a disk around every listed singularity, integrated in local polar
  coordinates ``x = a + s**k e^{i theta}`` (the power ``k`` absorbs the
  fractional exponents of superelliptic integrands),
* the region ``|x| > R`` mapped by ``x -> 1/x`` and integrated in polar
  coordinates around ``w = 0``,
* a smooth, compactly supported remainder on the square ``[-2R, 2R]^2``,
  integrated by an adaptive quadtree.

Every patch uses a tensor 7-point Gauss-Legendre rule; a patch's error is
``|Q(patch) - sum Q(children)|``.  Refinement order and reductions are fixed,
so results are bit-identical for identical inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .. import kernels
from ..errors import NoConvergence, SingularityTooStrong

GL_ORDER = 7
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)
_GL_U = 0.5 * (_GL_X + 1.0)
_GL_WU = 0.5 * _GL_W
CHUNK = 40000


@dataclass(frozen=True)
class Singularity:
    """An integrable singular point.

    ``power`` is the radial substitution ``r = s**power``; ``strength`` is the
    exponent ``beta`` of the local blow-up ``|x - a|**-beta``.
    """

    point: complex
    power: int = 1
    strength: float = 1.0


@dataclass(frozen=True)
class QuadratureSpec:
    rtol: float = 1e-7
    atol: float = 0.0
    max_subdivisions: int = 60000
    singularities: tuple = ()
    radius: Optional[float] = None
    infinity_power: int = 1
    infinity_strength: float = 0.0
    pv_point: Optional[complex] = None
    pv_eps: tuple = (1e-2, 1e-3, 1e-4)
    truncate: Optional[float] = None  # integrate over |x| < truncate only

    def key(self):
        return {
            "rtol": repr(self.rtol),
            "atol": repr(self.atol),
            "max_subdivisions": self.max_subdivisions,
            "singularities": [[repr(complex(s.point).real), repr(complex(s.point).imag), s.power,
                               repr(s.strength)] for s in self.singularities],
            "radius": None if self.radius is None else repr(self.radius),
            "infinity_power": self.infinity_power,
            "infinity_strength": repr(self.infinity_strength),
            "pv_point": None if self.pv_point is None else [repr(complex(self.pv_point).real),
                                                            repr(complex(self.pv_point).imag)],
            "pv_eps": [repr(e) for e in self.pv_eps],
            "truncate": None if self.truncate is None else repr(self.truncate),
        }


@dataclass
class QuadratureResult:
    value: np.ndarray
    error: float
    cells: int
    evaluations: int
    groups: dict = field(default_factory=dict)
    pv_values: Optional[list] = None

    def scalar(self):
        return complex(np.asarray(self.value).ravel()[0])


# ---------------------------------------------------------------------------
# partition of unity


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
    b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def bump(r, rho):
    """1 for ``r <= rho/2``, 0 for ``r >= rho``."""
    return smooth_step((rho - np.asarray(r)) / (0.5 * rho))


# ---------------------------------------------------------------------------
# patch mappers: (U, V) parameter arrays -> (x, jacobian * partition weight)


class _Cartesian:
    def __init__(self, centers, radii, r_inner, r_outer):
        self.centers = np.asarray(centers, dtype=complex)
        self.radii = np.asarray(radii, dtype=float)
        self.r_inner = r_inner
        self.r_outer = r_outer

    def __call__(self, U, V):
        x = U + 1j * V
        w = 1.0 - smooth_step((np.abs(x) - self.r_inner) / (self.r_outer - self.r_inner))
        for c, rho in zip(self.centers, self.radii):
            w = w - bump(np.abs(x - c), rho)
        return x, w


class _Polar:
    """``x = center + s**k e^{i theta}`` weighted by the disk bump."""

    def __init__(self, center, rho, k):
        self.center = complex(center)
        self.rho = rho
        self.k = k

    def __call__(self, S, T):
        k = self.k
        r = S ** k
        x = self.center + r * np.exp(1j * T)
        jac = r * k * S ** (k - 1) * bump(r, self.rho)
        return x, jac


class _DiskRemainder:
    """Polar coordinates about 0 on ``|x| < T`` minus the singular bumps."""

    def __init__(self, centers, radii):
        self.centers = np.asarray(centers, dtype=complex)
        self.radii = np.asarray(radii, dtype=float)

    def __call__(self, S, T):
        x = S * np.exp(1j * T)
        w = np.ones_like(S)
        for c, rho in zip(self.centers, self.radii):
            w = w - bump(np.abs(x - c), rho)
        return x, S * w


class _LogPolar:
    """``x = center + e^s e^{i theta}`` for principal-value annuli."""

    def __init__(self, center, rho):
        self.center = complex(center)
        self.rho = rho

    def __call__(self, S, T):
        r = np.exp(S)
        x = self.center + r * np.exp(1j * T)
        return x, r * r * bump(r, self.rho)


class _Inverted:
    """``x = 1/w`` with ``w = s**k e^{i theta}``, weighted by the outer cutoff."""

    def __init__(self, r_inner, r_outer, k):
        self.r_inner = r_inner
        self.r_outer = r_outer
        self.k = k

    def __call__(self, S, T):
        k = self.k
        rw = S ** k
        with np.errstate(divide="ignore", invalid="ignore"):
            x = 1.0 / (rw * np.exp(1j * T))
            rx = 1.0 / rw
            cut = smooth_step((rx - self.r_inner) / (self.r_outer - self.r_inner))
            jac = rw * k * S ** (k - 1) / rw ** 4 * cut
        return x, jac


class _Affine:
    """Generic mapper for user supplied coordinates (used by wolpert_class)."""

    def __init__(self, fn):
        self.fn = fn

    def __call__(self, U, V):
        return self.fn(U, V)


# ---------------------------------------------------------------------------
# adaptive engine


@dataclass
class _Leaf:
    mapper: int
    box: tuple
    tag: str
    coarse: np.ndarray
    kids: Optional[list] = None  # child GL values
    value: Optional[np.ndarray] = None
    err: float = 0.0


def _split(box):
    u0, u1, v0, v1 = box
    um, vm = 0.5 * (u0 + u1), 0.5 * (v0 + v1)
    return [(u0, um, v0, vm), (um, u1, v0, vm), (u0, um, vm, v1), (um, u1, vm, v1)]


def _nodes(box):
    u0, u1, v0, v1 = box
    du, dv = u1 - u0, v1 - v0
    U = u0 + du * _GL_U
    V = v0 + dv * _GL_U
    W = np.outer(_GL_WU * du, _GL_WU * dv)
    UU, VV = np.meshgrid(U, V, indexing="ij")
    return UU.ravel(), VV.ravel(), W.ravel()


class _Evaluator:
    def __init__(self, integrand, mappers):
        self.integrand = integrand
        self.mappers = mappers
        self.ncomp = None
        self.evaluations = 0

    def boxes(self, items):
        """GL7 estimates for a list of ``(mapper, box)``; returns ``(n, ncomp)``."""
        results = [None] * len(items)
        npb = GL_ORDER * GL_ORDER
        per_chunk = max(1, CHUNK // npb)
        for start in range(0, len(items), per_chunk):
            block = items[start: start + per_chunk]
            by_mapper = {}
            for j, (m, box) in enumerate(block):
                by_mapper.setdefault(m, []).append((j, box))
            for m, entries in by_mapper.items():
                nodes = [_nodes(box) for _, box in entries]
                U = np.concatenate([n[0] for n in nodes])
                V = np.concatenate([n[1] for n in nodes])
                W = np.concatenate([n[2] for n in nodes])
                x, jac = self.mappers[m](U, V)
                wt = W * jac
                live = wt != 0
                fx = None
                if np.any(live):
                    fx = np.asarray(self.integrand(x[live]))
                    fx = fx.reshape(int(live.sum()), -1)
                    self.ncomp = fx.shape[1]
                    self.evaluations += int(live.sum())
                if self.ncomp is None:
                    probe = np.asarray(self.integrand(np.array([1.0 + 1.0j])))
                    self.ncomp = int(probe.size)
                vals = np.zeros((U.size, self.ncomp), dtype=complex)
                if fx is not None:
                    vals[live] = fx
                contrib = (vals * wt[:, None]).reshape(len(entries), npb, self.ncomp)
                sums = kernels.block_sum(contrib)
                for (j, _), s in zip(entries, sums):
                    results[start + j] = s
        return np.array(results)


def _fsum_complex(arr):
    arr = np.asarray(arr)
    if arr.ndim == 1:
        arr = arr[:, None]
    re = [math.fsum(arr[:, c].real) for c in range(arr.shape[1])]
    im = [math.fsum(arr[:, c].imag) for c in range(arr.shape[1])]
    return np.array(re) + 1j * np.array(im)


def adaptive_integrate(integrand, patches, mappers, rtol=1e-7, atol=0.0,
                       max_cells=60000):
    """Globally adaptive tensor Gauss-Legendre integration over mapped patches.

    ``patches`` is a list of ``(mapper_index, (u0, u1, v0, v1), tag)``.
    Returns ``QuadratureResult`` with per-tag sums in ``groups``.
    """
    ev = _Evaluator(integrand, mappers)
    coarse = ev.boxes([(m, box) for m, box, _ in patches])
    leaves = [_Leaf(m, box, tag, coarse[i]) for i, (m, box, tag) in enumerate(patches)]
    _expand(ev, leaves)
    while True:
        values = np.array([lf.value for lf in leaves])
        errs = np.array([lf.err for lf in leaves])
        total = _fsum_complex(values)
        err = math.fsum(errs)
        scale = float(np.max(np.abs(total))) if total.size else 0.0
        target = max(atol, rtol * scale)
        if err <= target:
            break
        if len(leaves) >= max_cells:
            raise NoConvergence(
                f"quadrature budget exhausted: {len(leaves)} cells, error {err:.3e} > {target:.3e}")
        order = np.argsort(-errs, kind="stable")
        share = target / len(leaves)
        chosen = [int(i) for i in order[:512] if errs[i] > share]
        if not chosen:
            chosen = [int(order[0])]
        chosen_set = set(chosen)
        new_leaves, fresh = [], []
        for i, lf in enumerate(leaves):
            if i in chosen_set:
                for box, val in zip(_split(lf.box), lf.kids):
                    child = _Leaf(lf.mapper, box, lf.tag, val)
                    new_leaves.append(child)
                    fresh.append(child)
            else:
                new_leaves.append(lf)
        _expand(ev, fresh)
        leaves = new_leaves
    groups = {}
    for tag in sorted({lf.tag for lf in leaves}):
        groups[tag] = _fsum_complex(np.array([lf.value for lf in leaves if lf.tag == tag]))
    return QuadratureResult(total, err, len(leaves), ev.evaluations, groups)


def _expand(ev, leaves):
    items = []
    for lf in leaves:
        for box in _split(lf.box):
            items.append((lf.mapper, box))
    if not items:
        return
    vals = ev.boxes(items)
    for j, lf in enumerate(leaves):
        kids = vals[4 * j: 4 * j + 4]
        lf.kids = list(kids)
        lf.value = kids.sum(axis=0)
        lf.err = float(np.max(np.abs(lf.value - lf.coarse)))


# ---------------------------------------------------------------------------
# plane integration


def _layout(spec: QuadratureSpec):
    pts = [complex(s.point) for s in spec.singularities]
    if spec.pv_point is not None:
        pts.append(complex(spec.pv_point))
    mods = [abs(p) for p in pts]
    R = spec.radius if spec.radius is not None else 4.0 * max([1.0] + mods)
    if spec.truncate is not None:
        R = 2.0 * spec.truncate
    radii = []
    for i, p in enumerate(pts):
        others = [abs(p - q) for j, q in enumerate(pts) if j != i]
        rho = 0.4 * min(others) if others else 1.0
        rho = min(rho, 0.5 * (R - abs(p)))
        if spec.truncate is not None:
            rho = min(rho, spec.truncate - abs(p))
        if rho <= 0:
            raise ValueError("singularity outside the inner radius")
        radii.append(rho)
    return pts, radii, R


def integrate_plane(integrand: Callable, spec: QuadratureSpec = QuadratureSpec()) -> QuadratureResult:
    """Integrate ``integrand(x)`` over the complex plane w.r.t. area ``dA``.

    ``integrand`` maps a 1-D complex array to an array of shape ``(n,)`` or
    ``(n, m)``.  With ``spec.pv_point`` set, a symmetric disk of radius ``eps``
    around that point is excluded and the limit ``eps -> 0`` is taken by
    Richardson extrapolation over ``spec.pv_eps``.
    """
    for s in spec.singularities:
        if s.strength >= 2.0:
            raise SingularityTooStrong(f"|x - a|^-{s.strength} is not integrable in the plane")
    if spec.infinity_strength >= 2.0:
        raise SingularityTooStrong("integrand does not decay fast enough at infinity")
    pts, radii, R = _layout(spec)
    patches = []
    if spec.truncate is None:
        mappers = [_Cartesian(pts, radii, R, 2.0 * R)]
        n0 = 8
        h = 4.0 * R / n0
        for i in range(n0):
            for j in range(n0):
                patches.append((0, (-2 * R + i * h, -2 * R + (i + 1) * h,
                                    -2 * R + j * h, -2 * R + (j + 1) * h), "cart"))
    else:
        mappers = [_DiskRemainder(pts, radii)]
        T = spec.truncate
        for a in range(8):
            for b in range(4):
                patches.append((0, (b * T / 4, (b + 1) * T / 4, a * np.pi / 4, (a + 1) * np.pi / 4), "disk"))
    nsing = len(spec.singularities)
    for idx, (p, rho) in enumerate(zip(pts, radii)):
        if idx < nsing:
            k = spec.singularities[idx].power
            mappers.append(_Polar(p, rho, k))
            smax = rho ** (1.0 / k)
            for a in range(4):
                for b in range(2):
                    patches.append((len(mappers) - 1, (b * smax / 2, (b + 1) * smax / 2,
                                                       a * np.pi / 2, (a + 1) * np.pi / 2), f"sing{idx}"))
        else:
            mappers.append(_LogPolar(p, rho))
            cuts = sorted(spec.pv_eps) + [rho]
            for lo, hi in zip(cuts[:-1], cuts[1:]):
                for a in range(4):
                    patches.append((len(mappers) - 1, (math.log(lo), math.log(hi),
                                                       a * np.pi / 2, (a + 1) * np.pi / 2), f"pv>{lo!r}"))
    if spec.truncate is None:
        kinf = spec.infinity_power
        mappers.append(_Inverted(R, 2.0 * R, kinf))
        smax = (1.0 / R) ** (1.0 / kinf)
        for a in range(4):
            for b in range(2):
                patches.append((len(mappers) - 1, (b * smax / 2, (b + 1) * smax / 2,
                                                   a * np.pi / 2, (a + 1) * np.pi / 2), "inf"))
    res = adaptive_integrate(integrand, patches, mappers, spec.rtol, spec.atol,
                             spec.max_subdivisions)
    if spec.pv_point is None:
        return res
    return _richardson(res, spec)


def _richardson(res, spec):
    eps = sorted(spec.pv_eps, reverse=True)
    base = sum((v for t, v in res.groups.items() if not t.startswith("pv>")),
               np.zeros_like(res.value))
    pv_groups = {float(t[3:]): v for t, v in res.groups.items() if t.startswith("pv>")}
    lows = sorted(pv_groups)
    vals = []
    for e in eps:
        vals.append(base + sum((pv_groups[lo] for lo in lows if lo >= e), np.zeros_like(base)))
    # I(eps) = I0 + c eps^2 + O(eps^4): eliminate the eps^2 term pairwise.
    ext = []
    for (e1, v1), (e2, v2) in zip(zip(eps, vals), zip(eps[1:], vals[1:])):
        q = (e1 / e2) ** 2
        ext.append((q * v2 - v1) / (q - 1))
    value = ext[-1] if ext else vals[-1]
    diff = float(np.max(np.abs(ext[-1] - ext[-2]))) if len(ext) >= 2 else float(np.max(np.abs(vals[-1] - vals[-2])))
    return QuadratureResult(value, res.error + diff, res.cells, res.evaluations, res.groups, vals)
