"""The fundamental-domain integral fixing the Siegel Kahler class as ``pi`` times lambda."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence
from .kernel.quadrature import _Affine, adaptive_integrate

LAMBDA_PAIRING = 1.0 / 12.0  # <lambda, E_l / [Gamma : Gamma_l]>, classical input


def _domain_mapper(u, s):
    # (u, s) in (-1/2, 1/2) x (0, 1]  ->  z = u + i sqrt(1 - u^2) / s, which
    # sweeps |Re z| < 1/2, |z| > 1 with dA = sqrt(1 - u^2) / s^2 du ds.
    root = np.sqrt(1.0 - u * u)
    return u + 1j * root / s, root / (s * s)


def hyperbolic_integral(density, x_range=(-0.5, 0.5), tol=1e-12, max_cells=4000):
    """``int_D density(z) dA`` over (a vertical slice of) the modular fundamental domain."""
    lo, hi = x_range
    patches = [(0, (lo + (hi - lo) * k / 4, lo + (hi - lo) * (k + 1) / 4, 0.0, 1.0), "D")
               for k in range(4)]
    res = adaptive_integrate(lambda z: density(z), patches, [_Affine(_domain_mapper)],
                             rtol=tol, atol=0.0, max_cells=max_cells)
    return float(res.value[0].real), float(res.error)


def kahler_density(z, metric_scale=1.0):
    """``i/(8 Im(z)^2) dz ^ dzbar`` as a density in ``dA`` (``i dz ^ dzbar = 2 dA``)."""
    return metric_scale * 2.0 / (8.0 * np.imag(z) ** 2)


@dataclass(frozen=True)
class ClassComputation:
    integral: float
    error: float
    c: float
    metric_scale: float = 1.0
    pairing: float = LAMBDA_PAIRING

    def record(self):
        return json.dumps({"integral": "%.17g" % self.integral, "error": "%.17g" % self.error,
                           "c": "%.17g" % self.c}, sort_keys=True)


def fundamental_domain_integral(tolerance=1e-12, metric_scale=1.0, x_range=(-0.5, 0.5)):
    if tolerance < 1e-14:
        raise ValueError("tolerance below attainable double precision")
    return hyperbolic_integral(lambda z: kahler_density(z, metric_scale), x_range, tolerance)


def hyperbolic_area(tolerance=1e-12):
    return hyperbolic_integral(lambda z: 1.0 / np.imag(z) ** 2, tol=tolerance)


def area_oracle():
    """``int_{-1/2}^{1/2} dx / sqrt(1 - x^2)`` in closed form."""
    return 2.0 * math.asin(0.5)


def class_constant(tolerance=1e-12, metric_scale=1.0) -> ClassComputation:
    integral, err = fundamental_domain_integral(tolerance, metric_scale)
    c = integral / LAMBDA_PAIRING
    if abs(c - math.pi * metric_scale) > 1e-7 * max(1.0, metric_scale):
        raise NoConvergence(f"class constant {c!r} misses pi * {metric_scale}")
    return ClassComputation(integral, err, c, metric_scale)
