import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.special import ellipk

from siegelcurv.errors import AmbiguousRank, NotPositiveDefinite, SingularityTooStrong
from siegelcurv.kernel import QuadratureSpec, Singularity, cholesky_hpd, decide_rank, integrate_plane, nullspace


def circle_average(rho):
    """(1/2pi) int dpsi / |1 - rho e^{i psi}| via the complete elliptic integral."""
    if rho < 1:
        return 2 * ellipk(rho ** 2) / math.pi
    return 2 * ellipk(rho ** -2) / (math.pi * rho)


def test_inverse_modulus_unit_disk():
    spec = QuadratureSpec(rtol=1e-10, singularities=(Singularity(0),), truncate=1.0)
    res = integrate_plane(lambda x: 1 / np.abs(x), spec)
    assert abs(res.scalar() - 2 * math.pi) < 1e-9


def test_gaussian_whole_plane():
    res = integrate_plane(lambda x: np.exp(-np.abs(x) ** 2), QuadratureSpec(rtol=1e-10))
    assert abs(res.scalar() - math.pi) < 1e-9


def test_two_point_singularity_against_elliptic_reduction():
    # r dr over |x| < 2 with u = r^2 becomes pi * int_0^4 avg(u) du
    oracle = math.pi * (quad(circle_average, 0, 1, limit=200)[0] + quad(circle_average, 1, 4, limit=200)[0])
    spec = QuadratureSpec(rtol=1e-9, singularities=(Singularity(1.0), Singularity(-1.0)), truncate=2.0)
    res = integrate_plane(lambda x: 1 / np.abs(x * x - 1), spec)
    assert abs(res.scalar() - oracle) <= 1e-5 * oracle
    assert res.error < 1e-6 * oracle


def test_principal_value_removes_double_pole():
    spec = QuadratureSpec(rtol=1e-10, pv_point=0.0, truncate=1.0)
    res = integrate_plane(lambda x: 1 + 1 / x ** 2, spec)
    assert abs(res.scalar() - math.pi) < 1e-9


def test_vector_valued_integrand():
    spec = QuadratureSpec(rtol=1e-10)
    res = integrate_plane(lambda x: np.stack([np.exp(-np.abs(x) ** 2), np.abs(x) ** 2 * np.exp(-np.abs(x) ** 2)], axis=1), spec)
    np.testing.assert_allclose(res.value.real, [math.pi, math.pi], rtol=1e-9)


def test_too_strong_singularity():
    with pytest.raises(SingularityTooStrong):
        integrate_plane(lambda x: 1 / np.abs(x) ** 2, QuadratureSpec(singularities=(Singularity(0, 1, 2.0),)))


@pytest.mark.parametrize("c", [3.7, -0.25 + 2j, 1e5])
def test_quadrature_scaling(c):
    spec = QuadratureSpec(rtol=1e-8, singularities=(Singularity(1.0), Singularity(-1.0)), truncate=2.0)
    f = lambda x: 1 / np.abs(x * x - 1)
    a = integrate_plane(f, spec).scalar()
    b = integrate_plane(lambda x: c * f(x), spec).scalar()
    assert abs(b - c * a) <= 1e-12 * abs(c * a)


def test_determinism():
    spec = QuadratureSpec(rtol=1e-8, singularities=(Singularity(0.3j, 2, 1.0),))
    f = lambda x: np.exp(-np.abs(x) ** 2) / np.sqrt(np.abs(x - 0.3j))
    a = integrate_plane(f, spec)
    b = integrate_plane(f, spec)
    assert a.value.tobytes() == b.value.tobytes()
    assert a.cells == b.cells and a.error == b.error


def test_nullspace_all_ones():
    N, d = nullspace(np.array([[1, 1], [1, 1]]))
    assert N.shape == (2, 1) and d.rank == 1
    v = N[:, 0] / N[0, 0] * abs(N[0, 0])
    np.testing.assert_allclose(v, np.array([1, -1]) / math.sqrt(2), atol=1e-15)


def test_nullspace_identity():
    N, d = nullspace(np.eye(3))
    assert N.shape == (3, 0) and d.rank == 3 and not d.ambiguous


def test_nullspace_from_factors(rng):
    A = rng.normal(size=(10, 4)) + 1j * rng.normal(size=(10, 4))
    B = rng.normal(size=(4, 6)) + 1j * rng.normal(size=(4, 6))
    M = A @ B
    N, d = nullspace(M)
    assert N.shape[1] == 2 and d.rank == 4 and d.gap > 1e10
    assert np.abs(M @ N).max() < 1e-12 * np.abs(M).max()
    # the nullspace of AB is the nullspace of B
    assert np.abs(B @ N).max() < 1e-12 * np.abs(B).max()


def test_ambiguous_rank_raises():
    M = np.diag(10.0 ** -np.arange(0, 16, 2))  # decades down to roundoff, no clean gap
    with pytest.raises(AmbiguousRank):
        nullspace(M)
    N, d = nullspace(M, raise_ambiguous=False)
    assert d.ambiguous


def test_decide_rank_gap():
    d = decide_rank([5.0, 3.0, 1e-9, 2e-10])
    assert d.rank == 2 and d.gap == pytest.approx(3e9)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_nullspace_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    M = (rng.normal(size=(7, 3)) + 1j * rng.normal(size=(7, 3))) @ (rng.normal(size=(3, 5)) + 1j * rng.normal(size=(3, 5)))
    U, _ = np.linalg.qr(rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))
    N1, d1 = nullspace(M)
    N2, d2 = nullspace(M @ U)
    assert N1.shape == N2.shape == (5, 2)
    assert d1.rank == d2.rank
    assert np.abs(M @ U @ N2).max() < 1e-12 * np.abs(M).max()
    # U N2 spans the same space as N1
    P1 = N1 @ N1.conj().T
    np.testing.assert_allclose(P1 @ (U @ N2), U @ N2, atol=1e-11)


def test_cholesky_identity():
    np.testing.assert_array_equal(cholesky_hpd(np.eye(3)), np.eye(3))


def test_cholesky_diagonal():
    np.testing.assert_allclose(cholesky_hpd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))


def test_cholesky_reconstruction(rng):
    A = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    G = A @ A.conj().T + np.eye(6)
    L = cholesky_hpd(G)
    assert np.allclose(L, np.tril(L))
    assert np.abs(L @ L.conj().T - G).max() < 1e-12 * np.abs(G).max()


def test_cholesky_rejects():
    with pytest.raises(NotPositiveDefinite):
        cholesky_hpd(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NotPositiveDefinite):
        cholesky_hpd(np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(NotPositiveDefinite):
        cholesky_hpd(np.array([[1.0, 1 - 1e-9], [1 - 1e-9, 1.0]]), min_eig_ratio=1e-6)
