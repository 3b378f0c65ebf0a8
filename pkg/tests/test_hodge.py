import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import ellipk

from siegelcurv import curves
from siegelcurv.hodge import (GramCache, alpha_from, build_frame, gram_matrix, gram_quadrature_spec,
                              orthonormal_frame, schiffer_matrix, schiffer_norm, sym_inner)
from siegelcurv.kernel import integrate_plane


def _avg(rho):
    if rho < 1:
        return 2 * ellipk(rho ** 2) / math.pi
    return 2 * ellipk(rho ** -2) / (math.pi * rho)


def quintic_hyperelliptic_oracle(a):
    """G_aa for y^2 = x^5 - 1 and x^a dx/y: 8 pi int r^{2a+1} avg(r^5) dr."""
    f = lambda r: r ** (2 * a + 1) * _avg(r ** 5)
    kw = dict(limit=400, epsabs=0, epsrel=1e-12)
    return 8 * math.pi * (quad(f, 0, 1, **kw)[0] + quad(f, 1, np.inf, **kw)[0])


def test_sextic_gram_is_diagonal(frames):
    G = frames.frame("sextic").G
    assert abs(G[0, 1]) <= 1e-6 * np.abs(G).max()
    assert G[0, 0].real == pytest.approx(G[1, 1].real, rel=1e-7)  # x -> 1/x symmetry


def test_genus2_gram_against_elliptic_reduction(frames):
    G = frames.frame("g2").G
    for a in (0, 1):
        ref = quintic_hyperelliptic_oracle(a)
        assert abs(G[a, a] - ref) <= 1e-4 * ref
    assert abs(G[0, 1]) <= 1e-6 * np.abs(G).max()


def test_basis_scaling_quadruples_entry():
    curve = curves.hyperelliptic([1, 0, 0, 0, 0, 0, -1])
    basis = curves.differential_basis(curve)
    spec = gram_quadrature_spec(curve, 1e-8)
    w = np.array([2.0, 1.0])

    def scaled(x):
        H = curves.sheet_values(curve, x, basis) * w
        return (2.0 * np.einsum("nsi,nsj->nij", H, H.conj())).reshape(x.size, 4)

    G = gram_matrix(curve, basis, spec).G
    G2 = np.asarray(integrate_plane(scaled, spec).value).reshape(2, 2)
    assert G2[0, 0] == pytest.approx(4 * G[0, 0], rel=1e-8)
    assert G2[1, 1] == pytest.approx(G[1, 1], rel=1e-8)


def test_orthonormal_frame_examples(rng):
    np.testing.assert_allclose(orthonormal_frame(np.eye(3)), np.eye(3))
    np.testing.assert_allclose(orthonormal_frame(np.diag([4.0, 9.0])), np.diag([0.5, 1 / 3]))
    A = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    G = A @ A.conj().T + 0.1 * np.eye(5)
    T = orthonormal_frame(G)
    np.testing.assert_allclose(T @ G @ T.conj().T, np.eye(5), atol=1e-10)


@pytest.mark.parametrize("name", ["g2", "g3", "tri4", "quintic"])
def test_frame_is_orthonormal(frames, name):
    fr = frames.frame(name)
    np.testing.assert_allclose(fr.T @ fr.G @ fr.T.conj().T, np.eye(fr.genus), atol=1e-10)
    assert fr.report["relative_error"] < 1e-6


def test_alpha_positive_and_hermitian(frames):
    fr = frames.frame("g3")
    pts = curves.sample_points(fr.curve, 6, 21)
    for P in pts:
        a = fr.alpha(P, P)
        assert a.real > 0 and abs(a.imag) <= 1e-15 * a.real
        for S in pts:
            assert fr.alpha(P, S) == pytest.approx(np.conj(fr.alpha(S, P)), abs=1e-15)


def test_alpha_at_origin_of_sextic(frames):
    fr = frames.frame("sextic")
    P = curves.point_at(fr.curve, 0.0, 0)
    assert fr.alpha(P, P).real == pytest.approx(1 / fr.G[0, 0].real, rel=1e-12)


def test_schiffer_matrix_properties(frames):
    fr = frames.frame("g4")
    for P in curves.sample_points(fr.curve, 4, 3):
        A = schiffer_matrix(fr, P).A
        s = np.linalg.svd(A, compute_uv=False)
        assert s[1] < 1e-14 * s[0]
        f = fr.values(P)
        assert np.trace(A) == pytest.approx(2 * math.pi * np.sum(f ** 2), rel=1e-13)
        c = 0.7 - 1.3j
        np.testing.assert_allclose(schiffer_matrix(fr, P.rescaled(c)).A, c ** 2 * A, rtol=1e-10)


def test_sym_inner_delta_formula(rng):
    E12 = np.array([[0, 0.5], [0.5, 0]])
    E11 = np.array([[1.0, 0], [0, 0]])
    assert sym_inner(E12, E12) == pytest.approx(1.0)
    assert sym_inner(E11, E11) == pytest.approx(2.0)
    for _ in range(10):
        B = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        A = B + B.T
        assert sym_inner(A, A).real > 0


@pytest.mark.parametrize("name", ["g3", "tri4", "quintic"])
def test_scalar_product_of_schiffer_variations(frames, name):
    fr = frames.frame(name)
    pts = curves.sample_points(fr.curve, 6, 4)
    for P in pts:
        for S in pts:
            a = fr.alpha(P, S)
            lhs = sym_inner(fr.schiffer(P), fr.schiffer(S))
            assert abs(lhs - 8 * math.pi ** 2 * a ** 2) <= 1e-8 * (8 * math.pi ** 2 * abs(a) ** 2 + 1)


def test_schiffer_norm(frames):
    fr = frames.frame("g3")
    for P in curves.sample_points(fr.curve, 5, 5):
        n = schiffer_norm(fr, P)
        assert n == pytest.approx(math.sqrt(sym_inner(fr.schiffer(P), fr.schiffer(P)).real), rel=1e-12)
        A = fr.schiffer(P).A / n
        assert sym_inner(A, A).real == pytest.approx(1.0, rel=1e-12)


def test_frame_rotation_invariance(frames, rng):
    fr = frames.frame("quintic")
    U, _ = np.linalg.qr(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    rot = fr.rotated(U)
    pts = curves.sample_points(fr.curve, 5, 6)
    for P in pts:
        assert rot.alpha(P, P).real == pytest.approx(fr.alpha(P, P).real, rel=1e-8)
        assert alpha_from(rot.values(P), rot.values(pts[0])) == pytest.approx(fr.alpha(P, pts[0]), rel=1e-8)
        assert sym_inner(rot.schiffer(P), rot.schiffer(pts[0])) == pytest.approx(
            sym_inner(fr.schiffer(P), fr.schiffer(pts[0])), rel=1e-8)


def test_cache_round_trip_is_bit_exact(tmp_path):
    curve = curves.hyperelliptic([-1, 0, 0, 0, 0, 1])
    cache = GramCache(tmp_path)
    cold = build_frame(curve, 1e-6, cache)
    warm = build_frame(curve, 1e-6, cache)
    assert not cold.report["cached"] and warm.report["cached"]
    assert cold.G.tobytes() == warm.G.tobytes()
    assert cold.hash == warm.hash
    assert len(list(tmp_path.glob("gram-*.json"))) == 1
    # a different tolerance is a different key
    build_frame(curve, 1e-5, cache)
    assert len(list(tmp_path.glob("gram-*.json"))) == 2
