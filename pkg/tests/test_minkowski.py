import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import unit_vectors, vectors
from oracles import brute_dual, fd_grad, fd_hess
from wulff_willmore import minkowski as mk
from wulff_willmore.errors import DomainError, InvalidNormError, NumericalError

PI3 = np.pi / 3
E3 = np.array([0.0, 0.0, 1.0])


def analytic_norms():
    return [
        mk.euclidean(),
        mk.capillary(PI3),
        mk.capillary(2.5),
        mk.ellipsoidal(np.diag([1.0, 1.0, 4.0])),
        mk.ellipsoidal([[2.0, 0.3, 0.1], [0.3, 1.0, -0.2], [0.1, -0.2, 0.7]]),
        mk.tilt(mk.ellipsoidal(np.diag([1.0, 2.0, 0.5])), 0.3)[0],
    ]


NORMS = analytic_norms()
IDS = ["euclidean", "cap_pi3", "cap_2.5", "ellip_diag", "ellip_full", "tilted_ellip"]


# -- Cahn-Hoffman map --------------------------------------------------------

def test_cahn_hoffman_euclidean_pole():
    assert np.allclose(mk.cahn_hoffman(mk.euclidean(), E3), E3, atol=1e-15)


def test_cahn_hoffman_capillary_pole():
    phi = mk.cahn_hoffman(mk.capillary(PI3), E3)
    assert np.allclose(phi, [0.0, 0.0, 0.5], atol=1e-15)
    f = lambda x: np.linalg.norm(x) - np.cos(PI3) * x[2]
    assert np.allclose(fd_grad(f, E3), phi, atol=1e-8)


def test_cahn_hoffman_rejects_non_unit():
    with pytest.raises(DomainError):
        mk.cahn_hoffman(mk.euclidean(), [0.0, 0.0, 1.1])


@pytest.mark.parametrize("F", NORMS, ids=IDS)
def test_grad_matches_finite_differences(F):
    rng = np.random.default_rng(3)
    for x in rng.normal(size=(5, 3)):
        assert np.allclose(F.grad(x), fd_grad(lambda v: F.value(v), x), atol=1e-7)
        assert np.allclose(F.hess(x), fd_hess(lambda v: F.value(v), x), atol=1e-5)


@pytest.mark.parametrize("F", NORMS, ids=IDS)
@given(z=unit_vectors())
def test_phi_pairing_and_dual_unit(F, z):
    phi = mk.cahn_hoffman(F, z)
    assert abs(phi @ z - F.value(z)) <= 1e-12 * F.value(z)
    assert abs(F.dual(phi) - 1.0) <= 1e-8


# -- dual norm ---------------------------------------------------------------

def test_dual_euclidean():
    assert mk.dual_norm(mk.euclidean(), [3.0, 4.0, 0.0]) == pytest.approx(5.0, abs=1e-14)


def test_dual_capillary_pole():
    # frozen from the quadratic root and a brute-force grid supremum
    assert mk.dual_norm(mk.capillary(PI3), E3) == pytest.approx(2.0, abs=1e-14)
    cap = lambda z: np.linalg.norm(z, axis=-1) - np.cos(PI3) * z[..., 2]
    assert brute_dual(cap, E3) == pytest.approx(2.0, abs=1e-9)


def test_dual_capillary_generic_point():
    x = np.array([0.3, -0.5, 0.2])
    assert mk.dual_norm(mk.capillary(PI3), x) == pytest.approx(0.857518699413348, rel=1e-12)


def test_dual_zero():
    for F in NORMS:
        assert F.dual(np.zeros(3)) == 0.0
    assert mk.numeric_dual(mk.capillary(PI3), np.zeros(3))[0] == 0.0


@pytest.mark.parametrize("F", NORMS, ids=IDS)
def test_numeric_dual_agrees_with_closed_form(F):
    x = np.random.default_rng(5).normal(size=(200, 3))
    val, z = mk.numeric_dual(F, x)
    assert np.allclose(val, F.dual(x), rtol=1e-12)
    assert np.allclose(np.linalg.norm(z, axis=-1), 1.0)


@pytest.mark.parametrize("F", NORMS[1:4], ids=IDS[1:4])
def test_dual_against_brute_force(F):
    x = np.array([0.7, -0.2, 1.3])
    assert F.dual(x) == pytest.approx(brute_dual(F.value, x), rel=1e-9)


def test_numeric_dual_failure_carries_lower_bound():
    F = mk.ellipsoidal(np.diag([1.0, 1.0, 4.0]))
    settings = mk.DualNorm(starts=2, maxiter=1, accept_tol=1e-14)
    with pytest.raises(NumericalError) as info:
        mk.numeric_dual(F, np.array([[1.0, 2.0, 3.0]]), settings)
    assert info.value.best[0] <= F.dual(np.array([1.0, 2.0, 3.0])) + 1e-12


@pytest.mark.parametrize("F", NORMS, ids=IDS)
@given(x=vectors(), xi=vectors(), t=st.floats(0.01, 10.0))
def test_dual_properties(F, x, xi, t):
    fx = F.dual(x)
    assert abs(F.dual(t * x) - t * fx) <= 1e-12 * t * fx
    assert x @ xi <= fx * F.value(xi) * (1 + 1e-12)
    assert F.dual(x + xi) <= (fx + F.dual(xi)) * (1 + 1e-12)


@pytest.mark.parametrize("F", NORMS, ids=IDS)
@given(xi=vectors(), t=st.floats(1e-3, 10.0))
def test_homogeneity(F, xi, t):
    assert abs(F.value(t * xi) - t * F.value(xi)) <= 1e-10 * t * F.value(xi)


# -- Hessian operator --------------------------------------------------------

def test_hessian_operator_euclidean_identity():
    z = np.random.default_rng(0).normal(size=(50, 3))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    a = mk.hessian_operator(mk.euclidean(), z)
    assert np.allclose(a, np.eye(2), atol=1e-14)


def test_hessian_operator_capillary_identity():
    z = np.random.default_rng(1).normal(size=(50, 3))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    assert np.allclose(mk.hessian_operator(mk.capillary(PI3), z), np.eye(2), atol=1e-14)
    # finite-difference oracle at one point
    f = lambda x: np.linalg.norm(x) - np.cos(PI3) * x[2]
    t = np.linalg.svd(np.eye(3) - np.outer(z[0], z[0]))[0][:, :2]
    assert np.allclose(t.T @ fd_hess(f, z[0]) @ t, np.eye(2), atol=1e-6)


def test_hessian_operator_ellipsoidal_positive():
    a = mk.hessian_operator(mk.ellipsoidal(np.diag([1.0, 1.0, 4.0])), [1.0, 0.0, 0.0])
    w = np.linalg.eigvalsh(a)
    assert np.all(w > 0)
    # oracle: D^2F at e1 restricted to e1^perp is diag(1, 4)
    assert np.allclose(sorted(w), [1.0, 4.0], atol=1e-14)


def test_hessian_operator_is_deterministic():
    F = mk.ellipsoidal(np.diag([1.0, 2.0, 3.0]))
    z = np.array([0.6, 0.0, 0.8])
    assert np.array_equal(mk.hessian_operator(F, z), mk.hessian_operator(F, z))


def test_invalid_matrix_rejected():
    with pytest.raises(InvalidNormError):
        mk.ellipsoidal(np.diag([1.0, -1.0, 1.0]))


def test_dimension_below_three_rejected():
    with pytest.raises(DomainError):
        mk.euclidean(2)


# -- reversal, tilt, capillary vector ----------------------------------------

def test_reversal_euclidean_is_euclidean():
    F = mk.euclidean()
    assert mk.reversal(F) is F


def test_reversal_capillary_value():
    th = 1.1
    Fr = mk.reversal(mk.capillary(th))
    z = np.random.default_rng(2).normal(size=(20, 3))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    assert np.allclose(Fr.value(z), 1 + np.cos(th) * z[:, 2], atol=1e-15)


@pytest.mark.parametrize("F", NORMS + [mk.reversal(mk.ellipsoidal(np.diag([1, 2, 3.0])))],
                         ids=IDS + ["reversed_ellip"])
def test_reversal_identities(F):
    Fr = mk.reversal(F)
    rng = np.random.default_rng(4)
    z = rng.normal(size=(100, 3))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    x = rng.normal(size=(100, 3))
    assert np.allclose(Fr.dual(x), F.dual(-x), rtol=1e-12)
    assert np.allclose(Fr.grad(z) + F.grad(-z), 0.0, atol=1e-10)
    assert np.allclose(mk.reversal(Fr).value(z), F.value(z), rtol=1e-15)


def test_tilt_of_euclidean_is_capillary():
    th = 0.9
    Ft, cv = mk.tilt(mk.euclidean(), -np.cos(th))
    assert np.allclose(cv.vector, E3)
    z = np.random.default_rng(6).normal(size=(30, 3))
    assert np.allclose(Ft.value(z), mk.capillary(th).value(z), rtol=1e-15)


def test_tilt_zero_is_identity():
    F = mk.ellipsoidal(np.diag([1.0, 2.0, 3.0]))
    Ft, cv = mk.tilt(F, 0.0)
    assert Ft is F and np.allclose(cv.vector, E3)


@pytest.mark.parametrize("F", NORMS, ids=IDS)
@given(frac=st.floats(0.01, 0.99), z=unit_vectors())
def test_tilt_positivity_and_pairing(F, frac, z):
    lo, hi = mk.omega_range(F)
    w = lo + frac * (hi - lo)
    Ft, cv = mk.tilt(F, w)
    assert Ft.value(z) > 0
    assert cv.vector @ E3 == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("F", NORMS, ids=IDS)
def test_tilt_consistency(F):
    Ft, cv = mk.tilt(F, 0.6 * mk.omega_range(F)[1])
    z = np.random.default_rng(7).normal(size=(200, 3))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    assert np.allclose(mk.hessian_operator(Ft, z), mk.hessian_operator(F, z), atol=1e-10)
    # translated Wulff shape
    p = F.grad(z) + 0.6 * mk.omega_range(F)[1] * cv.vector
    assert np.allclose(Ft.dual(p), 1.0, atol=1e-10)


def test_omega_out_of_range():
    F = mk.euclidean()
    for w in (-1.0, 1.0, 2.0):
        with pytest.raises(DomainError):
            mk.tilt(F, w)


def test_capillary_vector_branches():
    F = mk.ellipsoidal([[2.0, 0.3, 0.1], [0.3, 1.0, -0.2], [0.1, -0.2, 0.7]])
    pos = mk.capillary_vector(F, 0.2).vector
    neg = mk.capillary_vector(F, -0.2).vector
    assert np.allclose(pos, -F.grad(-E3) / F.value(-E3))
    assert np.allclose(neg, F.grad(E3) / F.value(E3))
    assert np.allclose(mk.capillary_vector(F, 0.0).vector, E3)
    for v in (pos, neg):
        assert v @ E3 == pytest.approx(1.0, abs=1e-14)


def test_capillary_theta_range():
    for th in (0.0, np.pi, -0.1):
        with pytest.raises(DomainError, match=r"theta0 out of open interval \(0, π\)"):
            mk.capillary(th)


# -- angle comparison --------------------------------------------------------

def test_angle_comparison_euclidean_orthogonal_midpoint():
    x, z = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])
    y = (x + z) / np.sqrt(2)
    F = mk.euclidean()
    assert F.grad(x) @ z == pytest.approx(0.0, abs=1e-15)
    assert F.grad(y) @ z == pytest.approx(np.sqrt(2) / 2)


def test_angle_comparison_equality_at_x():
    F = mk.capillary(PI3)
    x = np.array([0.6, 0.0, 0.8])
    z = np.array([0.0, 0.6, 0.8])
    assert F.grad(x) @ z == F.grad(x.copy()) @ z


@pytest.mark.parametrize("F", NORMS, ids=IDS)
def test_angle_comparison_check(F):
    res = mk.angle_comparison_check(F, 10_000, seed=11)
    assert res.passed and res.worst_margin >= 0 and res.trials > 9_900


def test_angle_comparison_needs_trials():
    with pytest.raises(DomainError):
        mk.angle_comparison_check(mk.euclidean(), 0)


# -- sampled family ----------------------------------------------------------

def test_sampled_norm_fit_and_duals(sampled_norm):
    F = sampled_norm
    assert F.fit_residual < 1e-10
    z = np.random.default_rng(8).normal(size=(300, 3))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    truth = 1 + 0.15 * z[:, 0] ** 2 - 0.1 * z[:, 1] * z[:, 2] + 0.05 * z[:, 2] ** 3
    assert np.allclose(F.value(z), truth, atol=1e-10)
    assert np.allclose(F.dual(F.grad(z)), 1.0, atol=1e-8)


def test_sampled_norm_from_csv(tmp_path):
    from wulff_willmore.sphere import fibonacci_sphere
    pts = fibonacci_sphere(300, 3)
    M = np.diag([1.0, 2.0, 3.0])
    vals = np.sqrt(np.einsum("ij,jk,ik->i", pts, M, pts))
    path = tmp_path / "table.csv"
    np.savetxt(path, np.column_stack([pts, vals]), delimiter=",")
    # sqrt of a quadratic is not a polynomial, so the default tolerance refuses it
    from wulff_willmore.errors import EvaluationError
    with pytest.raises(EvaluationError):
        mk.SampledNorm.from_csv(path)
    F = mk.SampledNorm.from_csv(path, degree=10, fit_tol=1e-3)
    assert F.value(pts).shape == (300,)


def test_sampled_norm_rejects_nonpositive():
    from wulff_willmore.sphere import fibonacci_sphere
    pts = fibonacci_sphere(100, 3)
    with pytest.raises(InvalidNormError):
        mk.SampledNorm(pts, pts[:, 2])
