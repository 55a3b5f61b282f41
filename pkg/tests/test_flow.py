import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wulff_willmore import minkowski as mk
from wulff_willmore.errors import CoverageError, DomainError
from wulff_willmore.flow import (
    ClosureSampler, FlowField, amgm_bound, dual_distance, flow_jacobian,
    gauss_coverage_check, inclusion_spotcheck, neighborhood_volume_check,
    neighbourhood_bound, tau, tau_from_curvatures,
)
from wulff_willmore.regions import FullSpace, HalfSpace
from wulff_willmore.surfaces import PolarPatch, graph_patch, sphere_cap, wulff_patch

UPPER = HalfSpace([0.0, 0.0, 1.0])
ELL = mk.ellipsoidal([[2.0, 0.3, 0.0], [0.3, 1.0, 0.1], [0.0, 0.1, 0.6]])


def interior_nodes(n=50, seed=0):
    rng = np.random.default_rng(seed)
    return np.stack([rng.uniform(0.05, 0.95, n), rng.uniform(0, 2 * np.pi, n)], -1)


# -- cutoff ------------------------------------------------------------------

def test_tau_examples():
    u = interior_nodes(10)
    assert np.all(np.isinf(tau(mk.euclidean(), sphere_cap(), u)))
    assert np.all(np.isinf(tau(ELL, wulff_patch(ELL), u)))
    saddle = graph_patch(lambda v: v[..., 0] ** 2 - v[..., 1] ** 2)
    assert tau(mk.euclidean(), saddle, np.zeros((1, 2)))[0] == pytest.approx(0.5, rel=1e-6)


def test_tau_from_curvatures_signs():
    k = np.array([[1.0, 2.0], [-4.0, 1.0], [0.0, 0.0]])
    assert np.allclose(tau_from_curvatures(k), [np.inf, 0.25, np.inf])


@pytest.mark.parametrize("F", [mk.euclidean(), ELL, mk.capillary(1.1),
                               mk.tilt(ELL, 0.2)[0]])
def test_tau_reversed_norm_agrees(F):
    patch = PolarPatch(F, 1.0, amplitude=0.3, mode=(2, 1))
    u = interior_nodes(40, 3)
    a, b = tau(F, patch, u), tau(F, patch, u, reversed_form=True)
    fin = np.isfinite(a)
    assert np.array_equal(fin, np.isfinite(b)) and fin.any()
    assert np.allclose(a[fin], b[fin], rtol=1e-8)


# -- Jacobian ----------------------------------------------------------------

def test_flow_jacobian_examples():
    u = interior_nodes(20)
    assert np.allclose(flow_jacobian(mk.euclidean(), sphere_cap(), u, np.ones(20)), 4.0)
    t = np.linspace(0.0, 3.0, 20)
    patch = wulff_patch(ELL)
    j, bound = flow_jacobian(ELL, patch, u, t, with_bound=True)
    f_nu = ELL.value(patch.normal(u))
    assert np.allclose(j, f_nu * (1 + t) ** 2, rtol=1e-9)
    # umbilic: AM-GM is an equality
    assert np.allclose(j, bound, rtol=1e-12)


def test_flow_jacobian_rejects_negative_time():
    with pytest.raises(DomainError):
        flow_jacobian(mk.euclidean(), sphere_cap(), interior_nodes(2), [-1.0, 0.0])


def test_amgm_bound_formula():
    k = np.array([[1.0, 3.0]])
    assert amgm_bound(2.0, k, 1.0)[0] == pytest.approx(2.0 * 9.0)


@pytest.mark.parametrize("F", [mk.euclidean(), ELL, mk.capillary(2.0)])
def test_jacobian_positive_below_cutoff_and_amgm(F):
    patch = PolarPatch(F, 1.0, amplitude=0.4, mode=(3, 2))
    rng = np.random.default_rng(11)
    u = interior_nodes(1000, 5)
    cut = np.minimum(tau(F, patch, u), 5.0)
    t = rng.uniform(0.0, 1.0, 1000) * cut * (1 - 1e-9)
    j, bound = flow_jacobian(F, patch, u, t, with_bound=True)
    assert np.all(j > 0)
    assert np.all(j <= bound * (1 + 1e-12) + 1e-14)


# -- dual distance -----------------------------------------------------------

@pytest.mark.parametrize("F", [mk.euclidean(), ELL, mk.capillary(1.0)])
def test_dual_distance_inverts_flow_on_wulff_shape(F):
    patch = wulff_patch(F)
    sampler = ClosureSampler(F, patch)
    u = interior_nodes(30, 2)
    t = np.linspace(0.05, 2.0, 30)
    y = FlowField(F, patch).zeta(u, t)
    assert np.allclose(dual_distance(F, sampler, y), t, atol=1e-8)


def test_dual_distance_examples():
    F = mk.euclidean()
    sampler = ClosureSampler(F, sphere_cap())
    d = dual_distance(F, sampler, np.array([[0.0, 0.0, 3.0], [0.1, 0.2, 0.0]]))
    assert d[0] == pytest.approx(2.0, abs=1e-9)
    assert d[1] == 0.0


def test_dual_distance_uses_reversed_direction():
    # capillary Wulff shape: distance from the flat side differs from the round side
    F = mk.capillary(np.pi / 3)
    sampler = ClosureSampler(F, wulff_patch(F))
    y = np.array([[0.0, 0.0, 0.5 + 1.0], [0.0, 0.0, -1.5 - 1.0]])
    d = dual_distance(F, sampler, y)
    # F°(x) for the capillary norm satisfies |x + F°(x) cos e3| = F°(x)
    expected = [mk.capillary(np.pi / 3).dual(np.array([[0, 0, 1.0]]))[0],
                mk.capillary(np.pi / 3).dual(np.array([[0, 0, -1.0]]))[0]]
    assert np.allclose(d, expected, atol=1e-8)


def test_dual_distance_half_ball_footprint():
    F = mk.euclidean()
    sampler = ClosureSampler(F, sphere_cap(clip=UPPER), UPPER)
    # below the flat disk the closest point is on the footprint, which is only
    # resolved to the node spacing (such points lie outside the container)
    d = dual_distance(F, sampler, np.array([[0.2, 0.1, -0.5]]))
    assert 0.5 - 1e-12 <= d[0] <= 0.5 + sampler.spacing


# -- volume comparison -------------------------------------------------------

@pytest.mark.parametrize("K,patch,frac", [
    (FullSpace(), sphere_cap(), 1.0),
    (UPPER, sphere_cap(clip=UPPER), 0.5),
])
def test_volume_comparison_ball(K, patch, frac):
    R = 1.0
    res = neighborhood_volume_check(mk.euclidean(), K, patch, R, samples=40_000, seed=4)
    exact = frac * 4 * np.pi / 3 * (1 + R) ** 3
    assert res.bound == pytest.approx(exact, rel=1e-10)
    assert abs(res.mc_volume - exact) <= 4 * res.sigma
    assert res.verdict


def test_volume_comparison_perturbed_below_bound():
    F = ELL
    patch = PolarPatch(F, 1.0, amplitude=0.15, mode=(2, 0))
    res = neighborhood_volume_check(F, FullSpace(), patch, 1.5, samples=40_000, seed=1)
    assert res.verdict
    assert res.mc_volume <= res.bound + 3 * res.sigma


def test_volume_comparison_is_thread_independent():
    args = (mk.euclidean(), UPPER, sphere_cap(clip=UPPER), 2.0)
    a = neighborhood_volume_check(*args, samples=20_000, seed=9, threads=1)
    b = neighborhood_volume_check(*args, samples=20_000, seed=9, threads=4)
    assert a == b


def test_neighbourhood_bound_wulff_cap():
    F = mk.capillary(np.pi / 3)
    patch = wulff_patch(F, region=UPPER)
    bound, vol = neighbourhood_bound(F, patch, 2.0)
    # closed-form: the Wulff cap grows homothetically, so the bound is |Omega| (1+R)^3
    assert bound == pytest.approx(vol * 27.0, rel=1e-10)


def test_volume_check_domain_errors():
    with pytest.raises(DomainError):
        neighborhood_volume_check(mk.euclidean(), FullSpace(), sphere_cap(), -1.0)
    with pytest.raises(DomainError):
        neighborhood_volume_check(mk.euclidean(), FullSpace(), sphere_cap(), 1.0, samples=10)


# -- inclusion and coverage --------------------------------------------------

def test_inclusion_spotcheck_hemisphere():
    res = inclusion_spotcheck(mk.euclidean(), UPPER, sphere_cap(clip=UPPER), 1.0, samples=200)
    assert res["checked"] == 200
    assert res["fraction"] == 1.0
    assert res["max_residual"] <= 1e-6


def test_coverage_hemisphere():
    res = gauss_coverage_check(mk.euclidean(), sphere_cap(clip=UPPER), targets=100)
    assert res.hit_fraction == 1.0
    assert res.max_residual <= 1e-8
    assert res.jacobian_error <= 1e-6


def test_coverage_capillary_mode():
    th = np.pi / 3
    patch = sphere_cap(center=[0, 0, -np.cos(th)], clip=UPPER)
    res = gauss_coverage_check(mk.euclidean(), patch, "capillary", targets=100,
                               omega0=-np.cos(th))
    assert res.hit_fraction == 1.0


def test_coverage_reports_misses():
    # a cap smaller than a hemisphere cannot reach the equator of the unit sphere
    patch = sphere_cap(center=[0, 0, -0.5], clip=UPPER)
    res = gauss_coverage_check(mk.euclidean(), patch, targets=100)
    assert res.hit_fraction < 1.0 and res.missed
    with pytest.raises(CoverageError):
        gauss_coverage_check(mk.euclidean(), patch, targets=100, raise_on_miss=True)


def test_coverage_mode_errors():
    with pytest.raises(DomainError):
        gauss_coverage_check(mk.euclidean(), sphere_cap(clip=UPPER), "bogus")
    with pytest.raises(DomainError):
        gauss_coverage_check(mk.euclidean(), sphere_cap(clip=UPPER), "capillary")


@settings(max_examples=10)
@given(st.floats(0.3, 2.5), st.floats(-0.3, 0.3))
def test_dual_distance_lower_bounds_flow_time(t, amp):
    # d(zeta(x, t)) <= t always, with equality below the cutoff on convex patches
    F = ELL
    patch = PolarPatch(F, 1.0, amplitude=amp, mode=(2, 0))
    sampler = ClosureSampler(F, patch)
    u = interior_nodes(10, 8)
    d = dual_distance(F, sampler, FlowField(F, patch).zeta(u, np.full(10, t)))
    assert np.all(d <= t + 1e-8)
