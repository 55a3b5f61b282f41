"""Executable checks behind the volume-comparison and Gauss-map arguments.

The parallel flow is ``zeta(x, t) = x + t Phi(nu(x))``.  Its reach is
measured with the reversed-norm distance
``d(y) = min_{x in closure(Omega)} F°(y - x)``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import qmc

from . import minkowski as mk
from .errors import CoverageError, DomainError, GeometryError
from .quadrature import accurate_sum
from .regions import FullSpace, HalfSpace, avr, wulff_volume
from .sphere import fibonacci_sphere
from .surfaces import PolarPatch, curvature_from_geometry, integrate

UNBOUNDED = float("inf")
CHUNK = 65536


# ---------------------------------------------------------------------------
# cutoff and Jacobian


def tau_from_curvatures(kappa):
    """``1 / max kappa^{F*}`` with ``kappa^{F*} = -kappa^F``; infinite if none is positive."""
    kmin = np.min(np.asarray(kappa), axis=-1)
    with np.errstate(divide="ignore"):
        return np.where(kmin < 0, -1.0 / np.where(kmin < 0, kmin, -1.0), UNBOUNDED)


def tau(F, patch, u, reversed_form=False):
    """Flow cutoff at parameter ``u``.

    ``reversed_form`` evaluates the curvatures of ``F*`` with respect to
    ``-nu`` directly instead of using the sign flip.
    """
    geom = patch.geometry(u)
    if not reversed_form:
        return tau_from_curvatures(curvature_from_geometry(F, geom).principal)
    geom.normal = -geom.normal
    kstar = curvature_from_geometry(mk.reversal(F), geom).principal
    kmax = np.max(kstar, axis=-1)
    with np.errstate(divide="ignore"):
        return np.where(kmax > 0, 1.0 / np.where(kmax > 0, kmax, 1.0), UNBOUNDED)


def jacobian_from_curvatures(f_nu, kappa, t):
    t = np.asarray(t, dtype=float)
    return f_nu * np.prod(1.0 + t[..., None] * kappa, axis=-1)


def amgm_bound(f_nu, kappa, t):
    t = np.asarray(t, dtype=float)
    n = kappa.shape[-1]
    return f_nu * (1.0 + t * kappa.mean(axis=-1)) ** n


def flow_jacobian(F, patch, u, t, with_bound=False):
    """``F(nu) prod(1 + t kappa_i^F)``; optionally with its AM-GM majorant."""
    if np.any(np.asarray(t) < 0):
        raise DomainError("flow time must be non-negative")
    k = curvature_from_geometry(F, patch.geometry(u))
    f_nu = F.value(k.normal)
    j = jacobian_from_curvatures(f_nu, k.principal, t)
    return (j, amgm_bound(f_nu, k.principal, t)) if with_bound else j


@dataclass
class FlowField:
    F: object
    patch: object

    def zeta(self, u, t):
        u = np.asarray(u, dtype=float)
        nu = self.patch.normal(u)
        return self.patch.point(u) + np.asarray(t, dtype=float)[..., None] * self.F.grad(nu)

    def tau(self, u):
        return tau(self.F, self.patch, u)


@dataclass
class FlowSample:
    y: np.ndarray
    d: float
    x: np.ndarray = None
    t: float = None
    residual: float = None


# ---------------------------------------------------------------------------
# dual distance


def _polar_grid(count):
    k = np.arange(count + 1)
    s = 0.5 * (1 - np.cos(np.pi * k / count))
    psi = 2 * np.pi * np.arange(2 * count) / (2 * count)
    S, P = np.meshgrid(s, psi, indexing="ij")
    return np.stack([S.ravel(), P.ravel()], -1)


class ClosureSampler:
    """Node cloud of ``closure(Omega)``: surface nodes plus footprint nodes.

    ``Omega`` is bounded by the patch and, for clipped patches, the piece of
    the container boundary enclosed by the patch's boundary curve.
    """

    def __init__(self, F, patch, K=None, density=48, coarse=12):
        if not isinstance(patch, PolarPatch):
            raise DomainError("closure sampling needs a polar patch")
        self.F, self.patch = F, patch
        self.K = FullSpace() if K is None else K
        self.u = _polar_grid(density)
        self.x = patch.point(self.u)
        self.normals = patch.normal(np.clip(self.u, [1e-9, -np.inf], [1.0, np.inf]))
        self.footprint = self._footprint(density)
        self.u_coarse = _polar_grid(coarse)
        self.x_coarse = patch.point(self.u_coarse)
        self.foot_coarse = self._footprint(coarse)
        self.points = np.concatenate([self.x, self.footprint])
        if len(self.points) == 0:
            raise DomainError("empty closure sampler")
        self.tree = cKDTree(self.points)
        self.surface_tree = cKDTree(self.x)
        # distance to the 4th neighbour bounds the covering radius of the cloud
        self.spacing = float(self.tree.query(self.points, k=5)[0][:, -1].max())
        coarse_pts = np.concatenate([self.x_coarse, self.foot_coarse])
        self.coarse_spacing = float(cKDTree(coarse_pts).query(coarse_pts, k=5)[0][:, -1].max())
        wulff = F.grad(fibonacci_sphere(4000))
        radii = np.linalg.norm(wulff, axis=1)
        self.r_max = float(radii.max()) * (1 + 1e-3)
        self.r_min = float(radii.min()) * (1 - 1e-3)

    def _footprint(self, count):
        if not self.patch.has_boundary:
            return np.empty((0, 3))
        ub = self.patch.boundary_parameters(2 * count)
        b = self.patch.point(ub)
        center = self.patch.center
        anchor = center if abs(float(self.K.slack(center))) <= 1e-12 else b.mean(axis=0)
        lam = np.linspace(0.0, 1.0, count + 1)[:-1]
        pts = anchor + lam[:, None, None] * (b - anchor)[None]
        return pts.reshape(-1, 3)

    def inside(self, y, margin=0.0):
        """Sign test against the Euclidean-nearest surface node.

        With ``margin > 0`` only points at least that far on the inner
        side are reported, which makes the test reliable.
        """
        y = np.asarray(y, dtype=float)
        _, j = self.surface_tree.query(y)
        side = np.einsum("ij,ij->i", y - self.x[j], self.normals[j])
        return (side < -margin) & self.K.contains(y)

    def bounds(self, R):
        """Axis box containing every point within dual distance ``R``."""
        e = np.eye(3)
        lo = self.points.min(axis=0) - R * self.F.value(-e)
        hi = self.points.max(axis=0) + R * self.F.value(e)
        if isinstance(self.K, HalfSpace) and self.K.is_cone:
            n = self.K.inward
            axis = int(np.argmax(np.abs(n)))
            if np.isclose(abs(n[axis]), 1.0):
                if n[axis] > 0:
                    lo[axis] = max(lo[axis], 0.0)
                else:
                    hi[axis] = min(hi[axis], 0.0)
        if np.any(hi <= lo):
            raise GeometryError("degenerate sampling box")
        return lo, hi


def _to_chart(u):
    return np.stack([u[:, 0] * np.cos(u[:, 1]), u[:, 0] * np.sin(u[:, 1])], -1)


def _from_chart(w, s_max):
    s = np.minimum(np.hypot(w[:, 0], w[:, 1]), s_max)
    return np.stack([s, np.arctan2(w[:, 1], w[:, 0])], -1)


def _newton(g, w, iters, h):
    """Damped Newton with difference derivatives, vectorized over rows of ``w``."""
    val = g(w)
    lam = np.full(len(w), 1e-6)
    dim = w.shape[1]
    eye = np.eye(dim) * h
    for _ in range(iters):
        plus = [g(w + eye[i]) for i in range(dim)]
        minus = [g(w - eye[i]) for i in range(dim)]
        grad = np.stack([(p - m) / (2 * h) for p, m in zip(plus, minus)], -1)
        hess = np.empty((len(w), dim, dim))
        for i in range(dim):
            hess[:, i, i] = (plus[i] - 2 * val + minus[i]) / h**2
            for j in range(i + 1, dim):
                pp, mm = g(w + eye[i] + eye[j]), g(w - eye[i] - eye[j])
                hij = (pp - plus[i] - plus[j] + 2 * val - minus[i] - minus[j] + mm) / (2 * h**2)
                hess[:, i, j] = hess[:, j, i] = hij
        a = hess + lam[:, None, None] * np.eye(dim)
        ok = np.all(np.linalg.eigvalsh(a) > 0, axis=1)
        step = np.where(ok[:, None], 0.0, -1e-2 * grad)
        if np.any(ok):
            step[ok] = -np.linalg.solve(a[ok], grad[ok][..., None])[..., 0]
        trial = w + step
        tv = g(trial)
        better = tv < val
        w = np.where(better[:, None], trial, w)
        val = np.where(better, tv, val)
        lam = np.where(better, lam * 0.1, lam * 10.0)
        if np.all(np.abs(grad).max(axis=1) < 1e-13):
            break
    return val, w


def refine_distance(sampler, y, u0, iters=30, h=1e-5):
    """Local minimum of ``F°(y - X(u))`` over the patch near ``u0``.

    Newton runs in Cartesian pole coordinates on the patch extended past
    its boundary; minimizers that land outside are moved to a 1-D search
    along the boundary curve.
    """
    F, patch = sampler.F, sampler.patch
    if patch.has_boundary:
        c = patch.clip_angle or np.pi / 2
        s_max = min(1.5, 0.99 * np.pi / c)
    else:
        # past s = 1 the polar map continues over the antipodal pole
        s_max = 1.99
    # the squared distance is far better conditioned close to the surface
    val, w = _newton(lambda wv: F.dual(y - patch.point(_from_chart(wv, s_max))) ** 2,
                     _to_chart(u0), iters, h)
    u = _from_chart(w, s_max)
    outside = u[:, 0] > 1.0
    if not patch.has_boundary:
        u[outside] = np.stack([2.0 - u[outside, 0], u[outside, 1] + np.pi], -1)
    elif np.any(outside):
        yo = y[outside]
        psi0 = u[outside, 1:2]

        def on_curve(p):
            return F.dual(yo - patch.point(np.concatenate([np.ones_like(p), p], -1))) ** 2

        bval, bpsi = _newton(on_curve, psi0, iters, h)
        val[outside] = bval
        u[outside] = np.concatenate([np.ones_like(bpsi), bpsi], -1)
    return np.sqrt(val), u


def dual_distance(F, sampler, y, return_preimage=False):
    """``min_{x in closure(Omega)} F°(y - x)``; zero inside ``Omega``."""
    if sampler is None or len(sampler.points) == 0:
        raise DomainError("empty closure sampler")
    y = np.atleast_2d(np.asarray(y, dtype=float))
    out = np.empty(len(y))
    pre_u = np.full((len(y), 2), np.nan)
    for a in range(0, len(y), CHUNK):
        yy = y[a:a + CHUNK]
        d, u = _distance_chunk(sampler, yy)
        out[a:a + CHUNK], pre_u[a:a + CHUNK] = d, u
    if return_preimage:
        return out, pre_u
    return out


def _coarse_min(sampler, y, starts=1):
    """Best ``starts`` coarse surface nodes per point (ascending) and the footprint minimum."""
    F = sampler.F
    best = np.full((len(y), starts), np.inf)
    arg = np.zeros((len(y), starts), dtype=int)
    rows = np.arange(len(y))[:, None]
    for j0 in range(0, len(sampler.x_coarse), 64):
        block = sampler.x_coarse[j0:j0 + 64]
        vals = np.concatenate([best, F.dual(y[:, None, :] - block[None, :, :])], axis=1)
        idx = np.concatenate([arg, np.broadcast_to(j0 + np.arange(len(block)),
                                                   (len(y), len(block)))], axis=1)
        k = np.argsort(vals, axis=1, kind="stable")[:, :starts]
        best, arg = vals[rows, k], idx[rows, k]
    foot = np.full(len(y), np.inf)
    if len(sampler.foot_coarse):
        foot = F.dual(y[:, None, :] - sampler.foot_coarse[None]).min(axis=1)
    if starts == 1:
        return best[:, 0], arg[:, 0], foot
    return best, arg, foot


def _distance_chunk(sampler, y, starts=4):
    d, u = np.zeros(len(y)), np.full((len(y), 2), np.nan)
    out = ~sampler.inside(y, margin=2 * sampler.spacing)
    if not np.any(out):
        return d, u
    yo = y[out]
    best, arg, foot = _coarse_min(sampler, yo, starts)
    # non-convex patches give several local minima: refine from the best few nodes
    n = len(yo)
    refined, uo = refine_distance(sampler, np.repeat(yo, starts, axis=0),
                                  sampler.u_coarse[arg.ravel()])
    refined = refined.reshape(n, starts)
    pick = np.argmin(refined, axis=1)
    refined = refined[np.arange(n), pick]
    uo = uo.reshape(n, starts, 2)[np.arange(n), pick]
    best = best[:, 0]
    # at a critical point an inner point sees the normal pointing away
    x = sampler.patch.point(uo)
    nu = sampler.patch.normal(np.clip(uo, [1e-9, -np.inf], [1.0, np.inf]))
    inner = np.einsum("ij,ij->i", yo - x, nu) < 0
    surf = np.minimum(best, refined)
    use_foot = foot < surf
    dist = np.where(use_foot, foot, surf)
    dist[inner & ~use_foot] = 0.0
    uo[use_foot | inner] = np.nan
    d[out], u[out] = dist, uo
    return d, u


# ---------------------------------------------------------------------------
# neighbourhood volume


@dataclass
class VolumeComparison:
    R: float
    samples: int
    seed: int
    mc_volume: float
    sigma: float
    half_width_99: float
    bound: float
    omega_volume: float
    verdict: bool
    ratio: float
    avr_target: float
    ratio_error: float


def enclosed_volume(patch, order=64):
    """``|Omega| = 1/3 ∫ <x, nu> dA``; valid when the container is a cone at the origin."""
    return integrate(patch, lambda g: np.einsum("ij,ij->i", g.x, g.normal), order) / 3.0


def neighbourhood_bound(F, patch, R, order=64):
    """``|Omega| + ∫_Sigma ∫_0^{min(R, tau)} J dt dA`` in closed form in ``t``."""
    def integrand(geom):
        k = curvature_from_geometry(F, geom)
        T = np.minimum(R, tau_from_curvatures(k.principal))
        k1, k2 = k.principal[:, 0], k.principal[:, 1]
        return F.value(k.normal) * (T + (k1 + k2) * T**2 / 2 + k1 * k2 * T**3 / 3)

    vol = enclosed_volume(patch, order)
    return vol + integrate(patch, integrand, order), vol


def classify_points(sampler, y, R):
    """Boolean mask of ``d(y) <= R`` for points already inside the container.

    Cheap two-sided bounds settle most points; only those in a thin shell
    around the level ``R`` get the full minimization.
    """
    F = sampler.F
    lip = 1.0 / sampler.r_min
    e, j = sampler.tree.query(y)
    keep = F.dual(y - sampler.points[j]) <= R
    todo = ~keep & ((e - sampler.spacing) / sampler.r_max <= R)
    if np.any(todo):
        yt = y[todo]
        best, _, foot = _coarse_min(sampler, yt)
        best = np.minimum(best, foot)
        sub = best <= R
        open_ = ~sub & (best - lip * sampler.coarse_spacing <= R)
        if np.any(open_):
            sub[open_] = dual_distance(F, sampler, yt[open_]) <= R
        keep[todo] = sub
    return keep


def neighborhood_volume_check(F, K, patch, R, samples=1_000_000, seed=0, order=64,
                              strata=8, threads=1):
    if R <= 0:
        raise DomainError("R must be positive")
    if samples < 10_000:
        raise DomainError("need at least 1e4 samples")
    sampler = ClosureSampler(F, patch, K)
    lo, hi = sampler.bounds(R)
    per = int(np.ceil(samples / strata**3))
    cell = (hi - lo) / strata
    cell_vol = float(np.prod(cell))
    idx = np.array(np.meshgrid(*[np.arange(strata)] * 3, indexing="ij")).reshape(3, -1).T
    # every stratum has its own stream, so results do not depend on threading
    y = np.concatenate([
        lo + (idx[k] + np.random.default_rng([seed, k]).random((per, 3))) * cell
        for k in range(len(idx))
    ])
    label = np.repeat(np.arange(len(idx)), per)
    inK = K.contains(y)
    y, label = y[inK], label[inK]

    def run(a):
        return classify_points(sampler, y[a:a + CHUNK], R)

    hit = np.concatenate(_map(run, range(0, len(y), CHUNK), threads) or [np.zeros(0, bool)])
    p = np.bincount(label[hit], minlength=len(idx)) / per
    mc = cell_vol * accurate_sum(p)
    sigma = cell_vol * np.sqrt(accurate_sum(p * (1 - p) / per))
    bound, omega = neighbourhood_bound(F, patch, R, order)
    target = avr(F, K).value * wulff_volume(F)
    ratio = mc / R**3
    return VolumeComparison(
        R=float(R), samples=int(per * len(idx)), seed=int(seed), mc_volume=float(mc),
        sigma=float(sigma), half_width_99=float(2.576 * sigma), bound=float(bound),
        omega_volume=float(omega), verdict=bool(mc <= bound + 3 * sigma),
        ratio=float(ratio), avr_target=float(target),
        ratio_error=float(abs(ratio - target) / target),
    )


def _map(func, items, threads):
    items = list(items)
    if threads <= 1:
        return [func(i) for i in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(func, items))


def inclusion_spotcheck(F, K, patch, R, samples=2000, seed=0, tol=1e-6):
    """Flow preimages ``(x, t)`` of sampled points of the ``R``-neighbourhood."""
    sampler = ClosureSampler(F, patch, K)
    lo, hi = sampler.bounds(R)
    rng = np.random.default_rng(seed)
    found = []
    while sum(len(f) for f in found) < samples:
        y = lo + rng.random((4 * samples, 3)) * (hi - lo)
        y = y[K.contains(y) & ~sampler.inside(y)]
        found.append(y)
    y = np.concatenate(found)
    d, u = dual_distance(F, sampler, y, return_preimage=True)
    sel = (d <= R) & ~np.isnan(u[:, 0])
    y, d, u = y[sel][:samples], d[sel][:samples], u[sel][:samples]
    excluded = int(np.sum(sel[: len(sel)]) - len(y))
    if len(y) == 0:
        return {"checked": 0, "fraction": None, "max_residual": None, "max_excess": None}
    x = patch.point(u)
    nu = patch.normal(u)
    resid = np.linalg.norm(x + d[:, None] * F.grad(nu) - y, axis=1)
    cut = np.minimum(R, tau(F, patch, u))
    excess = d - cut
    ok = (resid <= tol * np.maximum(1.0, np.linalg.norm(y, axis=1))) & (excess <= tol)
    return {
        "checked": int(len(y)),
        "fraction": float(ok.mean()),
        "max_residual": float(resid.max()),
        "max_excess": float(excess.max()),
        "excluded": excluded,
        "samples": [FlowSample(y[i], float(d[i]), x[i], float(d[i]), float(resid[i]))
                    for i in range(min(5, len(y)))],
    }


# ---------------------------------------------------------------------------
# Gauss-map coverage


@dataclass
class CoverageResult:
    targets: int
    hits: int
    hit_fraction: float
    max_residual: float
    min_eigenvalue: float
    jacobian_error: float
    missed: list


def target_set(F, mode, count, omega0=None):
    """Quasi-uniform points of the unit Wulff shape in the target portion."""
    def keep(y):
        if mode == "free_boundary":
            return y[:, 2] >= 0
        return -y[:, 2] <= omega0

    probe = F.grad(fibonacci_sphere(20000))
    frac = max(keep(probe).mean(), 1e-3)
    y = F.grad(fibonacci_sphere(int(np.ceil(count / frac))))
    return y[keep(y)]


def _gauss_map(F, patch, u):
    geom = patch.geometry(u)
    nu = geom.normal
    xu = geom.xu
    g = np.swapaxes(xu, -1, -2) @ xu
    second = -np.einsum("...i,...ijk->...jk", nu, geom.xuu)
    dnu = xu @ np.linalg.solve(g, second)
    return F.grad(nu), F.hess(nu) @ dnu, geom


def _clamp(patch, u):
    (a1, b1), (a2, b2) = patch.bounds
    u = u.copy()
    # keep off the pole, where the polar parameterization degenerates
    u[:, 0] = np.clip(u[:, 0], a1 + 1e-7 * (b1 - a1), b1)
    if patch.periodic:
        u[:, 1] = a2 + np.mod(u[:, 1] - a2, b2 - a2)
    else:
        u[:, 1] = np.clip(u[:, 1], a2, b2)
    return u


def solve_gauss_map(F, patch, y, starts=32, iters=60, tol=1e-12):
    """Levenberg-Marquardt search for ``nu_F(u) = y`` from low-discrepancy starts."""
    (a1, b1), (a2, b2) = patch.bounds
    grid = qmc.Halton(2, scramble=False).random(starts + 1)[1:]
    u0 = np.stack([a1 + grid[:, 0] * (b1 - a1), a2 + grid[:, 1] * (b2 - a2)], -1)
    nuf0 = F.grad(patch.normal(u0))
    # best few starts per target by initial misfit
    dist = np.linalg.norm(y[:, None, :] - nuf0[None], axis=-1)
    order = np.argsort(dist, axis=1)[:, :4]
    n, k = len(y), order.shape[1]
    u = u0[order].reshape(-1, 2)
    yy = np.repeat(y, k, axis=0)
    lam = np.full(len(u), 1e-3)
    r = F.grad(patch.normal(u)) - yy
    cost = np.sum(r * r, axis=1)
    for _ in range(iters):
        nuf, J, _ = _gauss_map(F, patch, u)
        r = nuf - yy
        JtJ = np.swapaxes(J, -1, -2) @ J
        Jtr = np.einsum("nij,ni->nj", J, r)
        A = JtJ + lam[:, None, None] * np.eye(2)
        step = -np.linalg.solve(A, Jtr[..., None])[..., 0]
        trial = _clamp(patch, u + step)
        rt = F.grad(patch.normal(trial)) - yy
        ct = np.sum(rt * rt, axis=1)
        better = ct < cost
        u = np.where(better[:, None], trial, u)
        cost = np.where(better, ct, cost)
        lam = np.where(better, np.maximum(lam * 0.2, 1e-15), lam * 5.0)
        if np.all(cost < tol**2):
            break
    cost = cost.reshape(n, k)
    pick = np.argmin(cost, axis=1)
    u = u.reshape(n, k, 2)[np.arange(n), pick]
    return u, np.sqrt(cost[np.arange(n), pick])


def gauss_coverage_check(F, patch, mode="free_boundary", targets=200, seed=0, omega0=None,
                         residual_tol=1e-8, psd_tol=1e-8, jacobian_samples=100,
                         raise_on_miss=False):
    """Every target point of the Wulff shape is ``nu_F`` of a convex point of the patch."""
    if mode not in ("free_boundary", "capillary"):
        raise DomainError("mode must be 'free_boundary' or 'capillary'")
    if mode == "capillary":
        lo, hi = mk.omega_range(F)
        if omega0 is None or not lo < omega0 < hi:
            raise DomainError("capillary mode needs omega0 in its admissible range")
    y = target_set(F, mode, targets, omega0)
    u, resid = solve_gauss_map(F, patch, y)
    k = curvature_from_geometry(F, patch.geometry(u))
    min_eig = k.principal.min(axis=1)
    hit = (resid <= residual_tol) & (min_eig >= -psd_tol)
    missed = y[~hit]
    if raise_on_miss and len(missed):
        raise CoverageError(f"{len(missed)} unreachable targets", missed=missed.tolist())
    rng = np.random.default_rng(seed)
    pool = np.flatnonzero(hit)
    pick = rng.choice(pool, size=min(jacobian_samples, len(pool)), replace=False) \
        if len(pool) else pool
    jac_err = _jacobian_identity_error(F, patch, u[pick]) if len(pick) else float("nan")
    return CoverageResult(
        targets=int(len(y)), hits=int(hit.sum()), hit_fraction=float(hit.mean()),
        max_residual=float(resid.max()), min_eigenvalue=float(min_eig.min()),
        jacobian_error=jac_err, missed=missed.tolist(),
    )


def _jacobian_identity_error(F, patch, u, h=1e-6):
    """Max relative gap between the area ratio of ``nu_F`` (by differences) and ``H_n^F``."""
    (a1, b1), _ = patch.bounds
    u = u.copy()
    u[:, 0] = np.clip(u[:, 0], a1 + 2 * h, b1 - 2 * h)
    cols = []
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        cols.append((F.grad(patch.normal(u + e)) - F.grad(patch.normal(u - e))) / (2 * h))
    area_nuf = np.linalg.norm(np.cross(cols[0], cols[1]), axis=1)
    geom = patch.geometry(u)
    gauss = curvature_from_geometry(F, geom).gauss
    ratio = area_nuf / geom.area
    return float(np.max(np.abs(ratio - np.abs(gauss)) / np.maximum(np.abs(gauss), 1e-12)))
