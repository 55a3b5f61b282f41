"""Unbounded closed convex regions in R^3 and Wulff-ball volumes inside them.

Every built-in region is a cone with apex at the origin (so it equals its
tangent cone at infinity), except :class:`HalfSpace` with a nonzero offset.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, NumericalError, SingularPointError
from .quadrature import accurate_sum, gauss_legendre, tensor_rule
from .sphere import frame, normalize, polar_point

BOUNDARY_TOL = 1e-8
DEFAULT_ORDER = 96


@dataclass
class SphericalRule:
    """Nodes on the unit sphere with area weights."""

    points: np.ndarray
    weights: np.ndarray


def _cap_rule(axis, angle, order, periodic_factor=2):
    u, w = tensor_rule(order, periodic_factor * order, ((0.0, angle), (0.0, 2 * np.pi)))
    rot = frame(axis)
    z = polar_point(u[:, 0], u[:, 1], rot)[0]
    return SphericalRule(z, w * np.sin(u[:, 0]))


class ConvexRegion:
    kind = "region"
    is_cone = True

    def contains(self, x, tol=0.0):
        return self.slack(x) >= -tol

    def slack(self, x):
        """Signed constraint value; non-negative exactly on the region."""
        raise NotImplementedError

    def boundary_normal(self, x):
        raise NotImplementedError

    def tangent_cone(self):
        return self

    def sphere_rule(self, order):
        raise NotImplementedError

    def describe(self):
        return {"kind": self.kind}

    # single-face regions can clip polar patches
    clip_axis = None

    def clip_function(self, x):
        raise GeometryError(f"{self.kind} cannot clip a polar patch")

    def sample_boundary(self, count, rng, radius=3.0):
        """Random points on the regular part of the boundary."""
        raise NotImplementedError


class FullSpace(ConvexRegion):
    kind = "full_space"

    def slack(self, x):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape[:-1], np.inf)

    def boundary_normal(self, x):
        raise GeometryError("full space has no boundary")

    def sphere_rule(self, order):
        return _cap_rule([0.0, 0.0, 1.0], np.pi, order)

    def sample_boundary(self, count, rng, radius=3.0):
        return np.empty((0, 3))


class HalfSpace(ConvexRegion):
    """``{x : <x, n> >= offset}`` with ``n`` the inward unit normal."""

    kind = "half_space"

    def __init__(self, inward=(0.0, 0.0, 1.0), offset=0.0):
        inward = np.asarray(inward, dtype=float)
        if np.linalg.norm(inward) == 0:
            raise GeometryError("half-space normal must be nonzero")
        self.inward = normalize(inward)
        self.offset = float(offset)
        self.is_cone = self.offset == 0.0

    def slack(self, x):
        return np.asarray(x, dtype=float) @ self.inward - self.offset

    def boundary_normal(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(np.abs(self.slack(x)) > BOUNDARY_TOL * np.maximum(1, np.linalg.norm(x, axis=-1))):
            raise GeometryError("point is not on the half-space boundary")
        return np.broadcast_to(-self.inward, x.shape).copy()

    def tangent_cone(self):
        return self if self.is_cone else HalfSpace(self.inward)

    def sphere_rule(self, order):
        if not self.is_cone:
            raise GeometryError("shifted half-space is not a cone")
        return _cap_rule(self.inward, 0.5 * np.pi, order)

    @property
    def clip_axis(self):
        return self.inward

    def clip_function(self, x):
        return self.slack(x)

    def sample_boundary(self, count, rng, radius=3.0):
        rot = frame(self.inward)
        t = rng.uniform(-radius, radius, size=(count, 2))
        return self.offset * self.inward + t @ rot[:, :2].T

    def describe(self):
        return {"kind": self.kind, "normal": self.inward.tolist(), "offset": self.offset}


class CircularCone(ConvexRegion):
    """``{x : angle(x, axis) <= alpha}`` with ``0 < alpha < pi/2``."""

    kind = "circular_cone"

    def __init__(self, axis=(0.0, 0.0, 1.0), half_angle=np.pi / 4):
        if not 0.0 < half_angle < 0.5 * np.pi:
            raise GeometryError("cone half-angle must lie in (0, pi/2)")
        self.axis = normalize(np.asarray(axis, dtype=float))
        self.half_angle = float(half_angle)

    def slack(self, x):
        x = np.asarray(x, dtype=float)
        return x @ self.axis - np.linalg.norm(x, axis=-1) * np.cos(self.half_angle)

    def boundary_normal(self, x):
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x, axis=-1)
        if np.any(r <= BOUNDARY_TOL):
            raise SingularPointError("cone apex is a singular boundary point")
        if np.any(np.abs(self.slack(x)) > BOUNDARY_TOL * np.maximum(1, r)):
            raise GeometryError("point is not on the cone boundary")
        u = x / r[..., None]
        radial = normalize(u - (u @ self.axis)[..., None] * self.axis)
        a = self.half_angle
        return np.sin(a) * (-self.axis) + np.cos(a) * radial

    def sphere_rule(self, order):
        return _cap_rule(self.axis, self.half_angle, order)

    @property
    def clip_axis(self):
        return self.axis

    def clip_function(self, x):
        return self.slack(x)

    def sample_boundary(self, count, rng, radius=3.0):
        rot = frame(self.axis)
        psi = rng.uniform(0, 2 * np.pi, count)
        t = rng.uniform(0.05, radius, count)
        z = polar_point(np.full(count, self.half_angle), psi, rot)[0]
        return t[:, None] * z

    def describe(self):
        return {"kind": self.kind, "axis": self.axis.tolist(), "half_angle": self.half_angle}


class PolyhedralCone(ConvexRegion):
    """``{x : <x, n_i> <= 0}`` for outward face normals ``n_i``.

    The cone must be pointed (contain no line) once it has three or more
    faces; one face gives a half-space and two a wedge.
    """

    kind = "polyhedral_cone"

    def __init__(self, outward_normals):
        n = np.atleast_2d(np.asarray(outward_normals, dtype=float))
        if n.ndim != 2 or n.shape[1] != 3 or len(n) == 0:
            raise GeometryError("expected a list of 3-vectors")
        self.normals = normalize(n)
        self.rays = self._extreme_rays() if len(n) >= 3 else None

    def slack(self, x):
        return -np.max(np.asarray(x, dtype=float) @ self.normals.T, axis=-1)

    def _extreme_rays(self):
        n = self.normals
        rays = []
        for i in range(len(n)):
            for j in range(i + 1, len(n)):
                c = np.cross(n[i], n[j])
                if np.linalg.norm(c) < 1e-12:
                    continue
                c = normalize(c)
                for r in (c, -c):
                    if np.all(n @ r <= 1e-12):
                        rays.append(r)
        if len(rays) < 3:
            raise GeometryError("polyhedral cone must be pointed with nonempty interior")
        rays = np.unique(np.round(np.array(rays), 12), axis=0)
        centre = normalize(rays.sum(axis=0))
        if np.any(n @ centre >= -1e-12):
            raise GeometryError("polyhedral cone has empty interior")
        rot = frame(centre)
        loc = rays @ rot
        order = np.argsort(np.arctan2(loc[:, 1], loc[:, 0]))
        self.centre = centre
        return rays[order]

    def _active(self, x):
        vals = np.asarray(x, dtype=float) @ self.normals.T
        r = np.maximum(1.0, np.linalg.norm(x, axis=-1))
        return np.abs(vals) <= BOUNDARY_TOL * r[..., None]

    def boundary_normal(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(np.abs(self.slack(x)) > BOUNDARY_TOL * np.maximum(1, np.linalg.norm(x, axis=-1))):
            raise GeometryError("point is not on the cone boundary")
        active = self._active(x)
        if np.any(active.sum(axis=-1) != 1):
            raise SingularPointError("point lies on an edge or the apex")
        return self.normals[np.argmax(active, axis=-1)]

    def sphere_rule(self, order):
        if len(self.normals) == 1:
            return _cap_rule(-self.normals[0], 0.5 * np.pi, order)
        if len(self.normals) == 2:
            return Wedge(-self.normals[0], -self.normals[1]).sphere_rule(order)
        pts, wts = [], []
        u, w = tensor_rule(order, order, ((0.0, 1.0), (0.0, 1.0)))
        s, t = u[:, :1], u[:, 1:]
        c = self.centre
        for a, b in zip(self.rays, np.roll(self.rays, -1, axis=0)):
            p = c + s * ((a - c) + t * (b - a))
            norm = np.linalg.norm(p, axis=-1)
            det = abs(np.linalg.det(np.stack([c, a, b])))
            pts.append(p / norm[:, None])
            wts.append(w * u[:, 0] * det / norm**3)
        return SphericalRule(np.concatenate(pts), np.concatenate(wts))

    def sample_boundary(self, count, rng, radius=3.0):
        out = []
        if self.rays is None:
            raise GeometryError("use HalfSpace or Wedge for fewer than three faces")
        k = len(self.rays)
        for _ in range(count):
            i = rng.integers(k)
            a, b = self.rays[i], self.rays[(i + 1) % k]
            t = rng.uniform(0.05, 0.95)
            out.append(rng.uniform(0.05, radius) * normalize(a + t * (b - a)))
        return np.array(out)

    def describe(self):
        return {"kind": self.kind, "normals": self.normals.tolist()}


class Wedge(ConvexRegion):
    """Intersection of two half-spaces through the origin (inward normals)."""

    kind = "wedge"

    def __init__(self, inward1, inward2):
        n1 = normalize(np.asarray(inward1, dtype=float))
        n2 = normalize(np.asarray(inward2, dtype=float))
        edge = np.cross(n1, n2)
        if np.linalg.norm(edge) < 1e-12:
            raise GeometryError("wedge faces must not be parallel")
        self.n1, self.n2 = n1, n2
        self.edge = normalize(edge)
        a = normalize(np.cross(self.edge, n1))
        if a @ n2 < 0:
            a = -a
        self._a = a
        self.opening = float(np.arctan2(a @ n2, -(n1 @ n2)))

    @classmethod
    def from_angle(cls, beta, edge=(0.0, 1.0, 0.0)):
        """Wedge of dihedral angle ``beta`` along the given edge."""
        if not 0.0 < beta < np.pi:
            raise GeometryError("dihedral angle must lie in (0, pi)")
        e = normalize(np.asarray(edge, dtype=float))
        rot = frame(e)
        a, n1 = rot[:, 0], rot[:, 1]
        n2 = np.sin(beta) * a - np.cos(beta) * n1
        return cls(n1, n2)

    def slack(self, x):
        x = np.asarray(x, dtype=float)
        return np.minimum(x @ self.n1, x @ self.n2)

    def boundary_normal(self, x):
        x = np.asarray(x, dtype=float)
        r = np.maximum(1.0, np.linalg.norm(x, axis=-1))
        d1, d2 = x @ self.n1, x @ self.n2
        if np.any(np.abs(self.slack(x)) > BOUNDARY_TOL * r):
            raise GeometryError("point is not on the wedge boundary")
        on1 = np.abs(d1) <= BOUNDARY_TOL * r
        on2 = np.abs(d2) <= BOUNDARY_TOL * r
        if np.any(on1 & on2):
            raise SingularPointError("point lies on the wedge edge")
        return np.where(on1[..., None], -self.n1, -self.n2)

    def sphere_rule(self, order):
        # lune with the edge as pole
        u, w = tensor_rule(order, order, ((0.0, np.pi), (0.0, self.opening)))
        phi, psi = u[:, :1], u[:, 1:]
        z = (np.cos(phi) * self.edge
             + np.sin(phi) * (np.cos(psi) * self._a + np.sin(psi) * self.n1))
        return SphericalRule(z, w * np.sin(u[:, 0]))

    def sample_boundary(self, count, rng, radius=3.0):
        face = rng.integers(2, size=count)
        t = rng.uniform(0.05, radius, count)
        e = rng.uniform(-radius, radius, count)
        d2 = np.cos(self.opening) * self._a + np.sin(self.opening) * self.n1
        dirs = np.where(face[:, None] == 0, self._a, d2)
        return t[:, None] * dirs + e[:, None] * self.edge

    def describe(self):
        return {"kind": self.kind, "normals": [self.n1.tolist(), self.n2.tolist()],
                "opening": self.opening}


# ---------------------------------------------------------------------------
# volumes


@dataclass
class AvrResult:
    value: float
    order: int
    error: float


def contains(K, x):
    return K.contains(x)


def boundary_normal(K, x):
    return K.boundary_normal(x)


def _radial_integral(F, K, order):
    rule = K.sphere_rule(order)
    return accurate_sum(F.dual(rule.points) ** -3.0 * rule.weights) / 3.0


def _mc_volume(F, K, R, samples=200_000, seed=0):
    rng = np.random.default_rng(seed)
    # bounding box of the Wulff ball: |x_i| <= R * F(±e_i)
    e = np.eye(3)
    hi = R * F.value(e)
    lo = -R * F.value(-e)
    x = rng.uniform(lo, hi, size=(samples, 3))
    hit = (F.dual(x) <= R) & K.contains(x)
    box = float(np.prod(hi - lo))
    p = hit.mean()
    return box * p, 2.576 * box * np.sqrt(p * (1 - p) / samples)


def wulff_cone_volume(F, K, R, order=DEFAULT_ORDER, return_error=False):
    """``|W^F_R ∩ K|`` for a Wulff ball centred at the origin.

    Exact radial integration for cones; Monte-Carlo otherwise, in which
    case the error is a 99% confidence half-width.
    """
    if R <= 0:
        raise GeometryError("radius must be positive")
    if K.is_cone:
        base = _radial_integral(F, K, order)
        fine = _radial_integral(F, K, 2 * order)
        vol, err = R**3 * fine, R**3 * abs(fine - base)
    else:
        vol, err = _mc_volume(F, K, R)
    return (vol, err) if return_error else vol


def wulff_volume(F, order=DEFAULT_ORDER):
    return _radial_integral(F, FullSpace(), order)


def avr(F, K, order=DEFAULT_ORDER, tol=1e-8):
    """Asymptotic volume ratio ``|W ∩ K_inf| / |W|``."""
    if isinstance(K, FullSpace):
        return AvrResult(1.0, order, 0.0)
    cone = K.tangent_cone()
    whole, whole_err = wulff_cone_volume(F, FullSpace(), 1.0, order, True)
    part, part_err = wulff_cone_volume(F, cone, 1.0, order, True)
    value = part / whole
    err = value * (part_err / part + whole_err / whole)
    value = min(max(value, 0.0), 1.0)
    if err > tol:
        raise NumericalError(f"AVR quadrature error {err:.2e} exceeds {tol:.0e}", best=value)
    return AvrResult(value, order, err)


def avr_monotonicity_profile(F, K, r, R_grid, order=DEFAULT_ORDER, return_error=False):
    """``|W^F_{r+R} ∩ K| / R^3`` over an increasing radius grid.

    With ``return_error`` also the per-entry quadrature error estimates.
    """
    grid = np.asarray(R_grid, dtype=float)
    if r < 0 or np.any(np.diff(grid) <= 0) or np.any(grid <= 0):
        raise GeometryError("need r >= 0 and a positive increasing grid")
    pairs = [wulff_cone_volume(F, K, r + R, order, True) for R in grid]
    ratios = np.array([v for v, _ in pairs]) / grid**3
    if return_error:
        return ratios, np.array([e for _, e in pairs]) / grid**3
    return ratios


# ---------------------------------------------------------------------------
# construction from plain dictionaries


def region_from_dict(spec):
    kind = spec.get("kind", "full_space")
    if kind == "full_space":
        return FullSpace()
    if kind == "half_space":
        return HalfSpace(spec.get("normal", [0, 0, 1]), spec.get("offset", 0.0))
    if kind == "circular_cone":
        return CircularCone(spec.get("axis", [0, 0, 1]), spec["half_angle"])
    if kind == "wedge":
        if "angle" in spec:
            return Wedge.from_angle(spec["angle"], spec.get("edge", [0, 1, 0]))
        n = spec["normals"]
        return Wedge(n[0], n[1])
    if kind == "polyhedral_cone":
        return PolyhedralCone(spec["normals"])
    raise GeometryError(f"unknown region kind {kind!r}")
