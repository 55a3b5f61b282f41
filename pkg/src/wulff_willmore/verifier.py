"""Willmore-type inequalities: both sides, hypotheses, equality and rigidity."""

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import least_squares

from . import minkowski as mk
from .config import build, norm_from_dict, region_spec, surface_from_dict
from .errors import DomainError, GeometryError, SchemaError, TransversalityError
from .quadrature import accurate_sum, gauss_legendre
from .regions import HalfSpace, avr, wulff_cone_volume, wulff_volume
from .surfaces import PolarPatch, boundary_trace, curvature_from_geometry, integrate

DIM = 2  # hypersurface dimension n; the ambient space is R^3
THEOREMS = (
    "iso_convex",
    "aniso_convex",
    "aniso_free_boundary",
    "capillary_halfspace",
    "aniso_capillary_halfspace",
    "variant_prime",
)
HALF_SPACE_THEOREMS = THEOREMS[2:]
WEIGHTS = {
    "iso_convex": "plain",
    "aniso_convex": "plain",
    "aniso_free_boundary": "plain",
    "capillary_halfspace": "capillary",
    "aniso_capillary_halfspace": "tilted",
    "variant_prime": "plain",
}
STATUSES = ("pass", "fail", "hypothesis_failed", "equality")
E3 = np.array([0.0, 0.0, 1.0])


@dataclass
class Scenario:
    norm: dict
    region: dict
    surface: dict
    theorem: str
    order: int = 64
    tol: float = 1e-6
    seed: int = 0
    theta0: float = None
    omega0: float = None
    name: str = ""
    boundary_samples: int = 256
    hypothesis_tol: float = 1e-8
    base_dir: str = field(default=None, repr=False, compare=False)

    @classmethod
    def from_dict(cls, data, base_dir=None):
        if not isinstance(data, dict):
            raise SchemaError("scenario: expected an object")
        known = {f for f in cls.__dataclass_fields__ if f != "base_dir"}
        unknown = set(data) - known
        if unknown:
            raise SchemaError(f"scenario: unknown fields {sorted(unknown)}")
        for key in ("norm", "region", "surface", "theorem"):
            if key not in data:
                raise SchemaError(f"scenario: missing field {key!r}")
        sc = cls(**data, base_dir=base_dir)
        sc.validate()
        return sc

    def validate(self):
        if self.theorem not in THEOREMS:
            raise SchemaError(f"scenario: unknown theorem tag {self.theorem!r}")
        if not isinstance(self.order, int) or self.order < 2:
            raise SchemaError("scenario: order must be an integer >= 2")
        if not self.tol > 0:
            raise SchemaError("scenario: tol must be positive")
        if self.theta0 is not None and not 0.0 < self.theta0 < np.pi:
            raise SchemaError("scenario: theta0 out of open interval (0, π)")
        if self.theorem in HALF_SPACE_THEOREMS:
            reg = self.region
            if reg.get("kind") != "half_space" or reg.get("offset", 0.0) != 0.0 or \
                    not np.allclose(reg.get("normal", [0, 0, 1]), E3):
                raise SchemaError(f"scenario: {self.theorem} requires the half-space x3 >= 0")
        if self.theorem in ("aniso_capillary_halfspace", "variant_prime") and self.omega0 is None:
            raise SchemaError(f"scenario: {self.theorem} requires omega0")

    def to_dict(self):
        out = asdict(self)
        out.pop("base_dir")
        return out

    def with_surface(self, **changes):
        surface = dict(self.surface)
        surface.update(changes)
        data = self.to_dict()
        data["surface"] = surface
        return Scenario.from_dict(data, self.base_dir)


@dataclass
class VerificationReport:
    lhs: float
    rhs: float
    margin: float
    relative_margin: float
    status: str
    hypotheses: dict
    rigidity: dict
    identities: dict
    provenance: dict
    equality: bool = False
    lhs_error: float = 0.0
    rhs_error: float = 0.0

    def to_dict(self):
        return _jsonable(asdict(self))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if np.isfinite(obj) else None
    return obj


# ---------------------------------------------------------------------------
# the two sides


def _theta0(F, theta0):
    if theta0 is None:
        theta0 = getattr(F, "extra", {}).get("theta0")
    if theta0 is None:
        raise DomainError("theta0 is required for the capillary weight")
    if not 0.0 < theta0 < np.pi:
        raise DomainError("theta0 out of open interval (0, π)")
    return float(theta0)


def weight_function(F, weight, theta0=None, omega0=None):
    """Per-node weight multiplying ``|H^F|^n`` in the energy."""
    if weight == "plain":
        return lambda nu: F.value(nu)
    if weight == "capillary":
        c = np.cos(_theta0(F, theta0))
        return lambda nu: 1.0 - c * nu[..., 2]
    if weight == "tilted":
        cv = mk.capillary_vector(F, omega0)
        return lambda nu: F.value(nu) + cv.omega0 * (nu @ cv.vector)
    raise DomainError(f"unknown weight {weight!r}")


def willmore_lhs(F, patch, weight="plain", order=64, theta0=None, omega0=None):
    """``1/(n+1) ∫ w(nu) |H^F|^n dA``.

    For the capillary weight the curvature is the Euclidean one.
    """
    curv_norm = mk.euclidean() if weight == "capillary" else F
    w = weight_function(F, weight, theta0, omega0)

    def integrand(geom):
        k = curvature_from_geometry(curv_norm, geom)
        return w(geom.normal) * np.abs(k.mean) ** DIM

    return integrate(patch, integrand, order) / (DIM + 1)


def _tilted_boundary_integral(F, omega0, weight, order):
    cv = mk.capillary_vector(F, omega0)
    patch = PolarPatch(F, 1.0, omega0 * cv.vector, HalfSpace(E3))
    if weight == "plain":
        return integrate(patch, lambda g: F.value(g.normal), order)
    return integrate(
        patch, lambda g: F.value(g.normal) + omega0 * (g.normal @ cv.vector), order)


def willmore_rhs(F, K, theorem, theta0=None, omega0=None, order=96, return_error=False):
    """Right-hand constant of the inequality tagged ``theorem``."""
    half = HalfSpace(E3)
    err = 0.0
    if theorem == "iso_convex":
        res = avr(mk.euclidean(), K, order)
        value, err = res.value * 4.0 * np.pi / 3.0, res.error * 4.0 * np.pi / 3.0
    elif theorem == "aniso_convex":
        whole = wulff_volume(F, order)
        res = avr(F, K, order)
        value, err = res.value * whole, res.error * whole
    elif theorem == "aniso_free_boundary":
        value, err = wulff_cone_volume(F, half, 1.0, order, True)
    elif theorem == "capillary_halfspace":
        value, err = wulff_cone_volume(mk.capillary(_theta0(F, theta0)), half, 1.0, order, True)
    elif theorem == "aniso_capillary_halfspace":
        value, err = wulff_cone_volume(mk.tilt(F, omega0)[0], half, 1.0, order, True)
    elif theorem == "variant_prime":
        fine = _tilted_boundary_integral(F, omega0, "plain", order)
        coarse = _tilted_boundary_integral(F, omega0, "plain", order // 2)
        value, err = fine / (DIM + 1), abs(fine - coarse) / (DIM + 1)
    else:
        raise DomainError(f"unknown theorem tag {theorem!r}")
    return (value, err) if return_error else value


# ---------------------------------------------------------------------------
# identities


def identity_area_volume(F, omega0=0.0, order=64, volume_order=None):
    """Relative residuals of the two boundary-area / volume identities.

    First: ``∫ F(nu) dA`` over the Wulff boundary in the upper half-space
    against ``(n+1)`` times the enclosed volume.  Second: the same with the
    Wulff shape centred at ``omega0 E^F`` and weight ``F + omega0 <nu, E^F>``.
    """
    half = HalfSpace(E3)
    vorder = max(order, 96) if volume_order is None else int(volume_order)
    lhs1 = _tilted_boundary_integral(F, 0.0, "plain", order)
    rhs1 = (DIM + 1) * wulff_cone_volume(F, half, 1.0, vorder)
    lhs2 = _tilted_boundary_integral(F, omega0, "tilted", order)
    rhs2 = (DIM + 1) * wulff_cone_volume(mk.tilt(F, omega0)[0], half, 1.0, vorder)
    return abs(lhs1 - rhs1) / abs(rhs1), abs(lhs2 - rhs2) / abs(rhs2)


def footprint_area(patch, order=64):
    """Area enclosed by the boundary curve ``s = 1`` (Green's theorem)."""
    a, b = patch.bounds[1]
    psi, w = gauss_legendre(2 * order, a, b)
    u = np.stack([np.ones_like(psi), psi], axis=-1)
    x, xu, _ = patch.derivatives(u)
    if np.max(np.abs(x[:, 2])) > 1e-8:
        raise DomainError("boundary curve does not lie on the plane x3 = 0")
    dx = xu[:, :, 1]
    return abs(0.5 * accurate_sum(w * (x[:, 0] * dx[:, 1] - x[:, 1] * dx[:, 0])))


def identity_flux(patch, cv=None, order=64):
    """``∫ <nu, E^F> dA`` against the area of the planar footprint."""
    if not getattr(patch, "has_boundary", False) or \
            getattr(patch.clip, "kind", None) != "half_space":
        raise DomainError("flux identity needs a patch clipped by a half-space")
    vec = E3 if cv is None else np.asarray(cv.vector, dtype=float)
    flux = integrate(patch, lambda g: g.normal @ vec, order)
    area = footprint_area(patch, order)
    return {"flux": flux, "footprint": area,
            "residual": abs(flux - area) / max(abs(area), 1e-300)}


# ---------------------------------------------------------------------------
# rigidity


def wulff_fit(F, points, starts=None):
    """Least-squares fit of ``F°(x - x0) = r``; returns centre, radius, residual."""
    pts = np.asarray(points, dtype=float)
    centroid = pts.mean(axis=0)
    spread = float(np.max(np.linalg.norm(pts - centroid, axis=1)))
    if starts is None:
        starts = [centroid] + [centroid + s * 0.5 * spread * e
                               for e in np.eye(3) for s in (1, -1)]

    def resid(p):
        return F.dual(pts - p[:3]) - p[3]

    def jac(p):
        return np.hstack([-F.dual_grad(pts - p[:3]), -np.ones((len(pts), 1))])

    best = None
    for c in starts:
        r0 = float(np.mean(F.dual(pts - c)))
        sol = least_squares(resid, np.append(c, r0), jac=jac, xtol=1e-15, ftol=1e-15, gtol=1e-15,
                            method="lm")
        score = float(np.max(np.abs(sol.fun)))
        if best is None or score < best[2]:
            best = (sol.x[:3], float(sol.x[3]), score)
    return {"center": best[0].tolist(), "radius": best[1], "residual": best[2]}


def _cone_residual(F, K, center, radius, seed, count=512):
    rng = np.random.default_rng(seed)
    scale = 3.0 * (radius + float(np.linalg.norm(center)))
    pts = K.sample_boundary(count, rng, radius=scale)
    outside = F.dual(pts - center) > radius * (1 + 1e-6)
    pts = pts[outside]
    if len(pts) == 0:
        return 0.0, 0
    nbar = K.boundary_normal(pts)
    return float(np.max(np.abs(np.einsum("ij,ij->i", pts - center, nbar)))), int(len(pts))


def rigidity_probe(F, K, patch, theorem, tol, seed=0, nodes=12):
    u, _ = patch.quadrature(nodes)
    pts = patch.point(u)
    fit_norm = mk.euclidean() if theorem in ("iso_convex", "capillary_halfspace") else F
    fit = wulff_fit(fit_norm, pts)
    fit["threshold"] = 10.0 * tol * fit["radius"]
    fit["passed"] = fit["residual"] <= fit["threshold"]
    if theorem in ("iso_convex", "aniso_convex") and K.kind != "full_space":
        res, n = _cone_residual(fit_norm, K, np.asarray(fit["center"]), fit["radius"], seed)
        fit["cone_residual"] = res
        fit["cone_samples"] = n
        fit["passed"] = fit["passed"] and res <= fit["threshold"] * max(1.0, fit["radius"])
    return fit


# ---------------------------------------------------------------------------
# hypotheses and the pipeline


def classify(margin, rhs, tol, hypotheses_ok):
    if not hypotheses_ok:
        return "hypothesis_failed"
    if abs(margin) <= tol * abs(rhs):
        return "equality"
    if margin >= -tol * abs(rhs):
        return "pass"
    return "fail"


def _check(value, threshold, passed=None, **extra):
    ok = value >= threshold if passed is None else passed
    out = {"value": value, "threshold": threshold, "passed": bool(ok)}
    out.update(extra)
    return out


def check_hypotheses(F, K, patch, sc):
    htol = sc.hypothesis_tol
    hyp = {}
    if sc.theorem in ("aniso_capillary_halfspace", "variant_prime"):
        lo, hi = mk.omega_range(F)
        hyp["omega0_range"] = _check(sc.omega0, lo, lo < sc.omega0 < hi, upper=hi)
    theta0 = None
    if sc.theorem == "capillary_halfspace":
        theta0 = sc.theta0 if sc.theta0 is not None else getattr(F, "extra", {}).get("theta0")
        valid = theta0 is not None and 0.0 < theta0 < np.pi
        hyp["theta0_range"] = _check(theta0, 0.0, valid, upper=np.pi)
        if not valid:
            theta0 = None
    u, _ = patch.quadrature(max(8, sc.order // 4))
    slack = float(np.min(K.slack(patch.point(u))))
    hyp["surface_in_region"] = _check(slack, -htol)
    if not patch.has_boundary:
        return hyp
    trace_norm = mk.euclidean() if sc.theorem in ("iso_convex", "capillary_halfspace") else F
    try:
        tr = boundary_trace(trace_norm, patch, K, sc.boundary_samples)
    except TransversalityError as exc:
        hyp["transversality"] = _check(None, None, False, message=str(exc))
        return hyp
    except GeometryError as exc:
        hyp["boundary_on_container"] = _check(None, None, False, message=str(exc))
        return hyp
    hyp["transversality"] = _check(float(np.max(tr.transversality)), 1 - 1e-6,
                                   bool(np.max(tr.transversality) < 1 - 1e-6))
    if sc.theorem in ("iso_convex", "aniso_convex", "aniso_free_boundary"):
        hyp["contact"] = _check(tr.min_contact, -htol)
    if tr.omega is not None:
        lo, hi = mk.omega_range(trace_norm)
        hyp["omega_in_range"] = _check(tr.omega_min, lo, lo < tr.omega_min and tr.omega_max < hi,
                                       max=tr.omega_max, upper=hi)
    if theta0 is not None:
        hyp["contact_angle"] = _check(tr.omega_min, -np.cos(theta0) - htol)
    if sc.theorem in ("aniso_capillary_halfspace", "variant_prime"):
        hyp["omega_bound"] = _check(tr.omega_min, sc.omega0 - htol)
    return hyp


def build_scenario(sc):
    F = build(norm_from_dict, sc.norm, sc.base_dir, where="norm")
    K = build(region_spec, sc.region, where="region")
    patch = build(surface_from_dict, sc.surface, F, K, where="surface")
    return F, K, patch


def verify(sc):
    F, K, patch = build_scenario(sc)
    hyp = check_hypotheses(F, K, patch, sc)
    ok = all(h["passed"] for h in hyp.values())
    weight = WEIGHTS[sc.theorem]
    lhs_norm = mk.euclidean() if sc.theorem == "iso_convex" else F
    try:
        lhs = willmore_lhs(lhs_norm, patch, weight, sc.order, sc.theta0, sc.omega0)
        coarse = willmore_lhs(lhs_norm, patch, weight, sc.order // 2, sc.theta0, sc.omega0)
        rhs, rhs_err = willmore_rhs(lhs_norm, K, sc.theorem, sc.theta0, sc.omega0,
                                    max(96, sc.order), return_error=True)
    except DomainError:
        # parameters outside their range: recorded as a failed hypothesis
        if ok:
            raise
        lhs = coarse = rhs = rhs_err = float("nan")
    margin = lhs - rhs
    status = classify(margin, rhs, sc.tol, ok)
    rigidity = None
    if status == "equality":
        rigidity = rigidity_probe(F, K, patch, sc.theorem, sc.tol, sc.seed)
    identities = {}
    if ok and patch.has_boundary and sc.theorem in HALF_SPACE_THEOREMS:
        cv = mk.capillary_vector(F, sc.omega0) if sc.omega0 is not None else None
        identities["flux"] = identity_flux(patch, cv, sc.order)
    provenance = {
        "scenario": sc.name,
        "theorem": sc.theorem,
        "order": sc.order,
        "error_order": sc.order // 2,
        "tol": sc.tol,
        "hypothesis_tol": sc.hypothesis_tol,
        "boundary_samples": sc.boundary_samples,
        "seed": sc.seed,
        "norm": F.params(),
        "region": K.describe(),
        "surface": patch.describe(),
    }
    return VerificationReport(
        lhs=float(lhs), rhs=float(rhs), margin=float(margin),
        relative_margin=float(margin / rhs) if rhs == rhs and rhs != 0 else float("nan"),
        status=status, hypotheses=hyp, rigidity=rigidity, identities=identities,
        provenance=provenance, equality=status == "equality",
        lhs_error=float(abs(lhs - coarse)), rhs_error=float(rhs_err),
    )
