"""Property suites for norms, duals, tilts and reversals.

``run_identities`` evaluates eight groups of identities on a set of norms and
returns a JSON-ready summary.  Each group reports its worst residual per norm
against a tolerance; inequalities report their worst violation (zero when
they hold).
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import minkowski as mk
from .errors import DomainError
from .regions import HalfSpace
from .sphere import normalize
from .surfaces import PolarPatch, curvature_from_geometry
from .verifier import identity_area_volume, identity_flux

GROUPS = (
    "homogeneity",
    "cahn_hoffman",
    "angle_comparison",
    "tilt_positivity",
    "reversal",
    "area_volume",
    "flux",
    "tilt_consistency",
)
NORM_CHOICES = ("euclidean", "capillary", "ellipsoidal", "tilted", "sampled")
TOL_ANALYTIC = 1e-7
TOL_SAMPLED = 1e-5
TOL_HOMOGENEITY = 1e-10
# numerical duals cost about a millisecond per point
NUMERIC_DUAL_CAP = 2000
E3 = np.array([0.0, 0.0, 1.0])


@dataclass
class NormCase:
    label: str
    norm: object
    tol: float
    omega0: float
    order: int = 48
    volume_order: int = 96

    @property
    def numeric(self):
        return not self.norm.closed_form_dual


@dataclass
class GroupResult:
    group: str
    tolerance_note: str
    norms: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(v["passed"] for v in self.norms.values())

    @property
    def worst(self):
        return max((v["residual"] for v in self.norms.values()), default=0.0)

    def to_dict(self):
        return {"group": self.group, "passed": self.passed, "worst_residual": self.worst,
                "tolerance": self.tolerance_note, "norms": self.norms}


def sampled_example(count=400):
    """Smooth non-symmetric test norm given only by a table of values."""
    def table(z):
        return (np.linalg.norm(z, axis=-1) + 0.15 * z[..., 0] ** 2
                - 0.1 * z[..., 1] * z[..., 2] + 0.05 * z[..., 2] ** 3)
    return mk.SampledNorm.from_function(table, count=count)


def _default_omega(F):
    lo, hi = mk.omega_range(F)
    return 0.3 if lo < 0.3 < hi else 0.5 * hi


def norm_cases(name=None, theta0=None):
    """Norms used by the suites; ``name`` restricts to one family."""
    if name is not None and name not in NORM_CHOICES:
        raise DomainError(f"unknown norm {name!r} (expected one of {NORM_CHOICES})")
    th = np.pi / 3 if theta0 is None else float(theta0)
    cases = []

    def add(label, build, tol=TOL_ANALYTIC, **kw):
        if name is None or label == name:
            F = build()
            cases.append(NormCase(label, F, tol, _default_omega(F), **kw))

    add("euclidean", mk.euclidean)
    add("capillary", lambda: mk.capillary(th))
    add("ellipsoidal", lambda: mk.ellipsoidal(np.diag([1.0, 1.0, 4.0])))
    add("tilted", lambda: mk.tilt(mk.ellipsoidal(np.diag([1.0, 2.0, 0.5])), 0.3)[0])
    add("sampled", sampled_example, TOL_SAMPLED, order=12, volume_order=16)
    return cases


def _units(rng, n, dim=3):
    return normalize(rng.normal(size=(n, dim)))


def _record(residual, tol, **details):
    residual = float(residual)
    return {"residual": residual, "passed": bool(residual <= tol), **details}


def _homogeneity(case, rng, trials):
    F = case.norm
    xi = rng.normal(size=(trials, 3)) * rng.uniform(0.1, 3.0, size=(trials, 1))
    t = rng.uniform(0.0, 10.0, size=trials)
    t = np.where(t > 0, t, 10.0)
    ft = t * F.value(xi)
    err = np.abs(F.value(t[:, None] * xi) - ft) / ft
    return _record(err.max(), TOL_HOMOGENEITY, samples=trials)


def _cahn_hoffman(case, rng, trials):
    F = case.norm
    n = min(trials, NUMERIC_DUAL_CAP) if case.numeric else trials
    z = _units(rng, n)
    phi = F.grad(z)
    fz = F.value(z)
    pairing = np.abs(np.einsum("ij,ij->i", phi, z) - fz) / fz
    unit = np.abs(F.dual(phi) - 1.0)
    x = rng.normal(size=(n, 3))
    xi = rng.normal(size=(n, 3))
    fx = F.dual(x)
    # Cauchy-Schwarz: <x, xi> <= F°(x) F(xi)
    bound = fx * F.value(xi)
    cs = np.maximum(np.einsum("ij,ij->i", x, xi) - bound, 0.0) / bound
    t = rng.uniform(0.1, 10.0, size=n)
    hom = np.abs(F.dual(t[:, None] * x) - t * fx) / (t * fx)
    y = rng.normal(size=(n, 3))
    fy = F.dual(y)
    tri = np.maximum(F.dual(x + y) - fx - fy, 0.0) / (fx + fy)
    patch = PolarPatch(F, 1.0)
    u, _ = patch.quadrature(16)
    wulff = np.abs(F.dual(patch.point(u)) - 1.0)
    parts = {"pairing": pairing.max(), "dual_of_phi": unit.max(),
             "cauchy_schwarz": cs.max(), "dual_homogeneity": hom.max(),
             "dual_triangle": tri.max(), "wulff_points": wulff.max()}
    parts = {k: float(v) for k, v in parts.items()}
    return _record(max(parts.values()), case.tol, samples=n, parts=parts)


def _angle(case, rng, trials):
    check = mk.angle_comparison_check(case.norm, trials, int(rng.integers(2**31)))
    return _record(max(0.0, -check.worst_margin), case.tol, samples=check.trials,
                   worst_margin=check.worst_margin)


def _tilt_positivity(case, rng, trials):
    F = case.norm
    lo, hi = mk.omega_range(F)
    z = _units(rng, trials)
    worst, pairing = np.inf, 0.0
    omegas = lo + (hi - lo) * np.linspace(0.02, 0.98, 11)
    for w in omegas:
        Ft, cv = mk.tilt(F, float(w))
        worst = min(worst, float(np.min(Ft.value(z))))
        pairing = max(pairing, abs(float(cv.vector @ E3) - 1.0))
    residual = max(max(0.0, -worst), pairing)
    return _record(residual, case.tol, samples=trials, min_value=worst,
                   pairing=pairing, omega_grid=len(omegas))


def _reversal(case, rng, trials):
    F = case.norm
    Fr = mk.reversal(F)
    n = min(trials, NUMERIC_DUAL_CAP) if case.numeric else trials
    z = _units(rng, n)
    x = rng.normal(size=(n, 3))
    fd = F.dual(-x)
    parts = {
        "value": np.max(np.abs(Fr.value(z) - F.value(-z)) / F.value(-z)),
        "dual": np.max(np.abs(Fr.dual(x) - fd) / fd),
        "phi": np.max(np.linalg.norm(Fr.grad(z) + F.grad(-z), axis=-1)),
        "involution": np.max(np.abs(mk.reversal(Fr).value(z) - F.value(z)) / F.value(z)),
    }
    patch = PolarPatch(F, 1.0, amplitude=0.1, mode=(2, 1))
    u, _ = patch.quadrature(8 if case.numeric else 16)
    geom = patch.geometry(u)
    k = curvature_from_geometry(F, geom).principal
    kr = curvature_from_geometry(Fr, replace(geom, normal=-geom.normal)).principal
    parts["curvature"] = np.max(np.abs(kr[:, ::-1] + k)) / np.max(np.abs(k))
    parts = {k: float(v) for k, v in parts.items()}
    return _record(max(parts.values()), case.tol, samples=n, parts=parts)


def _area_volume(case, rng, trials):
    plain, tilted = identity_area_volume(case.norm, case.omega0, case.order,
                                         case.volume_order)
    return _record(max(plain, tilted), case.tol, omega0=case.omega0,
                   parts={"plain": float(plain), "tilted": float(tilted)})


def _flux(case, rng, trials):
    F = case.norm
    half = HalfSpace(E3)
    cv = mk.capillary_vector(F, case.omega0)
    center = case.omega0 * cv.vector
    parts = {}
    for label, amp in (("wulff_cap", 0.0), ("perturbed_cap", 0.1)):
        patch = PolarPatch(F, 1.0, center, half, amplitude=amp, mode=(2, 0),
                           profile="pinned")
        parts[label] = float(identity_flux(patch, cv, case.order)["residual"])
    return _record(max(parts.values()), case.tol, omega0=case.omega0, parts=parts)


def _tilt_consistency(case, rng, trials):
    F = case.norm
    Ft, cv = mk.tilt(F, case.omega0)
    z = _units(rng, trials)
    a = mk.hessian_operator(F, z)
    at = mk.hessian_operator(Ft, z)
    hess = np.max(np.abs(a - at)) / np.max(np.abs(a))
    n = min(trials, NUMERIC_DUAL_CAP) if case.numeric else trials
    zs = z[:n]
    shifted = F.grad(zs) + case.omega0 * cv.vector
    parts = {
        "hessian": float(hess),
        "phi_shift": float(np.max(np.linalg.norm(Ft.grad(zs) - shifted, axis=-1))),
        "wulff_translation": float(np.max(np.abs(Ft.dual(shifted) - 1.0))),
    }
    return _record(max(parts.values()), case.tol, omega0=case.omega0, parts=parts)


_RUNNERS = {
    "homogeneity": (_homogeneity, "1e-10 relative"),
    "cahn_hoffman": (_cahn_hoffman, "1e-7 relative (1e-5 sampled)"),
    "angle_comparison": (_angle, "violation <= 1e-7 (1e-5 sampled)"),
    "tilt_positivity": (_tilt_positivity, "violation <= 1e-7 (1e-5 sampled)"),
    "reversal": (_reversal, "1e-7 relative (1e-5 sampled)"),
    "area_volume": (_area_volume, "1e-7 relative (1e-5 sampled)"),
    "flux": (_flux, "1e-7 relative (1e-5 sampled)"),
    "tilt_consistency": (_tilt_consistency, "1e-7 relative (1e-5 sampled)"),
}


def run_group(group, cases, trials=1000, seed=0):
    fn, note = _RUNNERS[group]
    out = GroupResult(group, note)
    for k, case in enumerate(cases):
        rng = np.random.default_rng([seed, GROUPS.index(group), k])
        out.norms[case.label] = fn(case, rng, trials)
    return out


def run_identities(name=None, theta0=None, trials=1000, seed=0, angle_trials=10_000):
    """All eight groups; ``passed`` is true iff every residual is in tolerance."""
    if trials < 1:
        raise DomainError("trials must be at least 1")
    cases = norm_cases(name, theta0)
    groups = []
    for g in GROUPS:
        n = max(trials, angle_trials) if g == "angle_comparison" else trials
        groups.append(run_group(g, cases, n, seed).to_dict())
    return {
        "passed": all(g["passed"] for g in groups),
        "seed": int(seed),
        "trials": int(trials),
        "norms": {c.label: c.norm.params() for c in cases},
        "groups": groups,
    }
