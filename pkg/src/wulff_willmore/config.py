"""Build norms, regions and surfaces from plain JSON-style dictionaries."""

from pathlib import Path

import numpy as np

from . import minkowski as mk
from .errors import SchemaError, WulffError
from .regions import HalfSpace, region_from_dict
from .surfaces import PolarPatch, TWO_PI

NORM_FAMILIES = ("euclidean", "ellipsoidal", "capillary", "tilted", "reversed", "sampled")
SURFACE_KINDS = ("sphere_cap", "wulff", "perturbed_wulff")


def _require(spec, key, where):
    if key not in spec:
        raise SchemaError(f"{where}: missing field {key!r}")
    return spec[key]


def norm_from_dict(spec, base_dir=None):
    if not isinstance(spec, dict):
        raise SchemaError("norm: expected an object")
    family = spec.get("family", "euclidean")
    if family == "euclidean":
        return mk.euclidean(spec.get("dim", 3))
    if family == "ellipsoidal":
        if "matrix" in spec:
            return mk.ellipsoidal(np.asarray(spec["matrix"], dtype=float))
        return mk.ellipsoidal(np.diag(np.asarray(_require(spec, "diag", "norm"), dtype=float)))
    if family == "capillary":
        return mk.capillary(float(_require(spec, "theta0", "norm")))
    if family == "tilted":
        base = norm_from_dict(spec.get("base", {"family": "euclidean"}), base_dir)
        if "omega0" in spec:
            return mk.tilt(base, float(spec["omega0"]))[0]
        return mk.TiltedNorm(base, _require(spec, "shift", "norm"))
    if family == "reversed":
        return mk.reversal(norm_from_dict(_require(spec, "base", "norm"), base_dir))
    if family == "sampled":
        path = Path(_require(spec, "path", "norm"))
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        kw = {k: spec[k] for k in ("degree", "fit_tol") if k in spec}
        return mk.SampledNorm.from_csv(path, **kw)
    raise SchemaError(f"norm: unknown family {family!r} (expected one of {NORM_FAMILIES})")


def region_spec(spec):
    if not isinstance(spec, dict):
        raise SchemaError("region: expected an object")
    try:
        return region_from_dict(spec)
    except KeyError as exc:
        raise SchemaError(f"region: missing field {exc.args[0]!r}") from None


def _clip(spec, region):
    clip = spec.get("clip", "none")
    if clip in (None, "none"):
        return None
    if clip == "upper_halfspace":
        return HalfSpace([0.0, 0.0, 1.0])
    if clip == "region":
        if region is None or region.kind == "full_space":
            return None
        return region
    if isinstance(clip, dict):
        return region_spec(clip)
    raise SchemaError(f"surface: unknown clip {clip!r}")


def surface_from_dict(spec, norm, region=None):
    """Polar patch described by ``spec``.

    ``kind`` is ``sphere_cap`` (Euclidean sphere), ``wulff`` or
    ``perturbed_wulff`` (Wulff shape of ``norm``, or of the norm given in
    the surface's own ``norm`` field).  ``omega0`` centres the Wulff shape
    at ``omega0 * E^F``.
    """
    if not isinstance(spec, dict):
        raise SchemaError("surface: expected an object")
    kind = spec.get("kind", "wulff")
    if kind not in SURFACE_KINDS:
        raise SchemaError(f"surface: unknown kind {kind!r}")
    if kind == "sphere_cap":
        F = mk.euclidean()
    elif "norm" in spec:
        F = norm_from_dict(spec["norm"])
    else:
        F = norm
    center = np.asarray(spec.get("center", [0.0, 0.0, 0.0]), dtype=float)
    if "omega0" in spec:
        center = center + float(spec["omega0"]) * mk.capillary_vector(F, float(spec["omega0"])).vector
    amplitude = float(spec.get("amplitude", 0.0)) if kind == "perturbed_wulff" else 0.0
    return PolarPatch(
        F,
        radius=float(spec.get("radius", 1.0)),
        center=center,
        clip=_clip(spec, region),
        amplitude=amplitude,
        mode=tuple(spec.get("mode", (2, 0))),
        profile=spec.get("profile", "neumann"),
        psi_range=(0.0, TWO_PI),
    )


def build(builder, *args, where="scenario"):
    """Call ``builder`` translating library errors into schema errors."""
    try:
        return builder(*args)
    except SchemaError:
        raise
    except (WulffError, ValueError, TypeError, KeyError) as exc:
        raise SchemaError(f"{where}: {exc}") from exc
