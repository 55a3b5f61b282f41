"""Regenerate acceptance.json (the scenario suite behind the acceptance gate)."""

import json
import math
from pathlib import Path

UPPER = {"kind": "half_space", "normal": [0.0, 0.0, 1.0]}
FULL = {"kind": "full_space"}
EUCLID = {"family": "euclidean"}
ELLIPSOIDAL = {"family": "ellipsoidal", "diag": [1.0, 1.0, 4.0]}
THETAS = {"pi3": math.pi / 3, "pi2": math.pi / 2, "2pi3": 2 * math.pi / 3}


def cone(half_angle):
    return {"kind": "circular_cone", "axis": [0.0, 0.0, 1.0], "half_angle": half_angle}


def capillary(theta0):
    return {"family": "capillary", "theta0": theta0}


def scenarios():
    out = [
        {"name": "sphere_fullspace", "norm": EUCLID, "region": FULL, "theorem": "iso_convex",
         "surface": {"kind": "sphere_cap", "radius": 1.0}},
        {"name": "hemisphere", "norm": EUCLID, "region": UPPER, "theorem": "iso_convex",
         "surface": {"kind": "sphere_cap", "radius": 1.0, "clip": "upper_halfspace"}},
    ]
    for label, th in THETAS.items():
        out.append({
            "name": f"capillary_cap_{label}", "norm": capillary(th), "region": UPPER,
            "theorem": "capillary_halfspace", "theta0": th,
            "surface": {"kind": "sphere_cap", "center": [0.0, 0.0, -math.cos(th)],
                        "clip": "upper_halfspace"},
        })
    for label, w in (("plus", 0.3), ("minus", -0.3), ("zero", 0.0)):
        surface = {"kind": "wulff", "omega0": w, "clip": "upper_halfspace"}
        out.append({"name": f"aniso_capillary_{label}", "norm": EUCLID, "region": UPPER,
                    "theorem": "aniso_capillary_halfspace", "omega0": w, "surface": surface})
        if label != "minus":
            out.append({"name": f"variant_prime_{label}", "norm": EUCLID, "region": UPPER,
                        "theorem": "variant_prime", "omega0": w, "surface": surface})
    for label, alpha in (("pi6", math.pi / 6), ("pi4", math.pi / 4), ("pi3", math.pi / 3)):
        out.append({"name": f"cone_cap_{label}", "norm": EUCLID, "region": cone(alpha),
                    "theorem": "iso_convex", "surface": {"kind": "sphere_cap", "clip": "region"}})
    # strict inequality: perturbed Wulff shapes for three norms and three regions
    for nlabel, norm in (("euclidean", EUCLID), ("ellipsoidal", ELLIPSOIDAL),
                         ("capillary", capillary(math.pi / 3))):
        convex = "iso_convex" if nlabel == "euclidean" else "aniso_convex"
        half = "iso_convex" if nlabel == "euclidean" else "aniso_free_boundary"
        out.append({"name": f"perturbed_{nlabel}_full", "norm": norm, "region": FULL,
                    "theorem": convex,
                    "surface": {"kind": "perturbed_wulff", "amplitude": 0.1, "mode": [2, 0]}})
        for amp in (0.05, 0.2):
            out.append({"name": f"perturbed_{nlabel}_half_{amp:g}", "norm": norm,
                        "region": UPPER, "theorem": half,
                        "surface": {"kind": "perturbed_wulff", "amplitude": amp,
                                    "mode": [1, 0], "clip": "upper_halfspace"}})
        out.append({"name": f"perturbed_{nlabel}_cone", "norm": norm,
                    "region": cone(math.pi / 4), "theorem": convex,
                    "surface": {"kind": "perturbed_wulff", "amplitude": 0.1, "mode": [1, 0],
                                "clip": "region"}})
    return out


def flow_checks():
    volume = ["sphere_fullspace", "hemisphere"] + [f"capillary_cap_{k}" for k in THETAS]
    out = [{"scenario": s, "check": "volume", "R": [4.0, 8.0, 16.0], "samples": 1_000_000}
           for s in volume]
    out.append({"scenario": "hemisphere", "check": "coverage", "mode": "free_boundary",
                "targets": 200})
    for k, th in THETAS.items():
        # the cap is the capillary norm's Wulff cap (free boundary) and, for the
        # Euclidean norm, a capillary surface with omega0 = -cos(theta0)
        out.append({"name": f"capillary_cap_{k}:coverage", "scenario": f"capillary_cap_{k}",
                    "check": "coverage", "mode": "free_boundary", "targets": 200})
        out.append({"name": f"capillary_cap_{k}:coverage_euclidean",
                    "scenario": f"capillary_cap_{k}", "check": "coverage", "norm": EUCLID,
                    "mode": "capillary", "omega0": -math.cos(th), "targets": 200})
    out.append({"scenario": "perturbed_euclidean_half_0.05", "check": "coverage",
                "mode": "free_boundary", "targets": 200})
    out.append({"scenario": "hemisphere", "check": "inclusion", "R": 2.0, "samples": 2000})
    out.append({"scenario": "capillary_cap_pi3", "check": "inclusion", "R": 2.0,
                "samples": 2000})
    return out


def main():
    config = {"seed": 20240601, "scenarios": scenarios(), "flow_checks": flow_checks()}
    path = Path(__file__).resolve().parents[1] / "acceptance.json"
    path.write_text(json.dumps(config, indent=2) + "\n")
    print(f"wrote {path} ({len(config['scenarios'])} scenarios, "
          f"{len(config['flow_checks'])} flow checks)")


if __name__ == "__main__":
    main()
