"""Independent reference computations used to derive and freeze test values.

Nothing here imports the package under test.
"""

import numpy as np
from scipy.optimize import minimize


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def sphere_grid(n):
    """Golden-spiral points on the unit sphere."""
    k = np.arange(n) + 0.5
    z = 1 - 2 * k / n
    r = np.sqrt(1 - z * z)
    phi = np.pi * (3 - np.sqrt(5)) * k
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def brute_dual(value, x, n=20000):
    """``sup <x, z> / F(z)``: dense grid, then Nelder-Mead in angles."""
    x = np.asarray(x, dtype=float)
    g = sphere_grid(n)
    ratio = (g @ x) / value(g)
    z0 = g[np.argmax(ratio)]
    th0, ph0 = np.arccos(np.clip(z0[2], -1, 1)), np.arctan2(z0[1], z0[0])

    def neg(p):
        z = np.array([np.sin(p[0]) * np.cos(p[1]), np.sin(p[0]) * np.sin(p[1]), np.cos(p[0])])
        return -(z @ x) / value(z[None])[0]

    res = minimize(neg, [th0, ph0], method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
    return -res.fun


def fd_grad(f, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    out = np.zeros(3)
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        out[i] = (f(x + e) - f(x - e)) / (2 * h)
    return out


def fd_hess(f, x, h=1e-4):
    x = np.asarray(x, dtype=float)
    out = np.zeros((3, 3))
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        out[:, i] = (fd_grad(f, x + e) - fd_grad(f, x - e)) / (2 * h)
    return 0.5 * (out + out.T)


def cap_volume(h):
    """Volume of a unit-sphere cap of height ``h``."""
    return np.pi * h * h * (3 - h) / 3


def mc_solid_angle_fraction(inside, n=2_000_000, seed=1):
    """Fraction of uniform sphere directions satisfying ``inside``."""
    rng = np.random.default_rng(seed)
    u = unit(rng.normal(size=(n, 3)))
    frac = inside(u).mean()
    return frac, np.sqrt(frac * (1 - frac) / n)
