"""Small helpers on the unit sphere: point sets, frames, tangent bases."""

import numpy as np
from scipy.stats import norm as _gauss, qmc


def normalize(v, axis=-1):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=axis, keepdims=True)


def fibonacci_sphere(count, dim=3):
    """Deterministic quasi-uniform points on the unit sphere in ``R^dim``.

    The spiral lattice is used in three dimensions; higher dimensions fall
    back to an unscrambled Halton sequence pushed through the Gaussian
    quantile and normalized.
    """
    if dim == 3:
        i = np.arange(count) + 0.5
        z = 1.0 - 2.0 * i / count
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        golden = np.pi * (3.0 - np.sqrt(5.0))
        theta = golden * i
        return np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=-1)
    u = qmc.Halton(d=dim, scramble=False).random(count + 1)[1:]
    return normalize(_gauss.ppf(u))


def tangent_basis(z):
    """Orthonormal basis of the tangent space of the sphere at unit ``z``.

    Columns of the returned ``(..., d, d-1)`` array.  The first vector comes
    from the coordinate axis least aligned with ``z`` (lowest index on ties);
    the remaining axes follow in index order, all Gram-Schmidt'ed against
    ``z``.  Fully deterministic, so operator matrices are reproducible.
    """
    z = np.asarray(z, dtype=float)
    d = z.shape[-1]
    flat = z.reshape(-1, d)
    out = np.empty(flat.shape + (d - 1,))
    eye = np.eye(d)
    for row, zz in enumerate(flat):
        k = int(np.argmin(np.abs(zz)))
        order = [k] + [j for j in range(d) if j != k]
        vecs = [zz]
        for j in order:
            v = eye[j].copy()
            for w in vecs:
                v -= np.dot(v, w) * w
            nv = np.linalg.norm(v)
            if nv > 1e-8:
                vecs.append(v / nv)
            if len(vecs) == d:
                break
        out[row] = np.stack(vecs[1:], axis=-1)
    return out.reshape(z.shape[:-1] + (d, d - 1))


def frame(pole, reference=None):
    """Rotation matrix whose third column is ``pole``.

    ``reference`` (projected off ``pole``) becomes the first column, i.e. the
    azimuth-zero direction.
    """
    e3 = normalize(pole)
    if reference is None:
        k = int(np.argmin(np.abs(e3)))
        reference = np.eye(3)[k]
    e1 = np.asarray(reference, dtype=float) - np.dot(reference, e3) * e3
    n1 = np.linalg.norm(e1)
    if n1 < 1e-12:
        raise ValueError("reference direction parallel to pole")
    e1 = e1 / n1
    e2 = np.cross(e3, e1)
    return np.stack([e1, e2, e3], axis=-1)


def polar_point(phi, psi, rot):
    """Point on the sphere at polar angle ``phi`` and azimuth ``psi``.

    Returns ``(z, z_phi, z_psi, z_phiphi, z_phipsi, z_psipsi)``, each with a
    trailing axis of length 3, in the frame ``rot``.
    """
    sp, cp = np.sin(phi), np.cos(phi)
    ss, cs = np.sin(psi), np.cos(psi)
    zero = np.zeros_like(sp * ss)
    loc = [
        np.stack([sp * cs, sp * ss, cp + zero], -1),
        np.stack([cp * cs, cp * ss, -sp + zero], -1),
        np.stack([-sp * ss, sp * cs, zero], -1),
        np.stack([-sp * cs, -sp * ss, -cp + zero], -1),
        np.stack([-cp * ss, cp * cs, zero], -1),
        np.stack([-sp * cs, -sp * ss, zero], -1),
    ]
    return tuple(v @ rot.T for v in loc)
