"""C^2 parametric surface patches in R^3 and their anisotropic curvatures.

A patch maps a parameter rectangle into R^3.  The workhorse is
:class:`PolarPatch`, which covers spheres, Wulff shapes and their radial
perturbations, optionally clipped by a container so that the clip curve is
the ``s = 1`` edge of the parameter domain::

    X(s, psi) = x0 + rho(s, psi) * Phi(z(s * c(psi), psi))

where ``z(phi, psi)`` is a polar parameterization of the unit sphere in a
frame whose pole points into the container, ``c(psi)`` the polar angle of
the clip curve and ``rho = r (1 + a P)`` a radial profile.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import EvaluationError, GeometryError, TransversalityError
from .minkowski import EuclideanNorm
from .quadrature import accurate_sum, tensor_rule
from .sphere import frame, normalize, polar_point

TWO_PI = 2.0 * np.pi
CONTAINER_TOL = 1e-8
TANGENCY_TOL = 1e-6


@dataclass
class PatchGeometry:
    """Point data of a patch at parameter nodes ``u``."""

    u: np.ndarray
    x: np.ndarray
    xu: np.ndarray
    xuu: np.ndarray
    normal: np.ndarray
    area: np.ndarray


@dataclass
class AnisotropicCurvature:
    principal: np.ndarray
    mean: np.ndarray
    gauss: np.ndarray
    nu_f: np.ndarray
    normal: np.ndarray


class SurfacePatch:
    """A parametric patch given by a point map.

    ``jacobian`` and ``hessian`` are optional callables returning
    ``(..., 3, 2)`` and ``(..., 3, 2, 2)`` arrays; missing derivatives are
    replaced by central differences.  ``orientation`` (+1 or -1) multiplies
    ``X_1 x X_2`` to give the outward normal.
    """

    kind = "custom"
    has_boundary = False

    def __init__(self, point, bounds, periodic=False, orientation=1,
                 jacobian=None, hessian=None, fd_step=1e-5):
        if point is not None:
            self._point = point
        self._jacobian = jacobian
        self._hessian = hessian
        self.bounds = tuple(tuple(float(v) for v in b) for b in bounds)
        self.periodic = bool(periodic)
        self.orientation = 1 if orientation >= 0 else -1
        self.fd_step = fd_step
        self.meta = {}

    # -- derivatives ------------------------------------------------------
    def _steps(self, h):
        return [h * (b - a) for a, b in self.bounds]

    def _fd_jacobian(self, u, h):
        cols = []
        for j, hj in enumerate(self._steps(h)):
            e = np.zeros(2)
            e[j] = hj
            cols.append((self._point(u + e) - self._point(u - e)) / (2 * hj))
        return np.stack(cols, axis=-1)

    def derivatives(self, u):
        u = np.asarray(u, dtype=float)
        x = self._point(u)
        if self._jacobian is not None:
            xu = self._jacobian(u)
        else:
            xu = self._fd_jacobian(u, self.fd_step)
        if self._hessian is not None:
            xuu = self._hessian(u)
        else:
            jac = self._jacobian or (lambda v: self._fd_jacobian(v, self.fd_step))
            # differencing a differenced Jacobian needs a larger step
            h = self.fd_step if self._jacobian is not None else 10 * self.fd_step
            cols = []
            for j, hj in enumerate(self._steps(h)):
                e = np.zeros(2)
                e[j] = hj
                cols.append((jac(u + e) - jac(u - e)) / (2 * hj))
            xuu = np.stack(cols, axis=-1)
            xuu = 0.5 * (xuu + np.swapaxes(xuu, -1, -2))
        return x, xu, xuu

    def point(self, u):
        return self._point(np.asarray(u, dtype=float))

    def _raw_normal(self, xu):
        c = np.cross(xu[..., :, 0], xu[..., :, 1])
        n = np.linalg.norm(c, axis=-1)
        scale = np.linalg.norm(xu[..., :, 0], axis=-1) * np.linalg.norm(xu[..., :, 1], axis=-1)
        if np.any(n <= 1e-12 * np.maximum(scale, 1e-300)):
            raise GeometryError("degenerate immersion (rank < 2)")
        return self.orientation * c / n[..., None], n

    def normal(self, u):
        _, xu, _ = self.derivatives(u)
        return self._raw_normal(xu)[0]

    def geometry(self, u):
        x, xu, xuu = self.derivatives(u)
        nu, area = self._raw_normal(xu)
        return PatchGeometry(np.asarray(u, dtype=float), x, xu, xuu, nu, area)

    # -- quadrature -------------------------------------------------------
    def quadrature(self, order):
        """Tensor Gauss-Legendre nodes and parameter-space weights.

        A full period in the second parameter gets twice as many nodes.
        """
        (a1, b1), (a2, b2) = self.bounds
        order2 = 2 * order if self.periodic and b2 - a2 >= TWO_PI - 1e-12 else order
        return tensor_rule(order, order2, self.bounds)

    def boundary_parameters(self, samples):
        """Parameter points on the edge lying on the container boundary."""
        raise GeometryError("patch has no container boundary")


class PolarPatch(SurfacePatch):
    """Radial graph over a (possibly clipped) Wulff shape; see module docstring."""

    kind = "polar"

    def __init__(self, norm, radius=1.0, center=(0.0, 0.0, 0.0), clip=None,
                 pole=None, amplitude=0.0, mode=(0, 0), psi_range=(0.0, TWO_PI),
                 reference=None, profile="neumann"):
        if radius <= 0:
            raise GeometryError("radius must be positive")
        self.norm = norm
        self.radius = float(radius)
        self.center = np.asarray(center, dtype=float)
        self.clip = clip
        if clip is not None and clip.clip_axis is None:
            raise GeometryError(f"{clip.kind} cannot clip a polar patch")
        if pole is None:
            pole = clip.clip_axis if clip is not None else np.array([0.0, 0.0, 1.0])
        self.rot = frame(pole, reference)
        self.amplitude = float(amplitude)
        self.mode = (int(mode[0]), int(mode[1]))
        if profile not in ("neumann", "pinned"):
            raise GeometryError("profile must be 'neumann' or 'pinned'")
        self.profile = profile
        if profile == "pinned" and self.mode[0] < 1:
            raise GeometryError("pinned profiles need a radial index >= 1")
        if self.mode[0] < 0 or self.mode[1] < 0:
            raise GeometryError("mode indices must be non-negative")
        full = psi_range[1] - psi_range[0] >= TWO_PI - 1e-12
        super().__init__(None, ((0.0, 1.0), psi_range), periodic=full)
        self.has_boundary = clip is not None
        if profile == "pinned" and not self.has_boundary:
            raise GeometryError("pinned profiles need a clipped patch")
        self._const_angle = np.pi
        self._variable = False
        if clip is not None:
            self._setup_clip()
        self._wavenumber = 0.5 * np.pi if self.has_boundary else np.pi
        if self.amplitude != 0.0 and abs(self.amplitude) >= 1.0:
            raise GeometryError("perturbation amplitude must satisfy |a| < 1")
        probe = np.array([[0.5, psi_range[0] + 0.37 * (psi_range[1] - psi_range[0])]])
        x, xu, _ = self.derivatives(probe)
        c = np.cross(xu[..., :, 0], xu[..., :, 1])
        self.orientation = 1 if np.sum(c * (x - self.center)) > 0 else -1
        if self.has_boundary and self.amplitude != 0.0 and profile == "neumann":
            ub = self.boundary_parameters(16)
            h = self.clip.clip_function(self.point(ub))
            if np.max(np.abs(h)) > CONTAINER_TOL:
                raise GeometryError("perturbation moves the boundary off the container")

    # -- clip curve -------------------------------------------------------
    def _base_point(self, phi, psi):
        z = polar_point(phi, psi, self.rot)[0]
        return self.center + self.radius * self.norm.grad(z)

    def _angle_raw(self, psi):
        psi = np.atleast_1d(np.asarray(psi, dtype=float))
        grid = np.linspace(0.0, np.pi, 257)[1:]
        h = self.clip.clip_function(self._base_point(grid[None, :], psi[:, None]))
        neg = h < 0
        if not np.all(neg.any(axis=1)):
            raise GeometryError("clip does not cut the surface")
        k = np.argmax(neg, axis=1)
        hi = grid[k]
        lo = np.where(k > 0, grid[np.maximum(k - 1, 0)], 0.0)
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            inside = self.clip.clip_function(self._base_point(mid, psi)) >= 0
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
        return 0.5 * (lo + hi)

    def _setup_clip(self):
        pole_pt = self._base_point(np.zeros(1), np.zeros(1))
        if self.clip.clip_function(pole_pt)[0] <= 0:
            raise GeometryError("pole of the patch lies outside the container")
        probes = np.linspace(0.0, TWO_PI, 17)[:-1]
        ang = self._angle_raw(probes)
        if np.ptp(ang) < 1e-13:
            self._const_angle = float(ang[0])
        else:
            self._variable = True

    def _angle(self, psi):
        if not self._variable:
            c = np.full(np.shape(psi), self._const_angle)
            return c, np.zeros_like(c), np.zeros_like(c)
        h = 1e-4
        psi = np.asarray(psi, dtype=float)
        flat = psi.ravel()
        vals = self._angle_raw(np.concatenate([flat - h, flat, flat + h]))
        m, c, p = np.split(vals, 3)
        shape = psi.shape
        return (c.reshape(shape), ((p - m) / (2 * h)).reshape(shape),
                ((p - 2 * c + m) / h**2).reshape(shape))

    @property
    def clip_angle(self):
        return None if self._variable else self._const_angle

    # -- radial profile ---------------------------------------------------
    def _profile(self, s, psi):
        """``P`` and its first and second partials in ``(s, psi)``.

        Neumann profiles have zero ``s``-derivative at ``s = 1``; pinned ones
        vanish there instead, fixing the boundary curve of a clipped patch.
        """
        l, m = self.mode
        k = self._wavenumber
        lp = (l - 0.5) * np.pi if self.profile == "pinned" else l * np.pi
        c, c1, c2 = np.cos(lp * s), -lp * np.sin(lp * s), -(lp**2) * np.cos(lp * s)
        w, w1, w2 = np.sin(k * s), k * np.cos(k * s), -(k**2) * np.sin(k * s)
        if m == 0:
            W, W1, W2 = np.ones_like(s), np.zeros_like(s), np.zeros_like(s)
        elif m == 1:
            W, W1, W2 = w, w1, w2
        else:
            W = w**m
            W1 = m * w ** (m - 1) * w1
            W2 = m * (m - 1) * w ** (m - 2) * w1**2 + m * w ** (m - 1) * w2
        A, A1, A2 = c * W, c1 * W + c * W1, c2 * W + 2 * c1 * W1 + c * W2
        B, B1, B2 = np.cos(m * psi), -m * np.sin(m * psi), -(m**2) * np.cos(m * psi)
        return A * B, A1 * B, A * B1, A2 * B, A1 * B1, A * B2

    # -- point map --------------------------------------------------------
    def derivatives(self, u):
        u = np.asarray(u, dtype=float)
        s, psi = u[..., 0], u[..., 1]
        c, c1, c2 = self._angle(psi)
        phi = s * c
        z, zf, zp0, zff, zfp0, zpp0 = polar_point(phi, psi, self.rot)
        fs, fp, fsp, fpp = c, s * c1, c1, s * c2
        col = lambda a: a[..., None]
        zs = zf * col(fs)
        zp = zf * col(fp) + zp0
        zss = zff * col(fs * fs)
        zsp = zff * col(fs * fp) + zfp0 * col(fs) + zf * col(fsp)
        zpp = zff * col(fp * fp) + 2 * zfp0 * col(fp) + zpp0 + zf * col(fpp)

        F = self.norm
        phi_z = F.grad(z)
        hz = F.hess(z)
        mv = lambda mat, v: np.einsum("...ij,...j->...i", mat, v)
        dphi_s, dphi_p = mv(hz, zs), mv(hz, zp)
        dphi_ss = F.third(z, zs, zs) + mv(hz, zss)
        dphi_sp = F.third(z, zs, zp) + mv(hz, zsp)
        dphi_pp = F.third(z, zp, zp) + mv(hz, zpp)

        r, a = self.radius, self.amplitude
        if a != 0.0:
            P, Ps, Pp, Pss, Psp, Ppp = self._profile(s, psi)
            rho = r * (1 + a * P)
            rs, rp, rss, rsp, rpp = (r * a * q for q in (Ps, Pp, Pss, Psp, Ppp))
        else:
            rho = np.full(s.shape, r)
            rs = rp = rss = rsp = rpp = np.zeros(s.shape)

        x = self.center + col(rho) * phi_z
        xu = np.stack([col(rs) * phi_z + col(rho) * dphi_s,
                       col(rp) * phi_z + col(rho) * dphi_p], axis=-1)
        xss = col(rss) * phi_z + 2 * col(rs) * dphi_s + col(rho) * dphi_ss
        xsp = (col(rsp) * phi_z + col(rs) * dphi_p + col(rp) * dphi_s
               + col(rho) * dphi_sp)
        xpp = col(rpp) * phi_z + 2 * col(rp) * dphi_p + col(rho) * dphi_pp
        xuu = np.stack([np.stack([xss, xsp], -1), np.stack([xsp, xpp], -1)], -1)
        return x, xu, xuu

    def _point(self, u):
        u = np.asarray(u, dtype=float)
        s, psi = u[..., 0], u[..., 1]
        c = self._angle(psi)[0] if self._variable else self._const_angle
        sp, cp = np.sin(s * c), np.cos(s * c)
        z = np.stack([sp * np.cos(psi), sp * np.sin(psi), cp], -1) @ self.rot.T
        rho = self.radius
        if self.amplitude != 0.0:
            rho = rho * (1 + self.amplitude * self._profile(s, psi)[0])
        return self.center + np.asarray(rho)[..., None] * self.norm.grad(z)

    def normal(self, u):
        u = np.asarray(u, dtype=float)
        _, xu, _ = self.derivatives(u)
        pole = np.abs(u[..., 0]) < 1e-14
        if not np.any(pole):
            return self._raw_normal(xu)[0]
        # at the pole, X_s at two azimuths spans the tangent plane
        out = np.empty(xu.shape[:-1])
        if np.any(~pole):
            out[~pole] = self._raw_normal(xu[~pole])[0]
        up = u[pole]
        a = self.derivatives(np.stack([up[:, 0], up[:, 1]], -1))[1][..., 0]
        b = self.derivatives(np.stack([up[:, 0], up[:, 1] + 0.5 * np.pi], -1))[1][..., 0]
        c = normalize(np.cross(a, b))
        x = self.point(up)
        sgn = np.sign(np.sum(c * (x - self.center), axis=-1))
        sgn = np.where(sgn == 0, 1.0, sgn)
        out[pole] = c * sgn[:, None]
        return out

    def boundary_parameters(self, samples):
        if not self.has_boundary:
            raise GeometryError("closed patch has no container boundary")
        a, b = self.bounds[1]
        psi = a + (b - a) * (np.arange(samples) + 0.5) / samples
        return np.stack([np.ones(samples), psi], axis=-1)

    def describe(self):
        return {
            "kind": "polar",
            "norm": self.norm.params(),
            "radius": self.radius,
            "center": self.center.tolist(),
            "amplitude": self.amplitude,
            "mode": list(self.mode),
            "profile": self.profile,
            "clip_angle": self.clip_angle,
        }


class GraphPatch(SurfacePatch):
    """``X(u1, u2) = (u1, u2, f(u1, u2))`` over a rectangle.

    ``height`` returns ``f``; ``height_grad`` and ``height_hess`` are
    optional analytic derivatives.
    """

    kind = "graph"

    def __init__(self, height, bounds, orientation=1, height_grad=None,
                 height_hess=None):
        def point(u):
            u = np.asarray(u, dtype=float)
            return np.concatenate([u, height(u)[..., None]], axis=-1)

        jac = hes = None
        if height_grad is not None:
            def jac(u):
                u = np.asarray(u, dtype=float)
                g = height_grad(u)
                top = np.broadcast_to(np.eye(2), u.shape[:-1] + (2, 2))
                return np.concatenate([top, g[..., None, :]], axis=-2)
        if height_hess is not None:
            def hes(u):
                u = np.asarray(u, dtype=float)
                out = np.zeros(u.shape[:-1] + (3, 2, 2))
                out[..., 2, :, :] = height_hess(u)
                return out
        super().__init__(point, bounds, periodic=False, orientation=orientation,
                         jacobian=jac, hessian=hes)


# ---------------------------------------------------------------------------
# constructors


def _resolve_clip(clip):
    if clip is None or clip == "none":
        return None
    if isinstance(clip, str):
        from .regions import HalfSpace

        if clip == "upper_halfspace":
            return HalfSpace([0.0, 0.0, 1.0])
        raise GeometryError(f"unknown clip {clip!r}")
    return clip


def sphere_cap(r=1.0, center=(0.0, 0.0, 0.0), clip=None):
    """Round sphere of radius ``r``, optionally clipped by a container."""
    return PolarPatch(EuclideanNorm(3), r, center, _resolve_clip(clip))


def wulff_patch(F, r=1.0, center=(0.0, 0.0, 0.0), region=None):
    """``x0 + r Phi(z)``; clipped by ``region`` when given."""
    return PolarPatch(F, r, center, _resolve_clip(region))


def perturbed_wulff(F, r=1.0, amplitude=0.1, mode=(2, 0), center=(0.0, 0.0, 0.0),
                    region=None, profile="neumann"):
    """Wulff patch with radial profile ``r (1 + a P)``.

    ``P = cos(l pi s) cos(m psi) w(s)^m`` in cap coordinates, so on clipped
    patches it has zero normal derivative along the boundary.  With
    ``profile="pinned"`` the cosine is ``cos((l - 1/2) pi s)`` and the
    boundary curve stays fixed while the contact angle changes.
    """
    return PolarPatch(F, r, center, _resolve_clip(region), amplitude=amplitude,
                      mode=mode, profile=profile)


def graph_patch(height, bounds=((-1.0, 1.0), (-1.0, 1.0)), orientation=1,
                height_grad=None, height_hess=None):
    return GraphPatch(height, bounds, orientation, height_grad, height_hess)


# ---------------------------------------------------------------------------
# operations


def normal(patch, u):
    return patch.normal(u)


def curvature_from_geometry(F, geom):
    """Anisotropic principal curvatures at every node of ``geom``.

    Eigenvalues of ``A_F(nu) S`` are computed from the symmetric matrix
    ``A^(1/2) S A^(1/2)`` in an orthonormal tangent basis.
    """
    xu, xuu, nu = geom.xu, geom.xuu, geom.normal
    g = np.swapaxes(xu, -1, -2) @ xu
    second = -np.einsum("...i,...ijk->...jk", nu, xuu)
    gw, gv = np.linalg.eigh(g)
    g_ih = gv @ (gv / np.sqrt(gw)[..., None, :]).swapaxes(-1, -2)
    shape_op = g_ih @ second @ g_ih
    basis = xu @ g_ih
    a = np.swapaxes(basis, -1, -2) @ F.hess(nu) @ basis
    a = 0.5 * (a + np.swapaxes(a, -1, -2))
    aw, av = np.linalg.eigh(a)
    if np.any(aw <= 0):
        raise EvaluationError("A_F not positive definite at a surface node")
    a_h = av @ (av * np.sqrt(aw)[..., None, :]).swapaxes(-1, -2)
    sym = a_h @ shape_op @ a_h
    sym = 0.5 * (sym + np.swapaxes(sym, -1, -2))
    kappa = np.linalg.eigvalsh(sym)
    return AnisotropicCurvature(
        principal=kappa,
        mean=kappa.mean(axis=-1),
        gauss=np.prod(kappa, axis=-1),
        nu_f=F.grad(nu),
        normal=nu,
    )


def aniso_curvatures(F, patch, u):
    return curvature_from_geometry(F, patch.geometry(u))


def weingarten_matrix(F, geom):
    """Matrix of ``d nu_F`` in the basis ``X_u G^(-1/2)`` (not symmetric)."""
    xu, xuu, nu = geom.xu, geom.xuu, geom.normal
    g = np.swapaxes(xu, -1, -2) @ xu
    second = -np.einsum("...i,...ijk->...jk", nu, xuu)
    gw, gv = np.linalg.eigh(g)
    g_ih = gv @ (gv / np.sqrt(gw)[..., None, :]).swapaxes(-1, -2)
    basis = xu @ g_ih
    a = np.swapaxes(basis, -1, -2) @ F.hess(nu) @ basis
    return a @ (g_ih @ second @ g_ih)


def integrate(patch, integrand, order=64):
    """``∫ f dA`` by tensor Gauss-Legendre quadrature.

    ``integrand`` receives the :class:`PatchGeometry` of all nodes and
    returns one value per node.
    """
    if order < 2:
        raise ValueError("quadrature order must be at least 2")
    u, w = patch.quadrature(order)
    geom = patch.geometry(u)
    vals = np.asarray(integrand(geom), dtype=float)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise EvaluationError(f"integrand is not finite at parameter {u[k].tolist()}")
    return accurate_sum(vals * geom.area * w)


@dataclass
class BoundaryTrace:
    points: np.ndarray
    normal: np.ndarray
    nu_f: np.ndarray
    container_normal: np.ndarray
    contact: np.ndarray
    omega: np.ndarray = None
    transversality: np.ndarray = field(default=None)

    @property
    def min_contact(self):
        return float(self.contact.min())

    @property
    def omega_min(self):
        return None if self.omega is None else float(self.omega.min())

    @property
    def omega_max(self):
        return None if self.omega is None else float(self.omega.max())


def boundary_trace(F, patch, K, samples=256):
    """Contact data of ``F`` along the boundary curve of ``patch`` on ``∂K``."""
    if samples < 8:
        raise ValueError("need at least 8 boundary samples")
    u = patch.boundary_parameters(samples)
    x = patch.point(u)
    nbar = K.boundary_normal(x)
    nu = patch.normal(u)
    nu_f = F.grad(nu)
    cos = np.einsum("ij,ij->i", nu, nbar)
    if np.any(np.abs(np.abs(cos) - 1.0) <= TANGENCY_TOL):
        raise TransversalityError("surface meets the container tangentially")
    omega = None
    if getattr(K, "kind", None) == "half_space" and np.allclose(K.inward, [0, 0, 1]):
        omega = -nu_f[:, 2]
    return BoundaryTrace(
        points=x, normal=nu, nu_f=nu_f, container_normal=nbar,
        contact=np.einsum("ij,ij->i", nu_f, nbar), omega=omega,
        transversality=np.abs(cos),
    )
