"""Minkowski norms (smooth anisotropies) and the objects derived from them.

Every norm is a one-homogeneous function ``F`` on ``R^d`` (``d >= 3``) with
``F > 0`` away from the origin and ``D^2 F`` positive definite on the tangent
space of the sphere.  Evaluators are vectorized over leading axes:
``value`` maps ``(..., d) -> (...)``, ``grad`` maps to ``(..., d)`` and
``hess`` to ``(..., d, d)``.

Families with analytic derivatives: :class:`EuclideanNorm`,
:class:`EllipsoidalNorm`, :class:`TiltedNorm` (``F(xi) + <xi, b>``, which
covers the capillary norm ``|xi| - cos(theta0) xi_d``).  The
:class:`SampledNorm` family is built from a table of sphere values and uses
central finite differences.
"""

from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from .errors import DomainError, EvaluationError, InvalidNormError, NumericalError
from .sphere import fibonacci_sphere, normalize, tangent_basis

UNIT_TOL = 1e-12
FD_STEP = 1e-5
FD_STEP_HESS = 1e-4
D3_STEP = 2e-5


def _check_unit(z):
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(np.linalg.norm(z, axis=-1) - 1.0) > UNIT_TOL):
        raise DomainError("expected unit vector(s), |z| = 1 within 1e-12")
    return z


@dataclass(frozen=True)
class DualNorm:
    """Settings of the numerical solver for ``F°(x) = sup <x,z>/F(z)``."""

    starts: int = 20
    tol: float = 1e-12
    maxiter: int = 500
    accept_tol: float = 1e-7


class MinkowskiNorm:
    """Base class.  Subclasses provide ``value``, ``grad`` and ``hess``."""

    family = "abstract"
    closed_form_dual = False

    def __init__(self, dim=3, solver=None):
        if int(dim) < 3:
            raise DomainError("ambient dimension must be at least 3")
        self.dim = int(dim)
        self.solver = DualNorm() if solver is None else solver

    # -- evaluators -------------------------------------------------------
    def value(self, xi):
        raise NotImplementedError

    def grad(self, xi):
        raise NotImplementedError

    def hess(self, xi):
        raise NotImplementedError

    def third(self, z, a, b, h=D3_STEP):
        """``D^3F(z)[a, b]`` by central differences of the Hessian."""
        b = np.asarray(b, dtype=float)
        hp = self.hess(z + h * b)
        hm = self.hess(z - h * b)
        return np.einsum("...ij,...j->...i", (hp - hm) / (2 * h), a)

    def __call__(self, xi):
        return self.value(xi)

    # -- dual -------------------------------------------------------------
    def _dual_closed(self, x):
        return None

    def dual(self, x):
        x = np.asarray(x, dtype=float)
        out = self._dual_closed(x)
        if out is None:
            out, _ = numeric_dual(self, x)
        return out

    def wulff_normal(self, p):
        """Unit ``z`` with ``Phi(z) = p`` for ``p`` on the unit Wulff shape.

        For a general ``p`` this is the maximizer in the dual-norm
        supremum, i.e. the outward normal of the Wulff shape through
        ``p / F°(p)``.
        """
        _, z = numeric_dual(self, np.asarray(p, dtype=float))
        return z

    def dual_grad(self, x):
        """Gradient of ``F°`` at ``x != 0``: ``z / F(z)`` at the maximizer."""
        x = np.asarray(x, dtype=float)
        z = self.wulff_normal(x)
        return z / self.value(z)[..., None]

    def cahn_hoffman(self, z):
        return self.grad(z)

    def params(self):
        return {"family": self.family}

    def __repr__(self):
        return f"{type(self).__name__}({self.params()})"


class EuclideanNorm(MinkowskiNorm):
    family = "euclidean"
    closed_form_dual = True

    def value(self, xi):
        return np.linalg.norm(xi, axis=-1)

    def grad(self, xi):
        xi = np.asarray(xi, dtype=float)
        r = np.linalg.norm(xi, axis=-1, keepdims=True)
        return xi / r

    def hess(self, xi):
        xi = np.asarray(xi, dtype=float)
        r = np.linalg.norm(xi, axis=-1)[..., None, None]
        u = xi[..., :, None] / r
        return (np.eye(self.dim) - u * np.swapaxes(u, -1, -2)) / r

    def third(self, z, a, b, h=None):
        z = np.asarray(z, dtype=float)
        r = np.linalg.norm(z, axis=-1, keepdims=True)
        u = z / r
        ua = np.sum(u * a, axis=-1, keepdims=True)
        ub = np.sum(u * b, axis=-1, keepdims=True)
        ab = np.sum(np.asarray(a) * b, axis=-1, keepdims=True)
        return (3 * ua * ub * u - ab * u - ua * b - ub * a) / r**2

    def _dual_closed(self, x):
        return np.linalg.norm(x, axis=-1)

    def wulff_normal(self, p):
        return normalize(p)


class EllipsoidalNorm(MinkowskiNorm):
    """``F(xi) = sqrt(xi^T M xi)`` for symmetric positive-definite ``M``."""

    family = "ellipsoidal"
    closed_form_dual = True

    def __init__(self, matrix, solver=None):
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidNormError("matrix must be square")
        if not np.allclose(m, m.T, atol=1e-14):
            raise InvalidNormError("matrix must be symmetric")
        if np.linalg.eigvalsh(m).min() <= 0:
            raise InvalidNormError("matrix must be positive definite")
        super().__init__(m.shape[0], solver)
        self.matrix = m
        self.inverse = np.linalg.inv(m)

    def value(self, xi):
        xi = np.asarray(xi, dtype=float)
        return np.sqrt(np.einsum("...i,ij,...j->...", xi, self.matrix, xi))

    def grad(self, xi):
        xi = np.asarray(xi, dtype=float)
        return (xi @ self.matrix) / self.value(xi)[..., None]

    def hess(self, xi):
        xi = np.asarray(xi, dtype=float)
        f = self.value(xi)[..., None, None]
        mx = (xi @ self.matrix)[..., :, None]
        return (self.matrix - mx * np.swapaxes(mx, -1, -2) / f**2) / f

    def third(self, z, a, b, h=None):
        z = np.asarray(z, dtype=float)
        f = self.value(z)[..., None]
        mz, ma, mb = z @ self.matrix, np.asarray(a) @ self.matrix, np.asarray(b) @ self.matrix
        za = np.sum(mz * a, axis=-1, keepdims=True)
        dbf = np.sum(mz * b, axis=-1, keepdims=True) / f
        ab = np.sum(mb * a, axis=-1, keepdims=True)
        return -ma * dbf / f**2 - (mb * za + mz * ab) / f**3 + 3 * mz * za * dbf / f**4

    def _dual_closed(self, x):
        return np.sqrt(np.einsum("...i,ij,...j->...", x, self.inverse, x))

    def wulff_normal(self, p):
        return normalize(np.asarray(p, dtype=float) @ self.inverse)

    def params(self):
        return {"family": self.family, "matrix": self.matrix.tolist()}


class TiltedNorm(MinkowskiNorm):
    """``F(xi) + <xi, shift>``: same Hessian, Wulff shape translated by ``shift``."""

    family = "tilted"

    def __init__(self, base, shift, label=None, extra=None):
        super().__init__(base.dim, base.solver)
        shift = np.asarray(shift, dtype=float)
        if isinstance(base, TiltedNorm):
            # a tilt of a tilt is one tilt of the underlying norm
            base, shift = base.base, base.shift + shift
        self.base = base
        self.shift = shift
        if self.shift.shape != (base.dim,):
            raise DomainError("shift vector has the wrong dimension")
        # positivity of F + <., b> is equivalent to the origin lying inside
        # the translated Wulff shape
        if float(base.dual(-self.shift)) >= 1.0:
            raise InvalidNormError("tilted norm is not positive")
        if label is not None:
            self.family = label
        self.extra = {} if extra is None else dict(extra)
        self.closed_form_dual = base.closed_form_dual

    def value(self, xi):
        xi = np.asarray(xi, dtype=float)
        return self.base.value(xi) + xi @ self.shift

    def grad(self, xi):
        return self.base.grad(xi) + self.shift

    def hess(self, xi):
        return self.base.hess(xi)

    def third(self, z, a, b, h=D3_STEP):
        return self.base.third(z, a, b, h)

    def _dual_closed(self, x):
        b = self.shift
        if isinstance(self.base, (EuclideanNorm, EllipsoidalNorm)):
            # root of |x - r b|_Q = r with Q = I or M^-1: a quadratic in r
            q = np.eye(self.dim) if isinstance(self.base, EuclideanNorm) else self.base.inverse
            qb = q @ b
            xb = x @ qb
            c = 1.0 - b @ qb
            xx = np.einsum("...i,ij,...j->...", x, q, x)
            return (-xb + np.sqrt(xb * xb + c * xx)) / c
        if not self.base.closed_form_dual:
            # bisection would call the numerical base dual hundreds of times
            return numeric_dual(self, x)[0]
        return _bisect_tilted_dual(self.base, b, x)

    def dual(self, x):
        return self._dual_closed(np.asarray(x, dtype=float))

    def wulff_normal(self, p):
        p = np.asarray(p, dtype=float)
        r = self.dual(p)[..., None]
        q = p / np.where(r > 0, r, 1.0)
        return self.base.wulff_normal(q - self.shift)

    def params(self):
        out = {"family": self.family}
        out.update(self.extra)
        if self.family == "tilted":
            out["base"] = self.base.params()
            out["shift"] = self.shift.tolist()
        return out


def _bisect_tilted_dual(base, b, x, iters=200):
    """Solve ``base°(x - r b) = r`` for ``r`` (unique root, bracketed)."""
    x = np.asarray(x, dtype=float)
    shape = x.shape[:-1]
    xf = x.reshape(-1, x.shape[-1])
    fx = np.atleast_1d(base.dual(xf))
    contraction = 1.0 - float(base.dual(-b))
    lo = np.zeros_like(fx)
    hi = fx / contraction * (1 + 1e-12) + 1e-300
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        g = base.dual(xf - mid[:, None] * b) - mid
        pos = g > 0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
        if np.all(hi - lo <= 4e-16 * np.maximum(hi, 1e-300)):
            break
    return (0.5 * (lo + hi)).reshape(shape)


class ReversedNorm(MinkowskiNorm):
    """``F*(xi) = F(-xi)`` for families without a closed-form reversal."""

    family = "reversed"

    def __init__(self, base):
        super().__init__(base.dim, base.solver)
        self.base = base
        self.closed_form_dual = base.closed_form_dual

    def value(self, xi):
        return self.base.value(-np.asarray(xi, dtype=float))

    def grad(self, xi):
        return -self.base.grad(-np.asarray(xi, dtype=float))

    def hess(self, xi):
        return self.base.hess(-np.asarray(xi, dtype=float))

    def dual(self, x):
        return self.base.dual(-np.asarray(x, dtype=float))

    def wulff_normal(self, p):
        return -self.base.wulff_normal(-np.asarray(p, dtype=float))

    def params(self):
        return {"family": "reversed", "base": self.base.params()}


class SampledNorm(MinkowskiNorm):
    """Anisotropy given by a table of values on the unit sphere.

    The table is fitted by least squares with a polynomial of total degree
    ``degree`` in the sphere coordinates and extended one-homogeneously.
    Derivatives are central finite differences, so their accuracy is limited
    (roughly 1e-10 for the gradient and 1e-7 for the Hessian).
    """

    family = "sampled"

    def __init__(self, points, values, degree=6, fit_tol=1e-6, solver=None):
        pts = normalize(np.asarray(points, dtype=float))
        vals = np.asarray(values, dtype=float)
        if pts.ndim != 2 or vals.shape != pts.shape[:1]:
            raise EvaluationError("table must be rows of (z_1..z_d, F)")
        super().__init__(pts.shape[1], solver)
        if np.any(vals <= 0):
            raise InvalidNormError("sampled values must be positive")
        self.points, self.values, self.degree = pts, vals, int(degree)
        self._powers = [
            c for k in range(self.degree + 1)
            for c in combinations_with_replacement(range(self.dim), k)
        ]
        self._exponents = np.array(
            [np.bincount(np.asarray(c, dtype=int), minlength=self.dim) for c in self._powers])
        if len(pts) < len(self._powers):
            raise EvaluationError("table too small for the fit degree")
        design = self._design(pts)
        self.coef, *_ = np.linalg.lstsq(design, vals, rcond=None)
        # dense coefficient tensor: evaluation contracts one axis at a time
        # instead of materialising the design matrix
        self._tensor = np.zeros((self.degree + 1,) * self.dim)
        np.add.at(self._tensor, tuple(self._exponents.T), self.coef)
        resid = np.max(np.abs(design @ self.coef - vals))
        self.fit_residual = float(resid)
        if resid > fit_tol * np.max(vals):
            raise EvaluationError(
                f"table is not resolved by a degree-{self.degree} fit "
                f"(residual {resid:.2e})"
            )
        check = fibonacci_sphere(200, self.dim)
        eig = np.linalg.eigvalsh(hessian_operator(self, check, check_positive=False))
        if eig.min() <= 0:
            raise InvalidNormError("sampled norm violates the convexity condition")

    def _design(self, u):
        pw = u[..., None] ** np.arange(self.degree + 1)
        out = pw[..., 0, self._exponents[:, 0]]
        for j in range(1, self.dim):
            out = out * pw[..., j, self._exponents[:, j]]
        return out

    def value(self, xi):
        xi = np.asarray(xi, dtype=float)
        r = np.linalg.norm(xi, axis=-1)
        u = xi / np.where(r > 0, r, 1.0)[..., None]
        return r * self._poly(u)

    def _poly(self, u):
        shape = u.shape[:-1]
        deg = self.degree + 1
        flat = u.reshape(-1, self.dim)
        pw = np.empty(flat.shape + (deg,))
        pw[..., 0] = 1.0
        for k in range(1, deg):
            pw[..., k] = pw[..., k - 1] * flat
        acc = pw[:, -1, :] @ self._tensor.reshape(-1, deg).T
        for j in range(self.dim - 2, -1, -1):
            acc = np.einsum("bjk,bk->bj", acc.reshape(len(acc), -1, deg), pw[:, j, :])
        return acc.reshape(shape)

    def grad(self, xi):
        xi = np.asarray(xi, dtype=float)
        out = np.empty(xi.shape)
        for j in range(self.dim):
            e = np.zeros(self.dim)
            e[j] = FD_STEP
            out[..., j] = (self.value(xi + e) - self.value(xi - e)) / (2 * FD_STEP)
        return out

    def hess(self, xi):
        xi = np.asarray(xi, dtype=float)
        cols = []
        for j in range(self.dim):
            e = np.zeros(self.dim)
            e[j] = FD_STEP_HESS
            cols.append((self.grad(xi + e) - self.grad(xi - e)) / (2 * FD_STEP_HESS))
        h = np.stack(cols, axis=-1)
        return 0.5 * (h + np.swapaxes(h, -1, -2))

    def params(self):
        return {"family": "sampled", "degree": self.degree, "rows": len(self.values)}

    @classmethod
    def from_csv(cls, path, **kw):
        table = np.loadtxt(path, delimiter=",", ndmin=2)
        return cls(table[:, :-1], table[:, -1], **kw)

    @classmethod
    def from_function(cls, func, dim=3, count=400, **kw):
        pts = fibonacci_sphere(count, dim)
        return cls(pts, func(pts), **kw)


# ---------------------------------------------------------------------------
# numerical dual norm


def _polish_dual(F, x, z, f, g, objective, scale, tol, iters=8):
    """Newton steps on the optimality condition ``Phi(z) parallel to x``."""
    xb = tangent_basis(normalize(np.where(scale[:, None] > 0, x, 1.0)))
    for _ in range(iters):
        rel = np.linalg.norm(g, axis=-1) * F.value(z) / scale
        act = rel > tol
        if not act.any():
            break
        za = z[act]
        t = tangent_basis(za)
        b = xb[act]
        r = np.einsum("nij,ni->nj", b, F.grad(za))
        jac = np.swapaxes(b, -1, -2) @ F.hess(za) @ t
        try:
            dw = -np.linalg.solve(jac, r[..., None])[..., 0]
        except np.linalg.LinAlgError:
            break
        zt = normalize(za + np.einsum("nij,nj->ni", t, dw))
        ft, gt = objective(zt, x[act])
        ok = ft >= f[act] - 1e-15 * np.abs(f[act])
        idx = np.flatnonzero(act)[ok]
        z[idx], f[idx], g[idx] = zt[ok], ft[ok], gt[ok]
        if not ok.any():
            break
    return z, f, g


def numeric_dual(F, x, settings=None):
    """Multi-start projected gradient ascent of ``<x, z>/F(z)`` on the sphere.

    Returns ``(value, maximizer)``.  Raises :class:`NumericalError` (with the
    best lower bound in ``.best``) when some point does not reach
    ``accept_tol`` on the relative gradient within ``maxiter`` iterations.
    """
    s = F.solver if settings is None else settings
    x = np.asarray(x, dtype=float)
    shape = x.shape[:-1]
    xf = x.reshape(-1, F.dim)
    nx = np.linalg.norm(xf, axis=-1)
    if not np.all(nx > 0):
        # F°(0) = 0; the maximizer is arbitrary there
        val = np.zeros(len(xf))
        z = np.zeros_like(xf)
        z[:, -1] = 1.0
        live = nx > 0
        if live.any():
            val[live], z[live] = numeric_dual(F, xf[live], settings)
        return val.reshape(shape), z.reshape(shape + (F.dim,))
    starts = fibonacci_sphere(s.starts, F.dim)

    def objective(z, xx):
        fz = F.value(z)
        xz = np.einsum("ij,ij->i", xx, z)
        g = xx / fz[:, None] - (xz / fz**2)[:, None] * F.grad(z)
        return xz / fz, g

    # short ascent from every start, then continue from the best one
    m = len(xf)
    xx = np.repeat(xf, s.starts, axis=0)
    z = np.tile(starts, (m, 1))
    f, g = objective(z, xx)
    alpha = np.full(len(z), 0.25)
    for _ in range(8):
        zt = normalize(z + alpha[:, None] * g)
        ft, gt = objective(zt, xx)
        ok = ft >= f
        z = np.where(ok[:, None], zt, z)
        f = np.where(ok, ft, f)
        g = np.where(ok[:, None], gt, g)
        alpha = np.where(ok, alpha * 1.5, alpha * 0.5)
    best = np.argmax(f.reshape(m, s.starts), axis=1)
    pick = np.arange(m) * s.starts + best
    z, f, g, alpha = z[pick], f[pick], g[pick], alpha[pick]
    xx = xf

    scale = np.where(nx > 0, nx, 1.0)
    done = np.zeros(m, dtype=bool)
    for _ in range(s.maxiter):
        rel = np.linalg.norm(g, axis=-1) * F.value(z) / scale
        # close to the maximizer the Newton polish below takes over
        done |= rel <= max(s.tol, 1e-6)
        if done.all():
            break
        act = ~done
        zt, ft, gt = z.copy(), f.copy(), g.copy()
        zt[act] = normalize(z[act] + alpha[act, None] * g[act])
        ft[act], gt[act] = objective(zt[act], xx[act])
        ok = act & (ft >= f - 4e-16 * np.abs(f))
        sdiff = zt - z
        ydiff = g - gt
        sy = np.einsum("ij,ij->i", sdiff, ydiff)
        ss = np.einsum("ij,ij->i", sdiff, sdiff)
        bb = np.where(sy > 0, ss / np.where(sy > 0, sy, 1.0), alpha * 2.0)
        stalled = ok & (ss < 1e-30)
        done |= stalled
        z = np.where(ok[:, None], zt, z)
        f = np.where(ok, ft, f)
        g = np.where(ok[:, None], gt, g)
        alpha = np.where(ok, np.clip(bb, 1e-10, 1e4), alpha * 0.5)
        done |= act & (alpha < 1e-14)
    z, f, g = _polish_dual(F, xf, z, f, g, objective, scale, s.tol)
    rel = np.linalg.norm(g, axis=-1) * F.value(z) / scale
    val = np.where(nx > 0, f, 0.0)
    if np.any((rel > s.accept_tol) & (nx > 0)):
        raise NumericalError(
            f"dual norm ascent did not converge (relative gradient {rel.max():.2e})",
            best=val.reshape(shape),
        )
    return val.reshape(shape), z.reshape(shape + (F.dim,))


# ---------------------------------------------------------------------------
# operations


@dataclass(frozen=True)
class CapillaryVector:
    """``omega0`` together with the constant vector ``E^F``."""

    omega0: float
    vector: np.ndarray


def euclidean(dim=3):
    return EuclideanNorm(dim)


def ellipsoidal(matrix):
    return EllipsoidalNorm(matrix)


def capillary(theta0, dim=3):
    """``|xi| - cos(theta0) <xi, E_d>`` for ``theta0`` in ``(0, pi)``."""
    if not 0.0 < theta0 < np.pi:
        raise DomainError("theta0 out of open interval (0, π)")
    e = np.zeros(dim)
    e[-1] = 1.0
    return TiltedNorm(
        EuclideanNorm(dim), -np.cos(theta0) * e, label="capillary",
        extra={"theta0": float(theta0)},
    )


def omega_range(F):
    """Open interval of admissible ``omega0``: ``(-F(E_d), F(-E_d))``."""
    e = np.zeros(F.dim)
    e[-1] = 1.0
    return -float(F.value(e)), float(F.value(-e))


def capillary_vector(F, omega0):
    lo, hi = omega_range(F)
    if not lo < omega0 < hi:
        raise DomainError(f"omega0 out of open interval ({lo:.6g}, {hi:.6g})")
    e = np.zeros(F.dim)
    e[-1] = 1.0
    if omega0 > 0:
        vec = -F.grad(-e) / F.value(-e)
    elif omega0 < 0:
        vec = F.grad(e) / F.value(e)
    else:
        vec = e
    return CapillaryVector(float(omega0), np.asarray(vec, dtype=float))


def tilt(F, omega0):
    """The norm ``F + omega0 <., E^F>`` and the capillary vector used."""
    cv = capillary_vector(F, omega0)
    if omega0 == 0:
        return F, cv
    extra = {"base": F.params(), "omega0": float(omega0)}
    return TiltedNorm(F, omega0 * cv.vector, label="tilted", extra=extra), cv


def reversal(F):
    """``F*(z) = F(-z)``."""
    if isinstance(F, (EuclideanNorm, EllipsoidalNorm)):
        return F
    if isinstance(F, ReversedNorm):
        return F.base
    if isinstance(F, TiltedNorm):
        base = reversal(F.base)
        if F.family == "capillary":
            return capillary(np.pi - F.extra["theta0"], F.dim)
        return TiltedNorm(base, -F.shift, label="tilted")
    return ReversedNorm(F)


def cahn_hoffman(F, z):
    """``Phi(z) = grad F(z) + F(z) z`` at unit ``z``; equals ``DF(z)``."""
    return F.grad(_check_unit(z))


def dual_norm(F, x):
    return F.dual(x)


def hessian_operator(F, z, basis=None, check_positive=True):
    """Matrix of ``A_F|_z`` in an orthonormal basis of the tangent space.

    Uses ``D^2F(z)`` restricted to ``z^perp``, which equals the spherical
    Hessian plus ``F(z) Id`` by one-homogeneity.
    """
    z = _check_unit(z)
    t = tangent_basis(z) if basis is None else np.asarray(basis, dtype=float)
    a = np.swapaxes(t, -1, -2) @ F.hess(z) @ t
    a = 0.5 * (a + np.swapaxes(a, -1, -2))
    if check_positive and np.linalg.eigvalsh(a).min() <= 0:
        raise InvalidNormError("A_F is not positive definite")
    return a


@dataclass
class AngleCheck:
    passed: bool
    worst_margin: float
    trials: int


def angle_comparison_check(F, trials, seed=0):
    """Sample ``x, z`` and ``y`` on the minimizing geodesic from ``x`` to ``z``.

    Checks ``<Phi(x), z> <= <Phi(y), z>`` and reports the smallest slack.
    The ``y = x`` equality case is checked separately.
    """
    if trials < 1:
        raise DomainError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    x = normalize(rng.normal(size=(trials, F.dim)))
    z = normalize(rng.normal(size=(trials, F.dim)))
    cos = np.einsum("ij,ij->i", x, z)
    keep = cos > -1 + 1e-6
    x, z, cos = x[keep], z[keep], cos[keep]
    ang = np.arccos(np.clip(cos, -1, 1))
    t = rng.uniform(0.0, 1.0, size=len(x)) * ang
    w = normalize(z - cos[:, None] * x)
    y = np.cos(t)[:, None] * x + np.sin(t)[:, None] * w
    px = np.einsum("ij,ij->i", F.grad(x), z)
    py = np.einsum("ij,ij->i", F.grad(y), z)
    slack = py - px
    worst = float(slack.min()) if len(slack) else 0.0
    return AngleCheck(worst >= -1e-12, worst, int(len(slack)))
