"""Explicit holomorphic maps between the domains: biholomorphisms, the
2-proper projection onto the tetrablock with its fibers and critical set,
matrix-ball automorphisms, left-inverse functionals, proper power maps of
ellipsoids and their branch-tracked roots, and the ball Moebius involution.

All maps accept single points or batches (points on the last axis).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domains import (
    CLOSURE_TOL,
    SymMat2,
    as_point,
    ball,
    lie_ball,
    matrix_ball,
    polydisc,
    require_inside,
    tetrablock,
)
from .errors import BranchAmbiguityError, DomainViolation

_DET_GUARD = 1e-14
_DENOM_GUARD = 1e-14


def _batch(z, dim):
    arr = np.asarray(z, dtype=complex)
    if arr.ndim == 0 or arr.shape[-1] != dim:
        raise ValueError("expected points of dimension %d" % dim)
    return arr


# ---------------------------------------------------------------------------
# Lie ball <-> bidisc and matrix ball


def lie2_to_bidisc(z, closure=False, tol=CLOSURE_TOL, validate=True):
    """Biholomorphism of the two-dimensional Lie ball onto the bidisc:
    (z1, z2) -> (z1 + i z2, -z1 + i z2).
    """
    z = _batch(z, 2)
    if validate:
        require_inside(lie_ball(2), z, closure, tol)
    u = z[..., 0] + 1j * z[..., 1]
    v = -z[..., 0] + 1j * z[..., 1]
    return np.stack([u, v], axis=-1)


def bidisc_to_lie2(w, closure=False, tol=CLOSURE_TOL, validate=True):
    """Inverse of :func:`lie2_to_bidisc`."""
    w = _batch(w, 2)
    if validate:
        require_inside(polydisc(2), w, closure, tol)
    z1 = (w[..., 0] - w[..., 1]) / 2.0
    z2 = (w[..., 0] + w[..., 1]) / (2.0j)
    return np.stack([z1, z2], axis=-1)


def lie3_to_matrix(z, closure=False, tol=CLOSURE_TOL, validate=True):
    """Biholomorphism of the three-dimensional Lie ball onto the matrix ball:
    (z1, z2, z3) -> [[z1 + i z2, z3], [z3, -z1 + i z2]].

    Returns a SymMat2 for a single point, else a batch of (a11, a12, a22)
    vectors.
    """
    single = np.asarray(z, dtype=complex).ndim == 1
    z = _batch(z, 3)
    if validate:
        require_inside(lie_ball(3), z, closure, tol)
    a11 = z[..., 0] + 1j * z[..., 1]
    a22 = -z[..., 0] + 1j * z[..., 1]
    vec = np.stack([a11, z[..., 2], a22], axis=-1)
    if single:
        return SymMat2.from_vec(vec)
    return vec


def matrix_to_lie3(a, closure=False, tol=CLOSURE_TOL, validate=True):
    """Inverse of :func:`lie3_to_matrix`."""
    if isinstance(a, SymMat2):
        a = a.as_vec()
    a = _batch(a, 3)
    if validate:
        require_inside(matrix_ball(), a, closure, tol)
    z1 = (a[..., 0] - a[..., 2]) / 2.0
    z2 = (a[..., 0] + a[..., 2]) / (2.0j)
    return np.stack([z1, z2, a[..., 1]], axis=-1)


# ---------------------------------------------------------------------------
# the 2-proper map onto the tetrablock


def matrix_to_tetra(a):
    """(a11, a22, a11*a22 - a12^2): the 2-proper map onto the tetrablock."""
    if isinstance(a, SymMat2):
        a = a.as_vec()
    a = _batch(a, 3)
    det = a[..., 0] * a[..., 2] - a[..., 1] ** 2
    return np.stack([a[..., 0], a[..., 2], det], axis=-1)


@dataclass(frozen=True)
class FiberResult:
    """Preimages under a proper map, with the map multiplicity."""

    points: tuple
    multiplicity: int = 2


def tetra_fiber(x, closure=False, tol=CLOSURE_TOL, validate=True) -> FiberResult:
    """Both matrices over a tetrablock point; a single (diagonal) matrix
    exactly when x1*x2 - x3 = 0, i.e. on the critical image.
    """
    x = as_point(x, 3)
    if validate:
        require_inside(tetrablock(), x, closure, tol)
    disc = x[0] * x[1] - x[2]
    a12 = complex(np.sqrt(disc))
    if disc == 0:
        return FiberResult((SymMat2(x[0], 0.0, x[1]),))
    return FiberResult((SymMat2(x[0], a12, x[1]), SymMat2(x[0], -a12, x[1])))


def is_tetra_critical(a, tol: float = 0.0) -> bool:
    """Critical points of the projection onto the tetrablock: a12 = 0."""
    if not isinstance(a, SymMat2):
        a = SymMat2.from_vec(as_point(a, 3))
    return bool(abs(a.a12) <= tol)


def tetra_jacobian_det(a):
    """Determinant of the complex Jacobian of the tetrablock projection in the
    coordinates (a11, a12, a22); vanishes exactly on the diagonal matrices.
    """
    if isinstance(a, SymMat2):
        a = a.as_vec()
    a = _batch(a, 3)
    jac = np.zeros(a.shape[:-1] + (3, 3), dtype=complex)
    jac[..., 0, 0] = 1.0
    jac[..., 1, 2] = 1.0
    jac[..., 2, 0] = a[..., 2]
    jac[..., 2, 1] = -2.0 * a[..., 1]
    jac[..., 2, 2] = a[..., 0]
    return np.linalg.det(jac)


# ---------------------------------------------------------------------------
# automorphisms and left inverses


def matrix_ball_aut_vec(lam, a):
    """Vectorized form of :func:`matrix_ball_aut` on (a11, a12, a22) batches."""
    lam = complex(lam)
    if abs(lam) >= 1.0:
        raise ValueError("automorphism parameter must lie in the open unit disc")
    a = _batch(a, 3)
    lb = np.conj(lam)
    # M = I - conj(B) A with B the antidiagonal matrix of lam
    m11 = 1.0 - lb * a[..., 1]
    m12 = -lb * a[..., 2]
    m21 = -lb * a[..., 0]
    m22 = 1.0 - lb * a[..., 1]
    det = m11 * m22 - m12 * m21
    if np.any(np.abs(det) < _DET_GUARD):
        raise DomainViolation("singular matrix inverse; input outside the matrix ball")
    n11 = a[..., 0]
    n12 = a[..., 1] - lam
    n22 = a[..., 2]
    r11 = (n11 * m22 - n12 * m21) / det
    r12 = (-n11 * m12 + n12 * m11) / det
    r21 = (n12 * m22 - n22 * m21) / det
    r22 = (-n12 * m12 + n22 * m11) / det
    asym = np.max(np.abs(r12 - r21))
    if asym > 1e-12:
        raise ValueError("automorphism produced an asymmetric matrix (residual %.3g)" % asym)
    return np.stack([r11, (r12 + r21) / 2.0, r22], axis=-1)


def matrix_ball_aut(lam, a, validate=True):
    """Matrix Moebius automorphism of the symmetric matrix ball swapping the
    antidiagonal matrix of lam with zero:

        A -> (A - B) (I - conj(B) A)^(-1),  B = [[0, lam], [lam, 0]].

    Evaluated by explicit 2x2 inversion with a determinant guard.
    """
    single = isinstance(a, SymMat2)
    vec = a.as_vec() if single else _batch(a, 3)
    if validate:
        require_inside(matrix_ball(), vec)
    out = matrix_ball_aut_vec(lam, vec)
    if single:
        return SymMat2.from_vec(out)
    return out


def tetra_left_inverse(omega, x, validate=True):
    """Left-inverse functional (omega*x3 - x2) / (omega*x1 - 1) of the
    tetrablock; maps the tetrablock into the unit disc for |omega| = 1.
    """
    omega = complex(omega)
    if abs(abs(omega) - 1.0) > 1e-12:
        raise ValueError("omega must be unimodular")
    single = np.asarray(x, dtype=complex).ndim == 1
    x = _batch(x, 3)
    if validate:
        require_inside(tetrablock(), x)
    den = omega * x[..., 0] - 1.0
    if np.any(np.abs(den) < _DENOM_GUARD):
        raise DomainViolation("left-inverse denominator below guard; input rejected")
    val = (omega * x[..., 2] - x[..., 1]) / den
    if single:
        return complex(val)
    return val


def symmetrization(z, w):
    """(z, w) -> (z + w, z*w); maps the bidisc onto the symmetrized bidisc."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return z + w, z * w


# ---------------------------------------------------------------------------
# proper power maps of ellipsoids and branch-tracked roots


def _normalize_powers(powers):
    powers = tuple(int(p) for p in powers)
    if not powers or any(p < 1 for p in powers):
        raise ValueError("exponents must be positive integers")
    return powers


def ellipsoid_power(z, powers):
    """Coordinatewise power map (z1^p1, ..., zn^pn)."""
    powers = _normalize_powers(powers)
    z = _batch(z, len(powers))
    return np.stack([z[..., j] ** p for j, p in enumerate(powers)], axis=-1)


def _track_power_root(path, p, root0, zero_tol):
    """Continue the p-th root along a sampled path of nonzero complex values.

    path has shape (steps+1, ...) with path[0] constant-equal to root0**p.
    The argument is unwound step by step; steps must rotate by less than
    pi/2 each, which the caller guarantees by subdividing.
    """
    if np.any(np.abs(path) < zero_tol):
        raise BranchAmbiguityError(
            "continuation path passes within %g of a branch point" % zero_tol
        )
    ratios = path[1:] / path[:-1]
    steps = np.angle(ratios)
    if np.any(np.abs(steps) > 0.5 * np.pi):
        raise BranchAmbiguityError("argument step too large; path subdivision insufficient")
    theta = p * np.angle(root0) + np.sum(steps, axis=0)
    return np.abs(path[-1]) ** (1.0 / p) * np.exp(1j * theta / p)


def ellipsoid_root(x, powers, basepoint, base_branch, steps=256, zero_tol=1e-10):
    """Branch of (x1^(1/p1), ..., xn^(1/pn)) continued from a stored basepoint.

    The branch is pinned by base_branch (a root vector over basepoint) and is
    continued along the straight segment from basepoint to x, unwinding the
    argument coordinatewise.  Raises BranchAmbiguityError when the segment
    passes within zero_tol of a coordinate zero for an exponent >= 2.
    """
    powers = _normalize_powers(powers)
    n = len(powers)
    single = np.asarray(x, dtype=complex).ndim == 1
    x = _batch(x, n)
    basepoint = as_point(basepoint, n)
    base_branch = as_point(base_branch, n)
    resid = np.max(np.abs(ellipsoid_power(base_branch, powers) - basepoint))
    if resid > 1e-9:
        raise ValueError("base_branch is not a root vector over basepoint (residual %.3g)" % resid)

    flat = x.reshape(-1, n)
    out = np.empty_like(flat)
    t = np.linspace(0.0, 1.0, steps + 1)
    for j, p in enumerate(powers):
        if p == 1:
            out[:, j] = flat[:, j]
            continue
        seg = basepoint[j] + t[:, None] * (flat[:, j][None, :] - basepoint[j])
        out[:, j] = _track_power_root(seg, p, base_branch[j], zero_tol)
    out = out.reshape(x.shape)
    if single:
        return out[()]
    return out


# ---------------------------------------------------------------------------
# ball Moebius involution


def ball_moebius(a, z, validate=True):
    """Involutive automorphism of the unit ball exchanging 0 and a.

    Convention: ball_moebius(a, 0) = a and ball_moebius(0, z) = -z.
    """
    a = as_point(a)
    n = a.shape[0]
    single = np.asarray(z, dtype=complex).ndim == 1
    z = _batch(z, n)
    if validate:
        require_inside(ball(n), a)
        require_inside(ball(n), z)
    na2 = float(np.sum(np.abs(a) ** 2))
    if na2 == 0.0:
        return -z
    s = np.sqrt(1.0 - na2)
    inner = np.sum(z * np.conj(a), axis=-1)
    proj = (inner / na2)[..., None] * a
    orth = z - proj
    out = (a - proj - s * orth) / (1.0 - inner)[..., None]
    if single:
        return out[()]
    return out


# ---------------------------------------------------------------------------
# affine slices of the ball (used by lifted retractions)


@dataclass(frozen=True)
class AffineSlice:
    """Affine subspace {point + span(directions)} of C^n.

    directions are rows; they must be linearly independent.
    """

    point: np.ndarray
    directions: np.ndarray
    _onb: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        point = as_point(self.point)
        dirs = np.asarray(self.directions, dtype=complex)
        if dirs.ndim != 2 or dirs.shape[1] != point.shape[0]:
            raise ValueError("directions must be rows of the ambient dimension")
        smin = np.linalg.svd(dirs, compute_uv=False)[-1]
        if smin < 1e-10:
            raise ValueError("slice directions are numerically dependent")
        q, _ = np.linalg.qr(dirs.T)
        object.__setattr__(self, "point", point)
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "_onb", q.T)

    @property
    def codim_basis(self):
        return self._onb

    def contains(self, z, tol=1e-9) -> bool:
        z = as_point(z, self.point.shape[0])
        d = z - self.point
        comp = self._onb.conj() @ d
        resid = d - self._onb.T @ comp
        return bool(np.linalg.norm(resid) <= tol)


def sample_slice_ball(slc: AffineSlice, count: int, seed: int, max_rounds=400):
    """Seeded samples of (slice intersect unit ball), shape (count, n)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    k = slc._onb.shape[0]
    out = []
    have = 0
    for _ in range(max_rounds):
        batch = max(4 * count, 256)
        coef = (rng.normal(size=(batch, 2 * k)).view(complex)) * rng.random((batch, 1))
        coef *= 2.0
        pts = slc.point[None, :] + coef @ slc._onb
        keep = pts[np.linalg.norm(pts, axis=1) < 1.0]
        if keep.size:
            out.append(keep)
            have += keep.shape[0]
        if have >= count:
            break
    else:
        raise RuntimeError("slice sampler failed; slice may not meet the ball")
    return np.concatenate(out, axis=0)[:count]


# ---------------------------------------------------------------------------
# descriptor plumbing


@dataclass(frozen=True)
class MapDescriptor:
    """Tagged union naming one of the explicit maps with its parameters."""

    tag: str
    params: tuple = ()

    def label(self) -> str:
        return self.tag


_MAP_BUILDERS = {}


def _register(tag):
    def deco(fn):
        _MAP_BUILDERS[tag] = fn
        return fn

    return deco


@_register("lie2-to-bidisc")
def _m_phi():
    return lie2_to_bidisc


@_register("bidisc-to-lie2")
def _m_phi_inv():
    return bidisc_to_lie2


@_register("lie3-to-matrix")
def _m_psi():
    return lie3_to_matrix


@_register("matrix-to-lie3")
def _m_psi_inv():
    return matrix_to_lie3


@_register("matrix-to-tetra")
def _m_lambda():
    return matrix_to_tetra


@_register("symmetrization")
def _m_sym():
    return lambda zw: np.stack(symmetrization(zw[..., 0], zw[..., 1]), axis=-1)


@_register("ellipsoid-power")
def _m_power(powers):
    powers = _normalize_powers(powers)
    return lambda z: ellipsoid_power(z, powers)


@_register("ellipsoid-root")
def _m_root(powers, basepoint, base_branch):
    powers = _normalize_powers(powers)
    basepoint = as_point(basepoint)
    base_branch = as_point(base_branch)
    return lambda x: ellipsoid_root(x, powers, basepoint, base_branch)


@_register("matrix-ball-aut")
def _m_aut(lam):
    lam = complex(lam)
    if abs(lam) >= 1.0:
        raise ValueError("automorphism parameter must lie in the open unit disc")
    return lambda a: matrix_ball_aut(lam, a)


@_register("tetra-left-inverse")
def _m_left_inv(omega):
    omega = complex(omega)
    if abs(abs(omega) - 1.0) > 1e-12:
        raise ValueError("omega must be unimodular")
    return lambda x: tetra_left_inverse(omega, x)


@_register("ball-moebius")
def _m_moebius(a):
    a = as_point(a)
    if np.linalg.norm(a) >= 1.0:
        raise ValueError("moebius center must lie in the open unit ball")
    return lambda z: ball_moebius(a, z)


def make_map(tag, *params):
    """Build the callable for a map tag, validating its parameters."""
    try:
        builder = _MAP_BUILDERS[tag]
    except KeyError:
        raise ValueError("unknown map tag %r" % (tag,)) from None
    return builder(*params)
