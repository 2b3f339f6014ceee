"""Membership gauges, boundary samplers and point types for the classical domains.

Every supported domain is described by a :class:`DomainDescriptor` and carries
a scalar gauge: a point lies in the open domain exactly when the gauge is < 1
and in the closure when it is <= 1.  The gauge doubles as the numeric witness
quoted by the verifiers and the CLI.

Points are plain numpy complex vectors.  Points of the symmetric-matrix ball
are :class:`SymMat2` values, or equivalently length-3 vectors in the fixed
ordering (a11, a12, a22).  Tetrablock points are length-3 vectors
(x1, x2, x3) = (a11, a22, det A) for some matrix A in the fiber.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainViolation

CLOSURE_TOL = 1e-12


# ---------------------------------------------------------------------------
# point helpers


def as_point(z, dim=None):
    """Coerce to a 1-d complex vector, optionally enforcing the dimension."""
    if isinstance(z, SymMat2):
        z = z.as_vec()
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    if arr.ndim != 1:
        raise ValueError("expected a single point, got shape %s" % (arr.shape,))
    if dim is not None and arr.shape[0] != dim:
        raise ValueError("dimension mismatch: expected %d, got %d" % (dim, arr.shape[0]))
    if not np.all(np.isfinite(arr)):
        raise ValueError("point entries must be finite")
    return arr


def symmetric_dot(z):
    """The bilinear square z.z = z_1^2 + ... + z_n^2 (not the Hermitian product)."""
    return np.sum(np.asarray(z, dtype=complex) ** 2, axis=-1)


def lie_norm(z):
    """Minkowski gauge of the Lie ball (the Lie norm).

    N(z)^2 = ||z||^2 + sqrt(||z||^4 - |z.z|^2); the open Lie ball is exactly
    {N < 1}, its closure {N <= 1}.
    """
    z = np.asarray(z, dtype=complex)
    nn = np.sum(np.abs(z) ** 2, axis=-1)
    c = np.abs(symmetric_dot(z))
    return np.sqrt(nn + np.sqrt(np.maximum(nn * nn - c * c, 0.0)))


# ---------------------------------------------------------------------------
# 2x2 symmetric matrices


@dataclass(frozen=True)
class SymMat2:
    """Complex symmetric 2x2 matrix [[a11, a12], [a12, a22]].

    Symmetry is structural: only one off-diagonal entry is stored.
    """

    a11: complex
    a12: complex
    a22: complex

    def __post_init__(self):
        for name in ("a11", "a12", "a22"):
            v = complex(getattr(self, name))
            if not (np.isfinite(v.real) and np.isfinite(v.imag)):
                raise ValueError("matrix entries must be finite")
            object.__setattr__(self, name, v)

    def as_matrix(self):
        return np.array([[self.a11, self.a12], [self.a12, self.a22]])

    def as_vec(self):
        return np.array([self.a11, self.a12, self.a22])

    @classmethod
    def from_vec(cls, v):
        v = np.asarray(v, dtype=complex)
        if v.shape != (3,):
            raise ValueError("expected a length-3 vector (a11, a12, a22)")
        return cls(v[0], v[1], v[2])

    @classmethod
    def from_matrix(cls, m, tol=1e-12):
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("expected a 2x2 matrix")
        scale = max(1.0, float(np.max(np.abs(m))))
        if abs(m[0, 1] - m[1, 0]) > tol * scale:
            raise ValueError("matrix is not symmetric")
        return cls(m[0, 0], (m[0, 1] + m[1, 0]) / 2.0, m[1, 1])

    def singular_values(self):
        smax, smin = sym2_singular_values(self.a11, self.a12, self.a22)
        return float(smax), float(smin)


def sym2_singular_values(a11, a12, a22):
    """Closed-form singular values of [[a11, a12], [a12, a22]], largest first.

    Uses sigma^2 = (|A|_F^2 +- sqrt(|A|_F^4 - 4|det A|^2)) / 2, i.e. the
    trace/determinant form of the eigenvalues of A*A.  Exact to rounding at
    this size and vectorizes over entry arrays.
    """
    a11 = np.asarray(a11, dtype=complex)
    a12 = np.asarray(a12, dtype=complex)
    a22 = np.asarray(a22, dtype=complex)
    fro2 = np.abs(a11) ** 2 + 2.0 * np.abs(a12) ** 2 + np.abs(a22) ** 2
    det = a11 * a22 - a12 * a12
    gap = np.sqrt(np.maximum(fro2 * fro2 - 4.0 * np.abs(det) ** 2, 0.0))
    smax = np.sqrt((fro2 + gap) / 2.0)
    smin = np.sqrt(np.maximum((fro2 - gap) / 2.0, 0.0))
    return smax, smin


def tetra_fiber_offdiag(x):
    """Principal-branch off-diagonal entry of a matrix over the tetrablock point.

    Solves a12^2 = x1*x2 - x3.  The two possible signs give matrices conjugate
    under diag(1, -1), hence equal singular values, so the branch choice never
    affects membership.
    """
    x = np.asarray(x, dtype=complex)
    return np.sqrt(x[..., 0] * x[..., 1] - x[..., 2])


# ---------------------------------------------------------------------------
# descriptors


_TAGS = (
    "disc",
    "polydisc",
    "ball",
    "lie",
    "riii2",
    "tetrablock",
    "symbidisc",
    "ellipsoid",
    "indicatrix",
)


@dataclass(frozen=True)
class DomainDescriptor:
    """Tagged union naming one of the supported domains with its parameters."""

    tag: str
    dim: int
    powers: tuple = ()

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise ValueError("unknown domain tag %r" % (self.tag,))

    def label(self) -> str:
        if self.tag == "ellipsoid":
            return "ellipsoid:" + ",".join(str(p) for p in self.powers)
        if self.tag in ("polydisc", "ball", "lie"):
            return "%s:%d" % (self.tag, self.dim)
        return self.tag


def disc() -> DomainDescriptor:
    return DomainDescriptor("disc", 1)


def polydisc(n: int) -> DomainDescriptor:
    _check_dim(n)
    return DomainDescriptor("polydisc", n)


def ball(n: int) -> DomainDescriptor:
    _check_dim(n)
    return DomainDescriptor("ball", n)


def lie_ball(n: int) -> DomainDescriptor:
    _check_dim(n)
    return DomainDescriptor("lie", n)


def matrix_ball() -> DomainDescriptor:
    """2x2 complex symmetric matrices with largest singular value < 1."""
    return DomainDescriptor("riii2", 3)


def tetrablock() -> DomainDescriptor:
    return DomainDescriptor("tetrablock", 3)


def sym_bidisc() -> DomainDescriptor:
    return DomainDescriptor("symbidisc", 2)


def ellipsoid(*powers) -> DomainDescriptor:
    if len(powers) == 1 and isinstance(powers[0], (tuple, list)):
        powers = tuple(powers[0])
    powers = tuple(int(p) for p in powers)
    if not powers or any(p < 1 for p in powers):
        raise ValueError("ellipsoid exponents must be positive integers")
    if all(p == 1 for p in powers):
        raise ValueError("ellipsoid requires at least one exponent >= 2 (otherwise use ball)")
    return DomainDescriptor("ellipsoid", len(powers), powers)


def indicatrix_ball() -> DomainDescriptor:
    """Unit ball of the gauge max(|z1|+|z3|, |z2|+|z3|) in C^3."""
    return DomainDescriptor("indicatrix", 3)


def _check_dim(n):
    if int(n) != n or n < 1:
        raise ValueError("dimension must be a positive integer")


# ---------------------------------------------------------------------------
# gauges and membership


def indicatrix_gauge(z):
    """Gauge max(|z1| + |z3|, |z2| + |z3|); a norm on C^3."""
    z = np.asarray(z, dtype=complex)
    a = np.abs(z[..., 0]) + np.abs(z[..., 2])
    b = np.abs(z[..., 1]) + np.abs(z[..., 2])
    return np.maximum(a, b)


def ellipsoid_membership_sum(z, powers):
    """Defining sum |z1|^(2 p1) + ... + |zn|^(2 pn); membership means < 1."""
    z = np.asarray(z, dtype=complex)
    p = np.asarray(tuple(powers), dtype=float)
    return np.sum(np.abs(z) ** (2.0 * p), axis=-1)


def _sym_bidisc_gauge(v):
    v = np.asarray(v, dtype=complex)
    s, p = v[..., 0], v[..., 1]
    d = np.sqrt(s * s - 4.0 * p)
    return np.maximum(np.abs(s + d), np.abs(s - d)) / 2.0


def gauge_value(desc: DomainDescriptor, z):
    """Membership value of z in the domain: < 1 inside, <= 1 on the closure.

    Accepts batches with the point coordinates on the last axis.
    """
    if isinstance(z, SymMat2):
        z = z.as_vec()
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != desc.dim:
        raise ValueError(
            "dimension mismatch for %s: expected %d, got %d" % (desc.label(), desc.dim, z.shape[-1])
        )
    tag = desc.tag
    if tag == "disc":
        return np.abs(z[..., 0])
    if tag == "polydisc":
        return np.max(np.abs(z), axis=-1)
    if tag == "ball":
        return np.sqrt(np.sum(np.abs(z) ** 2, axis=-1))
    if tag == "lie":
        return lie_norm(z)
    if tag == "riii2":
        smax, _ = sym2_singular_values(z[..., 0], z[..., 1], z[..., 2])
        return smax
    if tag == "tetrablock":
        smax, _ = sym2_singular_values(z[..., 0], tetra_fiber_offdiag(z), z[..., 1])
        return smax
    if tag == "symbidisc":
        return _sym_bidisc_gauge(z)
    if tag == "ellipsoid":
        return ellipsoid_membership_sum(z, desc.powers)
    if tag == "indicatrix":
        return indicatrix_gauge(z)
    raise ValueError("unknown domain tag %r" % (tag,))


def membership(desc: DomainDescriptor, z) -> bool:
    """Strict membership: gauge < 1."""
    return bool(gauge_value(desc, as_point(z, desc.dim)) < 1.0)


def in_closure(desc: DomainDescriptor, z, tol: float = CLOSURE_TOL) -> bool:
    """Closure membership with tolerance: gauge <= 1 + tol."""
    return bool(gauge_value(desc, as_point(z, desc.dim)) <= 1.0 + tol)


def require_inside(desc: DomainDescriptor, z, closure=False, tol=CLOSURE_TOL):
    """Raise DomainViolation (with the worst gauge) unless all points qualify."""
    g = gauge_value(desc, z)
    ok = np.all(g <= 1.0 + tol) if closure else np.all(g < 1.0)
    if not ok:
        worst = float(np.max(g))
        mode = "closure of " if closure else ""
        raise DomainViolation(
            "point outside %s%s: gauge %.17g" % (mode, desc.label(), worst), gauge=worst
        )


# spec-level membership operations ------------------------------------------


def in_disc(z) -> bool:
    return bool(abs(complex(np.asarray(z, dtype=complex).reshape(()))) < 1.0)


def in_ball(z, n=None) -> bool:
    z = as_point(z, n)
    return bool(np.linalg.norm(z) < 1.0)


def in_polydisc(z, n=None) -> bool:
    z = as_point(z, n)
    return bool(np.max(np.abs(z)) < 1.0)


def in_lie_ball(z, n=None) -> bool:
    """Literal defining inequalities: ||z|| < 1 and 2||z||^2 - |z.z|^2 < 1."""
    z = as_point(z, n)
    nn = float(np.sum(np.abs(z) ** 2))
    c = abs(complex(symmetric_dot(z)))
    return bool(nn < 1.0 and 2.0 * nn - c * c < 1.0)


def in_riii2(a) -> bool:
    """Largest singular value below one, via the exact 2x2 formula."""
    if not isinstance(a, SymMat2):
        a = SymMat2.from_vec(as_point(a, 3))
    return bool(a.singular_values()[0] < 1.0)


def in_tetrablock(x) -> bool:
    x = as_point(x, 3)
    a12 = complex(tetra_fiber_offdiag(x))
    return in_riii2(SymMat2(x[0], a12, x[1]))


def in_sym_bidisc(s, p) -> bool:
    """True when both roots of t^2 - s t + p lie in the unit disc."""
    return bool(_sym_bidisc_gauge(np.array([s, p], dtype=complex)) < 1.0)


def in_ellipsoid(z, powers) -> bool:
    powers = tuple(int(p) for p in powers)
    z = as_point(z, len(powers))
    return bool(ellipsoid_membership_sum(z, powers) < 1.0)


# ---------------------------------------------------------------------------
# samplers


@dataclass(frozen=True)
class BoundarySample:
    """A boundary point with its stratum label ('shilov' or 'topological')."""

    point: np.ndarray
    stratum: str


def sample_shilov_lie(n: int, count: int, seed: int):
    """Seeded samples w*x from the distinguished boundary of the Lie ball.

    w is unimodular and x a real unit vector, so |s.s| = ||s|| = 1 for every
    sample s.
    """
    _check_dim(n)
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(count, n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    omega = np.exp(2j * np.pi * rng.random(count))
    pts = omega[:, None] * x
    return [BoundarySample(pts[i].copy(), "shilov") for i in range(count)]


def _disc_samples(rng, shape):
    r = np.sqrt(rng.random(shape))
    theta = 2.0 * np.pi * rng.random(shape)
    return r * np.exp(1j * theta)


def _ball_samples(rng, count, n):
    v = rng.normal(size=(count, 2 * n)).view(complex)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    r = rng.random(count) ** (1.0 / (2 * n))
    return r[:, None] * v


def _rejection(rng, count, draw, accept, max_rounds=400):
    out = []
    have = 0
    batch = max(4 * count, 512)
    for _ in range(max_rounds):
        cand = draw(batch)
        keep = cand[accept(cand)]
        if keep.size:
            out.append(keep)
            have += keep.shape[0]
        if have >= count:
            break
    else:
        raise RuntimeError("rejection sampler failed to reach the requested count")
    return np.concatenate(out, axis=0)[:count]


def sample_domain(desc: DomainDescriptor, count: int, seed: int):
    """Seeded interior samples of the domain, shape (count, dim).

    Deterministic for a fixed seed; rejection-based where no direct
    construction exists.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    tag = desc.tag
    n = desc.dim
    if tag == "disc":
        return _disc_samples(rng, (count, 1))
    if tag == "polydisc":
        return _disc_samples(rng, (count, n))
    if tag == "ball":
        return _ball_samples(rng, count, n)
    if tag == "lie":
        return _rejection(
            rng,
            count,
            lambda b: _ball_samples(rng, b, n),
            lambda z: lie_norm(z) < 1.0,
        )
    if tag == "riii2":
        return _rejection(
            rng,
            count,
            lambda b: _disc_samples(rng, (b, 3)),
            lambda v: sym2_singular_values(v[:, 0], v[:, 1], v[:, 2])[0] < 1.0,
        )
    if tag == "tetrablock":
        mats = sample_domain(matrix_ball(), count, seed)
        x3 = mats[:, 0] * mats[:, 2] - mats[:, 1] ** 2
        return np.stack([mats[:, 0], mats[:, 2], x3], axis=1)
    if tag == "symbidisc":
        zw = _disc_samples(rng, (count, 2))
        return np.stack([zw[:, 0] + zw[:, 1], zw[:, 0] * zw[:, 1]], axis=1)
    if tag == "ellipsoid":
        return _rejection(
            rng,
            count,
            lambda b: _disc_samples(rng, (b, n)),
            lambda z: ellipsoid_membership_sum(z, desc.powers) < 1.0,
        )
    if tag == "indicatrix":
        return _rejection(
            rng,
            count,
            lambda b: _disc_samples(rng, (b, 3)),
            lambda z: indicatrix_gauge(z) < 1.0,
        )
    raise ValueError("unknown domain tag %r" % (tag,))
