"""Retraction families of the supported domains and a generic numeric verifier.

A retraction is an idempotent holomorphic self-map fixing its image pointwise.
Every family here is wrapped in a :class:`RetractionSpec` that knows its
domain and evaluates on point batches; :func:`verify_retraction` runs the
three defining checks (image membership, idempotence, pointwise fixing) on
seeded samples and reports violations instead of raising.
"""

from __future__ import annotations

import numpy as np

from . import domains as dom
from . import maps
from .domains import SymMat2, as_point, gauge_value, sample_domain
from .errors import BranchAmbiguityError
from .report import CheckResult, VerificationReport

_FIX_SEED_OFFSET = 90001


# ---------------------------------------------------------------------------
# closed-form families


def _batch(z, dim):
    arr = np.asarray(z, dtype=complex)
    if arr.ndim == 0 or arr.shape[-1] != dim:
        raise ValueError("expected points of dimension %d" % dim)
    return arr


def bidisc_graph_retraction(a, z):
    """(z1, z2) -> (z1, a*z1): retraction of the bidisc onto the graph line
    {(w, a*w)}, for |a| <= 1.
    """
    a = complex(a)
    if abs(a) > 1.0 + 1e-12:
        raise ValueError("graph parameter must satisfy |a| <= 1")
    z = _batch(z, 2)
    return np.stack([z[..., 0], a * z[..., 0]], axis=-1)


def bidisc_blend_retraction(a, t, z):
    """(z1, z2) -> (t*z1 + (1-t)*conj(a)*z2) * (1, a) for unimodular a.

    Idempotence uses |a| = 1, so the construction rejects other moduli.
    """
    a = complex(a)
    t = float(t)
    if abs(abs(a) - 1.0) > 1e-12:
        raise ValueError("blend parameter requires |a| = 1")
    if not 0.0 <= t <= 1.0:
        raise ValueError("blend weight t must lie in [0, 1]")
    z = _batch(z, 2)
    w = t * z[..., 0] + (1.0 - t) * np.conj(a) * z[..., 1]
    return np.stack([w, a * w], axis=-1)


def lie_even_retraction(z):
    """Pairwise averaging retraction of an even-dimensional Lie ball.

    Pairs map by (u, v) -> ((u - i v)/2, (v + i u)/2); the image is the
    ball-like set {(w1, i w1, ..., wk, i wk)}.  Requires dimension 2k >= 4.
    """
    z = np.asarray(z, dtype=complex)
    n = z.shape[-1]
    if n % 2 != 0 or n < 4:
        raise ValueError("dimension must be even and >= 4")
    u = z[..., 0::2]
    v = z[..., 1::2]
    out = np.empty_like(z)
    out[..., 0::2] = (u - 1j * v) / 2.0
    out[..., 1::2] = (v + 1j * u) / 2.0
    return out


def tetra_royal_retraction(z):
    """(x1, x2, x3) -> (x1, x2, x1*x2): retraction of the tetrablock onto the
    royal variety {(a, b, ab)}.
    """
    z = _batch(z, 3)
    return np.stack([z[..., 0], z[..., 1], z[..., 0] * z[..., 1]], axis=-1)


def tetra_symmetric_retraction(z):
    """(x1, x2, x3) -> ((x1+x2)/2, (x1+x2)/2, x3): retraction of the
    tetrablock onto its symmetrized-bidisc slice {(s/2, s/2, p)}.
    """
    z = _batch(z, 3)
    m = (z[..., 0] + z[..., 1]) / 2.0
    return np.stack([m, m, z[..., 2]], axis=-1)


def indicatrix_slope_retraction(t, z):
    """(z1, z2, z3) -> (z1, t*z1, z3) on the gauge ball; never expands the
    gauge and fixes the slice {(w, t*w, u)} pointwise.
    """
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError("slope t must lie in [0, 1]")
    z = _batch(z, 3)
    return np.stack([z[..., 0], t * z[..., 0], z[..., 2]], axis=-1)


def indicatrix_plane_retraction(z):
    """(z1, z2, z3) -> (z1, z2, 0) on the gauge ball."""
    z = _batch(z, 3)
    out = z.copy()
    out[..., 2] = 0.0
    return out


# ---------------------------------------------------------------------------
# lifted retractions


def ball_slice_retraction(slc: maps.AffineSlice, center=None):
    """Holomorphic retraction of the unit ball onto (slice intersect ball).

    Built as the Moebius conjugate of a complex-linear orthogonal projection:
    the involution at a chosen center c on the slice sends the slice to a
    linear subspace through 0, where projecting is a retraction.
    """
    n = slc.point.shape[0]
    if center is None:
        center = slc.point
    center = as_point(center, n)
    if not slc.contains(center):
        raise ValueError("center must lie on the slice")
    if np.linalg.norm(center) >= 1.0:
        raise ValueError("center must lie in the open unit ball")

    onb = slc._onb
    delta = (1.0 - np.linalg.norm(center)) / 2.0
    probes = center[None, :] + delta * onb
    images = maps.ball_moebius(center, probes, validate=False)
    q, _ = np.linalg.qr(images.T)

    def retract(z):
        z = _batch(z, n)
        w = maps.ball_moebius(center, z, validate=False)
        comp = w @ np.conj(q)
        return maps.ball_moebius(center, comp @ q.T, validate=False)

    return retract


def _round_key(vec):
    return tuple(np.round(np.asarray(vec, dtype=complex), 13).tolist())


class RetractionSpec:
    """A named retraction with its domain, evaluable on point batches."""

    def __init__(self, tag, domain, fn, params=None):
        self.tag = tag
        self.domain = domain
        self.params = dict(params or {})
        self._fn = fn

    def __call__(self, z, validate=True):
        if isinstance(z, SymMat2):
            z = z.as_vec()
        z = np.asarray(z, dtype=complex)
        if validate:
            dom.require_inside(self.domain, z)
        return self._fn(z)

    def __repr__(self):
        return "RetractionSpec(%r, domain=%s)" % (self.tag, self.domain.label())


def ellipsoid_lift(
    powers,
    slc: maps.AffineSlice,
    base_root,
    locus_margin=1e-3,
    locus_samples=512,
    seed=0,
    steps=256,
) -> RetractionSpec:
    """Lift of a ball retraction through the coordinate power map of an
    ellipsoid: root o (slice retraction) o power, with the root branch pinned
    at base_root.

    Construction is refused when seeded slice samples come within
    locus_margin of a coordinate zero carrying an exponent >= 2, mirroring
    the hypothesis that the slice avoids the locus set.
    """
    powers = tuple(int(p) for p in powers)
    n = len(powers)
    base_root = as_point(base_root, n)
    if all(p == 1 for p in powers):
        desc = dom.ball(n)
    else:
        desc = dom.ellipsoid(*powers)
    dom.require_inside(desc, base_root)
    w0 = maps.ellipsoid_power(base_root, powers)
    if not slc.contains(w0):
        raise ValueError("the power image of base_root must lie on the slice")

    critical = [j for j, p in enumerate(powers) if p >= 2]
    if critical:
        probe = maps.sample_slice_ball(slc, locus_samples, seed)
        worst = float(np.min(np.abs(probe[:, critical])))
        worst = min(worst, float(np.min(np.abs(w0[critical]))))
        if worst < locus_margin:
            raise ValueError(
                "slice approaches the power-map locus (min coordinate modulus %.3g)" % worst
            )

    inner = ball_slice_retraction(slc, center=w0)

    def fn(z):
        w = inner(maps.ellipsoid_power(z, powers))
        return maps.ellipsoid_root(w, powers, w0, base_root, steps=steps)

    params = {
        "powers": powers,
        "slice_point": slc.point,
        "slice_directions": slc.directions,
        "base_root": base_root,
    }
    return RetractionSpec("ellipsoid-lift", desc, fn, params)


def matrix_ball_lift(inner, base: SymMat2, steps=256, royal_margin=1e-10) -> RetractionSpec:
    """Lift a retraction of the tetrablock (image avoiding the royal variety)
    to the symmetric matrix ball through the 2-proper projection.

    inner maps tetrablock point batches into its retract M; the fiber branch
    over M is selected by continuation from the base matrix along straight
    segments.  Paths meeting the royal variety raise BranchAmbiguityError.
    Fiber choices are cached per segment endpoint so repeated grid queries do
    not re-run the continuation.
    """
    if not isinstance(base, SymMat2):
        base = SymMat2.from_vec(as_point(base, 3))
    x0 = maps.matrix_to_tetra(base.as_vec())
    m0 = np.asarray(inner(x0[None, :]), dtype=complex)[0]
    if np.max(np.abs(m0 - x0)) > 1e-9:
        raise ValueError("the base matrix must project into the inner retract")
    a0 = base.a12
    if abs(a0 * a0 - (x0[0] * x0[1] - x0[2])) > 1e-12:
        raise ValueError("inconsistent base fiber data")
    cache = {}

    def branch_offdiag(m):
        flat = m.reshape(-1, 3)
        out = np.empty(flat.shape[0], dtype=complex)
        misses = []
        for i in range(flat.shape[0]):
            key = _round_key(flat[i])
            hit = cache.get(key)
            if hit is None:
                misses.append(i)
            else:
                out[i] = hit
        if misses:
            idx = np.array(misses)
            t = np.linspace(0.0, 1.0, steps + 1)
            seg = x0[None, None, :] + t[:, None, None] * (flat[idx][None, :, :] - x0[None, None, :])
            g = seg[..., 0] * seg[..., 1] - seg[..., 2]
            vals = maps._track_power_root(g, 2, a0, royal_margin)
            for j, i in enumerate(misses):
                out[i] = vals[j]
                cache[_round_key(flat[i])] = vals[j]
        return out.reshape(m.shape[:-1])

    def fn(z):
        x = maps.matrix_to_tetra(z)
        m = np.asarray(inner(x), dtype=complex)
        a12 = branch_offdiag(m)
        return np.stack([m[..., 0], a12, m[..., 1]], axis=-1)

    return RetractionSpec("matrix-lift", dom.matrix_ball(), fn, {"base": base.as_vec()})


# ---------------------------------------------------------------------------
# spec factory


def make_retraction(tag, **params) -> RetractionSpec:
    """Build a RetractionSpec from a tag and JSON-style parameters."""
    if tag == "bidisc-graph":
        a = complex(params.pop("a"))
        _no_extra(params)
        fn = lambda z: bidisc_graph_retraction(a, z)
        fn(np.zeros((1, 2), dtype=complex))
        return RetractionSpec(tag, dom.polydisc(2), fn, {"a": a})
    if tag == "bidisc-blend":
        a = complex(params.pop("a"))
        t = float(params.pop("t"))
        _no_extra(params)
        fn = lambda z: bidisc_blend_retraction(a, t, z)
        fn(np.zeros((1, 2), dtype=complex))
        return RetractionSpec(tag, dom.polydisc(2), fn, {"a": a, "t": t})
    if tag == "lie-even":
        n = int(params.pop("dim"))
        _no_extra(params)
        if n % 2 != 0 or n < 4:
            raise ValueError("dimension must be even and >= 4")
        return RetractionSpec(tag, dom.lie_ball(n), lie_even_retraction, {"dim": n})
    if tag == "tetra-royal":
        _no_extra(params)
        return RetractionSpec(tag, dom.tetrablock(), tetra_royal_retraction, {})
    if tag == "tetra-sym":
        _no_extra(params)
        return RetractionSpec(tag, dom.tetrablock(), tetra_symmetric_retraction, {})
    if tag == "indicatrix-slope":
        t = float(params.pop("t"))
        _no_extra(params)
        fn = lambda z: indicatrix_slope_retraction(t, z)
        fn(np.zeros((1, 3), dtype=complex))
        return RetractionSpec(tag, dom.indicatrix_ball(), fn, {"t": t})
    if tag == "indicatrix-plane":
        _no_extra(params)
        return RetractionSpec(tag, dom.indicatrix_ball(), indicatrix_plane_retraction, {})
    if tag == "ellipsoid-lift":
        powers = params.pop("powers")
        slc = maps.AffineSlice(params.pop("slice_point"), params.pop("slice_directions"))
        base_root = params.pop("base_root")
        rest = {
            k: params.pop(k) for k in ("locus_margin", "locus_samples", "seed") if k in params
        }
        _no_extra(params)
        return ellipsoid_lift(powers, slc, base_root, **rest)
    if tag == "matrix-lift":
        inner = params.pop("inner")
        base = params.pop("base")
        rest = {k: params.pop(k) for k in ("steps", "royal_margin") if k in params}
        _no_extra(params)
        return matrix_ball_lift(inner, base, **rest)
    if tag == "linear3":
        m = np.asarray(params.pop("matrix"), dtype=complex)
        _no_extra(params)
        if m.shape != (3, 3):
            raise ValueError("linear retraction matrix must be 3x3")
        if np.max(np.abs(m @ m - m)) > 1e-12:
            raise ValueError("linear retraction matrix must be idempotent to 1e-12")
        fn = lambda z: z @ m.T
        return RetractionSpec(tag, dom.indicatrix_ball(), fn, {"matrix": m})
    raise ValueError("unknown retraction tag %r" % (tag,))


def _no_extra(params):
    if params:
        raise ValueError("unknown retraction parameters: %s" % ", ".join(sorted(params)))


# ---------------------------------------------------------------------------
# verifiers


def per_sample_violations(spec: RetractionSpec, samples=10000, seed=0):
    """Per-sample violation data behind :func:`verify_retraction`.

    Returns arrays keyed 'image' (gauge of R(z) minus one), 'idempotence'
    (residual of R(R(z)) against R(z)), 'fixing' (residual of R on image
    samples of a fresh stream), plus the originating points.
    """
    desc = spec.domain
    zs = sample_domain(desc, samples, seed)
    rz = spec(zs, validate=False)
    image = np.asarray(gauge_value(desc, rz), dtype=float) - 1.0
    idem = np.linalg.norm(spec(rz, validate=False) - rz, axis=-1)
    vs = spec(sample_domain(desc, samples, seed + _FIX_SEED_OFFSET), validate=False)
    fixing = np.linalg.norm(spec(vs, validate=False) - vs, axis=-1)
    return {"image": image, "idempotence": idem, "fixing": fixing, "points": zs, "image_points": vs}


def verify_retraction(
    spec: RetractionSpec, domain=None, samples=10000, seed=0, tol=1e-10
) -> VerificationReport:
    """Run the three retraction checks on seeded samples.

    image: gauge of R(z) stays <= 1 + tol; idempotence: R(R(z)) = R(z);
    fixing: R fixes image samples drawn as R of a fresh sample stream.
    Failures are reported, never raised.
    """
    desc = spec.domain
    if domain is not None and domain != desc:
        raise ValueError("retraction domain %s does not match %s" % (desc.label(), domain.label()))
    data = per_sample_violations(spec, samples, seed)
    i = int(np.argmax(data["image"]))
    image = CheckResult("image", float(data["image"][i]), data["points"][i], samples, tol)
    i = int(np.argmax(data["idempotence"]))
    idem = CheckResult("idempotence", float(data["idempotence"][i]), data["points"][i], samples, tol)
    i = int(np.argmax(data["fixing"]))
    fixing = CheckResult("fixing", float(data["fixing"][i]), data["image_points"][i], samples, tol)
    return VerificationReport((image, idem, fixing))


def compose_retracts_check(
    r1: RetractionSpec, r2: RetractionSpec, common_point, samples=2000, seed=0, tol=1e-10
) -> VerificationReport:
    """Sampled mutual-inverse check for a pair of retractions sharing a point.

    Verifies that both fix the supplied common point and that R_j o R_(3-j)
    restricted to image samples of R_j is the identity.
    """
    if r1.domain != r2.domain:
        raise ValueError("retractions must share a domain")
    w = as_point(common_point, r1.domain.dim)
    cp = max(
        float(np.linalg.norm(r1(w[None, :], validate=False)[0] - w)),
        float(np.linalg.norm(r2(w[None, :], validate=False)[0] - w)),
    )
    checks = [CheckResult("common-point", cp, w, 1, tol)]
    zs = sample_domain(r1.domain, samples, seed)
    for name, ra, rb in (("first-after-second", r1, r2), ("second-after-first", r2, r1)):
        va = ra(zs, validate=False)
        d = np.linalg.norm(ra(rb(va, validate=False), validate=False) - va, axis=-1)
        i = int(np.argmax(d))
        checks.append(CheckResult(name, float(d[i]), va[i], samples, tol))
    return VerificationReport(tuple(checks))


def left_inverse_composition_check(
    spec: RetractionSpec, n_omega=16, samples=2000, seed=0, tol=1e-10
) -> VerificationReport:
    """Per-omega report on whether the tetrablock left inverses factor through
    the retraction: F_omega o R = F_omega.

    The identity is reported, not asserted: it can (and does) fail for
    retractions whose internal geodesics have non-unique left inverses, and
    the report shows which omega fail.
    """
    if spec.domain.tag != "tetrablock":
        raise ValueError("left-inverse composition check runs on the tetrablock")
    zs = sample_domain(spec.domain, samples, seed)
    rz = spec(zs, validate=False)
    checks = []
    for k in range(n_omega):
        omega = np.exp(2j * np.pi * _van_der_corput(k))
        lhs = maps.tetra_left_inverse(omega, rz, validate=False)
        rhs = maps.tetra_left_inverse(omega, zs, validate=False)
        d = np.abs(lhs - rhs)
        i = int(np.argmax(d))
        checks.append(
            CheckResult("omega=%.12g%+.12gj" % (omega.real, omega.imag), float(d[i]), zs[i], samples, tol)
        )
    return VerificationReport(tuple(checks))


def _van_der_corput(k: int) -> float:
    f, x = 0.5, 0.0
    while k:
        x += f * (k & 1)
        k >>= 1
        f /= 2.0
    return x
