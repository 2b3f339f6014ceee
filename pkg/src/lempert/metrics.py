"""Invariant-distance machinery: Poincare distance, Caratheodory lower bounds
through explicit function families, Lempert upper bounds through analytic-disc
optimization, explicit geodesics, and the geodesic push-forward check.

Conventions: analytic discs are normalized to f(0) = z, f(sigma) = w with
sigma in (0, 1); the reported bound is then p(0, sigma) = artanh(sigma).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import domains as dom
from . import maps
from .domains import as_point, gauge_value
from .errors import DomainViolation
from .report import CheckResult, VerificationReport

_FEAS_SLACK = 1e-9
_GRID = 512
_CHUNK = 500  # optimizer evaluations per restart; budget // _CHUNK restarts


# ---------------------------------------------------------------------------
# Poincare distance


def poincare(l1, l2) -> float:
    """Poincare distance artanh |(l1 - l2) / (1 - conj(l2) l1)| on the disc."""
    l1 = complex(l1)
    l2 = complex(l2)
    if abs(l1) >= 1.0 or abs(l2) >= 1.0:
        raise DomainViolation("poincare arguments must lie in the open unit disc")
    return float(np.arctanh(abs((l1 - l2) / (1.0 - np.conj(l2) * l1))))


def _pseudo_hyperbolic(u, v):
    return np.abs((u - v) / (1.0 - np.conj(v) * u))


# ---------------------------------------------------------------------------
# analytic discs


@dataclass(frozen=True)
class DiscMap:
    """Analytic disc into C^n with rational components num_j / den_j.

    Coefficients are ascending; a trivial denominator (1,) makes the
    component polynomial, which is the shape the optimizer searches.  Use
    :func:`disc_feasible` to check the boundary-grid membership invariant.
    """

    num: tuple
    den: tuple

    @classmethod
    def polynomial(cls, coeffs) -> "DiscMap":
        """Build from an (degree+1, n) ascending coefficient array."""
        coeffs = np.asarray(coeffs, dtype=complex)
        num = tuple(tuple(coeffs[:, j]) for j in range(coeffs.shape[1]))
        den = tuple(((1.0 + 0.0j),) for _ in range(coeffs.shape[1]))
        return cls(num, den)

    @property
    def dim(self) -> int:
        return len(self.num)

    @property
    def degree(self) -> int:
        return max(
            max(len(c) - 1 for c in self.num),
            max(len(c) - 1 for c in self.den),
        )

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=complex)
        comps = []
        for nc, dc in zip(self.num, self.den):
            val = npoly.polyval(lam, np.asarray(nc, dtype=complex))
            if len(dc) > 1 or dc[0] != 1.0:
                val = val / npoly.polyval(lam, np.asarray(dc, dtype=complex))
            comps.append(val)
        return np.stack(np.broadcast_arrays(*comps), axis=-1)


def boundary_gauge_max(desc, f, grid: int = _GRID) -> float:
    """Maximum domain gauge of f over a uniform boundary grid."""
    lam = np.exp(2j * np.pi * np.arange(grid) / grid)
    return float(np.max(gauge_value(desc, f(lam))))


def disc_feasible(desc, f, slack: float = _FEAS_SLACK, grid: int = _GRID) -> bool:
    """Boundary-grid membership within the stated slack (grid >= 256)."""
    if grid < 256:
        raise ValueError("feasibility grid must have at least 256 points")
    return boundary_gauge_max(desc, f, grid) <= 1.0 + slack


# rational coefficient helpers -----------------------------------------------


def _polymul(a, b):
    return tuple(npoly.polymul(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)))


def _rational_combination(components, matrix):
    """Apply a constant linear map to rational components (num_j, den_j)."""
    matrix = np.asarray(matrix, dtype=complex)
    k = len(components)
    dall = ((1.0 + 0.0j),)
    for _, dc in components:
        dall = _polymul(dall, dc)
    nums = []
    for row in matrix:
        total = np.zeros(1, dtype=complex)
        for j in range(k):
            cof = ((1.0 + 0.0j),)
            for i in range(k):
                if i != j:
                    cof = _polymul(cof, components[i][1])
            term = np.asarray(_polymul(components[j][0], cof), dtype=complex) * row[j]
            total = npoly.polyadd(total, term)
        nums.append(tuple(total))
    return DiscMap(tuple(nums), tuple(dall for _ in range(matrix.shape[0])))


# ---------------------------------------------------------------------------
# explicit geodesics


def _mobius_to_zero(c, pt):
    return (pt - c) / (1.0 - np.conj(c) * pt)


def polydisc_geodesic(z, w):
    """Componentwise Moebius geodesic of the polydisc through z and w.

    Returns (DiscMap, sigma, rho) where rho are the componentwise
    pseudo-hyperbolic distances and sigma = max(rho).
    """
    z = as_point(z)
    w = as_point(w, z.shape[0])
    dom.require_inside(dom.polydisc(z.shape[0]), z)
    dom.require_inside(dom.polydisc(z.shape[0]), w)
    mu = _mobius_to_zero(z, w)
    rho = np.abs(mu)
    sigma = float(np.max(rho))
    if sigma == 0.0:
        raise ValueError("endpoints must be distinct")
    e = mu / sigma
    num = tuple((z[j], e[j]) for j in range(z.shape[0]))
    den = tuple(((1.0 + 0.0j), np.conj(z[j]) * e[j]) for j in range(z.shape[0]))
    return DiscMap(num, den), sigma, rho


@dataclass(frozen=True)
class BidiscGeodesic:
    disc: DiscMap
    sigma: float
    unique_left_inverse: bool


def bidisc_geodesic(z, w) -> BidiscGeodesic:
    """Geodesic of the bidisc through distinct z, w, tagged with whether its
    left inverse is unique (it is not exactly when both components are disc
    automorphisms).
    """
    z = as_point(z, 2)
    w = as_point(w, 2)
    f, sigma, rho = polydisc_geodesic(z, w)
    both_auto = bool(np.min(rho) >= sigma * (1.0 - 1e-12))
    return BidiscGeodesic(f, sigma, not both_auto)


def ball_geodesic(z, w):
    """Geodesic of the unit ball through z and w via the Moebius involution."""
    z = as_point(z)
    n = z.shape[0]
    w = as_point(w, n)
    desc = dom.ball(n)
    dom.require_inside(desc, z)
    dom.require_inside(desc, w)
    v = maps.ball_moebius(z, w, validate=False)
    sigma = float(np.linalg.norm(v))
    if sigma == 0.0:
        raise ValueError("endpoints must be distinct")
    u = v / sigma
    na2 = float(np.sum(np.abs(z) ** 2))
    if na2 == 0.0:
        num = tuple((0.0j, -u[j]) for j in range(n))
        den = tuple(((1.0 + 0.0j),) for _ in range(n))
        return DiscMap(num, den), sigma
    s = np.sqrt(1.0 - na2)
    proj = (np.sum(u * np.conj(z)) / na2) * z
    lin = proj + s * (u - proj)
    inner = np.sum(u * np.conj(z))
    num = tuple((z[j], -lin[j]) for j in range(n))
    den = tuple(((1.0 + 0.0j), -inner) for _ in range(n))
    return DiscMap(num, den), sigma


def royal_geodesic(x, y, tol=1e-12):
    """Geodesic of the tetrablock through two royal points (a, b, ab).

    Pushes the bidisc geodesic of the base pairs through the royal embedding
    (f1, f2) -> (f1, f2, f1*f2).
    """
    x = as_point(x, 3)
    y = as_point(y, 3)
    for pt in (x, y):
        if abs(pt[2] - pt[0] * pt[1]) > tol:
            raise ValueError("royal geodesics require royal endpoints")
    f, sigma, _ = polydisc_geodesic(x[:2], y[:2])
    comp = list(zip(f.num, f.den))
    n3 = _polymul(comp[0][0], comp[1][0])
    d3 = _polymul(comp[0][1], comp[1][1])
    disc = DiscMap(f.num + (tuple(n3),), f.den + (tuple(d3),))
    return disc, sigma


# ---------------------------------------------------------------------------
# Caratheodory lower bound


def _van_der_corput(k: int) -> float:
    f, x = 0.5, 0.0
    while k:
        x += f * (k & 1)
        k >>= 1
        f /= 2.0
    return x


def _omega_grid(count):
    return np.exp(2j * np.pi * np.array([_van_der_corput(k) for k in range(count)]))


def _tetra_left_values(omega, x):
    return (omega * x[2] - x[1]) / (omega * x[0] - 1.0)


def _tetra_family_lower(x, y, family_size):
    om = _omega_grid(max(family_size, 1))
    best = 0.0
    for xx, yy in ((x, y), (x[[1, 0, 2]], y[[1, 0, 2]])):
        u = _tetra_left_values(om, xx)
        v = _tetra_left_values(om, yy)
        best = max(best, float(np.max(_pseudo_hyperbolic(u, v))))
    return float(np.arctanh(best))


def carath_lower(desc, z, w, family_size: int = 64) -> float:
    """Best Poincare separation over a finite family of maps into the disc.

    The family depends on the domain (coordinate maps, scalar ball
    functionals, tetrablock left inverses and their pullbacks) and grows
    monotonically with family_size, so the value is a certified lower bound
    for the Caratheodory distance that never decreases as the family grows.
    """
    z = as_point(z, desc.dim)
    w = as_point(w, desc.dim)
    dom.require_inside(desc, z)
    dom.require_inside(desc, w)
    if family_size < 1:
        raise ValueError("family_size must be >= 1")
    if np.array_equal(z, w):
        return 0.0
    tag = desc.tag
    if tag == "disc":
        return poincare(z[0], w[0])
    if tag == "polydisc":
        k = min(desc.dim, family_size)
        return float(np.max(np.arctanh(_pseudo_hyperbolic(z[:k], w[:k]))))
    if tag == "ball":
        v = maps.ball_moebius(z, w, validate=False)
        nv = float(np.linalg.norm(v))
        best = nv
        if family_size > 1:
            rng = np.random.default_rng(1234)
            for _ in range(family_size - 1):
                u = rng.normal(size=2 * desc.dim).view(complex)
                u /= np.linalg.norm(u)
                best = max(best, abs(np.sum(v * np.conj(u))))
        return float(np.arctanh(best))
    if tag == "lie" and desc.dim == 2:
        u = maps.lie2_to_bidisc(z, closure=False, validate=False)
        v = maps.lie2_to_bidisc(w, closure=False, validate=False)
        k = min(2, family_size)
        return float(np.max(np.arctanh(_pseudo_hyperbolic(u[:k], v[:k]))))
    if tag == "lie" and desc.dim == 3:
        x = maps.matrix_to_tetra(maps.lie3_to_matrix(z, validate=False))
        y = maps.matrix_to_tetra(maps.lie3_to_matrix(w, validate=False))
        return _tetra_family_lower(x, y, family_size)
    if tag == "riii2":
        return _tetra_family_lower(maps.matrix_to_tetra(z), maps.matrix_to_tetra(w), family_size)
    if tag == "tetrablock":
        return _tetra_family_lower(z, w, family_size)
    raise ValueError("no Caratheodory family for domain %r" % (desc.label(),))


# ---------------------------------------------------------------------------
# Lempert upper bound


def _affine_disc(z, w, s):
    n = z.shape[0]
    num = tuple((z[j], (w[j] - z[j]) / s) for j in range(n))
    den = tuple(((1.0 + 0.0j),) for _ in range(n))
    return DiscMap(num, den)


def _affine_candidate(desc, z, w, grid, slack):
    """Minimal-parameter affine disc through (z, w), found by bisection.

    Feasibility is monotone in the parameter (a larger parameter shrinks the
    image), so bisection returns the best bound the affine family offers, or
    None when even the widest disc is infeasible.
    """

    def feasible(s):
        return boundary_gauge_max(desc, _affine_disc(z, w, s), grid) <= 1.0 + slack

    hi = 1.0 - 1e-12
    if not feasible(hi):
        return None
    lo = 1e-9
    if feasible(lo):
        return lo
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _warm_candidates(desc, z, w, grid, slack):
    """Explicit feasible discs: exact geodesics where the domain offers them,
    plus the affine family.  Yields (sigma, DiscMap or None)."""
    out = []
    tag = desc.tag
    try:
        if tag in ("disc", "polydisc"):
            f, sigma, _ = polydisc_geodesic(z, w)
            out.append((sigma, f))
        elif tag == "ball":
            f, sigma = ball_geodesic(z, w)
            out.append((sigma, f))
        elif tag == "lie" and desc.dim == 2:
            u = maps.lie2_to_bidisc(z, validate=False)
            v = maps.lie2_to_bidisc(w, validate=False)
            f, sigma, _ = polydisc_geodesic(u, v)
            half = np.array([[0.5, -0.5], [-0.5j, -0.5j]])
            out.append((sigma, _rational_combination(list(zip(f.num, f.den)), half)))
        elif tag == "tetrablock":
            if abs(z[2] - z[0] * z[1]) <= 1e-12 and abs(w[2] - w[0] * w[1]) <= 1e-12:
                f, sigma = royal_geodesic(z, w)
                out.append((sigma, f))
        elif tag == "riii2":
            if abs(z[1]) <= 1e-12 and abs(w[1]) <= 1e-12:
                f, sigma, _ = polydisc_geodesic(z[[0, 2]], w[[0, 2]])
                zero = ((0.0j,), ((1.0 + 0.0j),))
                disc = DiscMap(
                    (f.num[0], zero[0], f.num[1]), (f.den[0], zero[1], f.den[1])
                )
                out.append((sigma, disc))
    except ValueError:
        pass
    s_aff = _affine_candidate(desc, z, w, grid, slack)
    if s_aff is not None:
        out.append((float(s_aff), _affine_disc(z, w, s_aff)))
    return [(s, f) for (s, f) in out if f is None or disc_feasible(desc, f, slack, grid)]


def _optimize_polynomial_disc(desc, z, w, degree, budget, seed, grid, slack, sigma0):
    from scipy.optimize import minimize

    n = z.shape[0]
    nfree = max(degree - 1, 0)
    lam = np.exp(2j * np.pi * np.arange(grid) / grid)
    lam_pows = np.stack([lam ** k for k in range(2, degree + 1)], axis=1) if nfree else None

    def unpack(x):
        sigma = 1.0 / (1.0 + np.exp(-x[0]))
        sigma = min(max(sigma, 1e-9), 1.0 - 1e-9)
        cs = x[1:].reshape(nfree, 2 * n) if nfree else np.zeros((0, 2 * n))
        coeffs = cs[:, 0::2] + 1j * cs[:, 1::2]
        return sigma, coeffs

    def boundary(sigma, coeffs):
        resid = w - z
        if nfree:
            pows = sigma ** np.arange(2, degree + 1)
            resid = resid - pows @ coeffs
        c1 = resid / sigma
        pts = z[None, :] + lam[:, None] * c1[None, :]
        if nfree:
            pts = pts + lam_pows @ coeffs
        return pts

    def excess(sigma, coeffs):
        g = gauge_value(desc, boundary(sigma, coeffs))
        return np.maximum(g - 1.0, 0.0)

    evals = [0]

    def objective(x, weight):
        evals[0] += 1
        sigma, coeffs = unpack(x)
        pen = float(np.mean(excess(sigma, coeffs) ** 2))
        return np.arctanh(sigma) + weight * pen

    x0 = np.zeros(1 + 2 * n * nfree)
    x0[0] = np.log(sigma0 / (1.0 - sigma0))
    best = np.inf
    restarts = max(budget // _CHUNK, 0)
    for k in range(restarts):
        weight = 100.0 * (10.0 ** (k % 6))
        rng = np.random.default_rng([seed, k])
        start = x0 + (0.0 if k == 0 else 0.2 * rng.normal(size=x0.shape))
        res = minimize(
            objective,
            start,
            args=(weight,),
            method="Nelder-Mead",
            options={"maxfev": _CHUNK, "xatol": 1e-12, "fatol": 1e-14},
        )
        sigma, coeffs = unpack(res.x)
        if float(np.max(excess(sigma, coeffs))) <= slack:
            best = min(best, float(np.arctanh(sigma)))
    return best, evals[0]


def lempert_upper(
    desc,
    z,
    w,
    degree: int = 4,
    budget: int = 10000,
    seed: int = 0,
    grid: int = _GRID,
    slack: float = _FEAS_SLACK,
    return_details: bool = False,
):
    """Upper bound for the Lempert function through feasible analytic discs.

    Minimizes p(0, sigma) over discs f with f(0) = z, f(sigma) = w whose
    boundary grid stays inside the domain within the feasibility slack.
    Explicit geodesic warm starts are tried first; when one of them already
    meets the Caratheodory lower bound the optimizer is skipped, since no
    disc can do better.  Returns +inf when no feasible disc is found.
    """
    z = as_point(z, desc.dim)
    w = as_point(w, desc.dim)
    dom.require_inside(desc, z)
    dom.require_inside(desc, w)
    details = {"candidates": 0, "optimizer_evaluations": 0, "certificate": False}
    if np.array_equal(z, w):
        details["certificate"] = True
        return (0.0, details) if return_details else 0.0
    warm = _warm_candidates(desc, z, w, grid, slack)
    details["candidates"] = len(warm)
    best = min((s for s, _ in warm), default=np.inf)
    upper = float(np.arctanh(best)) if np.isfinite(best) else np.inf
    try:
        lower = carath_lower(desc, z, w, 64)
    except ValueError:
        lower = 0.0
    if np.isfinite(upper) and upper <= lower + 1e-10:
        details["certificate"] = True
        return (upper, details) if return_details else upper
    sigma0 = best if np.isfinite(best) else 0.7
    sigma0 = min(max(sigma0, 1e-6), 1.0 - 1e-9)
    opt, used = _optimize_polynomial_disc(desc, z, w, degree, budget, seed, grid, slack, sigma0)
    details["optimizer_evaluations"] = used
    upper = min(upper, opt)
    return (upper, details) if return_details else upper


# ---------------------------------------------------------------------------
# sandwich and push-forward checks


@dataclass(frozen=True)
class BoundPair:
    """Caratheodory lower and Lempert upper bound for one pair of points."""

    lower: float
    upper: float
    gap: float

    def to_dict(self):
        return {"lower": self.lower, "upper": self.upper, "gap": self.gap}


def sandwich(desc, z, w, family_size=64, degree=4, budget=10000, seed=0) -> BoundPair:
    """Run both bounds; on Lempert domains the gap closes to solver tolerance
    for pairs with explicit geodesics."""
    lo = carath_lower(desc, z, w, family_size)
    up = lempert_upper(desc, z, w, degree=degree, budget=budget, seed=seed)
    return BoundPair(lo, up, up - lo)


def pushforward_geodesic_check(
    spec, f, pairs, tol: float = 1e-9, family_size: int = 64
) -> VerificationReport:
    """Check that composing a certified geodesic with a retraction keeps the
    geodesic property, in the testable lower-bound form:

        carath(R(f(l1)), R(f(l2))) >= p(l1, l2) - tol.

    Also certifies the input disc on the supplied parameter pairs.
    """
    desc = spec.domain
    cert = 0.0
    cert_wit = None
    push = 0.0
    push_wit = None
    for l1, l2 in pairs:
        p = poincare(l1, l2)
        x1 = np.asarray(f(np.asarray(l1, dtype=complex)), dtype=complex).reshape(-1)
        x2 = np.asarray(f(np.asarray(l2, dtype=complex)), dtype=complex).reshape(-1)
        c = carath_lower(desc, x1, x2, family_size)
        if abs(p - c) > cert:
            cert, cert_wit = abs(p - c), (l1, l2)
        r1 = spec(x1[None, :], validate=False)[0]
        r2 = spec(x2[None, :], validate=False)[0]
        cpush = carath_lower(desc, r1, r2, family_size)
        if p - cpush > push:
            push, push_wit = p - cpush, (l1, l2)
    return VerificationReport(
        (
            CheckResult("geodesic-certificate", cert, cert_wit, len(pairs), tol),
            CheckResult("pushforward-lower-bound", push, push_wit, len(pairs), tol),
        )
    )
