"""Executable inequality suites: the disc affine-coefficient bound, the
Lie-ball obstruction identity, the gauge operator norm with the linear-retract
feasibility classifier, and the boundary-decay bound for graph retracts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domains import in_lie_ball, indicatrix_gauge, sample_shilov_lie
from .report import CheckResult, VerificationReport

# ---------------------------------------------------------------------------
# affine coefficient bound on the closed disc


def _inequality_grid(grid: int):
    """Closed-disc evaluation grid: uniform boundary, boundary angles
    clustered geometrically toward 1 (the violation there is first order in
    the angle and invisible to coarse uniform grids), and a coarse interior
    mesh."""
    if grid < 64:
        raise ValueError("grid must be >= 64")
    angles = 2.0 * np.pi * np.arange(grid) / grid
    clustered = np.array([2.0 ** (-k) for k in range(21)])
    angles = np.concatenate([angles, clustered, -clustered, [np.pi]])
    lam = np.exp(1j * angles)
    radii = np.array([0.0, 0.25, 0.5, 0.75])
    interior = (radii[:, None] * np.exp(1j * angles[None, ::8])).ravel()
    return np.concatenate([lam, interior, [1.0, -1.0]])


def affine_disc_inequality(alpha, beta, grid: int = 512):
    """Worst violation of |1 + alpha*(lam - 1)| + |beta|*|lam - 1| <= 1 over
    the closed unit disc; the bound holds exactly when alpha is in [0, 1] and
    beta = 0.

    Returns (max_violation, witness lambda).
    """
    alpha = complex(alpha)
    beta = complex(beta)
    lam = _inequality_grid(grid)
    vals = np.abs(1.0 + alpha * (lam - 1.0)) + abs(beta) * np.abs(lam - 1.0) - 1.0
    i = int(np.argmax(vals))
    return float(vals[i]), complex(lam[i])


def affine_disc_suite(
    step: float = 0.01,
    n_outside: int = 100,
    seed: int = 20240901,
    pass_tol: float = 1e-9,
    fail_floor: float = 1e-3,
    grid: int = 512,
):
    """Battery for the affine disc bound.

    Inside cases: alpha on the [0, 1] grid with beta = 0 must not violate the
    bound beyond pass_tol.  Outside cases: seeded parameters off the
    characterization (distance >= 0.05) must violate by more than fail_floor.
    """
    alphas = np.arange(0.0, 1.0 + step / 2.0, step)
    inside = []
    for a in alphas:
        v, wit = affine_disc_inequality(a, 0.0, grid)
        inside.append({"alpha": complex(a), "beta": 0.0j, "violation": v, "witness": wit})
    worst_inside = max(c["violation"] for c in inside)

    rng = np.random.default_rng(seed)
    outside = []
    while len(outside) < n_outside:
        kind = len(outside) % 3
        if kind == 0:
            a = complex(rng.uniform(-1.0, 2.0), rng.uniform(-1.0, 1.0))
            if _segment_distance(a) < 0.05:
                continue
            b = 0.0j
        elif kind == 1:
            a = complex(rng.uniform(0.0, 1.0), 0.0)
            b = rng.uniform(0.05, 0.6) * np.exp(2j * np.pi * rng.random())
        else:
            a = complex(rng.uniform(-1.0, 2.0), rng.uniform(-1.0, 1.0))
            if _segment_distance(a) < 0.05:
                continue
            b = rng.uniform(0.05, 0.6) * np.exp(2j * np.pi * rng.random())
        v, wit = affine_disc_inequality(a, b, grid)
        outside.append({"alpha": a, "beta": complex(b), "violation": v, "witness": wit})
    min_outside = min(c["violation"] for c in outside)

    return {
        "inside": inside,
        "outside": outside,
        "worst_inside": worst_inside,
        "min_outside": min_outside,
        "consistent": bool(worst_inside <= pass_tol and min_outside > fail_floor),
    }


def _segment_distance(a: complex) -> float:
    x = min(max(a.real, 0.0), 1.0)
    return abs(a - x)


# ---------------------------------------------------------------------------
# Lie-ball obstruction identity


def lie3_linear_retract_obstruction(a, r) -> float:
    """Gap in the norm estimate obstructing generic two-dimensional linear
    retracts of the three-dimensional Lie ball.

    Evaluates [r^2 (1 + |a|^2) + 2 (1 - r^2)] - [1 + (|a| r^2 + 1 - r^2)^2]
    at the real-sphere slice x1^2 + x2^2 = r^2, x3^2 = 1 - r^2.  The value
    equals r^2 (1 - r^2) (1 - |a|)^2, hence is strictly positive away from
    |a| = 1 and the slice ends, which is exactly the contradiction the
    estimate needs.
    """
    a = complex(a)
    r = float(r)
    if abs(a) >= 1.0:
        raise ValueError("parameter a must satisfy |a| < 1")
    if not 0.0 < r < 1.0:
        raise ValueError("radius r must lie in (0, 1)")
    m = abs(a)
    r2 = r * r
    lhs = r2 * (1.0 + m * m) + 2.0 * (1.0 - r2)
    rhs = 1.0 + (m * r2 + 1.0 - r2) ** 2
    return float(lhs - rhs)


def lie3_obstruction_suite(grid: int = 50, identity_tol: float = 1e-12):
    """Grid battery: the computed gap matches its closed form to identity_tol
    and stays strictly positive on r in [0.05, 0.95], |a| <= 0.95."""
    rs = np.linspace(0.05, 0.95, grid)
    ms = np.linspace(0.0, 0.95, grid)
    worst_identity = 0.0
    min_value = np.inf
    witness = None
    for i, r in enumerate(rs):
        for j, m in enumerate(ms):
            a = m * np.exp(2j * np.pi * ((i * grid + j) * 0.61803398875 % 1.0))
            val = lie3_linear_retract_obstruction(a, r)
            closed = r * r * (1.0 - r * r) * (1.0 - m) ** 2
            worst_identity = max(worst_identity, abs(val - closed))
            if val < min_value:
                min_value = val
                witness = (complex(a), float(r))
    return {
        "worst_identity_gap": float(worst_identity),
        "min_value": float(min_value),
        "witness": witness,
        "consistent": bool(worst_identity <= identity_tol and min_value > 0.0),
    }


# ---------------------------------------------------------------------------
# gauge operator norm


@dataclass(frozen=True)
class LinearMap3:
    """A 3x3 complex matrix used as a linear retraction candidate."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (3, 3) or not np.all(np.isfinite(m)):
            raise ValueError("expected a finite 3x3 complex matrix")
        object.__setattr__(self, "matrix", m)

    def validate_retraction(self, tol: float = 1e-12):
        m = self.matrix
        if np.max(np.abs(m @ m - m)) > tol:
            raise ValueError("matrix is not idempotent to %g" % tol)
        if np.linalg.matrix_rank(m, tol=1e-10) != 2:
            raise ValueError("retraction candidate must have rank 2")
        return self


def _as_matrix3(m):
    if isinstance(m, LinearMap3):
        return m.matrix
    m = np.asarray(m, dtype=complex)
    if m.shape != (3, 3):
        raise ValueError("expected a 3x3 matrix")
    return m


def _gauge(v):
    return indicatrix_gauge(v)


def _norm_scan(m, psi_grid: int = 512):
    """Gauge norm over the structured boundary: the extreme points of the
    gauge ball are (e^it, e^is, 0) and (0, 0, e^iu), so by homogeneity the
    norm is max(g(col3), sup_psi g(col1 + e^(i psi) col2)), a 1-d maximum."""
    c1, c2, c3 = m[:, 0], m[:, 1], m[:, 2]
    best = float(_gauge(c3))

    def h(psi):
        return float(_gauge(c1 + np.exp(1j * psi) * c2))

    psi = 2.0 * np.pi * np.arange(psi_grid) / psi_grid
    vals = _gauge(c1[None, :] + np.exp(1j * psi)[:, None] * c2[None, :])
    k = int(np.argmax(vals))
    best = max(best, float(vals[k]))
    lo = psi[k] - 2.0 * np.pi / psi_grid
    hi = psi[k] + 2.0 * np.pi / psi_grid
    golden = 0.5 * (3.0 - np.sqrt(5.0))
    x1 = lo + golden * (hi - lo)
    x2 = hi - golden * (hi - lo)
    f1, f2 = h(x1), h(x2)
    for _ in range(60):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = hi - golden * (hi - lo)
            f2 = h(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = lo + golden * (hi - lo)
            f1 = h(x1)
    return max(best, f1, f2)


def gauge_operator_norm(
    m, boundary_samples: int = 2048, refine_steps: int = 12, seed: int = 0
) -> float:
    """Supremum of gauge(M z) over the gauge unit sphere, estimated from below.

    Combines the structured extreme-point scan with seeded sphere samples and
    a local keep-improvements polish; every evaluation is at a feasible point,
    so the estimate is a certified lower bound of the true norm and improves
    monotonically with refine_steps.
    """
    m = _as_matrix3(m)
    best = _norm_scan(m)
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(boundary_samples, 6)).view(complex)
    pts /= _gauge(pts)[:, None]
    vals = _gauge(pts @ m.T)
    k = int(np.argmax(vals))
    if float(vals[k]) > best:
        best = float(vals[k])
    center = pts[k]
    step = 0.25
    for _ in range(refine_steps):
        cand = center[None, :] + step * rng.normal(size=(64, 6)).view(complex)
        cand /= _gauge(cand)[:, None]
        v = _gauge(cand @ m.T)
        j = int(np.argmax(v))
        if float(v[j]) > best:
            best = float(v[j])
            center = cand[j]
        step *= 0.5
    return best


# ---------------------------------------------------------------------------
# linear retract feasibility classifier


@dataclass(frozen=True)
class PlaneSpec:
    """A two-dimensional linear subspace of C^3 given by two spanning rows."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        if v.shape != (2, 3) or not np.all(np.isfinite(v)):
            raise ValueError("expected two spanning vectors in C^3")
        if np.linalg.svd(v, compute_uv=False)[-1] < 1e-10:
            raise ValueError("spanning vectors are numerically dependent")
        object.__setattr__(self, "vectors", v)

    def orthonormal(self):
        q, _ = np.linalg.qr(self.vectors.T)
        return q.T

    def normal(self):
        _, _, vh = np.linalg.svd(self.vectors)
        return np.conj(vh[2])


def projection_with_kernel(plane, kernel):
    """Idempotent rank-2 map with range the plane and kernel the given line."""
    if not isinstance(plane, PlaneSpec):
        plane = PlaneSpec(np.asarray(plane, dtype=complex))
    kernel = np.asarray(kernel, dtype=complex).reshape(3)
    basis = np.column_stack([plane.vectors[0], plane.vectors[1], kernel])
    det = np.linalg.det(basis)
    if abs(det) < 1e-12:
        raise ValueError("kernel line is not a complement of the plane")
    return basis @ np.diag([1.0, 1.0, 0.0]) @ np.linalg.inv(basis)


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    matrix: np.ndarray
    norm: float
    conclusive: bool
    margin: float
    lipschitz: float
    evaluations: int

    def to_dict(self):
        return {
            "feasible": self.feasible,
            "norm": self.norm,
            "conclusive": self.conclusive,
            "margin": self.margin,
            "lipschitz": self.lipschitz,
            "evaluations": self.evaluations,
        }


def linear_retract_feasibility(
    plane, tol: float = 1e-6, budget: int = 20000, seed: int = 0, infeasible_margin: float = 0.01
) -> FeasibilityResult:
    """Decide whether the plane admits a gauge-nonexpansive linear retraction.

    Idempotent rank-2 maps with range the plane are parametrized by their
    kernel line in the chart k0 + a*u1 + b*u2 (k0 the unit normal), and the
    gauge operator norm is minimized over (a, b) by multi-start local search.
    Feasible when the minimum is <= 1 + tol; infeasible is declared only with
    the stated margin, otherwise the result is flagged inconclusive.
    """
    from scipy.optimize import minimize

    if not isinstance(plane, PlaneSpec):
        plane = PlaneSpec(np.asarray(plane, dtype=complex))
    onb = plane.orthonormal()
    k0 = plane.normal()
    evals = [0]
    history_x = []
    history_f = []

    def kernel_of(x):
        return k0 + (x[0] + 1j * x[1]) * onb[0] + (x[2] + 1j * x[3]) * onb[1]

    def objective(x):
        evals[0] += 1
        basis = np.column_stack([plane.vectors[0], plane.vectors[1], kernel_of(x)])
        if abs(np.linalg.det(basis)) < 1e-12:
            val = 1e6
        else:
            r = basis @ np.diag([1.0, 1.0, 0.0]) @ np.linalg.inv(basis)
            val = _norm_scan(r)
        history_x.append(np.array(x))
        history_f.append(val)
        return val

    starts = []
    for k in (k0, np.eye(3)[0], np.eye(3)[1], np.eye(3)[2]):
        alpha = np.vdot(k0, k)
        if abs(alpha) < 1e-8:
            continue
        beta = np.array([np.vdot(onb[0], k), np.vdot(onb[1], k)]) / alpha
        starts.append(np.array([beta[0].real, beta[0].imag, beta[1].real, beta[1].imag]))
    rng = np.random.default_rng(seed)
    n_starts = 64
    while len(starts) < n_starts:
        starts.append(1.5 * rng.normal(size=4))

    per_start = max(budget // n_starts, 50)
    best_val = np.inf
    best_x = starts[0]
    for x0 in starts:
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"maxfev": per_start, "xatol": 1e-10, "fatol": 1e-12},
        )
        if res.fun < best_val:
            best_val = float(res.fun)
            best_x = np.array(res.x)
        if best_val <= 1.0 + 0.1 * tol:
            break

    matrix = projection_with_kernel(plane, kernel_of(best_x))
    lipschitz = _lipschitz_estimate(history_x, history_f, seed)
    feasible = bool(best_val <= 1.0 + tol)
    conclusive = bool(feasible or best_val >= 1.0 + infeasible_margin)
    return FeasibilityResult(
        feasible=feasible,
        matrix=matrix,
        norm=float(best_val),
        conclusive=conclusive,
        margin=float(best_val - 1.0),
        lipschitz=lipschitz,
        evaluations=evals[0],
    )


def _lipschitz_estimate(xs, fs, seed, pairs=500):
    if len(xs) < 2:
        return 0.0
    xs = np.array(xs)
    fs = np.array(fs)
    keep = fs < 1e5
    xs, fs = xs[keep], fs[keep]
    if xs.shape[0] < 2:
        return 0.0
    rng = np.random.default_rng(seed + 17)
    i = rng.integers(0, xs.shape[0], size=pairs)
    j = rng.integers(0, xs.shape[0], size=pairs)
    d = np.linalg.norm(xs[i] - xs[j], axis=1)
    ok = d > 1e-12
    if not np.any(ok):
        return 0.0
    return float(np.max(np.abs(fs[i][ok] - fs[j][ok]) / d[ok]))


def linret_classify_suite(
    alpha_grid=None, n_generic: int = 20, tol: float = 1e-6, budget: int = 20000, seed: int = 777
):
    """Classifier battery: the admissible planes (the full coordinate plane
    and the planes spanned by (0,0,1) with a graph line, |alpha| <= 1) must be
    feasible; seeded generic planes must be infeasible with margin."""
    if alpha_grid is None:
        radii = (0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0)
        phases = (1.0, 1j, -1.0, -1j)
        seen = set()
        alpha_grid = []
        for r in radii:
            for ph in phases:
                a = complex(r * ph)
                key = (round(a.real, 12), round(a.imag, 12))
                if key not in seen:
                    seen.add(key)
                    alpha_grid.append(a)
    cases = []
    plane = PlaneSpec(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], dtype=complex))
    res = linear_retract_feasibility(plane, tol=tol, budget=budget, seed=seed)
    cases.append({"plane": "coordinate", "alpha": None, "expected_feasible": True, "result": res})
    for a in alpha_grid:
        plane = PlaneSpec(np.array([[0.0, 0.0, 1.0], [1.0, a, 0.0]], dtype=complex))
        res = linear_retract_feasibility(plane, tol=tol, budget=budget, seed=seed)
        cases.append({"plane": "graph", "alpha": a, "expected_feasible": True, "result": res})
    rng = np.random.default_rng(seed)
    for k in range(n_generic):
        v = rng.normal(size=(2, 6)).view(complex)
        plane = PlaneSpec(v)
        res = linear_retract_feasibility(plane, tol=tol, budget=budget, seed=seed + k)
        cases.append({"plane": "generic-%d" % k, "alpha": None, "expected_feasible": False, "result": res})
    consistent = all(
        (c["result"].feasible and c["result"].norm <= 1.0 + tol)
        if c["expected_feasible"]
        else (not c["result"].feasible and c["result"].norm >= 1.01)
        for c in cases
    )
    return {"cases": cases, "consistent": bool(consistent)}


# ---------------------------------------------------------------------------
# boundary decay of graph retracts


def max_third_coordinate(z1, z2, tol: float = 1e-12) -> float:
    """Largest modulus m such that (z1, z2, m*u) stays in the 3-dim Lie ball
    for the most favorable phase u, found by bisection on the membership
    predicate.

    The favorable phase aligns u^2 with z1^2 + z2^2; any graph function over
    the 2-dim Lie ball with graph inside the 3-dim one obeys |f| <= this
    bound, which collapses to 0 toward the distinguished boundary.
    """
    z1 = complex(z1)
    z2 = complex(z2)
    if not in_lie_ball(np.array([z1, z2]), 2):
        raise ValueError("base point must lie in the 2-dim Lie ball")
    zz = z1 * z1 + z2 * z2
    u = np.exp(0.5j * np.angle(zz)) if zz != 0 else 1.0

    def member(m):
        return in_lie_ball(np.array([z1, z2, m * u]), 3)

    lo, hi = 0.0, 1.0
    if member(hi):
        return 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if member(mid):
            lo = mid
        else:
            hi = mid
    return lo


def graph_boundary_decay_check(
    f, epsilons=(0.1, 0.01, 0.001), samples: int = 128, seed: int = 0, tol: float = 1e-12
) -> VerificationReport:
    """Verify that a candidate graph function respects the membership cap on
    shells approaching the distinguished boundary, and that the cap decays.

    f maps (z1, z2) to the third coordinate; shells are scaled Shilov samples
    at distance epsilon.  One check per shell compares sup |f| with the cap,
    and a final check requires the cap sequence to decrease.
    """
    epsilons = tuple(sorted((float(e) for e in epsilons), reverse=True))
    checks = []
    bounds = []
    for idx, eps in enumerate(epsilons):
        shell = sample_shilov_lie(2, samples, seed + idx)
        cap = 0.0
        sup_f = 0.0
        witness = None
        for s in shell:
            base = (1.0 - eps) * s.point
            cap = max(cap, max_third_coordinate(base[0], base[1]))
            val = abs(complex(f(base[0], base[1])))
            if val > sup_f:
                sup_f = val
                witness = base
        bounds.append(cap)
        checks.append(
            CheckResult("shell-eps=%.6g" % eps, float(sup_f - cap), witness, samples, tol)
        )
    worst_rise = max(
        (bounds[k + 1] - bounds[k] for k in range(len(bounds) - 1)), default=-np.inf
    )
    checks.append(CheckResult("cap-decay", float(worst_rise), bounds, len(bounds), tol))
    return VerificationReport(tuple(checks))


def boundary_decay_suite(epsilons=(0.1, 0.01, 0.001), samples: int = 64, seed: int = 0):
    """Default battery: the zero graph passes; a constant graph of height 0.3
    must violate the cap on small shells."""
    zero = graph_boundary_decay_check(lambda z1, z2: 0.0, epsilons, samples, seed)
    const = graph_boundary_decay_check(lambda z1, z2: 0.3, epsilons, samples, seed)
    smallest = const.checks[len(epsilons) - 1]
    return {
        "zero": zero,
        "constant": const,
        "consistent": bool(zero.passed and smallest.max_violation > 0.0),
    }
