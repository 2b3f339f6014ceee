"""Batch command-line front end.

Subcommands expose membership queries, the retraction verifier, the
inequality suites and the metric sandwich, all emitting canonical JSON:
sorted keys, floats with 17 significant digits, complex numbers as [re, im]
pairs.  Identical manifests therefore produce byte-identical reports.

Exit codes: 0 pass/member, 1 verified-negative, 2 usage or spec error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import domains as dom
from . import metrics, retractions, verify
from .errors import DomainViolation
from .report import to_jsonable


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# canonical JSON


def _format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(float(x), ".17g")


def canonical_json(obj) -> str:
    """Serialize with sorted keys and fixed float formatting (17 significant
    digits) so reruns are byte-identical."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(canonical_json(v) for v in obj) + "]"
    if isinstance(obj, dict):
        items = sorted(obj.items(), key=lambda kv: str(kv[0]))
        return "{" + ",".join(json.dumps(str(k)) + ":" + canonical_json(v) for k, v in items) + "}"
    return canonical_json(to_jsonable(obj))


# ---------------------------------------------------------------------------
# manifests


_MANIFEST_KEYS = {"subcommand", "parameters", "seed", "samples", "tolerance", "out"}


@dataclass(frozen=True)
class RunManifest:
    """A reproducible run description; round-trips losslessly through JSON."""

    subcommand: str
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    samples: int = 10000
    tolerance: float = 1e-10
    out: str | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "RunManifest":
        unknown = set(d) - _MANIFEST_KEYS
        if unknown:
            raise UsageError("unknown manifest keys: %s" % ", ".join(sorted(unknown)))
        if "subcommand" not in d:
            raise UsageError("manifest requires a subcommand")
        return cls(
            subcommand=str(d["subcommand"]),
            parameters=dict(d.get("parameters", {})),
            seed=int(d.get("seed", 0)),
            samples=int(d.get("samples", 10000)),
            tolerance=float(d.get("tolerance", 1e-10)),
            out=d.get("out"),
        )

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError("invalid manifest JSON: %s" % exc) from None
        if not isinstance(data, dict):
            raise UsageError("manifest must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "parameters": self.parameters,
            "seed": self.seed,
            "samples": self.samples,
            "tolerance": self.tolerance,
            "out": self.out,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


# ---------------------------------------------------------------------------
# input parsing


def parse_domain(text: str) -> dom.DomainDescriptor:
    text = text.strip().lower()
    base, _, arg = text.partition(":")
    try:
        if base == "disc":
            return dom.disc()
        if base == "polydisc":
            return dom.polydisc(int(arg))
        if base == "ball":
            return dom.ball(int(arg))
        if base == "lie":
            return dom.lie_ball(int(arg))
        if base == "riii2":
            return dom.matrix_ball()
        if base == "tetrablock":
            return dom.tetrablock()
        if base == "symbidisc":
            return dom.sym_bidisc()
        if base == "ellipsoid":
            return dom.ellipsoid(*(int(p) for p in arg.split(",")))
        if base == "indicatrix":
            return dom.indicatrix_ball()
    except (TypeError, ValueError) as exc:
        raise UsageError("bad domain %r: %s" % (text, exc)) from None
    raise UsageError("unknown domain %r" % (text,))


def _to_complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    raise UsageError("expected a number or an [re, im] pair, got %r" % (v,))


def _to_point(v) -> np.ndarray:
    if not isinstance(v, (list, tuple)) or not v:
        raise UsageError("expected a point as an array of [re, im] pairs")
    return np.array([_to_complex(c) for c in v])


def parse_point(text: str) -> np.ndarray:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError("invalid point JSON: %s" % exc) from None
    return _to_point(data)


def _take(params: dict, allowed: dict):
    """Pop typed values out of a parameter dict, rejecting unknown keys."""
    out = {}
    params = dict(params)
    for key, (conv, default) in allowed.items():
        if key in params:
            out[key] = conv(params.pop(key))
        elif default is not _REQUIRED:
            out[key] = default
        else:
            raise UsageError("missing required parameter %r" % key)
    if params:
        raise UsageError("unknown parameters: %s" % ", ".join(sorted(params)))
    return out


_REQUIRED = object()


def _retraction_from_params(payload: dict) -> retractions.RetractionSpec:
    if not isinstance(payload, dict) or "tag" not in payload:
        raise UsageError("retraction parameters must be an object with a 'tag'")
    payload = dict(payload)
    tag = str(payload.pop("tag"))
    try:
        if tag == "bidisc-graph":
            p = _take(payload, {"a": (_to_complex, _REQUIRED)})
            return retractions.make_retraction(tag, **p)
        if tag == "bidisc-blend":
            p = _take(payload, {"a": (_to_complex, _REQUIRED), "t": (float, _REQUIRED)})
            return retractions.make_retraction(tag, **p)
        if tag == "lie-even":
            p = _take(payload, {"dim": (int, _REQUIRED)})
            return retractions.make_retraction(tag, **p)
        if tag in ("tetra-royal", "tetra-sym", "indicatrix-plane"):
            _take(payload, {})
            return retractions.make_retraction(tag)
        if tag == "indicatrix-slope":
            p = _take(payload, {"t": (float, _REQUIRED)})
            return retractions.make_retraction(tag, **p)
        if tag == "ellipsoid-lift":
            p = _take(
                payload,
                {
                    "powers": (lambda v: tuple(int(x) for x in v), _REQUIRED),
                    "slice_point": (_to_point, _REQUIRED),
                    "slice_directions": (lambda v: np.array([_to_point(r) for r in v]), _REQUIRED),
                    "base_root": (_to_point, _REQUIRED),
                    "locus_margin": (float, 1e-3),
                    "seed": (int, 0),
                },
            )
            return retractions.make_retraction(tag, **p)
        if tag == "linear3":
            p = _take(payload, {"matrix": (lambda v: np.array([_to_point(r) for r in v]), _REQUIRED)})
            return retractions.make_retraction(tag, **p)
    except (ValueError, TypeError) as exc:
        raise UsageError("invalid retraction: %s" % exc) from None
    raise UsageError("unknown or CLI-unsupported retraction tag %r" % tag)


# ---------------------------------------------------------------------------
# subcommand runners; each returns (exit_code, payload)


def _run_membership(man: RunManifest):
    p = _take(
        man.parameters,
        {
            "domain": (str, _REQUIRED),
            "point": (lambda v: v, _REQUIRED),
            "closure": (bool, False),
        },
    )
    desc = parse_domain(p["domain"])
    point = _to_point(p["point"])
    try:
        gauge = float(dom.gauge_value(desc, dom.as_point(point, desc.dim)))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    member = gauge <= 1.0 + man.tolerance if p["closure"] else gauge < 1.0
    payload = {
        "domain": desc.label(),
        "point": to_jsonable(point),
        "member": bool(member),
        "gauge_or_witness": gauge,
    }
    return (0 if member else 1), payload


def _run_verify_retraction(man: RunManifest, csv_path=None):
    p = _take(man.parameters, {"retraction": (lambda v: v, _REQUIRED)})
    spec = _retraction_from_params(p["retraction"])
    report = retractions.verify_retraction(
        spec, samples=man.samples, seed=man.seed, tol=man.tolerance
    )
    if csv_path:
        rows = retractions.per_sample_violations(spec, man.samples, man.seed)
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "image_violation", "idempotence_residual", "fixing_residual"])
            for i in range(man.samples):
                writer.writerow(
                    [
                        i,
                        _format_float(rows["image"][i]),
                        _format_float(rows["idempotence"][i]),
                        _format_float(rows["fixing"][i]),
                    ]
                )
    payload = {
        "retraction": spec.tag,
        "samples": man.samples,
        "seed": man.seed,
        "tolerance": man.tolerance,
        "report": report.to_dict(),
    }
    return (0 if report.passed else 1), payload


_SUITES = ("disc-bound", "lie3-obstruction", "linret-classify", "boundary-decay")


def _run_lemma_suite(man: RunManifest):
    params = dict(man.parameters)
    suite = params.pop("suite", None)
    if suite not in _SUITES:
        raise UsageError("unknown suite %r; choose from %s" % (suite, ", ".join(_SUITES)))
    if suite == "disc-bound":
        p = _take(params, {"step": (float, 0.01), "outside": (int, 100), "grid": (int, 512)})
        res = verify.affine_disc_suite(
            step=p["step"], n_outside=p["outside"], seed=man.seed or 20240901, grid=p["grid"]
        )
        payload = {
            "suite": suite,
            "worst_inside": res["worst_inside"],
            "min_outside": res["min_outside"],
            "cases_inside": len(res["inside"]),
            "cases_outside": len(res["outside"]),
            "consistent": res["consistent"],
        }
        return (0 if res["consistent"] else 1), payload
    if suite == "lie3-obstruction":
        p = _take(params, {"grid": (int, 50)})
        res = verify.lie3_obstruction_suite(grid=p["grid"])
        payload = {
            "suite": suite,
            "worst_identity_gap": res["worst_identity_gap"],
            "min_value": res["min_value"],
            "consistent": res["consistent"],
        }
        return (0 if res["consistent"] else 1), payload
    if suite == "linret-classify":
        p = _take(params, {"generic": (int, 20), "budget": (int, 20000)})
        res = verify.linret_classify_suite(
            n_generic=p["generic"], budget=p["budget"], seed=man.seed or 777
        )
        payload = {
            "suite": suite,
            "cases": [
                {
                    "plane": c["plane"],
                    "alpha": to_jsonable(c["alpha"]) if c["alpha"] is not None else None,
                    "expected_feasible": c["expected_feasible"],
                    "feasible": c["result"].feasible,
                    "norm": c["result"].norm,
                    "conclusive": c["result"].conclusive,
                }
                for c in res["cases"]
            ],
            "consistent": res["consistent"],
        }
        return (0 if res["consistent"] else 1), payload
    p = _take(params, {"shells": (lambda v: tuple(float(x) for x in v), (0.1, 0.01, 0.001))})
    res = verify.boundary_decay_suite(epsilons=p["shells"], samples=man.samples or 64, seed=man.seed)
    payload = {
        "suite": suite,
        "zero_graph": res["zero"].to_dict(),
        "constant_graph": res["constant"].to_dict(),
        "consistent": res["consistent"],
    }
    return (0 if res["consistent"] else 1), payload


def _run_metric(man: RunManifest):
    p = _take(
        man.parameters,
        {
            "domain": (str, _REQUIRED),
            "z": (lambda v: v, _REQUIRED),
            "w": (lambda v: v, _REQUIRED),
            "family_size": (int, 64),
            "degree": (int, 4),
            "budget": (int, 10000),
        },
    )
    desc = parse_domain(p["domain"])
    z = _to_point(p["z"])
    w = _to_point(p["w"])
    try:
        pair = metrics.sandwich(
            desc,
            z,
            w,
            family_size=p["family_size"],
            degree=p["degree"],
            budget=p["budget"],
            seed=man.seed,
        )
    except (DomainViolation, ValueError) as exc:
        raise UsageError(str(exc)) from None
    payload = {
        "domain": desc.label(),
        "z": to_jsonable(z),
        "w": to_jsonable(w),
        "lower": pair.lower,
        "upper": pair.upper,
        "gap": pair.gap,
        "budget": p["budget"],
        "degree": p["degree"],
    }
    return (0 if pair.gap <= man.tolerance else 1), payload


_RUNNERS = {
    "membership": _run_membership,
    "verify-retraction": _run_verify_retraction,
    "lemma-suite": _run_lemma_suite,
    "metric": _run_metric,
}


def run_manifest(man: RunManifest, csv_path=None):
    """Execute a manifest; returns (exit_code, payload dict)."""
    runner = _RUNNERS.get(man.subcommand)
    if runner is None:
        raise UsageError("unknown subcommand %r" % (man.subcommand,))
    if man.subcommand == "verify-retraction":
        return runner(man, csv_path=csv_path)
    return runner(man)


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="lempert",
        description="Membership gauges, retraction verification and metric bounds "
        "for the classical Lempert domains.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--samples", type=int, default=10000)
        sp.add_argument("--tol", type=float, default=1e-10)
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--manifest", type=str, default=None)

    sp = sub.add_parser("membership", help="test a point against a domain gauge")
    common(sp)
    sp.add_argument("--domain", type=str)
    sp.add_argument("--point", type=str)
    sp.add_argument("--closure", action="store_true")

    sp = sub.add_parser("verify-retraction", help="run the three retraction checks")
    common(sp)
    sp.add_argument("--retraction", type=str, help="retraction tag")
    sp.add_argument("--params", type=str, default="{}", help="JSON parameters for the tag")
    sp.add_argument("--csv", type=str, default=None, help="write per-sample violations")

    sp = sub.add_parser("lemma-suite", help="run an inequality battery")
    common(sp)
    sp.add_argument("suite", nargs="?", default=None, choices=list(_SUITES) + [None])
    sp.add_argument("--options", type=str, default="{}", help="JSON suite options")

    sp = sub.add_parser("metric", help="Caratheodory/Lempert sandwich for a pair")
    common(sp)
    sp.add_argument("--domain", type=str)
    sp.add_argument("--z", type=str)
    sp.add_argument("--w", type=str)
    sp.add_argument("--family-size", type=int, default=64)
    sp.add_argument("--degree", type=int, default=4)
    sp.add_argument("--budget", type=int, default=10000)

    return parser


def _manifest_from_args(args) -> RunManifest:
    if args.manifest:
        with open(args.manifest) as fh:
            man = RunManifest.from_json(fh.read())
        if man.subcommand != args.subcommand:
            raise UsageError(
                "manifest subcommand %r does not match %r" % (man.subcommand, args.subcommand)
            )
        return man
    params = {}
    if args.subcommand == "membership":
        if args.domain is None or args.point is None:
            raise UsageError("membership requires --domain and --point (or --manifest)")
        params = {
            "domain": args.domain,
            "point": json.loads(args.point) if _valid_json(args.point) else None,
            "closure": bool(args.closure),
        }
        if params["point"] is None:
            raise UsageError("invalid point JSON")
    elif args.subcommand == "verify-retraction":
        if args.retraction is None:
            raise UsageError("verify-retraction requires --retraction (or --manifest)")
        if not _valid_json(args.params):
            raise UsageError("invalid retraction params JSON")
        payload = json.loads(args.params)
        payload["tag"] = args.retraction
        params = {"retraction": payload}
    elif args.subcommand == "lemma-suite":
        if args.suite is None:
            raise UsageError("lemma-suite requires a suite name (or --manifest)")
        if not _valid_json(args.options):
            raise UsageError("invalid suite options JSON")
        params = {"suite": args.suite, **json.loads(args.options)}
    elif args.subcommand == "metric":
        if args.domain is None or args.z is None or args.w is None:
            raise UsageError("metric requires --domain, --z and --w (or --manifest)")
        if not (_valid_json(args.z) and _valid_json(args.w)):
            raise UsageError("invalid point JSON")
        params = {
            "domain": args.domain,
            "z": json.loads(args.z),
            "w": json.loads(args.w),
            "family_size": args.family_size,
            "degree": args.degree,
            "budget": args.budget,
        }
    return RunManifest(
        subcommand=args.subcommand,
        parameters=params,
        seed=args.seed,
        samples=args.samples,
        tolerance=args.tol,
        out=args.out,
    )


def _valid_json(text) -> bool:
    try:
        json.loads(text)
        return True
    except (TypeError, json.JSONDecodeError):
        return False


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        man = _manifest_from_args(args)
        csv_path = getattr(args, "csv", None)
        code, payload = run_manifest(man, csv_path=csv_path)
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except (DomainViolation, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    text = canonical_json(payload)
    print(text)
    if man.out:
        with open(man.out, "w") as fh:
            fh.write(text)
            fh.write("\n")
    return code


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
