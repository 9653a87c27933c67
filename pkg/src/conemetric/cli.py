"""Command line front end.

Exit codes: 0 a metric exists (or the command succeeded), 2 proven
nonexistent, 3 undetermined, 1 a pipeline check failed, 64 usage error.
Every JSON document carries the ``config`` it was produced with.
"""

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import errors
from .divisor import (Divisor, ReducibilityClass, classify_reducibility,
                      irreducible_exists, trace_condition_value)
from .pathint import IntegratorConfig

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_NONEXISTENT = 2
EXIT_UNDETERMINED = 3
EXIT_USAGE = 64

_START = time.perf_counter()


@dataclass
class RunConfig:
    subcommand: str
    beta: list
    rtol: float = 1e-10
    atol: float = 1e-12
    res: int = 200
    exclusion_radius: float = 1e-3
    starts: int = 200
    out: str = None
    seed: int = 0
    deterministic: bool = False
    mesh: str = None
    extra: dict = field(default_factory=dict)

    def integrator(self):
        return IntegratorConfig(rtol=self.rtol, atol=self.atol)

    def to_json(self):
        return asdict(self)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _clean(obj):
    """Make numpy scalars, tuples and non-finite floats JSON friendly."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dump(doc, cfg, name=None):
    """Print the document and, with ``--out``, write it to ``DIR/name``."""
    doc = dict(doc)
    doc["config"] = cfg.to_json()
    if not cfg.deterministic:
        doc["elapsed_seconds"] = time.perf_counter() - _START
    text = json.dumps(_clean(doc), sort_keys=True, indent=2)
    print(text)
    if cfg.out and name:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text + "\n")
    return text


# -- existence -----------------------------------------------------------------------

def _solve_reducible(d, cls, cfg=None):
    from .reducible import solve_h1, solve_h3
    kw = {"starts": cfg.starts, "seed": cfg.seed} if cfg else {}
    return solve_h3(d, **kw) if cls is ReducibilityClass.H3_REDUCIBLE else solve_h1(d, **kw)


def existence_verdict(d, cfg=None):
    """``(doc, exit code)`` for the existence question of divisor d."""
    doc = {"beta": list(d.beta)}
    try:
        cls = classify_reducibility(d)
    except errors.TwoIntegers as exc:
        doc.update({"class": "two-integers", "exists": False, "proven": True, "reason": str(exc)})
        return doc, EXIT_NONEXISTENT
    doc["class"] = cls.value
    doc["L"] = trace_condition_value(d)
    if cls is ReducibilityClass.IRREDUCIBLE:
        ex = irreducible_exists(d)
        doc.update({"exists": ex.exists, "proven": True, "margin": ex.margin})
        return doc, EXIT_OK if ex.exists else EXIT_NONEXISTENT
    try:
        sols = _solve_reducible(d, cls, cfg)
    except (errors.NoSolution, errors.ParityError) as exc:
        proven = getattr(exc, "proven", True)
        doc.update({"exists": False if proven else None, "proven": proven, "reason": str(exc)})
        return doc, EXIT_NONEXISTENT if proven else EXIT_UNDETERMINED
    except errors.InvalidDivisor as exc:
        doc.update({"exists": None, "proven": False, "reason": str(exc)})
        return doc, EXIT_UNDETERMINED
    doc.update({"exists": True, "proven": True, "solutions": len(sols)})
    return doc, EXIT_OK


def cmd_classify(cfg, d):
    doc, code = existence_verdict(d, cfg)
    dump(doc, cfg, "classify.json")
    return code


def cmd_exists(cfg, d):
    doc, code = existence_verdict(d, cfg)
    dump({k: doc[k] for k in ("beta", "class", "exists", "proven")}, cfg, "exists.json")
    return code


# -- irreducible construction ---------------------------------------------------------

def _require_irreducible(d):
    if classify_reducibility(d) is not ReducibilityClass.IRREDUCIBLE:
        raise UsageError("this command needs three non-integral orders")


def cmd_monodromy(cfg, d):
    from .monodromy import compute_monodromy, verify_traces
    _require_irreducible(d)
    m = compute_monodromy(d, cfg.integrator())
    doc = m.to_json()
    doc["traces"] = [complex(t) for t in m.traces]
    doc["trace_residuals"] = list(verify_traces(m, d))
    dump(doc, cfg, "monodromy.json")
    return EXIT_OK


def cmd_unitarize(cfg, d):
    from .monodromy import classify_deformation, compute_monodromy, unitarize
    _require_irreducible(d)
    if not irreducible_exists(d).exists:
        dump({"exists": False, "L": trace_condition_value(d)}, cfg, "unitarize.json")
        return EXIT_NONEXISTENT
    u = unitarize(compute_monodromy(d, cfg.integrator()))
    doc = u.to_json()
    doc["unitarity_residual"] = max(float(np.max(np.abs(x @ x.conj().T - np.eye(2)))) for x in u.U)
    doc["deformation"] = classify_deformation(u.U).to_json()
    dump(doc, cfg, "unitarize.json")
    return EXIT_OK


def cmd_solve_reducible(cfg, d):
    cls = classify_reducibility(d)
    if cls is ReducibilityClass.IRREDUCIBLE:
        raise UsageError("orders are all non-integral; use unitarize")
    doc, code = existence_verdict(d, cfg)
    if code != EXIT_OK:
        dump(doc, cfg, "solve_reducible.json")
        return code
    sols = _solve_reducible(d, cls, cfg)
    out = sols[0].to_json()
    if len(sols) > 1:
        out["alternatives"] = [s.to_json() for s in sols[1:]]
    dump(out, cfg, "solve_reducible.json")
    return EXIT_OK


# -- sampling ------------------------------------------------------------------------

def sample_document(d, cfg):
    from .metriceval import (conical_order_estimate, expected_area, metric_source,
                             sample_grid, summary_json)
    source = metric_source(d, cfg.integrator())
    grid = sample_grid(source, cfg.res, r_in=cfg.exclusion_radius)
    orders = [conical_order_estimate(j, source) for j in range(3)]
    doc = summary_json(grid, d, orders)
    doc["area_rel_err"] = grid.area / expected_area(d) - 1.0
    return source, grid, doc


def cmd_sample(cfg, d):
    doc, code = existence_verdict(d, cfg)
    if code != EXIT_OK:
        dump(doc, cfg)
        return code
    _, grid, summary = sample_document(d, cfg)
    if cfg.out:
        Path(cfg.out).mkdir(parents=True, exist_ok=True)
        grid.write_csv(Path(cfg.out) / "sample.csv")
    dump(summary, cfg, "sample.json")
    return EXIT_OK


def cmd_surface(cfg, d):
    from .surface import SurfaceMetric, SurfaceSpec, mesh, surface_summary, write_obj
    try:
        spec = SurfaceSpec.from_divisor(d)
    except errors.ConditionViolated as exc:
        dump({"exists": False, "reason": str(exc)}, cfg)
        return EXIT_NONEXISTENT
    metric = SurfaceMetric(spec, cfg.integrator())
    doc = surface_summary(metric, min(cfg.res, 120))
    doc.update(spec.to_json())
    if cfg.mesh:
        verts, tris = mesh(metric)
        Path(cfg.mesh).parent.mkdir(parents=True, exist_ok=True)
        write_obj(cfg.mesh, verts, tris)
        doc["mesh"] = {"path": cfg.mesh, "vertices": len(verts), "triangles": len(tris)}
    dump(doc, cfg, "surface.json")
    return EXIT_OK


# -- pipeline -----------------------------------------------------------------------

PIPELINE_TOLERANCES = {"trace": 1e-7, "unitarity": 1e-8, "K_dev": 1e-4, "area_rel_err": 1e-2,
                       "cone_order": 1e-2, "residue": 1e-9}


def cmd_pipeline(cfg, d):
    """classify, construct, sample and verify; exit 1 when any check fails."""
    verdict, code = existence_verdict(d, cfg)
    if code != EXIT_OK:
        dump(verdict, cfg)
        return code
    doc = {"class": verdict["class"], "beta": list(d.beta)}
    checks = {}
    if verdict["class"] == ReducibilityClass.IRREDUCIBLE.value:
        from .monodromy import compute_monodromy, unitarize, verify_traces
        m = compute_monodromy(d, cfg.integrator())
        u = unitarize(m)
        res = list(verify_traces(m, d))
        unit = max(float(np.max(np.abs(x @ x.conj().T - np.eye(2)))) for x in u.U)
        doc.update({"traces": [complex(t) for t in m.traces], "trace_residuals": res,
                    "unitarity_residual": unit})
        checks["trace"] = max(res) < PIPELINE_TOLERANCES["trace"]
        checks["unitarity"] = unit < PIPELINE_TOLERANCES["unitarity"]
    else:
        cls = ReducibilityClass(verdict["class"])
        s = _solve_reducible(d, cls, cfg)[0]
        doc.update({"N": s.N, "roots": [complex(r) for r in s.roots], "residue_max": s.residue})
        checks["residue"] = s.residue < PIPELINE_TOLERANCES["residue"] * max(abs(s.c), 1.0)
    source, grid, summary = sample_document(d, cfg)
    doc.update({"K_dev": summary["max_curvature_deviation"], "area": summary["area"],
                "area_rel_err": summary["area_rel_err"], "cone_orders": summary["cone_order_estimates"]})
    checks["K_dev"] = summary["max_curvature_deviation"] < PIPELINE_TOLERANCES["K_dev"]
    checks["area_rel_err"] = abs(summary["area_rel_err"]) < PIPELINE_TOLERANCES["area_rel_err"]
    checks["cone_order"] = all(abs(a - b) < PIPELINE_TOLERANCES["cone_order"]
                               for a, b in zip(summary["cone_order_estimates"], d.beta))
    doc["checks"] = checks
    if cfg.out:
        Path(cfg.out).mkdir(parents=True, exist_ok=True)
        grid.write_csv(Path(cfg.out) / "pipeline_grid.csv")
    dump(doc, cfg, "pipeline.json")
    return EXIT_OK if all(checks.values()) else EXIT_CHECK_FAILED


COMMANDS = {
    "classify": cmd_classify,
    "exists": cmd_exists,
    "monodromy": cmd_monodromy,
    "unitarize": cmd_unitarize,
    "solve-reducible": cmd_solve_reducible,
    "sample": cmd_sample,
    "surface": cmd_surface,
    "pipeline": cmd_pipeline,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--beta", required=True,
                        help="three cone orders, decimals or rationals, e.g. -1/2,-1/2,-1/2")
    common.add_argument("--rtol", type=float, default=1e-10)
    common.add_argument("--atol", type=float, default=1e-12)
    common.add_argument("--res", type=int, default=200, help="grid resolution per region")
    common.add_argument("--exclusion-radius", type=float, default=1e-3)
    common.add_argument("--starts", type=int, default=200, help="multistart budget")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="directory for JSON and CSV artifacts")
    common.add_argument("--deterministic", action="store_true",
                        help="omit timings so that reruns give byte-identical JSON")
    parser = _Parser(prog="conemetric", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "surface":
            p.add_argument("--mesh", help="write a triangulated sample to this OBJ file")
    return parser


def _glue_beta(argv):
    """``--beta -0.5,...`` would read as an option; rewrite it as ``--beta=-0.5,...``."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--beta" and i + 1 < len(argv):
            out.append("--beta=" + argv[i + 1])
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(_glue_beta(list(sys.argv[1:] if argv is None else argv)))
    try:
        d = Divisor.parse(args.beta)
    except (ValueError, errors.InvalidDivisor) as exc:
        print(f"conemetric: bad --beta: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.res < 4:
        print("conemetric: --res must be at least 4", file=sys.stderr)
        return EXIT_USAGE
    cfg = RunConfig(args.subcommand, list(d.beta), args.rtol, args.atol, args.res,
                    args.exclusion_radius, args.starts, args.out, args.seed, args.deterministic,
                    getattr(args, "mesh", None))
    np.random.seed(cfg.seed)
    try:
        return COMMANDS[args.subcommand](cfg, d)
    except UsageError as exc:
        print(f"conemetric: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except errors.ConeMetricError as exc:
        print(f"conemetric: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_UNDETERMINED


if __name__ == "__main__":
    sys.exit(main())
