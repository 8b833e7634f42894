"""Command line front end: ``joyce-hkt decompose | verify | catalog``.

Reports are one JSON document on stdout and a short table on stderr.
Exit codes: 0 every verdict matches its expectation, 1 a verdict mismatch,
2 invalid input, 3 internal error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Any, Dict, List, Optional, Sequence, Tuple

import jsonschema
import numpy as np

from . import __version__
from ._backend import backend_name
from .catalog import ALL_CHECKS, catalog, named_isotropy, preset
from .connections import (
    MetricClassError,
    bismut_lambda,
    btp_predicate,
    chern_ricci_closed_form,
    chern_ricci_trace,
    einstein_coefficients,
    fit_quadruple_constant,
    flag_kahler_obstruction,
    hkt_einstein_residual,
    nabla_curvature_residual,
    nabla_torsion_residual,
    strong_quadruple_values,
    strong_residual,
)
from .forms import (
    FormError,
    InvariantMetric,
    hkt_residual,
    is_hyperhermitian,
    is_layer_metric,
    layer_metric,
    naturally_reductive_residual,
    perturbed_metric,
    reference_metric,
)
from .joyce import (
    DecompositionError,
    IsotropySpec,
    coset_space,
    hypercomplex_structure,
    joyce_decompose,
    k_default,
    verify_hypercomplex,
)
from .lie_core import LieAlgebraError, build_algebra

SCHEMA_VERSION = "1.0"
DEFAULT_TOLERANCE = 1e-9
EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class ConfigError(ValueError):
    """Invalid configuration; ``errors`` lists every problem found."""

    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class CheckError(RuntimeError):
    """Unexpected failure inside one check."""

    def __init__(self, check: str, cause: BaseException):
        self.check = check
        super().__init__(f"check {check!r} failed: {type(cause).__name__}: {cause}")


@dataclass(frozen=True)
class JobConfig:
    factors: Tuple[Tuple[str, int], ...]
    center_dim: int
    rank_cap: int
    m: Optional[int]
    frame: str
    v_subspace: Optional[Tuple[Tuple[float, ...], ...]]
    u_frame: Optional[Tuple[Tuple[float, ...], ...]]
    k_phases: Optional[Tuple[float, ...]]
    metric: Dict[str, Any]
    checks: Tuple[str, ...]
    expected: Dict[str, str]
    tolerance: float
    seed: int
    name: str = ""
    interpretive: bool = False
    note: str = ""
    echo: Dict[str, Any] = field(default_factory=dict)


def load_schema() -> dict:
    text = resources.files("joyce_hkt").joinpath("config.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _merge_preset(doc: dict, errors: List[str]) -> dict:
    if "preset" not in doc:
        return doc
    name = doc["preset"]
    try:
        base = preset(name) if isinstance(name, str) else None
    except KeyError:
        base = None
    if base is None:
        errors.append(f"preset: unknown preset {name!r}")
        return doc
    merged = dict(base)
    if "checks" in doc and "expected" not in doc:
        # keep the preset's expectations only for the checks still requested
        merged["expected"] = {k: v for k, v in base.get("expected", {}).items() if k in doc["checks"]}
    merged.update({k: v for k, v in doc.items() if k != "preset"})
    return merged


def _schema_errors(doc: dict) -> List[str]:
    validator = jsonschema.Draft202012Validator(load_schema())
    out = []
    for err in sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path))):
        path = "/".join(str(p) for p in err.absolute_path) or "<root>"
        out.append(f"{path}: {err.message}")
    return out


def parse_config(text) -> JobConfig:
    """Validate a JSON document (text or dict), collecting every error before failing."""
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError([f"syntax: {e}"]) from None
    else:
        doc = dict(text)
    if not isinstance(doc, dict):
        raise ConfigError(["<root>: expected a JSON object"])
    errors: List[str] = []
    doc = _merge_preset(doc, errors)
    errors.extend(_schema_errors(doc))
    if "algebra" not in doc:
        errors.append("algebra: required (directly or through a preset)")
    if errors:
        raise ConfigError(errors)

    alg = doc["algebra"]
    iso = doc.get("isotropy", {})
    metric = doc.get("metric", {"kind": "reference"})
    factors = tuple((str(t), int(r)) for t, r in alg["factors"])
    center_dim = int(alg.get("center_dim", 0))
    rank_cap = int(alg.get("rank_cap", 8))
    frame = iso.get("frame", "explicit" if "u_frame" in iso else "default")
    cfg = JobConfig(
        factors=factors,
        center_dim=center_dim,
        rank_cap=rank_cap,
        m=iso.get("m"),
        frame=frame,
        v_subspace=tuple(tuple(map(float, r)) for r in iso["v_subspace"]) if "v_subspace" in iso else None,
        u_frame=tuple(tuple(map(float, r)) for r in iso["u_frame"]) if "u_frame" in iso else None,
        k_phases=tuple(map(float, doc["k_phases"])) if "k_phases" in doc else None,
        metric=metric,
        checks=tuple(c for c in ALL_CHECKS if c in doc.get("checks", ALL_CHECKS)),
        expected=dict(doc.get("expected", {})),
        tolerance=float(doc.get("tolerance", DEFAULT_TOLERANCE)),
        seed=int(doc.get("seed", 0)),
        name=str(doc.get("name", "")),
        interpretive=bool(doc.get("interpretive", False)),
        note=str(doc.get("note", "")),
    )
    errors.extend(_semantic_errors(cfg))
    if errors:
        raise ConfigError(errors)
    echo = {
        "name": cfg.name,
        "algebra": {"factors": [list(f) for f in factors], "center_dim": center_dim, "rank_cap": rank_cap},
        "isotropy": {"m": cfg.m, "frame": frame},
        "k_phases": list(cfg.k_phases) if cfg.k_phases is not None else None,
        "metric": metric,
        "checks": list(cfg.checks),
        "expected": {c: cfg.expected.get(c, "pass") for c in cfg.checks},
        "tolerance": cfg.tolerance,
        "seed": cfg.seed,
        "interpretive": cfg.interpretive,
        "note": cfg.note,
    }
    if cfg.u_frame is not None:
        echo["isotropy"]["u_frame"] = [list(r) for r in cfg.u_frame]
        echo["isotropy"]["v_subspace"] = [list(r) for r in (cfg.v_subspace or ())]
    object.__setattr__(cfg, "echo", echo)
    return cfg


def _metric_coeff_count(metric: dict) -> Optional[int]:
    if metric.get("kind") == "layer":
        return len(metric["coeffs"])
    if metric.get("kind") == "perturbed":
        return _metric_coeff_count(metric["base"])
    return None


def _semantic_errors(cfg: JobConfig) -> List[str]:
    errors: List[str] = []
    try:
        model = build_algebra(cfg.factors, cfg.center_dim, cfg.rank_cap)
    except LieAlgebraError as e:
        return [f"algebra: {e}"]
    if not model.roots:
        return ["algebra: needs at least one root"]
    decomp = joyce_decompose(model)
    m = cfg.m
    if cfg.frame == "explicit":
        if cfg.u_frame is None:
            errors.append("isotropy: explicit frame needs u_frame")
        else:
            m = m if m is not None else len(cfg.u_frame)
            for name, rows in (("u_frame", cfg.u_frame), ("v_subspace", cfg.v_subspace or ())):
                for i, r in enumerate(rows):
                    if len(r) != model.cartan_dim:
                        errors.append(f"isotropy/{name}/{i}: expected {model.cartan_dim} coordinates, got {len(r)}")
    elif cfg.u_frame is not None or cfg.v_subspace is not None:
        errors.append("isotropy: u_frame/v_subspace are only allowed with frame 'explicit'")
    if m is not None and not 1 <= m <= decomp.d:
        errors.append(f"isotropy/m: must lie in 1..{decomp.d}, got {m}")
        return errors
    if cfg.frame not in ("default", "explicit"):
        try:
            spec = named_isotropy(decomp, cfg.frame, m)
            if m is not None and m != spec.m:
                errors.append(f"isotropy/m: frame {cfg.frame!r} fixes m = {spec.m}")
            m = spec.m
        except DecompositionError as e:
            errors.append(f"isotropy/frame: {e}")
    m_eff = decomp.d if m is None else m
    n = _metric_coeff_count(cfg.metric)
    if n is not None and n != m_eff:
        errors.append(f"metric/coeffs: expected {m_eff} coefficients (one per layer), got {n}")
    if cfg.k_phases is not None and len(cfg.k_phases) != m_eff:
        errors.append(f"k_phases: expected {m_eff} phases, got {len(cfg.k_phases)}")
    for c in cfg.expected:
        if c not in cfg.checks:
            errors.append(f"expected/{c}: check not requested")
    return errors


# ---------------------------------------------------------------------------
# job assembly


@dataclass
class Job:
    config: JobConfig
    model: Any
    decomposition: Any
    coset: Any
    hc: Any
    metric: InvariantMetric


def _isotropy(cfg: JobConfig, decomp) -> IsotropySpec:
    if cfg.frame == "explicit":
        n = decomp.model.cartan_dim
        v = np.array(cfg.v_subspace, dtype=float).reshape(-1, n) if cfg.v_subspace else np.zeros((0, n))
        u = np.array(cfg.u_frame, dtype=float)
        return IsotropySpec(m=cfg.m or len(u), v_subspace=v, u_frame=u)
    return named_isotropy(decomp, cfg.frame, cfg.m)


def _build_metric(spec: dict, coset, hc, seed: int) -> InvariantMetric:
    kind = spec["kind"]
    if kind == "reference":
        return reference_metric(coset)
    if kind == "einstein":
        sol = einstein_coefficients(coset)
        scale = float(spec.get("scale", 1.0))
        return layer_metric(coset, [scale * float(c) for c in sol.coeffs])
    if kind == "layer":
        return layer_metric(coset, [float(c) for c in spec["coeffs"]])
    base = _build_metric(spec["base"], coset, hc, seed)
    return perturbed_metric(base, hc, float(spec.get("size", 1e-2)), int(spec.get("seed", seed)))


def build_job(cfg: JobConfig) -> Job:
    model = build_algebra(cfg.factors, cfg.center_dim, cfg.rank_cap)
    decomp = joyce_decompose(model)
    iso = _isotropy(cfg, decomp)
    k = None
    if cfg.k_phases is not None:
        k = k_default(model, decomp, iso.m, cfg.k_phases)
    coset = coset_space(model, decomp, iso, k_params=k, tolerance=cfg.tolerance)
    hc = hypercomplex_structure(coset, tolerance=cfg.tolerance)
    g = _build_metric(cfg.metric, coset, hc, cfg.seed)
    return Job(cfg, model, decomp, coset, hc, g)


# ---------------------------------------------------------------------------
# checks


def _r(x: float) -> float:
    """Six significant digits: stable across summation-order noise."""
    return float(f"{float(x):.6e}")


def _verdict(value: float, threshold: float) -> str:
    return "pass" if value < threshold else "fail"


def _check_hypercomplex(job: Job, tol: float) -> dict:
    rep = verify_hypercomplex(job.hc)
    worst = max(rep.values())
    return {
        "residuals": {k: _r(v) for k, v in sorted(rep.items())},
        "value": _r(worst),
        "threshold": tol,
        "verdict": _verdict(worst, tol),
        "witnesses": {"k_params": [[_r(k.real), _r(k.imag)] for k in job.hc.k_params]},
    }


def _check_hkt(job: Job, tol: float) -> dict:
    hh = is_hyperhermitian(job.metric, job.hc)
    res = hkt_residual(job.metric, job.hc)
    worst = max(hh.value, res.value)
    coeffs = is_layer_metric(job.metric, tol)
    return {
        "residuals": {"hyperhermitian": _r(hh.value), "hkt": _r(res.value), "hkt_raw": _r(res.raw)},
        "value": _r(worst),
        "threshold": tol,
        "verdict": _verdict(worst, tol),
        "witnesses": {"layer_coeffs": [_r(c) for c in coeffs] if coeffs else None},
    }


def _check_einstein(job: Job, tol: float) -> dict:
    sol = einstein_coefficients(job.coset)
    closed = chern_ricci_closed_form(job.coset).matrix
    trace = chern_ricci_trace(job.metric, job.hc, tol).matrix
    chern = float(np.abs(closed - trace).max())
    er = hkt_einstein_residual(job.metric, job.hc, tol)
    ok = er.residual < tol and er.lambda_constant > 0
    return {
        "residuals": {"einstein": _r(er.residual), "chern_closed_vs_trace": _r(chern)},
        "value": _r(er.residual),
        "threshold": tol,
        "verdict": "pass" if ok else "fail",
        "witnesses": {
            "lambda": _r(er.lambda_constant),
            "einstein_coeffs": [str(c) for c in sol.coeffs],
            "delta_hat": [str(c) for c in sol.delta_hat],
        },
    }


def _bismut(job: Job, tol: float):
    key = "_bismut"
    cache = job.__dict__.setdefault("_cache", {})
    if key not in cache:
        hres = hkt_residual(job.metric, job.hc)
        if hres.value > tol:
            raise MetricClassError("metric is not HKT")
        cache[key] = bismut_lambda(job.metric, job.hc, tol)
    return cache[key]


def _check_btp(job: Job, tol: float) -> dict:
    conn = _bismut(job, tol)
    res = nabla_torsion_residual(conn)
    coeffs = is_layer_metric(job.metric, tol)
    pred = btp_predicate(job.coset, coeffs)
    return {
        "residuals": {"nabla_torsion": _r(res.value), "nabla_torsion_raw": _r(res.raw)},
        "value": _r(res.value),
        "threshold": tol,
        "verdict": _verdict(res.value, tol),
        "witnesses": {
            "coefficient_predicate": pred,
            "predicate_agrees": pred == (res.value < tol),
            "skew": _r(conn.skew_residual()),
            "commutes_I": _r(conn.commutator_residual(job.hc.I)),
            "commutes_J": _r(conn.commutator_residual(job.hc.J)),
        },
    }


def _check_bas(job: Job, tol: float) -> dict:
    conn = _bismut(job, tol)
    t = nabla_torsion_residual(conn)
    r = nabla_curvature_residual(conn)
    worst = max(t.value, r.value)
    return {
        "residuals": {"nabla_torsion": _r(t.value), "nabla_curvature": _r(r.value)},
        "value": _r(worst),
        "threshold": tol,
        "verdict": _verdict(worst, tol),
        "witnesses": {},
    }


def _check_strong(job: Job, tol: float) -> dict:
    res = strong_residual(job.metric, job.hc, tol, seed=job.config.seed)
    quads = strong_quadruple_values(job.metric, job.hc, tol)
    k, dev = fit_quadruple_constant(quads)
    return {
        "residuals": {"dc": _r(res.residual.value), "dc_raw": _r(res.residual.raw), "skew": _r(res.skew)},
        "value": _r(res.residual.value),
        "threshold": tol,
        "verdict": _verdict(res.residual.value, tol),
        "witnesses": {
            "sampled": res.sampled,
            "quadruples": len(quads),
            "quadruple_constant": None if k is None else _r(k),
            "quadruple_deviation": _r(dev),
        },
    }


def _check_naturally_reductive(job: Job, tol: float) -> dict:
    res = naturally_reductive_residual(job.metric)
    return {
        "residuals": {"naturally_reductive": _r(res.value)},
        "value": _r(res.value),
        "threshold": tol,
        "verdict": _verdict(res.value, tol),
        "witnesses": {},
    }


def _check_flag(job: Job, tol: float) -> dict:
    w = flag_kahler_obstruction(job.metric, tol)
    if w is None:
        has = any(L.f_roots for L in job.coset.layers)
        return {"residuals": {}, "value": None, "threshold": tol, "verdict": "fail" if has else "n/a", "witnesses": {}}
    label = job.model.label
    return {
        "residuals": {"spread": _r(max(w["values"]) - min(w["values"]))},
        "value": _r(max(w["values"]) - min(w["values"])),
        "threshold": tol,
        "verdict": "pass",
        "witnesses": {"layer": w["layer"], "roots": [label(a) for a in w["roots"]], "values": [_r(v) for v in w["values"]]},
    }


CHECKS = {
    "hypercomplex": _check_hypercomplex,
    "hkt": _check_hkt,
    "einstein": _check_einstein,
    "btp": _check_btp,
    "bas": _check_bas,
    "strong": _check_strong,
    "naturally-reductive": _check_naturally_reductive,
    "flag-obstruction": _check_flag,
}


def _space_summary(job: Job) -> dict:
    c = job.coset
    return {
        "dim_m": c.n_m,
        "dim_l": c.n_l,
        "m": c.m,
        "d": job.decomposition.d,
        "layers": job.decomposition.summary(),
        "b_d_dim": int(len(job.decomposition.b_d)),
        "interpretive": job.config.interpretive or bool(c.isotropy.interpretive),
    }


def run(cfg: JobConfig) -> dict:
    """Execute the requested checks and return the report."""
    t0 = time.perf_counter()
    job = build_job(cfg)
    timing: Dict[str, float] = {"setup_seconds": time.perf_counter() - t0}
    out = []
    for name in cfg.checks:
        t1 = time.perf_counter()
        try:
            entry = CHECKS[name](job, cfg.tolerance)
        except (MetricClassError, FormError) as e:
            entry = {"residuals": {}, "value": None, "threshold": cfg.tolerance, "verdict": "n/a",
                     "witnesses": {"reason": str(e)}}
        except Exception as e:  # attribute to the check and let main map it to exit 3
            raise CheckError(name, e) from e
        expected = cfg.expected.get(name, "pass")
        entry = {"name": name, **entry, "expected": expected, "matches": entry["verdict"] == expected}
        out.append(entry)
        timing[name] = time.perf_counter() - t1
    timing["total_seconds"] = time.perf_counter() - t0
    coeffs = is_layer_metric(job.metric, cfg.tolerance)
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "tool": {"name": "joyce-hkt", "version": __version__, "backend": backend_name()},
        "config": cfg.echo,
        "seed": cfg.seed,
        "space": _space_summary(job),
        "metric": {"kind": cfg.metric["kind"], "layer_coeffs": [_r(c) for c in coeffs] if coeffs else None},
        "checks": out,
        "summary": {
            "requested": len(out),
            "matched": sum(e["matches"] for e in out),
            "all_matched": all(e["matches"] for e in out),
        },
        "timing": {k: round(v, 4) for k, v in timing.items()},
    }


def decompose_report(cfg: JobConfig) -> dict:
    model = build_algebra(cfg.factors, cfg.center_dim, cfg.rank_cap)
    decomp = joyce_decompose(model)
    rep = {
        "schema_version": SCHEMA_VERSION,
        "command": "decompose",
        "algebra": cfg.echo["algebra"],
        "d": decomp.d,
        "layers": decomp.summary(),
        "b_d_dim": int(len(decomp.b_d)),
        "theta_final": [model.label(a) for a in decomp.theta_final],
        "invariants": decomp.check_invariants(),
    }
    try:
        job = build_job(cfg)
        rep["coset"] = {k: v for k, v in _space_summary(job).items() if k != "layers"}
        rep["coset"]["basis"] = list(job.coset.labels[: job.coset.n_m])
    except (DecompositionError, FormError) as e:
        rep["coset"] = {"error": str(e)}
    return rep


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=_json_default)


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


def format_table(report: dict) -> str:
    rows = [f"{'check':<20} {'verdict':<8} {'expected':<9} {'value':>12}  ok"]
    for e in report["checks"]:
        v = "-" if e["value"] is None else f"{e['value']:.3e}"
        rows.append(f"{e['name']:<20} {e['verdict']:<8} {e['expected']:<9} {v:>12}  {'yes' if e['matches'] else 'NO'}")
    name = report["config"].get("name") or "config"
    rows.insert(0, f"[{name}] dim m = {report['space']['dim_m']}, m = {report['space']['m']}")
    return "\n".join(rows)


# ---------------------------------------------------------------------------
# entry point


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", metavar="PATH", help="JSON job configuration")
    p.add_argument("--preset", metavar="NAME", help="catalog preset name")
    p.add_argument("--tolerance", type=float, help="relative tolerance (default 1e-9)")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--json-only", action="store_true", help="suppress the table on stderr")
    p.add_argument("--quiet", action="store_true", help="suppress the JSON report on stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="joyce-hkt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("decompose", help="print the Joyce decomposition and coset data"))
    _common(sub.add_parser("verify", help="run the configured checks"))
    p = sub.add_parser("catalog", help="list presets, or run all of them")
    _common(p)
    p.add_argument("--run", action="store_true", help="run every preset and report")
    return parser


def _load_config(args) -> JobConfig:
    doc: Dict[str, Any] = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise ConfigError([f"config: {e}"]) from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError([f"syntax: {e}"]) from None
        if not isinstance(doc, dict):
            raise ConfigError(["<root>: expected a JSON object"])
    if args.preset:
        doc = {**doc, "preset": args.preset}
    if args.tolerance is not None:
        doc["tolerance"] = args.tolerance
    if args.seed is not None:
        doc["seed"] = args.seed
    if not doc:
        raise ConfigError(["give --config or --preset"])
    return parse_config(doc)


def _emit(report: dict, args, table: Optional[str]):
    if not args.quiet:
        sys.stdout.write(dumps(report) + "\n")
    if table and not args.json_only:
        sys.stderr.write(table + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "catalog" and not args.run:
            _emit({"schema_version": SCHEMA_VERSION, "command": "catalog", "presets": catalog()}, args, None)
            return EXIT_OK
        if args.command == "catalog":
            reports = []
            for p in catalog():
                doc = {"preset": p["name"]}
                if args.tolerance is not None:
                    doc["tolerance"] = args.tolerance
                if args.seed is not None:
                    doc["seed"] = args.seed
                reports.append(run(parse_config(doc)))
            ok = all(r["summary"]["all_matched"] for r in reports)
            report = {"schema_version": SCHEMA_VERSION, "command": "catalog-run", "reports": reports, "all_matched": ok}
            _emit(report, args, "\n\n".join(format_table(r) for r in reports))
            return EXIT_OK if ok else EXIT_MISMATCH
        cfg = _load_config(args)
        if args.command == "decompose":
            _emit(decompose_report(cfg), args, None)
            return EXIT_OK
        report = run(cfg)
        _emit(report, args, format_table(report))
        return EXIT_OK if report["summary"]["all_matched"] else EXIT_MISMATCH
    except ConfigError as e:
        if not args.quiet:
            sys.stdout.write(dumps({"schema_version": SCHEMA_VERSION, "errors": e.errors}) + "\n")
        for msg in e.errors:
            sys.stderr.write(f"error: {msg}\n")
        return EXIT_INPUT
    except (DecompositionError, LieAlgebraError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    except Exception as e:  # noqa: BLE001 - mapped to the internal-error exit code
        sys.stderr.write(f"internal error: {e}\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
