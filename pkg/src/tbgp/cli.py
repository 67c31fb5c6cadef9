"""Batch scenario runner.

``tbgp run [--config] scenario.ini [--set section.key=value ...] [--out DIR] [--quiet]``
``tbgp dump-graph [--config] scenario.ini [--eval-type Residual] [--out DIR]``

Exit codes: 0 success, 2 configuration error, 3 solver failure (partial
results and ``error.json`` are still written).
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .assembly import Assembler, EvaluationType
from .basis import build_tensor_basis
from .linalg import SingularMatrixError
from .models import FULL_PARAMS, CstrFullModel, CstrNondimModel
from .solvers import (
    RNG_ALGORITHM,
    ContinuationOptions,
    NewtonError,
    NewtonOptions,
    NodeSolveError,
    UniformParameter,
    adjoint_sensitivity,
    arclength_continuation,
    bdf_integrate,
    forward_sensitivity,
    jacobian_cost,
    min_abs_eigenvalue,
    newton_solve,
    nisp_project,
    residual_cost,
    sample_surrogate,
    sg_newton_solve,
    stability_eigenvalues,
    tangent_at,
    turning_point_continuation,
    turning_point_solve,
)

log = logging.getLogger("tbgp")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3
REQUIRED = object()
INF = math.inf

KINDS = ("steady", "sensitivity", "continue", "fold", "fold-continue", "transient",
         "uq-galerkin", "uq-nisp", "ops-count")

_CONT = {
    "param": (str, REQUIRED), "ds": (float, 0.02), "ds_min": (float, 1e-6), "ds_max": (float, 0.3),
    "min": (float, -INF), "max": (float, INF), "max_steps": (int, 400), "direction": (float, 1.0),
}

SCHEMA = {
    "model": {"variant": (str, "nondim"), "constant_k": (bool, False)},
    "analysis": {"kind": (str, REQUIRED), "seed": (int, 0)},
    "newton": {"atol": (float, 1e-10), "rtol": (float, 1e-10), "max_iters": (int, 20), "line_search": (bool, False)},
    "sensitivity": {"params": (str, "")},
    "continue": dict(_CONT),
    "fold": {"second_derivs": (str, "ad")},
    "fold-continue": {**_CONT, "ds": (float, 0.05), "max_steps": (int, 50), "fold_index": (int, 0)},
    "transient": {"t0": (float, 0.0), "t1": (float, REQUIRED), "h": (float, REQUIRED), "order": (int, 2)},
    "uq": {"uncertain": (str, REQUIRED), "order": (int, 4), "points_per_dim": (int, 0), "samples": (int, 100_000),
           "bins": (int, 100), "threads": (int, 1)},
    "ops-count": {"directions": (int, 10)},
    "output": {"dir": (str, "")},
}

NEEDS = {
    "steady": (), "sensitivity": (), "continue": ("continue",), "fold": ("continue",),
    "fold-continue": ("continue", "fold-continue"), "transient": ("transient",),
    "uq-galerkin": ("uq",), "uq-nisp": ("uq",), "ops-count": (),
}


class ConfigError(ValueError):
    pass


class SolverFailure(RuntimeError):
    def __init__(self, message: str, reason: str = "solver", detail: dict | None = None):
        super().__init__(message)
        self.reason = reason
        self.detail = detail or {}


def _convert(typ, raw: str, where: str):
    try:
        if typ is bool:
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return typ(raw.strip())
    except ValueError:
        raise ConfigError(f"{where}: cannot read {raw!r} as {typ.__name__}") from None


@dataclass
class ScenarioConfig:
    raw: dict
    model: object
    params: np.ndarray
    x0: np.ndarray
    kind: str
    seed: int
    sections: dict = field(default_factory=dict)

    @property
    def digest(self) -> str:
        text = "\n".join(f"[{s}]\n" + "\n".join(f"{k} = {v}" for k, v in sorted(kv.items()))
                         for s, kv in sorted(self.raw.items()))
        return hashlib.sha256(text.encode()).hexdigest()

    def section(self, name: str) -> dict:
        return self.sections[name]


def read_config(path, overrides=()) -> dict:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from None
    raw = {s: dict(cp.items(s)) for s in cp.sections()}
    for ov in overrides:
        key, sep, value = ov.partition("=")
        sec, dot, opt = key.strip().partition(".")
        if not sep or not dot or not opt:
            raise ConfigError(f"override {ov!r} must look like section.key=value")
        raw.setdefault(sec, {})[opt] = value.strip()
    return raw


def resolve(raw: dict) -> ScenarioConfig:
    known = set(SCHEMA) | {"params", "initial"}
    for s in raw:
        if s not in known:
            raise ConfigError(f"unknown section [{s}]")
    sections = {}
    for s, keys in SCHEMA.items():
        given = raw.get(s, {})
        for k in given:
            if k not in keys:
                raise ConfigError(f"unknown key {k!r} in [{s}]")
        vals = {}
        for k, (typ, default) in keys.items():
            if k in given:
                vals[k] = _convert(typ, given[k], f"[{s}] {k}")
            elif default is not REQUIRED:
                vals[k] = default
        sections[s] = vals
    if "kind" not in sections["analysis"]:
        raise ConfigError("missing required key 'kind' in [analysis]")
    kind = sections["analysis"]["kind"]
    if kind not in KINDS:
        raise ConfigError(f"unknown analysis kind {kind!r}; expected one of {', '.join(KINDS)}")
    for s in NEEDS[kind]:
        for k, (_, default) in SCHEMA[s].items():
            if default is REQUIRED and k not in sections[s]:
                raise ConfigError(f"analysis {kind!r} needs key {k!r} in [{s}]")

    variant = sections["model"]["variant"]
    params = {k: _convert(float, v, f"[params] {k}") for k, v in raw.get("params", {}).items()}
    if variant == "nondim":
        names = CstrNondimModel.param_names
        unknown = [k for k in params if k not in names]
        if unknown:
            raise ConfigError(f"unknown nondim parameters {unknown}")
        model = CstrNondimModel(**params)
    elif variant == "full":
        missing = [k for k in FULL_PARAMS if k not in params]
        unknown = [k for k in params if k not in FULL_PARAMS]
        if missing or unknown:
            raise ConfigError(f"full model parameters: missing {missing}, unknown {unknown}")
        model = CstrFullModel(params, x0=[params["c_Af"], params["T_f"]],
                              constant_k=sections["model"]["constant_k"])
    else:
        raise ConfigError(f"unknown model variant {variant!r}")
    x0 = model.x0.copy()
    for k, v in raw.get("initial", {}).items():
        if k not in model.state_names:
            raise ConfigError(f"unknown state {k!r} in [initial]")
        x0[model.state_names.index(k)] = _convert(float, v, f"[initial] {k}")
    return ScenarioConfig(raw, model, model.p0.copy(), x0, kind, sections["analysis"]["seed"], sections)


# -- output -------------------------------------------------------------------


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return format(float(v), ".17g")


class Writer:
    def __init__(self, out: Path, cfg: ScenarioConfig):
        self.out = out
        self.cfg = cfg
        self.written: list[str] = []
        out.mkdir(parents=True, exist_ok=True)

    def meta(self) -> dict:
        return {"version": __version__, "config_sha256": self.cfg.digest, "rng_seed": self.cfg.seed,
                "rng_algorithm": RNG_ALGORITHM}

    def header(self, prefix: str = "#") -> str:
        m = self.meta()
        return (f"{prefix} tbgp {m['version']}\n{prefix} config_sha256 {m['config_sha256']}\n"
                f"{prefix} rng_seed {m['rng_seed']} ({m['rng_algorithm']})\n")

    def csv(self, name: str, columns, rows) -> None:
        lines = [self.header(), ",".join(columns) + "\n"]
        lines += [",".join(fmt(v) for v in row) + "\n" for row in rows]
        self._write(name, "".join(lines))

    def json(self, name: str, payload: dict) -> None:
        doc = {"_meta": self.meta(), **payload}
        self._write(name, json.dumps(_plain(doc), indent=2, sort_keys=True) + "\n")

    def text(self, name: str, body: str, prefix: str = "//") -> None:
        self._write(name, self.header(prefix) + body)

    def _write(self, name: str, text: str) -> None:
        (self.out / name).write_text(text, encoding="utf-8")
        self.written.append(name)
        log.info("wrote %s", self.out / name)


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    return obj


# -- analyses -----------------------------------------------------------------


def _newton_opts(cfg) -> NewtonOptions:
    s = cfg.section("newton")
    return NewtonOptions(atol=s["atol"], rtol=s["rtol"], max_iters=s["max_iters"], line_search=s["line_search"])


def _param_index(cfg, name: str) -> int:
    try:
        return cfg.model.param_index(name)
    except KeyError as exc:
        raise ConfigError(str(exc)) from None


def _steady(cfg, asm):
    try:
        return newton_solve(asm, cfg.x0, cfg.params, _newton_opts(cfg))
    except NewtonError as exc:
        raise SolverFailure(f"steady solve failed: {exc}", exc.reason) from exc


def _write_iterates(w: Writer, cfg, res) -> None:
    rows = [[i, r, *x] for i, (r, x) in enumerate(zip(res.residual_norms, res.iterates))]
    w.csv("solution.csv", ["iteration", "residual_inf", *cfg.model.state_names], rows)


def run_steady(cfg, asm, w: Writer):
    try:
        res = newton_solve(asm, cfg.x0, cfg.params, _newton_opts(cfg))
    except NewtonError as exc:
        if exc.result is not None:
            _write_iterates(w, cfg, exc.result)
        raise SolverFailure(f"steady solve failed: {exc}", exc.reason) from exc
    _write_iterates(w, cfg, res)
    names = cfg.model.state_names
    eig = stability_eigenvalues(asm, res.x, cfg.params)
    w.json("steady.json", {"state": dict(zip(names, res.x)), "iterations": res.iterations,
                           "eigenvalues": eig.pairs(), "stable": eig.stable})


def run_sensitivity(cfg, asm, w: Writer):
    res = _steady(cfg, asm)
    sel = cfg.section("sensitivity")["params"]
    names = [s.strip() for s in sel.split(",") if s.strip()] or list(cfg.model.param_names)
    idx = [_param_index(cfg, n) for n in names]
    try:
        fwd = forward_sensitivity(asm, res.x, cfg.params, idx)
        adj = adjoint_sensitivity(asm, res.x, cfg.params, idx)
    except SingularMatrixError as exc:
        raise SolverFailure(str(exc), "singular") from exc
    rows = []
    for i, g in enumerate(cfg.model.response_names):
        for j, p in enumerate(names):
            rows.append([g, p, fwd.ds_dp[i, j], adj.ds_dp[i, j]])
    w.csv("sensitivities.csv", ["response", "param", "forward", "adjoint"], rows)
    w.json("sensitivity.json", {"state": res.x, "forward_solves": fwd.solves,
                                "adjoint_transpose_solves": adj.transpose_solves})


def _cont_opts(s: dict) -> ContinuationOptions:
    try:
        return ContinuationOptions(ds=s["ds"], ds_min=s["ds_min"], ds_max=s["ds_max"], lam_min=s["min"],
                                   lam_max=s["max"], max_steps=s["max_steps"], direction=s["direction"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _continue(cfg, asm):
    s = cfg.section("continue")
    k = _param_index(cfg, s["param"])
    x0 = _steady(cfg, asm).x
    return k, arclength_continuation(asm, x0, cfg.params, k, _cont_opts(s))


def _curve_rows(res):
    return [[i, pt.lam, *pt.x, bool(pt.stable), pt.newton_iters] for i, pt in enumerate(res.points)]


def run_continue(cfg, asm, w: Writer):
    k, res = _continue(cfg, asm)
    pname = cfg.model.param_names[k]
    w.csv("curve.csv", ["step", pname, *cfg.model.state_names, "stable", "newton_iters"], _curve_rows(res))
    w.json("summary.json", {"status": res.status, "points": len(res.points),
                            "folds": [{"index": i, pname: res.points[i].lam} for i in res.folds]})
    if res.status == "step_underflow":
        raise SolverFailure("continuation step size fell below ds_min", "step_underflow")


def _locate_folds(cfg, asm):
    k, res = _continue(cfg, asm)
    mode = cfg.section("fold")["second_derivs"]
    if mode not in ("ad", "fd"):
        raise ConfigError("[fold] second_derivs must be 'ad' or 'fd'")
    folds = []
    for i in res.folds:
        pt = res.points[i]
        p = cfg.params.copy()
        p[k] = pt.lam
        try:
            fp = turning_point_solve(asm, pt.x, p, k, second_derivs=mode, tangent=tangent_at(res, i),
                                     opts=NewtonOptions(atol=1e-12, rtol=0.0, max_iters=30))
        except (NewtonError, SingularMatrixError) as exc:
            raise SolverFailure(f"fold solve from curve point {i} failed: {exc}", "fold") from exc
        folds.append(fp)
    return k, res, folds


def _fold_rows(asm, folds):
    rows = []
    for i, fp in enumerate(folds):
        J = asm.jacobian(fp.x, fp.p)[1]
        rows.append([i, fp.value, *fp.x, fp.sigma, min_abs_eigenvalue(J), fp.iterations])
    return rows


def run_fold(cfg, asm, w: Writer):
    k, res, folds = _locate_folds(cfg, asm)
    pname = cfg.model.param_names[k]
    w.csv("folds.csv", ["fold", pname, *cfg.model.state_names, "sigma", "min_abs_eig", "newton_iters"],
          _fold_rows(asm, folds))
    if not folds:
        raise SolverFailure("no fold found along the continuation curve", "no_fold")


def run_fold_continue(cfg, asm, w: Writer):
    k, _, folds = _locate_folds(cfg, asm)
    s = cfg.section("fold-continue")
    if not folds:
        raise SolverFailure("no fold found along the continuation curve", "no_fold")
    if not 0 <= s["fold_index"] < len(folds):
        raise ConfigError(f"fold_index {s['fold_index']} out of range (found {len(folds)} folds)")
    k2 = _param_index(cfg, s["param"])
    res = turning_point_continuation(asm, folds[s["fold_index"]], k2, _cont_opts(s),
                                     second_derivs=cfg.section("fold")["second_derivs"])
    n = cfg.model.n
    p1, p2 = cfg.model.param_names[k], cfg.model.param_names[k2]
    rows = [[i, pt.lam, pt.x[n], *pt.x[:n], pt.newton_iters] for i, pt in enumerate(res.points)]
    w.csv("fold_curve.csv", ["step", p2, p1, *cfg.model.state_names, "newton_iters"], rows)
    w.json("summary.json", {"status": res.status, "points": len(res.points)})
    if res.status == "step_underflow":
        raise SolverFailure("fold continuation step size fell below ds_min", "step_underflow")


def run_transient(cfg, asm, w: Writer):
    s = cfg.section("transient")
    try:
        tr = bdf_integrate(asm, cfg.x0, cfg.params, (s["t0"], s["t1"]), s["h"], s["order"], _newton_opts(cfg))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    except NewtonError as exc:
        raise SolverFailure(f"initial rate solve failed: {exc}", exc.reason) from exc
    rows = [[i, t, *x, it] for i, (t, x, it) in enumerate(zip(tr.t, tr.x, tr.newton_iters))]
    w.csv("trajectory.csv", ["step", "t", *cfg.model.state_names, "newton_iters"], rows)
    if tr.status != "complete":
        raise SolverFailure(f"time step {tr.failure_index} failed: {tr.message}", "step_failure",
                            {"failure_index": tr.failure_index})


def _uncertain(cfg):
    out = []
    for item in cfg.section("uq")["uncertain"].split(","):
        parts = [t.strip() for t in item.split(":")]
        if len(parts) != 3:
            raise ConfigError(f"uncertain entry {item!r} must be name:low:high")
        lo, hi = _convert(float, parts[1], "[uq] uncertain"), _convert(float, parts[2], "[uq] uncertain")
        try:
            out.append(UniformParameter(_param_index(cfg, parts[0]), lo, hi))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return out


def run_uq(cfg, asm, w: Writer):
    s = cfg.section("uq")
    pm = _uncertain(cfg)
    basis = build_tensor_basis(len(pm), s["order"], s["points_per_dim"] or None)
    p_mid = cfg.params.copy()
    for up in pm:
        p_mid[up.index] = up.mid
    try:
        if cfg.kind == "uq-galerkin":
            x_mean = newton_solve(asm, cfg.x0, p_mid, _newton_opts(cfg)).x
            sol = sg_newton_solve(Assembler(cfg.model, basis), basis, pm, X_guess=x_mean, p=cfg.params,
                                  opts=_newton_opts(cfg))
        else:
            sol = nisp_project(cfg.model, basis, pm, p=cfg.params, x_guess=cfg.x0, opts=_newton_opts(cfg),
                               threads=s["threads"])
    except NodeSolveError as exc:
        raise SolverFailure(str(exc), "node_solve", {"node": exc.node}) from exc
    except NewtonError as exc:
        raise SolverFailure(f"stochastic Galerkin solve failed: {exc}", exc.reason) from exc
    names = cfg.model.state_names
    rows = [[i, " ".join(str(int(a)) for a in basis.multi_indices[i]), *sol.coeffs[i]] for i in range(basis.size)]
    w.csv("coeffs.csv", ["index", "multi_index", *names], rows)
    samp = sample_surrogate(sol, s["samples"], cfg.seed, s["bins"])
    moments = {}
    for i, nm in enumerate(names):
        moments[nm] = {"mean": sol.mean()[i], "std": sol.std()[i], "sample_mean": samp.mean[i],
                       "sample_std": samp.std[i]}
        edges, counts = samp.histograms[i]
        w.csv(f"histogram_{nm}.csv", ["bin_lo", "bin_hi", "count"],
              [[edges[b], edges[b + 1], int(counts[b])] for b in range(len(counts))])
    w.json("moments.json", {"method": cfg.kind, "order": s["order"], "basis_size": basis.size,
                            "samples": s["samples"], "moments": moments,
                            "uncertain": [{"param": cfg.model.param_names[u.index], "low": u.low, "high": u.high}
                                          for u in pm]})


def run_ops_count(cfg, asm, w: Writer):
    d = cfg.section("ops-count")["directions"]
    base = residual_cost(cfg.model, cfg.x0, cfg.params)
    jac = jacobian_cost(cfg.model, cfg.x0, cfg.params, d)
    w.json("ops.json", {"directions": d, "residual": base.as_dict(), "jacobian": jac.as_dict(),
                        "residual_flops": base.flops, "jacobian_flops": jac.flops,
                        "ratio": jac.flops / base.flops})


RUNNERS = {
    "steady": run_steady, "sensitivity": run_sensitivity, "continue": run_continue, "fold": run_fold,
    "fold-continue": run_fold_continue, "transient": run_transient, "uq-galerkin": run_uq,
    "uq-nisp": run_uq, "ops-count": run_ops_count,
}


# -- entry point ----------------------------------------------------------------


def _out_dir(args_out, cfg: ScenarioConfig | None) -> Path:
    if args_out:
        return Path(args_out)
    if cfg is not None and cfg.section("output")["dir"]:
        return Path(cfg.section("output")["dir"])
    return Path(os.environ.get("TBGP_OUT") or "tbgp-out")


def _error_record(kind: str, message: str, code: int, extra=None) -> dict:
    return {"error": {"type": kind, "message": message, "exit_code": code, **(extra or {})}}


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tbgp", description="Run CSTR analysis scenarios.")
    ap.add_argument("--version", action="version", version=f"tbgp {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (("run", "run the configured analysis"), ("dump-graph", "write the evaluator graph as DOT")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config_path", nargs="?", help="INI scenario file")
        p.add_argument("--config", help="INI scenario file (same as the positional argument)")
        p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                       help="override a config entry (repeatable)")
        p.add_argument("--out", help="output directory (default: [output] dir, then $TBGP_OUT)")
        p.add_argument("--quiet", action="store_true", help="only log warnings and errors")
        if name == "dump-graph":
            p.add_argument("--eval-type", default="Residual",
                           choices=[et.label for et in EvaluationType if not et.stochastic])
            p.add_argument("--all-nodes", action="store_true", help="include parameter seeds and scatters")
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    path = args.config or args.config_path
    if not path:
        print(json.dumps(_error_record("config", "no config file given", EXIT_CONFIG)), file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = resolve(read_config(path, args.set))
    except ConfigError as exc:
        rec = _error_record("config", str(exc), EXIT_CONFIG)
        print(json.dumps(rec), file=sys.stderr)
        return EXIT_CONFIG
    out = _out_dir(args.out, cfg)
    w = Writer(out, cfg)
    asm = Assembler(cfg.model)
    if args.command == "dump-graph":
        et = next(e for e in EvaluationType if e.label == args.eval_type)
        asm.prepare(et)
        kinds = ("compute", "state", "seed", "extract") if args.all_nodes else ("compute", "state")
        w.text("graph.dot", asm.fm.to_dot(et, kinds))
        return EXIT_OK
    try:
        RUNNERS[cfg.kind](cfg, asm, w)
    except ConfigError as exc:
        rec = _error_record("config", str(exc), EXIT_CONFIG)
        w.json("error.json", rec)
        print(json.dumps(rec), file=sys.stderr)
        return EXIT_CONFIG
    except SolverFailure as exc:
        rec = _error_record("solver", str(exc), EXIT_SOLVER, {"reason": exc.reason, **exc.detail,
                                                              "partial_files": list(w.written)})
        w.json("error.json", rec)
        log.error("%s", exc)
        return EXIT_SOLVER
    log.info("%s finished; %d files in %s", cfg.kind, len(w.written), out)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
