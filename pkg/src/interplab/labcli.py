"""Experiment harness and the ``interp-lab`` command line.

A run is described by a JSON :class:`ExperimentConfig`.  The ``(theta, p)``
grid is expanded into independent cells, which are dispatched to a bounded
process pool; each cell is deterministic, so the merged :class:`RunRecord`
does not depend on the pool size.  Tables are written as CSV, full records
as JSON.

Exit codes: 0 success, 2 configuration error, 3 numerical failure in at
least one cell (partial results are still written).
"""

from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import logging
import math
import os
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .couple import Couple, norm_spec_from_json
from .errors import ConfigError, InterpLabError
from .jcalculus import norm_selector_from_json
from .laurent import AnnulusSpec, fc_equals_annulus
from .repsolver import SolverConfig, WindowProblem, stafney_sweep, windowed_norm

__all__ = [
    "ExperimentConfig",
    "RunRecord",
    "CellResult",
    "run",
    "emit_report",
    "main",
    "EXIT_OK",
    "EXIT_CONFIG",
    "EXIT_NUMERICAL",
]

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
COMMANDS = ("norm", "stafney", "annulus-verify", "operators-check")

_NUM = {"type": "number"}
_PNUM = {"anyOf": [{"type": "number", "minimum": 1}, {"enum": ["inf"]}]}
_NORM = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["weighted_lp", "lp"]},
        "p": _PNUM,
        "weights": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0},
                    "minItems": 1, "maxItems": 8},
        "scale": {"type": "number", "exclusiveMinimum": 0},
    },
    "additionalProperties": False,
}
_PL = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["lp", "c0", "FC", "UC", "WUC"]},
        "p": _PNUM,
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "mode": {"enum": ["sign", "phase"]},
        "q": {"type": "integer", "minimum": 2},
        "cap": {"type": "integer", "minimum": 1},
    },
    "required": ["kind"],
    "additionalProperties": False,
}
SCHEMA = {
    "type": "object",
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "couple": {
            "type": "object",
            "properties": {"dim": {"type": "integer", "minimum": 1, "maximum": 8},
                           "norm0": _NORM, "norm1": _NORM},
            "required": ["dim", "norm0", "norm1"],
            "additionalProperties": False,
        },
        "norm": {
            "type": "object",
            "properties": {
                "norm": {"enum": ["j", "J-e", "J-2", "Jphi"]},
                "x0": _PL,
                "x1": _PL,
                "base": {"type": "number", "exclusiveMinimum": 1},
                "s": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
            },
            "additionalProperties": False,
        },
        "theta": {"type": "array", "items": _NUM},
        "p": {"type": "array", "items": _PNUM},
        "x": {"type": "array", "items": {"anyOf": [_NUM, {"type": "array", "items": _NUM,
                                                          "minItems": 2, "maxItems": 2}]}},
        "nmax": {"type": "integer", "minimum": 0},
        "windows": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "solver": {
            "type": "object",
            "properties": {
                "relTol": {"type": "number", "exclusiveMinimum": 0},
                "maxIter": {"type": "integer", "minimum": 1},
                "feasTol": {"type": "number", "exclusiveMinimum": 0},
                "seed": {"type": "integer", "minimum": 0},
            },
            "additionalProperties": False,
        },
        "annulus": {
            "type": "object",
            "properties": {"tol": {"type": "number", "exclusiveMinimum": 0},
                           "starts": {"type": "array",
                                      "items": {"enum": ["delta", "spread", "warm"]}}},
            "additionalProperties": False,
        },
        "trials": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "output": {
            "type": "object",
            "properties": {"csv": {"type": "string"}, "json": {"type": "string"},
                           "long": {"type": "string"}},
            "additionalProperties": False,
        },
    },
    "required": ["couple"],
    "additionalProperties": False,
}

_DEFAULTS = {
    "command": "stafney",
    "norm": {"norm": "j", "x0": {"kind": "lp"}, "x1": {"kind": "lp"}},
    "theta": [0.5],
    "p": [1],
    "nmax": 10,
    "solver": {"relTol": 1e-4, "maxIter": 40, "feasTol": 1e-10, "seed": 0},
    "annulus": {"tol": 1e-6, "starts": ["delta", "spread", "warm"]},
    "trials": 1000,
    "seed": 0,
    "output": {},
}


def _merge(defaults, given):
    out = copy.deepcopy(defaults)
    for k, v in given.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "norm":
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _error_key(err):
    """Slash-separated path of the key a schema error is about."""
    parts = [str(p) for p in err.absolute_path]
    if err.validator == "additionalProperties":
        parts.append(",".join(sorted(set(err.instance) - set(err.schema.get("properties", {})))))
    elif err.validator == "required":
        parts.append(err.message.split("'")[1])
    return "/".join(parts) or "<root>"


def _canonical(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description; ``data`` is the normalised JSON object."""

    data: dict

    @classmethod
    def from_dict(cls, obj):
        if not isinstance(obj, dict):
            raise ConfigError("configuration must be a JSON object", keys=["<root>"])
        validator = jsonschema.Draft202012Validator(SCHEMA)
        errors = sorted(validator.iter_errors(obj), key=lambda e: [str(p) for p in e.absolute_path])
        if errors:
            keys = [_error_key(e) for e in errors]
            msg = "; ".join(f"{k}: {e.message}" for k, e in zip(keys, errors))
            raise ConfigError(f"invalid configuration: {msg}", keys=keys)
        data = _merge(_DEFAULTS, obj)
        cfg = cls(data)
        cfg._check_ranges()
        return cfg

    @classmethod
    def from_json(cls, text):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON: {exc}", keys=["<root>"]) from exc
        return cls.from_dict(obj)

    @classmethod
    def load(cls, path):
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read configuration {path}: {exc}", keys=["<file>"]) from exc
        return cls.from_json(text)

    def _check_ranges(self):
        bad = []
        d = self.data
        c = d["couple"]
        for j in ("norm0", "norm1"):
            w = c[j].get("weights")
            if w is not None and len(w) != c["dim"]:
                bad.append(f"couple/{j}/weights")
        for th in d["theta"]:
            if d["norm"].get("norm", "j") != "Jphi" and not 0 < th < 1:
                bad.append("theta")
                break
        if d.get("x") is not None and len(d["x"]) != c["dim"]:
            bad.append("x")
        if bad:
            raise ConfigError(f"parameters out of range: {', '.join(bad)}", keys=bad)
        try:
            self.couple()
            for th in d["theta"]:
                for p in d["p"]:
                    self.selector(th, p)
        except InterpLabError as exc:
            raise ConfigError(f"invalid parameters: {exc}", keys=["couple/norm"]) from exc

    # -- accessors ------------------------------------------------------------

    def to_json(self):
        return copy.deepcopy(self.data)

    def dumps(self):
        return json.dumps(self.data, indent=2, sort_keys=True)

    @property
    def hash(self):
        return hashlib.sha256(_canonical(self.data).encode()).hexdigest()

    def with_overrides(self, **kw):
        data = copy.deepcopy(self.data)
        for k, v in kw.items():
            if v is None:
                continue
            if k == "seed":
                data["seed"] = v
                data["solver"]["seed"] = v
            elif k == "nmax":
                data["nmax"] = v
                data.pop("windows", None)
            else:
                data[k] = v
        return ExperimentConfig.from_dict(data)

    def couple(self):
        c = self.data["couple"]
        dim = c["dim"]
        return Couple(dim, norm_spec_from_json(c["norm0"], dim), norm_spec_from_json(c["norm1"], dim))

    def selector(self, theta, p):
        p = math.inf if p == "inf" else p
        return norm_selector_from_json(self.data["norm"], theta, p)

    def solver(self):
        s = self.data["solver"]
        return SolverConfig(rel_tol=s["relTol"], max_iter=s["maxIter"], feas_tol=s["feasTol"])

    def x(self):
        d = self.data
        dim = d["couple"]["dim"]
        if d.get("x") is None:
            rng = np.random.default_rng(d["seed"])
            return rng.normal(size=dim) + 1j * rng.normal(size=dim)
        return np.array([complex(*v) if isinstance(v, list) else complex(v) for v in d["x"]])

    def windows(self):
        d = self.data
        if d.get("windows"):
            return sorted(set(d["windows"]))
        return list(range(0, d["nmax"] + 1))

    def cells(self):
        """``(theta, p)`` grid in deterministic order."""
        d = self.data
        if d["command"] == "operators-check":
            return [(None, None)]
        if d["command"] == "annulus-verify":
            return [(th, None) for th in d["theta"]]
        return [(th, p) for th in d["theta"] for p in d["p"]]


@dataclass
class CellResult:
    """Rows and status of one grid cell."""

    theta: object
    p: object
    rows: list
    wall: float
    error: str = ""
    failed: bool = False
    extra: dict = field(default_factory=dict)

    def key(self):
        return {"theta": self.theta, "p": self.p}


@dataclass
class RunRecord:
    """Everything a run produced: config hash, per-cell results, timings, tool version."""

    command: str
    config: dict
    config_hash: str
    cells: list
    version: str = __version__
    wall: float = 0.0

    @property
    def failed(self):
        return any(c.failed for c in self.cells)

    def to_json(self):
        return {
            "command": self.command,
            "configHash": self.config_hash,
            "version": self.version,
            "config": self.config,
            "wall": self.wall,
            "cells": [
                {"theta": c.theta, "p": c.p, "rows": c.rows, "wall": c.wall,
                 "error": c.error, "failed": c.failed, **c.extra}
                for c in self.cells
            ],
        }


# -- cell workers ---------------------------------------------------------------


def _report_row(rep):
    return {"N": rep.N, "value": rep.value, "relGap": rep.rel_gap,
            "iterations": rep.iterations, "converged": bool(rep.converged)}


def _cell_norm(cfg, theta, p):
    problem = WindowProblem(cfg.couple(), cfg.selector(theta, p), cfg.x(), cfg.data["nmax"])
    return [_report_row(windowed_norm(problem, cfg.solver()))], {}


def _cell_stafney(cfg, theta, p):
    problem = WindowProblem(cfg.couple(), cfg.selector(theta, p), cfg.x(), 0)
    sweep = stafney_sweep(problem, cfg=cfg.solver(), windows=cfg.windows())
    return [_report_row(rep) for _, rep in sweep], {}


def _cell_annulus(cfg, theta, _p):
    ann = cfg.data["annulus"]
    sel = cfg.data["norm"]
    spec = AnnulusSpec(base=float(sel.get("base", math.e)), theta=theta, tol=ann["tol"])
    rows = []
    for N in cfg.windows():
        fv, av = fc_equals_annulus(cfg.couple(), cfg.x(), spec, N, cfg.solver(),
                                   starts=tuple(ann["starts"]))
        rows.append({"N": N, "fcValue": float(fv), "annulusValue": float(av),
                     "absDiff": abs(float(fv) - float(av))})
    return rows, {}


def _cell_operators(cfg, _theta, _p):
    from .audit import operators_audit

    summary = operators_audit(cfg.couple(), cfg.data["trials"], cfg.data["seed"],
                              base=float(cfg.data["norm"].get("base", math.e)))
    rows = [{"check": k, **v} for k, v in summary.items()]
    bad = [r["check"] for r in rows if r["violations"]]
    return rows, {"violations": bad}


_WORKERS = {
    "norm": _cell_norm,
    "stafney": _cell_stafney,
    "annulus-verify": _cell_annulus,
    "operators-check": _cell_operators,
}


def _run_cell(args):
    data, theta, p = args
    cfg = ExperimentConfig(data)
    t0 = time.perf_counter()
    try:
        rows, extra = _WORKERS[data["command"]](cfg, theta, p)
        failed = bool(extra.get("violations"))
        err = f"violated checks: {', '.join(extra['violations'])}" if failed else ""
    except (InterpLabError, ArithmeticError, np.linalg.LinAlgError) as exc:
        rows, extra, failed, err = [], {}, True, f"{type(exc).__name__}: {exc}"
    return CellResult(theta, p, rows, time.perf_counter() - t0, err, failed, extra)


def _resolve_jobs(jobs):
    if jobs is None:
        env = os.environ.get("INTERP_LAB_JOBS")
        if env:
            try:
                jobs = int(env)
            except ValueError as exc:
                raise ConfigError(f"INTERP_LAB_JOBS must be an integer, got {env!r}",
                                  keys=["INTERP_LAB_JOBS"]) from exc
    jobs = 1 if jobs is None else jobs
    if jobs < 1:
        raise ConfigError("--jobs must be at least 1", keys=["jobs"])
    return jobs


def run(config, jobs=None):
    """Execute every cell of ``config`` and return the merged :class:`RunRecord`."""
    if not isinstance(config, ExperimentConfig):
        config = ExperimentConfig.from_dict(config)
    jobs = _resolve_jobs(jobs)
    t0 = time.perf_counter()
    tasks = [(config.data, th, p) for th, p in config.cells()]
    if jobs == 1 or len(tasks) <= 1:
        results = [_run_cell(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            results = list(pool.map(_run_cell, tasks))
    for r in results:
        if r.failed:
            log.warning("cell theta=%s p=%s failed: %s", r.theta, r.p, r.error)
    return RunRecord(config.data["command"], config.to_json(), config.hash, results,
                     wall=time.perf_counter() - t0)


# -- reporting ------------------------------------------------------------------

_COLUMNS = {
    "norm": ["N", "value", "relGap", "iterations", "converged"],
    "stafney": ["N", "value", "relGap", "iterations", "converged"],
    "annulus-verify": ["N", "fcValue", "annulusValue", "absDiff"],
    "operators-check": ["check", "trials", "violations", "maxError"],
}


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    if v is None:
        return ""
    return str(v)


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(r.get(h)) for h in header])
    return buf.getvalue()


def table_rows(record):
    """Rows of the main CSV; cell keys are prepended when the grid has several cells."""
    cols = list(_COLUMNS[record.command])
    multi = len(record.cells) > 1
    if multi:
        cols = ["theta"] + (["p"] if record.command in ("norm", "stafney") else []) + cols
    rows = []
    for c in record.cells:
        for r in c.rows:
            rows.append({**r, "theta": c.theta, "p": c.p} if multi else r)
    return cols, rows


def long_rows(record):
    """Plot-ready long format: one row per ``(theta, p, N)`` and quantity."""
    out = []
    for c in record.cells:
        for r in c.rows:
            for k, v in r.items():
                if k in ("N", "check") or isinstance(v, bool):
                    continue
                out.append({"theta": c.theta, "p": c.p, "N": r.get("N", r.get("check")),
                            "quantity": k, "value": v})
    return out


def emit_report(record, out=None, formats=("csv", "json", "long")):
    """Write the CSV table, the JSON record and the long-format table; return the paths.

    ``out`` names the CSV file; the JSON record and long table are placed
    next to it as ``<stem>.record.json`` and ``<stem>.long.csv`` unless the config
    names them.  Nothing time-dependent goes into the CSV files, so a rerun
    of the same config reproduces them byte for byte.
    """
    outputs = record.config.get("output", {})
    csv_path = Path(out or outputs.get("csv") or f"{record.command}.csv")
    stem = csv_path.with_suffix("")
    paths = {}
    if "csv" in formats:
        cols, rows = table_rows(record)
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        csv_path.write_text(_csv_text(cols, rows))
        paths["csv"] = csv_path
    if "json" in formats:
        jp = Path(outputs.get("json") or f"{stem}.record.json")
        jp.write_text(json.dumps(record.to_json(), indent=2, default=_json_default))
        paths["json"] = jp
    if "long" in formats:
        lp = Path(outputs.get("long") or f"{stem}.long.csv")
        lp.write_text(_csv_text(["theta", "p", "N", "quantity", "value"], long_rows(record)))
        paths["long"] = lp
    return paths


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


# -- command line -----------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="interp-lab",
                                     description="Numerical experiments on interpolation norms.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=name != "operators-check",
                        help="JSON experiment configuration")
        sp.add_argument("--out", help="output CSV path (JSON record written alongside)")
        sp.add_argument("--jobs", type=int, help="worker processes (default: $INTERP_LAB_JOBS or 1)")
        sp.add_argument("--seed", type=int, help="override the configured seed")
        sp.add_argument("--nmax", type=int, help="override the configured largest window")
        sp.add_argument("--trials", type=int, help="override the configured number of trials")
        sp.add_argument("-v", "--verbose", action="store_true")
    return parser


_DEFAULT_OPS_CONFIG = {
    "couple": {"dim": 2, "norm0": {"kind": "weighted_lp", "p": 2, "weights": [1.0, 2.0]},
               "norm1": {"kind": "weighted_lp", "p": 1, "weights": [3.0, 0.5]}},
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if not args.verbose:
        # inaccurate solves are already reflected in the reported gap
        warnings.filterwarnings("ignore", message="Solution may be inaccurate")
    try:
        if args.config:
            cfg = ExperimentConfig.load(args.config)
        else:
            cfg = ExperimentConfig.from_dict(_DEFAULT_OPS_CONFIG)
        cfg = cfg.with_overrides(command=args.command, seed=args.seed, nmax=args.nmax,
                                 trials=args.trials)
        record = run(cfg, jobs=args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        if exc.keys:
            print(f"offending keys: {', '.join(exc.keys)}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        paths = emit_report(record, args.out)
    except OSError as exc:
        print(f"cannot write report: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL if record.failed else 1
    for kind, path in paths.items():
        print(f"{kind:5s} {path}")
    if record.failed:
        for c in record.cells:
            if c.failed:
                print(f"cell theta={c.theta} p={c.p}: {c.error}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
