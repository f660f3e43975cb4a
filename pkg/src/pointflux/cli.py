"""Batch command-line front end.

``pointflux <command> --config run.json [--out path] [--format csv|json]``

Commands: ``qscan``, ``solve``, ``connection``, ``phase``, ``ring``, ``wz``,
``dot``. The JSON config is validated against a schema (unknown fields are
rejected), defaults are filled in, and the fully resolved config is embedded
in every output record. Floats are written with 17 significant digits.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 no level in the requested gap.
"""
from __future__ import annotations

import argparse
import copy
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import jsonschema
import numpy as np

from . import __version__
from . import berry, krein, ring, wz
from . import numerics as nm
from .backgrounds import (LandauBackground, ParabolicDotBackground, WhiskerBackground,
                          ZeroRangeDotBackground)
from .model import LoopPath, PointPerturbation, SystemConfig, alpha_from_lambda, \
    flux_through_loop

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_NO_SOLUTION = 0, 2, 3, 4
COMMANDS = ("qscan", "solve", "connection", "phase", "ring", "wz", "dot")

_NUM = {"type": "number"}
_POINT = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "system": {
            "type": "object", "additionalProperties": False,
            "properties": {"charge_sign": {"enum": [1, -1]}, "b0": _NUM, "eta": _NUM,
                           "omega0": {"type": "number", "minimum": 0}},
        },
        "background": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["landau", "whisker", "parabolic_dot", "zero_range_dot"]},
                "alpha0": _NUM,
            },
        },
        "perturbation": {
            "type": "object", "additionalProperties": False,
            "properties": {"alpha": _NUM,
                           "scattering_length": {"type": "number", "exclusiveMinimum": 0},
                           "site": _POINT},
            "not": {"required": ["alpha", "scattering_length"]},
        },
        "gap": {"type": "integer", "minimum": 0},
        "loop": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["circle", "square", "polyline"]},
                "radius": {"type": "number", "exclusiveMinimum": 0},
                "side": {"type": "number", "exclusiveMinimum": 0},
                "center": _POINT,
                "orientation": {"enum": [1, -1]},
                "vertices": {"type": "array", "items": _POINT, "minItems": 3},
                "n_points": {"type": "integer", "minimum": 3},
            },
        },
        "oracle": {"type": "boolean"},
        "richardson": {"type": "boolean"},
        "energies": {
            "type": "object", "additionalProperties": False,
            "required": ["start", "stop"],
            "properties": {"start": _NUM, "stop": _NUM,
                           "num": {"type": "integer", "minimum": 1}},
        },
        "ring": {
            "type": "object", "additionalProperties": False,
            "properties": {"radius": {"type": "number", "exclusiveMinimum": 0},
                           "eta": _NUM, "alpha": _NUM,
                           "gap": {"type": "integer", "minimum": 0},
                           "n_steps": {"type": "integer", "minimum": 8}},
        },
        "wz": {
            "type": "object", "additionalProperties": False,
            "properties": {"n": {"type": "integer", "minimum": 2},
                           "n_steps": {"type": "integer", "minimum": 1}},
        },
        "sweep": {
            "type": "object", "additionalProperties": False,
            "properties": {"alphas": {"type": "array", "items": _NUM, "minItems": 1},
                           "rho": {"type": "number", "exclusiveMinimum": 0}},
        },
        "tolerance": {
            "type": "object", "additionalProperties": False,
            "properties": {"abs_tol": {"type": "number", "exclusiveMinimum": 0},
                           "rel_tol": {"type": "number", "exclusiveMinimum": 0},
                           "max_iter": {"type": "integer", "minimum": 1}},
        },
    },
}

DEFAULTS = {
    "system": {"charge_sign": 1, "b0": 1.0, "eta": 0.0, "omega0": 0.0},
    "background": {"kind": "landau", "alpha0": 0.0},
    "perturbation": {"alpha": 0.0, "site": [1.0, 0.0]},
    "gap": 0,
    "loop": {"kind": "circle", "radius": 1.0, "center": [0.0, 0.0], "orientation": 1,
             "n_points": 200},
    "oracle": True,
    "richardson": True,
    "energies": {"num": 100},
    "ring": {"radius": 1.0, "eta": 0.25, "alpha": 0.0, "gap": 1, "n_steps": 256},
    "wz": {"n": wz.DEFAULT_N, "n_steps": 64},
    "sweep": {"alphas": [0.5, 1.0, 1.5, 2.0], "rho": 1.0},
    "tolerance": {"abs_tol": nm.DEFAULT_TOL.abs_tol, "rel_tol": nm.DEFAULT_TOL.rel_tol,
                  "max_iter": nm.DEFAULT_TOL.max_iter},
}


class ConfigError(Exception):
    """Invalid run configuration (exit code 2)."""


def resolve(spec: dict) -> dict:
    """Validate ``spec`` and fill in defaults (a new dict is returned).

    Raises
    ------
    ConfigError
    """
    try:
        jsonschema.validate(spec, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{path}: {exc.message}") from None
    out = copy.deepcopy(DEFAULTS)
    for key, value in spec.items():
        if isinstance(value, dict):
            out[key].update(copy.deepcopy(value))
        else:
            out[key] = value
    pert = out["perturbation"]
    if "scattering_length" in pert:
        pert["alpha"] = alpha_from_lambda(pert.pop("scattering_length"))
    if "energies" in spec and "num" not in spec["energies"]:
        out["energies"]["num"] = DEFAULTS["energies"]["num"]
    return out


# ---------------------------------------------------------------------------
# object construction
# ---------------------------------------------------------------------------

def _tolerance(cfg):
    return nm.Tolerance(**cfg["tolerance"])


def _system(cfg):
    return SystemConfig(**cfg["system"])


def _background(cfg):
    system = _system(cfg)
    kind = cfg["background"]["kind"]
    tol = _tolerance(cfg)
    if kind == "landau":
        return LandauBackground(system, tol)
    if kind == "whisker":
        return WhiskerBackground(system, tol=tol)
    if kind == "parabolic_dot":
        return ParabolicDotBackground(system, tol)
    return ZeroRangeDotBackground(system, cfg["background"]["alpha0"], tol)


def _perturbation(cfg):
    p = cfg["perturbation"]
    return PointPerturbation(p["alpha"], p["site"])


def _loop(cfg):
    lp = cfg["loop"]
    kind = lp["kind"]
    if kind == "circle":
        return LoopPath.circle(lp["radius"], lp["center"], lp["orientation"], lp["n_points"])
    if kind == "square":
        if "side" not in lp:
            raise ConfigError("loop/side is required for a square loop")
        return LoopPath.square(lp["side"], lp["center"], lp["n_points"], lp["orientation"])
    if "vertices" not in lp:
        raise ConfigError("loop/vertices is required for a polyline loop")
    return LoopPath.polyline(lp["vertices"], lp["n_points"])


def _threads():
    value = os.environ.get("POINTFLUX_THREADS")
    if value is None:
        return os.cpu_count() or 1
    try:
        n = int(value)
    except ValueError:
        raise ConfigError(f"POINTFLUX_THREADS must be an integer, got {value!r}") from None
    if n < 1:
        raise ConfigError("POINTFLUX_THREADS must be >= 1")
    return n


def _ordered_map(fn, items):
    """Map in parallel (``POINTFLUX_THREADS`` workers) keeping input order."""
    items = list(items)
    workers = min(_threads(), max(len(items), 1))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# commands; each returns (record, table) -- table is (columns, rows) or None
# ---------------------------------------------------------------------------

def cmd_qscan(cfg):
    en = cfg["energies"]
    if "start" not in en:
        raise ConfigError("qscan needs energies/start and energies/stop")
    energies = np.linspace(en["start"], en["stop"], en["num"])
    if "ring" in cfg.get("_given", ()):
        rc = cfg["ring"]

        def row(e):
            try:
                return [e, ring.ring_q_series(e, rc["eta"], rc["radius"]),
                        ring.ring_q_derivative(e, rc["eta"], rc["radius"])]
            except nm.PoleError:
                return None
    else:
        bg = _background(cfg)
        rho = _perturbation(cfg).rho

        def row(e):
            try:
                return [e, bg.q_function(e, rho), bg.q_derivative(e, rho)]
            except nm.PoleError:
                return None
    rows = [r for r in _ordered_map(row, energies.tolist()) if r is not None]
    return {"rows": len(rows)}, (["E", "Q", "dQ_dE"], rows)


def cmd_solve(cfg):
    bg = _background(cfg)
    sol = krein.solve_level(bg, _perturbation(cfg), bg.gap(cfg["gap"]), _tolerance(cfg))
    rec = {"energy": sol.energy, "gap": [sol.gap.lower, sol.gap.upper],
           "q_derivative": sol.q_deriv, "residual": sol.residual}
    return rec, None


def cmd_connection(cfg):
    bg = _background(cfg)
    pert = _perturbation(cfg)
    tol = _tolerance(cfg)
    sol = krein.solve_level(bg, pert, bg.gap(cfg["gap"]), tol)
    conn = berry.berry_connection(bg, pert, sol, tol)
    rec = {"energy": sol.energy, "rho": conn.rho, "v_theta": conn.v_theta,
           "v_rho": conn.v_rho, "dE0_dxi0_finite_difference": conn.de0_dxi0_fd,
           "dE0_dxi0_hellmann_feynman": conn.de0_dxi0_hf,
           "expectations": conn.expectations}
    return rec, None


def cmd_phase(cfg):
    bg = _background(cfg)
    pert = _perturbation(cfg)
    tol = _tolerance(cfg)
    loop = _loop(cfg)
    gap = bg.gap(cfg["gap"])
    rec = {"flux_quanta": flux_through_loop(bg.config, loop),
           "gamma_formula": None, "gamma_oracle": None}
    centred = loop.kind == "circle" and np.allclose(loop.center, 0.0)
    if centred:
        res = berry.berry_phase_circle(bg, pert, loop.radius, gap, tol, loop.orientation)
        rec["gamma_formula"] = res.phase
        rec["energy"] = res.diagnostics["energy"]
        for key in ("persistent_current_term", "flux_term"):
            if key in res.diagnostics:
                rec[key] = res.diagnostics[key]
        rec["formula_diagnostics"] = {"v_theta": res.diagnostics["v_theta"],
                                      "v_rho": res.diagnostics["v_rho"]}
    if cfg["oracle"]:
        res = berry.discrete_holonomy(bg, pert.alpha, loop, gap, tol,
                                      richardson=cfg["richardson"])
        rec["gamma_oracle"] = res.phase
        rec["oracle_diagnostics"] = res.diagnostics
    if "energy" not in rec:
        site = PointPerturbation(pert.alpha, loop.points(3)[0])
        rec["energy"] = krein.solve_level(bg, site, gap, tol).energy
    # the level is the same at every site of a centred circle; the dynamical
    # phase accumulated in time T is then -E0 T
    rec["dynamical_phase_rate"] = -rec["energy"]
    return rec, None


def cmd_ring(cfg):
    rc = cfg["ring"]
    tol = _tolerance(cfg)
    sol = ring.ring_solve(rc["alpha"], rc["eta"], rc["gap"], rc["radius"], tol=tol)
    pot = ring.ring_berry_potential(sol, tol=tol)
    rec = {"energy": sol.energy, "q_derivative": sol.q_deriv,
           "v_series_ratio": pot.series_ratio, "v_finite_difference": pot.finite_difference,
           "dE0_deta": pot.de0_deta, "gamma_formula": 2 * math.pi * pot.value,
           "persistent_current_term": 2 * math.pi * rc["radius"] ** 2 * pot.de0_deta,
           "flux_term": -2 * math.pi * rc["eta"]}
    if cfg["oracle"]:
        gamma, diag = ring.ring_holonomy_oracle(rc["alpha"], rc["eta"], rc["radius"],
                                                rc["gap"], rc["n_steps"],
                                                richardson=cfg["richardson"], tol=tol)
        rec["gamma_oracle"] = gamma
        rec["oracle_diagnostics"] = diag
    return rec, None


def cmd_wz(cfg):
    system = _system(cfg)
    loop = _loop(cfg)
    n, n_steps = cfg["wz"]["n"], cfg["wz"]["n_steps"]
    u = wz.wilson_loop(loop, n, n_steps, system)
    u_big = wz.wilson_loop(loop, n + 5, n_steps, system)
    eig = np.angle(np.linalg.eigvals(u))
    rec = {"n": n, "U_real": u.real.tolist(), "U_imag": u.imag.tolist(),
           "eigenphases": sorted(eig.tolist()),
           "U11_arg": float(np.angle(u[0, 0])),
           "expected_U11_arg": wz.expected_phase(loop, system),
           "unitarity_defect": float(np.max(np.abs(u.conj().T @ u - np.eye(n)))),
           "n_stability": float(np.max(np.abs(wz.interior_block(u) -
                                              wz.interior_block(u_big[:n, :n]))))}
    return rec, None


def cmd_dot(cfg):
    bg = _background(cfg)
    if not isinstance(bg, (ParabolicDotBackground, ZeroRangeDotBackground)):
        raise ConfigError("the dot command needs a parabolic_dot or zero_range_dot background")
    sw = cfg["sweep"]
    rho = sw["rho"]
    tol = _tolerance(cfg)
    xi0 = bg.config.xi0
    gap = bg.gap(cfg["gap"])

    def row(alpha):
        sol = krein.solve_level(bg, PointPerturbation.polar(alpha, rho), gap, tol)
        if isinstance(bg, ParabolicDotBackground):
            v = bg.angular_momentum(sol.energy, rho) / rho
        else:
            v = bg.berry_ratio(sol.energy, rho) * math.pi * xi0 * rho
        ratio = v / (math.pi * xi0 * rho)
        return [alpha, sol.energy, v, ratio, abs(ratio - 1.0)]

    rows = _ordered_map(row, sw["alphas"])
    return {"rows": len(rows)}, (["alpha", "E0", "v_theta", "ratio", "deviation"], rows)


_DISPATCH = {"qscan": cmd_qscan, "solve": cmd_solve, "connection": cmd_connection,
             "phase": cmd_phase, "ring": cmd_ring, "wz": cmd_wz, "dot": cmd_dot}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return "%.17g" % x


def to_json(obj) -> str:
    """Deterministic JSON with floats at 17 significant digits."""
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def _csv_cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return _fmt_float(float(v))
    if v is None:
        return ""
    if isinstance(v, (list, tuple, dict)):
        return '"' + to_json(v).replace('"', '""') + '"'
    return str(v)


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(_csv_cell(v) for v in r) + "\n")
    return buf.getvalue()


def render(command, cfg, record, table, fmt) -> str:
    public = {k: v for k, v in cfg.items() if not k.startswith("_")}
    if fmt == "csv":
        if table is not None:
            return to_csv(*table)
        keys = [k for k, v in record.items() if not isinstance(v, dict)]
        return to_csv(keys, [[record[k] for k in keys]])
    out = {"command": command, "version": __version__, "config": public, "result": record}
    if table is not None:
        out["columns"] = table[0]
        out["rows"] = table[1]
    return to_json(out) + "\n"


def run(command: str, spec: dict, fmt: str = "json") -> str:
    """Execute one command on a config dict and return the rendered output."""
    if command not in _DISPATCH:
        raise ConfigError(f"unknown command {command!r}")
    cfg = resolve(spec)
    cfg["_given"] = tuple(spec)
    record, table = _DISPATCH[command](cfg)
    return render(command, cfg, record, table, fmt)


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None


def _exit_code(exc) -> int:
    if isinstance(exc, krein.NoSolutionInGap):
        return EXIT_NO_SOLUTION
    if isinstance(exc, nm.PoleError):
        return EXIT_NUMERIC
    if isinstance(exc, (ConfigError, nm.DomainError)):
        return EXIT_CONFIG
    return EXIT_NUMERIC


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="pointflux", description=__doc__.split("\n")[0])
    parser.add_argument("command", nargs="?", choices=COMMANDS)
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="json")
    parser.add_argument("--selftest", action="store_true",
                        help="run the reduced acceptance checks and exit")
    args = parser.parse_args(argv)
    if args.selftest:
        from .selftest import run_selftest
        return run_selftest(sys.stdout)
    if args.command is None:
        parser.error("a command is required")
    try:
        spec = _load(args.config) if args.config else {}
        text = run(args.command, spec, args.format)
    except Exception as exc:  # noqa: BLE001 - mapped to documented exit codes
        code = _exit_code(exc)
        if code == EXIT_NUMERIC and not isinstance(
                exc, (ArithmeticError, RuntimeError, ValueError, nm.NonConvergenceError,
                      nm.PoleError)):
            raise
        print(f"pointflux: error: {exc}", file=sys.stderr)
        return code
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK
