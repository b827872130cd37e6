"""Command-line front end: schedules, bound sweeps, simulation, verification.

Subcommands
-----------
sequence        emit a pulse schedule as CSV (``time,axis,qubit,level``)
bounds qdd      two-level distance/channel bounds over a grid
bounds nudd     nested multi-qubit bound over a grid
simulate        run one exact spin-bath experiment from a JSON config
verify orders   certify claimed suppression orders via exact word integrals
verify bound    check bound dominance over randomized baths
sweep           randomized experiment grid from a JSON config

Configs are JSON objects whose keys mirror the long flag names with
underscores (``--eps-min`` -> ``"eps_min"``).  Flags override file values;
unknown keys are rejected.  A ``simulate`` config looks like::

    {"kind": "qdd", "orders": [2, 2], "T": 0.05,
     "bath": {"dim": 8, "seed": 42,
              "norms": {"0": 1.0, "x": 0.3, "y": 0.8, "z": 0.05}}}

with optional ``initial_state``, ``bath_state``, ``mode``, ``rel_tol`` and
``tie_order`` keys.  A ``sweep`` config gives lists to cross::

    {"kind": "qdd", "orders": [[1, 1], [2, 2]], "bath_dim": [2, 8],
     "eps": [0.001, 0.01], "eta": [0.1, 1.0], "seeds": 3, "master_seed": 0}

Every artifact starts with a header block recording the package version, the
resolved-config hash, the master seed, and the mode, so identical inputs
produce byte-identical output.  CSV floats use 17 significant digits; JSON
floats use shortest round-trip repr.  ``DDBOUND_THREADS`` caps sweep workers.

Exit codes: 0 success, 1 assertion failure (a verified property is violated),
2 invalid input, 3 numerical non-convergence (possibly partial: rows that
failed to converge are flagged with ``# non-convergence`` comment lines).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from typing import Any, Callable, Sequence

from . import __version__
from .dyson import verify_orders
from .nudd_bounds import (
    NUDD_SWEEP_COLUMNS,
    nudd_eps_window,
    nudd_sweep_row,
    preset_nudd_cells,
)
from .qdd_bounds import (
    QDD_SWEEP_COLUMNS,
    EtaVector,
    decoupling_orders,
    default_eps_grid,
    preset_cells,
    sweep_row,
)
from .sequences import nudd_schedule, qdd_schedule
from .series import NonConvergenceError
from .simulator import BathSpec, ExperimentConfig, SimResult, run_experiment

__all__ = ["main"]

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_INVALID = 2
EXIT_NONCONVERGENCE = 3

MARGIN_FLOOR = -1e-12
UNITARITY_TOL = 1e-10

_VERIFY_COLUMNS = (
    "seed",
    "epsilon",
    "eta",
    "D_actual",
    "D_bound",
    "margin",
    "channel_margin_min",
    "unitarity",
    "ok",
)

_SWEEP_COLUMNS = (
    "cell",
    "kind",
    "orders",
    "bath_dim",
    "seed",
    "epsilon",
    "eta",
    "D_actual",
    "D_bound",
    "margin",
    "channel_margin_min",
    "unitarity",
)


class CliError(ValueError):
    """Invalid command-line or config input (exit code 2)."""


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def _csv_row(row: dict, columns: Sequence[str]) -> str:
    return ",".join(_fmt(row[c]) for c in columns)


def _config_hash(resolved: dict) -> str:
    blob = json.dumps(resolved, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def _header(command: str, resolved: dict, seed: Any = None, mode: Any = None) -> list[str]:
    return [
        f"# ddbound={__version__}",
        f"# command={command}",
        f"# config_hash={_config_hash(resolved)}",
        f"# seed={'none' if seed is None else seed}",
        f"# mode={'none' if mode is None else mode}",
    ]


def _emit(lines: list[str], out: str | None, append: bool = False) -> None:
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "a" if append else "w", encoding="utf-8") as fh:
            fh.write(text)


def _worker_count(cells: int) -> int:
    env = os.environ.get("DDBOUND_THREADS")
    if env is None:
        cap = os.cpu_count() or 1
    else:
        try:
            cap = int(env)
        except ValueError:
            raise CliError(f"DDBOUND_THREADS must be an integer, got {env!r}")
        if cap < 1:
            raise CliError("DDBOUND_THREADS must be >= 1")
    return max(1, min(cap, cells))


def _run_cells(configs: Sequence[ExperimentConfig]) -> list[SimResult | NonConvergenceError]:
    """Run experiments in parallel; results in submission order.

    Non-convergence is captured per cell so one bad cell cannot hide the
    others; any other exception propagates.
    """

    def one(cfg: ExperimentConfig) -> SimResult | NonConvergenceError:
        try:
            return run_experiment(cfg)
        except NonConvergenceError as exc:
            return exc

    if len(configs) <= 1:
        return [one(c) for c in configs]
    with ThreadPoolExecutor(max_workers=_worker_count(len(configs))) as pool:
        return list(pool.map(one, configs))


def _load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config {path!r}: {exc}")
    except json.JSONDecodeError as exc:
        raise CliError(f"config {path!r} is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise CliError(f"config {path!r} must be a JSON object")
    return doc


def _resolve(
    args: argparse.Namespace,
    keys: Sequence[str],
    defaults: dict[str, Any],
) -> dict[str, Any]:
    """Merge defaults <- config file <- explicitly passed flags.

    All flags use ``default=None`` so a set flag is distinguishable from an
    unset one.  Unknown config keys are rejected.
    """
    resolved = dict(defaults)
    path = getattr(args, "config", None)
    if path is not None:
        doc = _load_json(path)
        unknown = sorted(set(doc) - set(keys))
        if unknown:
            raise CliError(f"unknown config keys: {', '.join(unknown)}")
        resolved.update(doc)
    for key in keys:
        val = getattr(args, key, None)
        if val is not None:
            resolved[key] = val
    return resolved


# ---------------------------------------------------------------- sequence --


def cmd_sequence(args: argparse.Namespace) -> int:
    if (args.qdd is None) == (args.nudd is None):
        raise CliError("exactly one of --qdd or --nudd is required")
    if args.qdd is not None:
        n1, n2 = args.qdd
        if n1 < 0 or n2 < 0:
            raise CliError(f"--qdd: orders must be nonnegative, got {n1} {n2}")
        schedule = qdd_schedule(n1, n2)
        resolved: dict[str, Any] = {"qdd": [n1, n2]}
    else:
        try:
            orders = [int(tok) for tok in args.nudd.split(",")]
        except ValueError:
            raise CliError(f"--nudd: expected comma-separated integers, got {args.nudd!r}")
        if any(n < 0 for n in orders):
            raise CliError(f"--nudd: orders must be nonnegative, got {args.nudd}")
        if args.qubits is None:
            raise CliError("--nudd requires --qubits")
        try:
            schedule = nudd_schedule(orders, args.qubits)
        except ValueError as exc:
            raise CliError(f"--nudd/--qubits: {exc}")
        resolved = {"nudd": orders, "qubits": args.qubits}

    lines = _header("sequence", resolved)
    lines.append("time,axis,qubit,level")
    for ev in schedule.events:
        lines.append(f"{_fmt(ev.time)},{ev.axis},{ev.qubit},{ev.level}")
    _emit(lines, args.out)
    return EXIT_OK


# ------------------------------------------------------------------ bounds --


def _eps_grid_from(resolved: dict) -> tuple[float, ...]:
    points = resolved["eps_points"]
    if points == 0:
        return ()
    if points == 1:
        raise CliError("eps_points must be 0 (empty grid) or >= 2")
    try:
        return default_eps_grid(resolved["eps_min"], resolved["eps_max"], points)
    except ValueError as exc:
        raise CliError(str(exc))


def _flag_line(row: dict, columns: Sequence[str]) -> str:
    parts = " ".join(f"{c}={_fmt(row[c])}" for c in columns if not _is_nan(row[c]))
    return f"# non-convergence: {parts}"


def _is_nan(value: Any) -> bool:
    return isinstance(value, float) and math.isnan(value)


_QDD_BOUNDS_KEYS = (
    "preset",
    "n1",
    "n2",
    "eta",
    "eta_x",
    "eta_y",
    "eta_z",
    "eps_min",
    "eps_max",
    "eps_points",
    "mode",
    "rel_tol",
)


def cmd_bounds_qdd(args: argparse.Namespace) -> int:
    defaults: dict[str, Any] = {
        "preset": None,
        "n1": None,
        "n2": None,
        "eta": None,
        "eta_x": None,
        "eta_y": None,
        "eta_z": None,
        "eps_min": 1e-4,
        "eps_max": 1.0,
        "eps_points": 41,
        "mode": "analytic",
        "rel_tol": 1e-15,
    }
    resolved = _resolve(args, _QDD_BOUNDS_KEYS, defaults)

    if resolved["preset"] is not None:
        if resolved["n1"] is not None or resolved["n2"] is not None:
            raise CliError("a preset cannot be combined with --n1/--n2")
        try:
            cells = preset_cells(resolved["preset"])
        except ValueError as exc:
            raise CliError(str(exc))
    elif resolved["n1"] is not None or resolved["n2"] is not None:
        if resolved["n1"] is None or resolved["n2"] is None:
            raise CliError("--n1 and --n2 must be given together")
        comps = (resolved["eta_x"], resolved["eta_y"], resolved["eta_z"])
        if resolved["eta"] is not None and any(c is not None for c in comps):
            raise CliError("--eta conflicts with --eta-x/--eta-y/--eta-z")
        try:
            if any(c is not None for c in comps):
                eta = EtaVector(*(0.0 if c is None else c for c in comps))
            else:
                eta = EtaVector.isotropic(
                    1.0 if resolved["eta"] is None else resolved["eta"]
                )
        except ValueError as exc:
            raise CliError(str(exc))
        cells = ((resolved["n1"], resolved["n2"], eta),)
    else:
        cells = ()

    eps_grid = _eps_grid_from(resolved)
    mode = resolved["mode"]
    if mode not in ("analytic", "numeric-footnote"):
        raise CliError(f"mode must be analytic or numeric-footnote, got {mode!r}")

    lines = _header("bounds qdd", resolved, mode=mode)
    lines.append(",".join(QDD_SWEEP_COLUMNS))
    failures = 0
    for n1, n2, eta in cells:
        try:
            orders = decoupling_orders(n1, n2, mode)
        except ValueError as exc:
            raise CliError(str(exc))
        for eps in eps_grid:
            try:
                row = sweep_row(n1, n2, eps, eta, mode, resolved["rel_tol"])
            except NonConvergenceError:
                nan = float("nan")
                row = {
                    "epsilon": eps,
                    "N1": n1,
                    "N2": n2,
                    "eta_x": eta.eta_x,
                    "eta_y": eta.eta_y,
                    "eta_z": eta.eta_z,
                    "d_x": orders.d_x,
                    "d_y": orders.d_y,
                    "d_z": orders.d_z,
                    "L_x": nan,
                    "L_y": nan,
                    "L_z": nan,
                    "D_bound": nan,
                    "D_leading": nan,
                }
                lines.append(_flag_line(row, QDD_SWEEP_COLUMNS))
                failures += 1
            lines.append(_csv_row(row, QDD_SWEEP_COLUMNS))
    _emit(lines, args.out)
    return EXIT_NONCONVERGENCE if failures else EXIT_OK


_NUDD_BOUNDS_KEYS = (
    "preset",
    "m",
    "dmin",
    "eta",
    "eps_min",
    "eps_max",
    "eps_points",
    "rel_tol",
)


def cmd_bounds_nudd(args: argparse.Namespace) -> int:
    defaults: dict[str, Any] = {
        "preset": None,
        "m": None,
        "dmin": None,
        "eta": None,
        "eps_min": 1e-4,
        "eps_max": 1.0,
        "eps_points": 41,
        "rel_tol": 1e-15,
    }
    resolved = _resolve(args, _NUDD_BOUNDS_KEYS, defaults)

    # (m, d_min, eta, eps_grid) work items; the preset rescales each cell's
    # grid into the representable window for its (eta, m).
    items: list[tuple[int, int, float, tuple[float, ...]]] = []
    if resolved["preset"] is not None:
        if resolved["m"] is not None or resolved["dmin"] is not None:
            raise CliError("a preset cannot be combined with --m/--dmin")
        try:
            cells = preset_nudd_cells(resolved["preset"])
        except ValueError as exc:
            raise CliError(str(exc))
        points = resolved["eps_points"]
        for m, d_min, eta in cells:
            grid = (
                ()
                if points == 0
                else nudd_eps_window(
                    eta, m, resolved["eps_min"], resolved["eps_max"], points
                )
            )
            items.append((m, d_min, eta, grid))
    elif resolved["m"] is not None or resolved["dmin"] is not None:
        if resolved["m"] is None or resolved["dmin"] is None:
            raise CliError("--m and --dmin must be given together")
        m, d_min = resolved["m"], resolved["dmin"]
        eta = 1.0 if resolved["eta"] is None else resolved["eta"]
        if not isinstance(m, int) or not (1 <= m <= 31):
            raise CliError(f"--m must be an integer in [1, 31], got {m!r}")
        if not isinstance(d_min, int) or d_min < 0:
            raise CliError(f"--dmin must be a nonnegative integer, got {d_min!r}")
        if not eta >= 0:
            raise CliError(f"--eta must be >= 0, got {eta!r}")
        items.append((m, d_min, eta, _eps_grid_from(resolved)))

    lines = _header("bounds nudd", resolved)
    lines.append(",".join(NUDD_SWEEP_COLUMNS))
    failures = 0
    for m, d_min, eta, grid in items:
        for eps in grid:
            try:
                row = nudd_sweep_row(m, d_min, eps, eta, resolved["rel_tol"])
            except NonConvergenceError:
                nan = float("nan")
                row = {
                    "epsilon": eps,
                    "m": m,
                    "d_min": d_min,
                    "eta": eta,
                    "Delta": nan,
                    "D_bound": nan,
                    "D_leading": nan,
                }
                lines.append(_flag_line(row, NUDD_SWEEP_COLUMNS))
                failures += 1
            lines.append(_csv_row(row, NUDD_SWEEP_COLUMNS))
    _emit(lines, args.out)
    return EXIT_NONCONVERGENCE if failures else EXIT_OK


# ---------------------------------------------------------------- simulate --


_SIM_KEYS = (
    "kind",
    "orders",
    "bath",
    "T",
    "initial_state",
    "bath_state",
    "mode",
    "rel_tol",
    "tie_order",
)
_BATH_KEYS = ("dim", "seed", "norms")


def _experiment_from(resolved: dict) -> ExperimentConfig:
    for key in ("kind", "orders", "bath", "T"):
        if resolved.get(key) is None:
            raise CliError(f"config key {key!r} is required")
    bath_doc = resolved["bath"]
    if not isinstance(bath_doc, dict):
        raise CliError("config key 'bath' must be an object")
    unknown = sorted(set(bath_doc) - set(_BATH_KEYS))
    if unknown:
        raise CliError(f"unknown bath keys: {', '.join(unknown)}")
    for key in _BATH_KEYS:
        if key not in bath_doc:
            raise CliError(f"bath key {key!r} is required")
    try:
        bath = BathSpec(
            dim=bath_doc["dim"],
            seed=bath_doc["seed"],
            norms={str(k): float(v) for k, v in bath_doc["norms"].items()},
        )
        return ExperimentConfig(
            kind=resolved["kind"],
            orders=tuple(resolved["orders"]),
            bath=bath,
            T=resolved["T"],
            initial_state=resolved["initial_state"],
            bath_state=resolved["bath_state"],
            mode=resolved["mode"],
            rel_tol=resolved["rel_tol"],
            tie_order=resolved["tie_order"],
        )
    except (TypeError, ValueError, AttributeError) as exc:
        raise CliError(str(exc))


def cmd_simulate(args: argparse.Namespace) -> int:
    defaults: dict[str, Any] = {
        "kind": None,
        "orders": None,
        "bath": None,
        "T": None,
        "initial_state": "random",
        "bath_state": "maximally-mixed",
        "mode": "analytic",
        "rel_tol": 1e-15,
        "tie_order": "inner-first",
    }
    resolved = _resolve(args, _SIM_KEYS, defaults)
    if args.seed is not None:
        if not isinstance(resolved.get("bath"), dict):
            raise CliError("--seed needs a config with a bath object")
        resolved["bath"] = {**resolved["bath"], "seed": args.seed}
    config = _experiment_from(resolved)
    result = run_experiment(config)
    record = {
        "ddbound": __version__,
        "command": "simulate",
        "config_hash": _config_hash(resolved),
        "seed": config.bath.seed,
        "mode": config.mode,
        "config": resolved,
        "result": result.to_jsonable(),
    }
    _emit([json.dumps(record, sort_keys=True)], args.out, append=True)
    return EXIT_OK


# ------------------------------------------------------------------ verify --


def cmd_verify_orders(args: argparse.Namespace) -> int:
    n1, n2 = args.qdd
    if n1 < 0 or n2 < 0:
        raise CliError(f"--qdd: orders must be nonnegative, got {n1} {n2}")
    if args.nmax < 1:
        raise CliError("--nmax must be >= 1")
    try:
        cert = verify_orders(
            n1,
            n2,
            args.nmax,
            backend=args.backend,
            mode=args.mode,
            zero_tol=args.zero_tol,
        )
    except ValueError as exc:
        raise CliError(str(exc))
    resolved = {
        "qdd": [n1, n2],
        "nmax": args.nmax,
        "backend": args.backend,
        "mode": args.mode,
        "zero_tol": args.zero_tol,
    }
    record = {
        "ddbound": __version__,
        "command": "verify orders",
        "config_hash": _config_hash(resolved),
        "seed": None,
        "mode": args.mode,
        "config": resolved,
        "certification": cert.to_jsonable(),
    }
    _emit([json.dumps(record, sort_keys=True)], args.out, append=True)
    return EXIT_OK if cert.certified else EXIT_ASSERTION


def _bound_experiments(args: argparse.Namespace) -> tuple[list[ExperimentConfig], dict]:
    if (args.qdd is None) == (args.nudd is None):
        raise CliError("exactly one of --qdd or --nudd is required")
    eps = args.eps
    if eps is None or eps <= 0:
        raise CliError("--eps is required and must be > 0")
    if args.seeds < 1:
        raise CliError("--seeds must be >= 1")

    if args.qdd is not None:
        n1, n2 = args.qdd
        if n1 < 0 or n2 < 0:
            raise CliError(f"--qdd: orders must be nonnegative, got {n1} {n2}")
        kind = "qdd"
        orders = (n1, n2)
        comps = (args.eta_x, args.eta_y, args.eta_z)
        if any(c is not None for c in comps):
            if args.eta is not None:
                raise CliError("--eta conflicts with --eta-x/--eta-y/--eta-z")
            etas = tuple(0.0 if c is None else c for c in comps)
        else:
            e = 1.0 if args.eta is None else args.eta
            etas = (e, e, e)
        norms = {"0": 1.0, "x": etas[0], "y": etas[1], "z": etas[2]}
        eta_desc = _fmt(etas[0]) if etas[0] == etas[1] == etas[2] else "/".join(
            _fmt(e) for e in etas
        )
    else:
        try:
            orders = tuple(int(tok) for tok in args.nudd.split(","))
        except ValueError:
            raise CliError(f"--nudd: expected comma-separated integers, got {args.nudd!r}")
        if args.qubits is None:
            raise CliError("--nudd requires --qubits")
        kind = "nudd"
        m = args.qubits
        e = 1.0 if args.eta is None else args.eta
        norms = {"0" * m: 1.0}
        for label in product("0xyz", repeat=m):
            lab = "".join(label)
            if lab != "0" * m:
                norms[lab] = e
        eta_desc = _fmt(e)

    configs = []
    for i in range(args.seeds):
        try:
            bath = BathSpec(dim=args.bath_dim, seed=args.seed + i, norms=norms)
            configs.append(
                ExperimentConfig(
                    kind=kind,
                    orders=orders,
                    bath=bath,
                    T=eps,
                    mode=args.mode,
                    tie_order=args.tie_order,
                )
            )
        except ValueError as exc:
            raise CliError(str(exc))
    meta = {
        "kind": kind,
        "orders": list(orders),
        "eps": eps,
        "eta": eta_desc,
        "bath_dim": args.bath_dim,
        "seeds": args.seeds,
        "seed": args.seed,
        "mode": args.mode,
        "tie_order": args.tie_order,
        "loosen": args.loosen,
    }
    return configs, meta


def cmd_verify_bound(args: argparse.Namespace) -> int:
    configs, meta = _bound_experiments(args)
    results = _run_cells(configs)

    lines = _header("verify bound", meta, seed=args.seed, mode=args.mode)
    lines.append(",".join(_VERIFY_COLUMNS))
    violations = 0
    failures = 0
    for cfg, res in zip(configs, results):
        if isinstance(res, NonConvergenceError):
            failures += 1
            lines.append(f"# non-convergence: seed={cfg.bath.seed} ({res})")
            continue
        bound = args.loosen * res.distance_bound
        margin = bound - res.distance_actual
        ch_min = min(res.channel_margins.values())
        ok = (
            margin >= MARGIN_FLOOR
            and ch_min >= MARGIN_FLOOR
            and res.unitarity_residual <= UNITARITY_TOL
            and max(res.cross_residuals.values(), default=0.0) <= UNITARITY_TOL
        )
        if not ok:
            violations += 1
        lines.append(
            _csv_row(
                {
                    "seed": cfg.bath.seed,
                    "epsilon": res.epsilon,
                    "eta": meta["eta"],
                    "D_actual": res.distance_actual,
                    "D_bound": bound,
                    "margin": margin,
                    "channel_margin_min": ch_min,
                    "unitarity": res.unitarity_residual,
                    "ok": int(ok),
                },
                _VERIFY_COLUMNS,
            )
        )
    _emit(lines, args.out, append=True)
    if violations:
        return EXIT_ASSERTION
    if failures:
        return EXIT_NONCONVERGENCE
    return EXIT_OK


# ------------------------------------------------------------------- sweep --


_SWEEP_KEYS = (
    "kind",
    "orders",
    "bath_dim",
    "eps",
    "eta",
    "seeds",
    "master_seed",
    "mode",
    "tie_order",
    "rel_tol",
    "initial_state",
    "bath_state",
)


def _sweep_norms(kind: str, orders: Sequence[int], eta: float) -> dict[str, float]:
    if kind == "qdd":
        return {"0": 1.0, "x": eta, "y": eta, "z": eta}
    m = len(orders) // 2
    norms = {"0" * m: 1.0}
    for label in product("0xyz", repeat=m):
        lab = "".join(label)
        if lab != "0" * m:
            norms[lab] = eta
    return norms


def cmd_sweep(args: argparse.Namespace) -> int:
    defaults: dict[str, Any] = {
        "kind": None,
        "orders": None,
        "bath_dim": None,
        "eps": None,
        "eta": None,
        "seeds": 1,
        "master_seed": 0,
        "mode": "analytic",
        "tie_order": "inner-first",
        "rel_tol": 1e-15,
        "initial_state": "random",
        "bath_state": "maximally-mixed",
    }
    resolved = _resolve(args, _SWEEP_KEYS, defaults)
    for key in ("kind", "orders", "bath_dim", "eps", "eta"):
        if resolved[key] is None:
            raise CliError(f"config key {key!r} is required")
    for key in ("orders", "bath_dim", "eps", "eta"):
        if not isinstance(resolved[key], list) or not resolved[key]:
            raise CliError(f"config key {key!r} must be a non-empty list")
    if not isinstance(resolved["seeds"], int) or resolved["seeds"] < 1:
        raise CliError("config key 'seeds' must be a positive integer")

    # Cells in fixed nesting order; each cell's bath seed is master + index so
    # results do not depend on scheduling.
    cells: list[tuple[int, ExperimentConfig, dict]] = []
    index = 0
    for orders in resolved["orders"]:
        orders_t = tuple(int(n) for n in orders)
        for bath_dim in resolved["bath_dim"]:
            for eps in resolved["eps"]:
                for eta in resolved["eta"]:
                    for _ in range(resolved["seeds"]):
                        seed = resolved["master_seed"] + index
                        try:
                            cfg = ExperimentConfig(
                                kind=resolved["kind"],
                                orders=orders_t,
                                bath=BathSpec(
                                    dim=bath_dim,
                                    seed=seed,
                                    norms=_sweep_norms(
                                        resolved["kind"], orders_t, eta
                                    ),
                                ),
                                T=eps,
                                initial_state=resolved["initial_state"],
                                bath_state=resolved["bath_state"],
                                mode=resolved["mode"],
                                rel_tol=resolved["rel_tol"],
                                tie_order=resolved["tie_order"],
                            )
                        except ValueError as exc:
                            raise CliError(str(exc))
                        cell_meta = {
                            "orders": "/".join(str(n) for n in orders_t),
                            "bath_dim": bath_dim,
                            "eta": eta,
                        }
                        cells.append((index, cfg, cell_meta))
                        index += 1

    results = _run_cells([cfg for _, cfg, _ in cells])

    lines = _header(
        "sweep", resolved, seed=resolved["master_seed"], mode=resolved["mode"]
    )
    lines.append(",".join(_SWEEP_COLUMNS))
    failures = 0
    for (idx, cfg, cell_meta), res in zip(cells, results):
        if isinstance(res, NonConvergenceError):
            failures += 1
            lines.append(f"# non-convergence: cell={idx} seed={cfg.bath.seed} ({res})")
            continue
        lines.append(
            _csv_row(
                {
                    "cell": idx,
                    "kind": cfg.kind,
                    "orders": cell_meta["orders"],
                    "bath_dim": cell_meta["bath_dim"],
                    "seed": cfg.bath.seed,
                    "epsilon": res.epsilon,
                    "eta": cell_meta["eta"],
                    "D_actual": res.distance_actual,
                    "D_bound": res.distance_bound,
                    "margin": res.margin,
                    "channel_margin_min": min(res.channel_margins.values()),
                    "unitarity": res.unitarity_residual,
                },
                _SWEEP_COLUMNS,
            )
        )
    _emit(lines, args.out)
    return EXIT_NONCONVERGENCE if failures else EXIT_OK


# ------------------------------------------------------------------ parser --


def _add_out(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", metavar="PATH", help="write to PATH instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddbound",
        description="Nested dynamical-decoupling schedules, analytic error "
        "bounds, and exact verification.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sequence", help="emit a pulse schedule as CSV")
    p.add_argument("--qdd", nargs=2, type=int, metavar=("N1", "N2"),
                   help="two-level sequence with inner order N1, outer N2")
    p.add_argument("--nudd", metavar="N1,N2,...",
                   help="nested sequence orders, innermost first")
    p.add_argument("--qubits", type=int, help="protected qubit count for --nudd")
    _add_out(p)
    p.set_defaults(func=cmd_sequence)

    b = sub.add_parser("bounds", help="evaluate analytic bounds over a grid")
    bsub = b.add_subparsers(dest="family", required=True)

    bq = bsub.add_parser("qdd", help="two-level channel and distance bounds")
    grp = bq.add_mutually_exclusive_group()
    for name in ("fig2", "fig3", "fig4"):
        grp.add_argument(
            f"--{name}",
            dest="preset",
            action="store_const",
            const=name,
            help=f"preset grid '{name}'",
        )
    bq.add_argument("--n1", type=int, help="inner sequence order")
    bq.add_argument("--n2", type=int, help="outer sequence order")
    bq.add_argument("--eta", type=float, help="isotropic relative coupling strength")
    bq.add_argument("--eta-x", type=float, help="x relative coupling strength")
    bq.add_argument("--eta-y", type=float, help="y relative coupling strength")
    bq.add_argument("--eta-z", type=float, help="z relative coupling strength")
    bq.add_argument("--eps-min", type=float, help="smallest epsilon (default 1e-4)")
    bq.add_argument("--eps-max", type=float, help="largest epsilon (default 1)")
    bq.add_argument("--eps-points", type=int,
                    help="log-grid size (default 41; 0 for an empty grid)")
    bq.add_argument("--mode", choices=("analytic", "numeric-footnote"),
                    help="suppression-order table variant")
    bq.add_argument("--rel-tol", type=float, help="tail summation tolerance")
    bq.add_argument("--config", metavar="PATH", help="JSON config (flags override)")
    _add_out(bq)
    bq.set_defaults(func=cmd_bounds_qdd)

    bn = bsub.add_parser("nudd", help="nested multi-qubit bound")
    bn.add_argument("--fig5", dest="preset", action="store_const", const="fig5",
                    help="preset grid 'fig5' (per-cell rescaled epsilon window)")
    bn.add_argument("--m", type=int, help="protected qubit count")
    bn.add_argument("--dmin", type=int, help="minimum suppression order")
    bn.add_argument("--eta", type=float, help="relative coupling strength")
    bn.add_argument("--eps-min", type=float, help="smallest epsilon (default 1e-4)")
    bn.add_argument("--eps-max", type=float, help="largest epsilon (default 1)")
    bn.add_argument("--eps-points", type=int,
                    help="log-grid size (default 41; 0 for an empty grid)")
    bn.add_argument("--rel-tol", type=float, help="tail summation tolerance")
    bn.add_argument("--config", metavar="PATH", help="JSON config (flags override)")
    _add_out(bn)
    bn.set_defaults(func=cmd_bounds_nudd)

    s = sub.add_parser("simulate", help="run one exact experiment from JSON config")
    s.add_argument("--config", metavar="PATH", required=True, help="JSON config")
    s.add_argument("--seed", type=int, help="override the bath seed")
    s.add_argument("--T", type=float, dest="T", help="override the duration")
    s.add_argument("--mode", choices=("analytic", "numeric-footnote"),
                   help="override the bound mode")
    s.add_argument("--tie-order", choices=("inner-first", "outer-first"),
                   help="override coincident-pulse ordering")
    _add_out(s)
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="certify orders or check bound dominance")
    vsub = v.add_subparsers(dest="check", required=True)

    vo = vsub.add_parser("orders", help="exact word-integral certification")
    vo.add_argument("--qdd", nargs=2, type=int, metavar=("N1", "N2"), required=True)
    vo.add_argument("--nmax", type=int, required=True,
                    help="certify all word lengths up to NMAX")
    vo.add_argument("--backend", choices=("auto", "rational", "mp"), default="auto")
    vo.add_argument("--mode", choices=("analytic", "numeric-footnote"),
                    default="analytic")
    vo.add_argument("--zero-tol", type=float, default=1e-25,
                    help="threshold for 'vanishes' on the mp backend")
    _add_out(vo)
    vo.set_defaults(func=cmd_verify_orders)

    vb = vsub.add_parser("bound", help="randomized bound-dominance check")
    vb.add_argument("--qdd", nargs=2, type=int, metavar=("N1", "N2"))
    vb.add_argument("--nudd", metavar="N1,N2,...")
    vb.add_argument("--qubits", type=int, help="protected qubit count for --nudd")
    vb.add_argument("--eps", type=float, help="epsilon = J0 * T (J0 fixed at 1)")
    vb.add_argument("--eta", type=float, help="relative coupling strength")
    vb.add_argument("--eta-x", type=float)
    vb.add_argument("--eta-y", type=float)
    vb.add_argument("--eta-z", type=float)
    vb.add_argument("--bath-dim", type=int, default=8)
    vb.add_argument("--seeds", type=int, default=20, help="number of random baths")
    vb.add_argument("--seed", type=int, default=0, help="master seed")
    vb.add_argument("--mode", choices=("analytic", "numeric-footnote"),
                    default="analytic")
    vb.add_argument("--tie-order", choices=("inner-first", "outer-first"),
                    default="inner-first")
    vb.add_argument("--loosen", type=float, default=1.0,
                    help="negative-control hook: multiply the bound by this "
                    "factor before the dominance check")
    _add_out(vb)
    vb.set_defaults(func=cmd_verify_bound)

    w = sub.add_parser("sweep", help="randomized experiment grid from JSON config")
    w.add_argument("--config", metavar="PATH", required=True, help="JSON config")
    _add_out(w)
    w.set_defaults(func=cmd_sweep)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func: Callable[[argparse.Namespace], int] = args.func
    try:
        return func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NonConvergenceError as exc:
        print(f"error: series did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
