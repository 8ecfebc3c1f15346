"""Command-line front end.

Subcommands and their CSV columns::

    error-probs   alpha,energy,delta,P_Q,P_K,P_H,status
    sweep         <delta|energy>,alpha,delta,P_Q,P_K,P_H,[P_Q_asym,P_K_asym,P_H_asym],status
    simulate      run,error                      (JSON: RunSummary + config)
    trace         psi|shot,symbol,outcome
    threshold     N,delta_th,residual,status
    asymptotics   receiver,alpha,rate,prefactor,residual,window_lo,window_hi
    rerun         replays the configuration stored in a JSON envelope

JSON output wraps rows in an envelope carrying the schema version, tool
version and the fully resolved configuration. CSV written with ``--out``
gets the same envelope as a ``<out>.meta.json`` sidecar.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import fit_large_delta, paper_small_alpha, prefactor_comparison, small_alpha_audit
from .channel import SignalParams, TruncationPolicy
from .montecarlo import GENERATOR, RunConfig, angle_trace, make_rng, run_experiment, shot_trace
from .numkit import periodic_rule
from .receivers import Receiver, error_probability
from .threshold import threshold_curve

SCHEMA_VERSION = 1
RECEIVER_COLUMNS = {"helstrom": "P_Q", "kennedy": "P_K", "homodyne": "P_H"}
ALL_RECEIVERS = ("helstrom", "kennedy", "homodyne")


class UsageError(Exception):
    pass


def _receiver_list(text: str) -> list[str]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    allowed = set(ALL_RECEIVERS) | {"paper_asymptotics"}
    bad = [s for s in items if s not in allowed]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown receiver(s): {', '.join(bad)}")
    return items


def _float_list(text: str) -> list[float]:
    return [float(s) for s in text.split(",") if s.strip()]


def _add_common(p: argparse.ArgumentParser, signal: bool = True, need_delta: bool = True):
    if signal:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--energy", type=float, help="signal energy N (alpha = sqrt(N))")
        g.add_argument("--alpha", type=float, help="coherent amplitude alpha")
    if need_delta:
        p.add_argument("--delta", type=float, default=0.0, help="phase-noise std in rad (default 0)")
    p.add_argument("--quad-order", type=int, default=96, help="phase-average points (default 96)")
    p.add_argument("--trunc-eps", type=float, default=1e-12, help="Poisson tail cutoff (default 1e-12)")
    p.add_argument("--max-dim", type=int, default=512, help="largest Fock dimension (default 512)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed for stochastic commands (default 0)")
    p.add_argument("--out", type=Path, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasediff",
        description="Error probabilities of PSK receivers under phase diffusion.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__.split("\n\n")[1],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("error-probs", help="single-point error probabilities",
                       description="Columns: alpha,energy,delta,P_Q,P_K,P_H,status")
    _add_common(p)
    p.add_argument("--receivers", type=_receiver_list, default=list(ALL_RECEIVERS))

    p = sub.add_parser("sweep", help="tabulate error probabilities over delta or energy",
                       description="Columns: <swept>,alpha,delta,P_Q,P_K,P_H[,*_asym],status")
    _add_common(p)
    p.add_argument("--param", choices=("delta", "energy"), default="delta")
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--receivers", type=_receiver_list, default=list(ALL_RECEIVERS),
                   help="comma list from helstrom,kennedy,homodyne,paper_asymptotics")

    p = sub.add_parser("simulate", help="Monte Carlo emulation of the 10 x 5000 shot protocol",
                       description="CSV columns: run,error. JSON: RunSummary with config echo.")
    _add_common(p)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--shots", type=int, default=5000)
    p.add_argument("--receiver", choices=("homodyne", "kennedy"), default="homodyne")
    p.add_argument("--compare", action="store_true", help="add analytic P and z-score")
    p.add_argument("--shots-out", type=Path, help="also write every shot as CSV")

    p = sub.add_parser("trace", help="homodyne traces vs quadrature angle or shot index",
                       description="Columns: psi|shot,symbol,outcome")
    _add_common(p)
    p.add_argument("--panel", choices=("vs_angle", "vs_shot"), default="vs_shot")
    p.add_argument("--count", type=int, default=500)

    p = sub.add_parser("threshold", help="noise threshold where homodyne beats Kennedy",
                       description="Columns: N,delta_th,residual,status")
    _add_common(p, signal=False, need_delta=False)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--energies", type=_float_list, help="comma-separated energies")
    g.add_argument("--grid", type=float, nargs=3, metavar=("START", "STOP", "STEP"))
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--delta-max", type=float, default=4.0)

    p = sub.add_parser("asymptotics", help="large-noise fits and small-amplitude audit",
                       description="Columns: receiver,alpha,rate,prefactor,residual,window_lo,window_hi")
    _add_common(p, signal=False, need_delta=False)
    p.add_argument("--alphas", type=_float_list, default=[0.5, 1.0, 2.0])
    p.add_argument("--window", type=float, nargs=2, default=[2.0, 3.0])
    p.add_argument("--points", type=int, default=11)
    p.add_argument("--audit-delta", type=float, default=0.0)

    p = sub.add_parser("rerun", help="replay the configuration of a JSON envelope")
    p.add_argument("envelope", type=Path)
    p.add_argument("--out", type=Path)
    p.add_argument("--format", choices=("csv", "json"))
    return parser


# ---------------------------------------------------------------------------
# commands: each returns (columns, rows, extra-envelope-fields, ok)


def _signal(cfg: dict, delta=None) -> SignalParams:
    if cfg.get("energy") is not None:
        return SignalParams.from_energy(cfg["energy"], cfg["delta"] if delta is None else delta)
    if cfg.get("alpha") is not None:
        return SignalParams(cfg["alpha"], cfg["delta"] if delta is None else delta)
    raise UsageError("one of --energy/--alpha is required")


def _numerics(cfg: dict):
    return periodic_rule(cfg["quad_order"]), TruncationPolicy(cfg["trunc_eps"], cfg["max_dim"])


def _prob_columns(params: SignalParams, receivers, rule, policy) -> tuple[dict, list[str]]:
    out, errors = {}, []
    for r in ALL_RECEIVERS:
        col = RECEIVER_COLUMNS[r]
        if r not in receivers:
            out[col] = ""
            continue
        try:
            out[col] = error_probability(r, params, rule, policy).value
        except Exception as exc:  # row-scoped: keep other receivers going
            out[col] = ""
            errors.append(f"{r}: {exc}")
    if "paper_asymptotics" in receivers:
        for r in ALL_RECEIVERS:
            out[RECEIVER_COLUMNS[r] + "_asym"] = paper_small_alpha(r, params).value
    return out, errors


def cmd_error_probs(cfg: dict):
    params = _signal(cfg)
    rule, policy = _numerics(cfg)
    probs, errors = _prob_columns(params, cfg["receivers"], rule, policy)
    row = {"alpha": params.alpha, "energy": params.energy, "delta": params.delta, **probs,
           "status": "; ".join(errors) or "ok"}
    return list(row), [row], {}, not errors


def _grid(start: float, stop: float, step: float) -> np.ndarray:
    if step <= 0 or start > stop:
        raise UsageError("need start <= stop and step > 0")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def cmd_sweep(cfg: dict):
    if not any(r in ALL_RECEIVERS or r == "paper_asymptotics" for r in cfg["receivers"]):
        raise UsageError("select at least one receiver")
    rule, policy = _numerics(cfg)
    values = _grid(cfg["start"], cfg["stop"], cfg["step"])
    swept = cfg["param"]
    if swept == "delta":
        base = _signal(cfg)
        points = [SignalParams(base.alpha, float(v)) for v in values]
    else:
        if cfg.get("energy") is not None or cfg.get("alpha") is not None:
            raise UsageError("energy sweep takes its amplitude from the grid; drop --energy/--alpha")
        points = [SignalParams.from_energy(float(v), cfg["delta"]) for v in values]
    rows, ok = [], True
    for v, params in zip(values, points):
        probs, errors = _prob_columns(params, cfg["receivers"], rule, policy)
        ok &= not errors
        rows.append({swept: float(v), "alpha": params.alpha, "delta": params.delta, **probs,
                     "status": "; ".join(errors) or "ok"})
    return list(rows[0]), rows, {}, ok


def cmd_simulate(cfg: dict):
    params = _signal(cfg)
    config = RunConfig(params, cfg["shots"], cfg["runs"], cfg["seed"], cfg["receiver"])
    summary, tables = run_experiment(config, keep_shots=True)
    extra = {"summary": summary.to_dict(), "generator": GENERATOR, "run_config": config.to_dict()}
    if summary.degenerate:
        extra["warning"] = "single run: std_of_mean set to 0"
    if cfg["compare"]:
        rule, policy = _numerics(cfg)
        analytic = error_probability(cfg["receiver"], params, rule, policy).value
        z = (summary.mean_error - analytic) / summary.std_of_mean if summary.std_of_mean > 0 else math.nan
        extra["comparison"] = {"analytic": analytic, "z_score": z}
    if cfg.get("shots_out"):
        with open(cfg["shots_out"], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["run", "true_symbol", "phase", "outcome", "inferred_symbol"])
            for i, t in enumerate(tables):
                for rec in t.records():
                    w.writerow([i, rec.true_symbol, repr(rec.phase), repr(rec.outcome), rec.inferred_symbol])
    rows = [{"run": i, "error": e} for i, e in enumerate(summary.per_run_error)]
    return ["run", "error"], rows, extra, True


def cmd_trace(cfg: dict):
    if cfg["count"] < 1:
        raise UsageError("--count must be >= 1")
    params = _signal(cfg)
    rng = make_rng(cfg["seed"])
    if cfg["panel"] == "vs_angle":
        cols = ["psi", "symbol", "outcome"]
        data = angle_trace(params, cfg["count"], rng)
    else:
        cols = ["shot", "symbol", "outcome"]
        data = shot_trace(params, cfg["count"], rng)
    return cols, [dict(zip(cols, r)) for r in data], {"generator": GENERATOR}, True


def cmd_threshold(cfg: dict):
    rule, _ = _numerics(cfg)
    energies = cfg["energies"] if cfg.get("energies") else list(_grid(*cfg["grid"]))
    if not energies or any(e <= 0 for e in energies):
        raise UsageError("energies must be positive")
    if cfg["tol"] < 1e-10:
        raise UsageError("--tol must be >= 1e-10")
    if not 0 < cfg["delta_max"] <= 4:
        raise UsageError("--delta-max must lie in (0, 4]")
    points = threshold_curve(energies, cfg["tol"], cfg["delta_max"], rule)
    rows = [{"N": p.energy, "delta_th": p.delta_th, "residual": p.bracket_residual,
             "status": p.status if not p.later_crossings else
             f"{p.status}; later crossings at {list(p.later_crossings)}"} for p in points]
    ok = all(p.status == "ok" for p in points)
    return ["N", "delta_th", "residual", "status"], rows, {"tol": cfg["tol"]}, ok


def cmd_asymptotics(cfg: dict):
    rule, policy = _numerics(cfg)
    rows, comparisons = [], []
    for a in cfg["alphas"]:
        comp = prefactor_comparison(a, tuple(cfg["window"]), cfg["points"], rule, policy)
        comparisons.append(comp.to_dict())
        for f in comp.fits:
            rows.append({"receiver": f.receiver.value, "alpha": f.alpha, "rate": f.estimated_rate,
                         "prefactor": f.estimated_prefactor, "residual": f.residual,
                         "window_lo": f.delta_window[0], "window_hi": f.delta_window[1]})
    extra = {"prefactors": comparisons,
             "small_alpha_audit": small_alpha_audit(cfg["audit_delta"], rule)}
    return list(rows[0]), rows, extra, True


COMMANDS = {
    "error-probs": cmd_error_probs,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "trace": cmd_trace,
    "threshold": cmd_threshold,
    "asymptotics": cmd_asymptotics,
}


def _jsonable(v):
    if isinstance(v, Path):
        return str(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return _jsonable(obj)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def envelope(command: str, cfg: dict, columns, rows, extra) -> dict:
    env = {"schema_version": SCHEMA_VERSION, "tool": "phasediff", "version": __version__,
           "command": command, "config": cfg, "columns": list(columns), "rows": rows, **extra}
    if command in ("simulate", "trace"):
        env["seed"] = cfg["seed"]
    return _clean(env)


def render_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c, "")) for c in columns])
    return buf.getvalue()


def execute(command: str, cfg: dict, out: Path | None, fmt: str, stdout=None) -> int:
    stdout = stdout or sys.stdout
    columns, rows, extra, ok = COMMANDS[command](cfg)
    env = envelope(command, cfg, columns, rows, extra)
    if fmt == "json":
        text = json.dumps(env, indent=2, allow_nan=False) + "\n"
    else:
        text = render_csv(columns, rows)
    if out is None:
        stdout.write(text)
    else:
        out.write_text(text)
        if fmt == "csv":
            Path(str(out) + ".meta.json").write_text(json.dumps(env, indent=2, allow_nan=False) + "\n")
    return 0 if ok else 1


def _validate(cfg: dict):
    for key in ("delta", "energy", "alpha"):
        v = cfg.get(key)
        if v is not None and (not math.isfinite(v) or v < 0):
            raise UsageError(f"--{key} must be finite and >= 0")
    if cfg.get("quad_order", 2) < 2:
        raise UsageError("--quad-order must be >= 2")
    if not 0 < cfg.get("trunc_eps", 0.5) < 1:
        raise UsageError("--trunc-eps must lie in (0, 1)")
    if cfg.get("shots", 1) < 1 or cfg.get("runs", 1) < 1:
        raise UsageError("--shots and --runs must be >= 1")
    if not 0 <= cfg.get("seed", 0) < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    if "receivers" in cfg and not cfg["receivers"]:
        raise UsageError("select at least one receiver")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "rerun":
        env = json.loads(args.envelope.read_text())
        command, cfg = env["command"], env["config"]
        fmt = args.format or cfg.get("format", "csv")
        out = args.out
    else:
        cfg = {k: v for k, v in vars(args).items() if k not in ("command", "out")}
        command, fmt, out = args.command, args.format, args.out
    cfg = _clean(cfg)
    try:
        _validate(cfg)
        return execute(command, cfg, out, fmt)
    except UsageError as exc:
        parser.error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
