"""Command-line surface: reproducible runs with CSV artifacts.

Commands: ingest, cascade, risk, roi, sweep-eta, sweep-alpha, iso,
synth. Parameters come from flags or a key=value config file (flags
win). Every run writes a ``run.cfg`` echo of the effective parameters
into the output directory, and all numeric CSV output uses round-trip
decimal formatting so identical configs produce identical bytes.

Exit codes: 0 success, 2 bad arguments, 3 input error, 4 calibration
infeasible, 5 internal invariant violation.
"""
from __future__ import annotations

import argparse
import datetime as dt
import logging
import sys
from pathlib import Path

import numpy as np

from . import experiments, network, risk, roi
from .calibration import CalibrationParams, calibrate
from .contagion import FundPolicy, SeedSpec, run_cascade, run_ensemble
from .errors import CalibrationError, IbRiskError, InputError, InvariantError, ParameterError
from .network import FinancialNetwork, node_strengths

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_BAD_ARGS = 2
EXIT_INPUT = 3
EXIT_CALIBRATION = 4
EXIT_INTERNAL = 5

COMMANDS = ("ingest", "cascade", "risk", "roi", "sweep-eta", "sweep-alpha", "iso", "synth")

_DEFAULTS = {
    "beta": 10.0,
    "eta": 0.05,
    "alpha": 0.0,
    "p_exo": 0.001,
    "roi_int": 0.04,
    "roi_ext": 0.07,
    "roi_e": 0.03,
    "roi_f": 0.02,
    "rng_seed": 0,
    "out": "out",
}


def _fmt(value) -> str:
    """Round-trip decimal formatting for floats; plain str otherwise."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ibrisk",
        description="Interbank cascade-risk simulation with a Pigouvian rescue fund",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", help="edge-list/snapshot path or synth:k=v,... spec")
    parser.add_argument("--config", help="key=value configuration file")
    parser.add_argument("--window-start", help="aggregation window start (YYYY-MM-DD)")
    parser.add_argument("--window-end", help="aggregation window end (YYYY-MM-DD)")
    parser.add_argument("--beta", type=float)
    parser.add_argument("--eta", type=float)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--p-exo", type=float, dest="p_exo")
    parser.add_argument("--roi-int", type=float, dest="roi_int")
    parser.add_argument("--roi-ext", type=float, dest="roi_ext")
    parser.add_argument("--roi-e", type=float, dest="roi_e")
    parser.add_argument("--roi-f", type=float, dest="roi_f")
    parser.add_argument("--seed-node", dest="seed_node", help="seed node id for cascade")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--rng-seed", type=int, dest="rng_seed")
    parser.add_argument("--trace", action="store_true", default=None,
                        help="emit per-step distress trace CSV")
    parser.add_argument("--eta-increases", dest="eta_increases",
                        help="comma-separated relative eta increases for iso")
    return parser


def _read_config_file(path: str) -> dict[str, str]:
    values = {}
    try:
        with open(path, encoding="utf-8") as handle:
            for lineno, raw in enumerate(handle, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise InputError(f"{path}:{lineno}: expected key=value")
                key, _, value = line.partition("=")
                values[key.strip()] = value.strip()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    return values


_FLOAT_KEYS = ("beta", "eta", "alpha", "p_exo", "roi_int", "roi_ext", "roi_e", "roi_f")
_INT_KEYS = ("rng_seed",)


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge defaults, config-file values, and flags (flags win)."""
    config = dict(_DEFAULTS)
    config.update(
        {k: None for k in ("input", "window_start", "window_end", "seed_node", "eta_increases")}
    )
    config["trace"] = False
    if args.config:
        for key, text in _read_config_file(args.config).items():
            norm = key.replace("-", "_")
            if norm in _FLOAT_KEYS:
                try:
                    config[norm] = float(text)
                except ValueError:
                    raise ParameterError(f"config key {key}: bad float {text!r}") from None
            elif norm in _INT_KEYS:
                try:
                    config[norm] = int(text)
                except ValueError:
                    raise ParameterError(f"config key {key}: bad int {text!r}") from None
            elif norm == "trace":
                config[norm] = text.lower() in ("1", "true", "yes")
            else:
                config[norm] = text
    for key in list(config):
        flag = getattr(args, key, None)
        if flag is not None:
            config[key] = flag
    return config


def _parse_date(text: str, what: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise ParameterError(f"bad {what} date {text!r}") from None


def _parse_synth_spec(text: str, rng_seed: int) -> experiments.SyntheticSpec:
    fields = {}
    body = text[len("synth:"):]
    if body:
        for chunk in body.split(","):
            if "=" not in chunk:
                raise ParameterError(f"bad synth spec fragment {chunk!r}")
            key, _, value = chunk.partition("=")
            fields[key.strip()] = value.strip()
    kwargs = {"rng_seed": rng_seed}
    casts = {
        "n_nodes": int,
        "density": float,
        "heterogeneity": float,
        "core_fraction": float,
        "rng_seed": int,
    }
    for key, value in fields.items():
        if key not in casts:
            raise ParameterError(f"unknown synth spec key {key!r}")
        kwargs[key] = casts[key](value)
    return experiments.SyntheticSpec(**kwargs)


def load_network(config: dict) -> FinancialNetwork:
    source = config.get("input")
    if not source:
        raise ParameterError("--input is required for this command")
    if source.startswith("synth:"):
        return experiments.generate_synthetic(
            _parse_synth_spec(source, int(config["rng_seed"]))
        )
    path = Path(source)
    if not path.exists():
        raise InputError(f"input file not found: {path}")
    if network.is_snapshot_file(path):
        return network.read_snapshot(path)
    records = network.ingest_file(path)
    start = _parse_date(config["window_start"], "window start") if config["window_start"] else None
    end = _parse_date(config["window_end"], "window end") if config["window_end"] else None
    return network.aggregate_window(records, start, end)


def _write_run_cfg(config: dict, out_dir: Path) -> None:
    with open(out_dir / "run.cfg", "w", encoding="utf-8") as handle:
        for key in sorted(config):
            value = config[key]
            if value is None:
                continue
            handle.write(f"{key}={_fmt(value)}\n")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(_fmt(cell) for cell in row) + "\n")


def _rates(config: dict) -> roi.RoiRates:
    return roi.RoiRates(
        roi_int=config["roi_int"],
        roi_ext=config["roi_ext"],
        roi_e=config["roi_e"],
        roi_f=config["roi_f"],
    )


def _params(config: dict) -> CalibrationParams:
    return CalibrationParams(
        beta=config["beta"], eta=config["eta"], alpha=config["alpha"]
    )


def cmd_ingest(config: dict, out_dir: Path) -> str:
    net = load_network(config)
    report = network.validate_network(net)
    for warning in report.warnings:
        logger.warning(warning)
    if not report.ok:
        raise InputError("; ".join(report.violations))
    network.write_snapshot(net, out_dir / "network.csv")
    return f"nodes={net.n_nodes} edges={net.n_edges}"


def cmd_cascade(config: dict, out_dir: Path) -> str:
    net = load_network(config)
    if config["seed_node"] is None:
        raise ParameterError("--seed-node is required for cascade")
    seed = net.index_of(str(config["seed_node"]))
    cal = calibrate(net, _params(config))
    outcome = run_cascade(
        cal, SeedSpec(seed=seed), FundPolicy(enabled=True), record_trace=True
    )
    rows = []
    for step, snapshot in enumerate(outcome.trace):
        for idx, value in enumerate(snapshot):
            rows.append([step, net.nodes[idx], float(value)])
    _write_csv(out_dir / "trace.csv", ["step", "node", "h"], rows)
    return (
        f"seed={net.nodes[seed]} defaults={len(outcome.defaulted)} "
        f"steps={outcome.steps}"
    )


def _ensemble_metrics(config: dict, net: FinancialNetwork):
    cal = calibrate(net, _params(config))
    ensemble = run_ensemble(cal, FundPolicy(enabled=True))
    _, delta = risk.conditional_default_matrix(ensemble)
    node_risk, system_risk = risk.cascade_risk(delta, net.n_nodes)
    dr_nodes, dr_avg = risk.debtrank_metric(ensemble, node_strengths(net))
    p = risk.default_probabilities(delta, config["p_exo"])
    return cal, delta, node_risk, system_risk, dr_nodes, dr_avg, p


def cmd_risk(config: dict, out_dir: Path) -> str:
    net = load_network(config)
    _, delta, node_risk, system_risk, dr_nodes, dr_avg, p = _ensemble_metrics(config, net)
    rows = [
        [net.nodes[i], int(delta[i]), float(node_risk[i]), float(p[i]), float(dr_nodes[i])]
        for i in range(net.n_nodes)
    ]
    rows.append(["SYSTEM", int(np.sum(delta)), system_risk, float(np.mean(p)), dr_avg])
    _write_csv(
        out_dir / "risk.csv",
        ["node", "delta", "cascade_risk", "default_prob", "debtrank"],
        rows,
    )
    return f"p^C={_fmt(system_risk)} N={net.n_nodes} defaults_total={int(np.sum(delta))}"


def cmd_roi(config: dict, out_dir: Path) -> str:
    net = load_network(config)
    cal, delta, _, system_risk, _, _, p = _ensemble_metrics(config, net)
    report = roi.roi_report(cal, p, _rates(config))
    rows = [
        [net.nodes[i], float(report.nominal[i]), float(report.risk_adjusted[i]), float(p[i])]
        for i in range(net.n_nodes)
    ]
    _write_csv(
        out_dir / "roi.csv",
        ["node", "roi_nominal", "roi_risk_adjusted", "default_prob"],
        rows,
    )
    weighted, unweighted = report.market_risk_adjusted(cal.balance)
    return (
        f"p^C={_fmt(system_risk)} market_roi_ra={_fmt(weighted)} "
        f"market_roi_ra_unweighted={_fmt(unweighted)}"
    )


def _cmd_sweep(config: dict, out_dir: Path, varying: str) -> str:
    net = load_network(config)
    grid = experiments.DEFAULT_ETA_GRID if varying == "eta" else experiments.DEFAULT_ALPHA_GRID
    fixed = config["alpha"] if varying == "eta" else config["eta"]
    spec = experiments.SweepSpec(
        varying=varying,
        grid=grid,
        fixed=fixed,
        beta=config["beta"],
        rates=_rates(config),
        p_exo=config["p_exo"],
    )
    rows = [
        [
            row.param_name,
            row.param_value,
            row.cascade_risk,
            row.avg_debtrank,
            row.market_roi_ra_weighted,
            row.market_roi_ra_unweighted,
        ]
        for row in experiments.sweep(net, spec)
    ]
    _write_csv(
        out_dir / "sweep.csv",
        [
            "param_name",
            "param_value",
            "cascade_risk",
            "avg_debtrank",
            "market_roi_ra_weighted",
            "market_roi_ra_unweighted",
        ],
        rows,
    )
    return f"sweep={varying} points={len(rows)}"


def cmd_iso(config: dict, out_dir: Path) -> str:
    net = load_network(config)
    if config["eta_increases"]:
        grid = tuple(float(x) for x in str(config["eta_increases"]).split(","))
    else:
        grid = experiments.DEFAULT_ETA_INCREASE_GRID
    points = experiments.iso_curve(
        net, eta0=config["eta"], eta_increase_grid=grid, beta=config["beta"]
    )
    rows = [
        [p.eta_rel_increase, p.alpha_lo, p.alpha_hi, p.target_pc, p.achieved_pc]
        for p in points
    ]
    _write_csv(
        out_dir / "iso.csv",
        ["eta_rel_increase", "alpha_lo", "alpha_hi", "target_pc", "achieved_pc"],
        rows,
    )
    saturated = sum(1 for p in points if p.saturated)
    return f"iso points={len(points)} saturated={saturated}"


def cmd_synth(config: dict, out_dir: Path) -> str:
    source = config.get("input") or "synth:"
    if not source.startswith("synth:"):
        raise ParameterError("synth expects --input synth:k=v,... (or no input)")
    net = experiments.generate_synthetic(
        _parse_synth_spec(source, int(config["rng_seed"]))
    )
    network.write_snapshot(net, out_dir / "network.csv")
    return f"nodes={net.n_nodes} edges={net.n_edges} rng_seed={config['rng_seed']}"


_HANDLERS = {
    "ingest": cmd_ingest,
    "cascade": cmd_cascade,
    "risk": cmd_risk,
    "roi": cmd_roi,
    "sweep-eta": lambda config, out: _cmd_sweep(config, out, "eta"),
    "sweep-alpha": lambda config, out: _cmd_sweep(config, out, "alpha"),
    "iso": cmd_iso,
    "synth": cmd_synth,
}


def execute_scenario(config: dict, command: str) -> str:
    """Run one command; returns the one-line summary. Raises on failure."""
    out_dir = Path(config["out"])
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create output directory {out_dir}: {exc}") from exc
    summary = _HANDLERS[command](config, out_dir)
    _write_run_cfg(config, out_dir)
    return summary


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
        summary = execute_scenario(config, args.command)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CalibrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION
    except (InvariantError, IbRiskError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    print(summary)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
