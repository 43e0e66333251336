"""Scenario runner.

Scenario files are JSON::

    {"kind": "swap", "name": "...", "seed": 1, "mode": "exhaustive",
     "params": {...}}

``mode`` is ``"exhaustive"`` or ``{"sampled": <trials>}``. Parameters are
validated (with the offending field path) before any state is allocated.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .catalg import MAX_MEASURED, CatLabel, SwapScenario
from .protocols import (
    InterceptResend,
    NetworkTopology,
    PairLink,
    ProtocolReport,
    SuperdenseAssignment,
    amplitude_swap_correct,
    conference_key,
    exchange_entangle,
    four_user_topology,
    ghz_from_bell_pairs,
    grow_cat,
    grow_chain,
    superdense_table,
    swap_report,
)
from .qstate import MAX_QUBITS
from .timing import SWEEP_COLUMNS, sweep_csv, timing_sweep

KINDS = ("swap", "exchange", "grow", "superdense", "amplitude", "conference", "timing-sweep")


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class ScenarioConfig:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    mode: str = "exhaustive"
    trials: int = 0
    name: str = ""

    def to_dict(self) -> dict:
        mode: Any = self.mode if self.mode == "exhaustive" else {"sampled": self.trials}
        return {"kind": self.kind, "name": self.name or self.kind, "seed": self.seed,
                "mode": mode, "params": self.params}

    @classmethod
    def from_dict(cls, raw: Any) -> "ScenarioConfig":
        if not isinstance(raw, dict):
            raise ConfigError("$", "scenario must be a JSON object")
        kind = raw.get("kind")
        if kind not in KINDS:
            raise ConfigError("$.kind", f"must be one of {', '.join(KINDS)}")
        seed = raw.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
            raise ConfigError("$.seed", "must be a 64-bit unsigned integer")
        mode, trials = raw.get("mode", "exhaustive"), 0
        if isinstance(mode, dict):
            trials = mode.get("sampled")
            if set(mode) != {"sampled"} or not isinstance(trials, int) or trials < 1:
                raise ConfigError("$.mode.sampled", "must be a positive trial count")
            mode = "sampled"
        elif mode != "exhaustive":
            raise ConfigError("$.mode", 'must be "exhaustive" or {"sampled": trials}')
        params = raw.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("$.params", "must be an object")
        config = cls(kind, params, seed, mode, trials, raw.get("name", "") or kind)
        validate(config)
        return config


def parse_config(text: str) -> ScenarioConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON: {exc}") from exc
    return ScenarioConfig.from_dict(raw)


def serialize_config(config: ScenarioConfig) -> str:
    return json.dumps(config.to_dict(), indent=2) + "\n"


def load_config(path: str | Path) -> ScenarioConfig:
    return parse_config(Path(path).read_text())


# -- validation ----------------------------------------------------------------

def _int(params: dict, key: str, lo: int, hi: int, default: int | None = None) -> int:
    value = params.get(key, default)
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"$.params.{key}", "must be an integer")
    if not lo <= value <= hi:
        raise ConfigError(f"$.params.{key}", f"must lie in [{lo}, {hi}]")
    return value


def _number_list(params: dict, key: str, default=None) -> list[float]:
    value = params.get(key, default)
    if not isinstance(value, list) or not value or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in value):
        raise ConfigError(f"$.params.{key}", "must be a nonempty list of numbers")
    return value


def _label(rec: Any, path: str) -> CatLabel:
    if not isinstance(rec, dict) or "qubits" not in rec or "pattern" not in rec:
        raise ConfigError(path, "cat label needs qubits and pattern")
    try:
        return CatLabel.from_record(rec)
    except (ValueError, TypeError) as exc:
        raise ConfigError(path, str(exc)) from exc


def _swap_scenario(params: dict) -> SwapScenario:
    cats = params.get("cats")
    measured = params.get("measured")
    if not isinstance(cats, list) or not cats:
        raise ConfigError("$.params.cats", "must be a nonempty list of cat labels")
    if not isinstance(measured, list) or len(measured) != len(cats):
        raise ConfigError("$.params.measured", "must hold one qubit list per cat")
    labels = [_label(c, f"$.params.cats[{i}]") for i, c in enumerate(cats)]
    total = sum(c.size for c, sel in zip(labels, measured) if sel)
    if total > MAX_QUBITS:
        raise ConfigError("$.params.cats", f"{total} qubits exceeds the cap of {MAX_QUBITS}")
    p = sum(len(m) for m in measured if isinstance(m, list))
    if p > MAX_MEASURED:
        raise ConfigError("$.params.measured", f"{p} measured qubits exceeds {MAX_MEASURED}")
    try:
        scenario = SwapScenario(tuple(labels), tuple(tuple(m) for m in measured),
                                bool(params.get("terminal", False)))
        scenario.check_swappable()
    except (ValueError, TypeError) as exc:
        raise ConfigError("$.params.measured", str(exc)) from exc
    return scenario


def _topology(params: dict) -> NetworkTopology:
    topo = params.get("topology", "four-user")
    if topo == "four-user":
        return four_user_topology()
    if not isinstance(topo, dict) or not isinstance(topo.get("users"), list) \
            or not isinstance(topo.get("pairs"), dict):
        raise ConfigError("$.params.topology", 'must be "four-user" or {"users": [...], "pairs": {...}}')
    if 2 * len(topo["users"]) > MAX_QUBITS:
        raise ConfigError("$.params.topology.users", f"more than {MAX_QUBITS // 2} users")
    try:
        pairs = {u: PairLink(**rec) for u, rec in topo["pairs"].items()}
        return NetworkTopology(tuple(topo["users"]), pairs)
    except (ValueError, TypeError) as exc:
        raise ConfigError("$.params.topology.pairs", str(exc)) from exc


def validate(config: ScenarioConfig) -> None:
    """Check parameters against the target operation's preconditions."""
    p = config.params
    if config.kind == "swap":
        _swap_scenario(p)
    elif config.kind == "exchange":
        topo = _topology(p)
        subset = p.get("subset")
        if not isinstance(subset, list) or len(subset) < 2 or not set(subset) <= set(topo.users):
            raise ConfigError("$.params.subset", "must list at least two known users")
    elif config.kind == "grow":
        if "chain_to" in p:
            _int(p, "N", 2, 10, 2)
            _int(p, "chain_to", p.get("N", 2), 10)
        elif p.get("from_bells"):
            pass
        else:
            _int(p, "N", 2, 10)
    elif config.kind == "superdense":
        N = _int(p, "N", 1, 10)
        _int(p, "designated", 0, N - 1, 0)
        msgs = p.get("messages")
        if msgs is not None and (not isinstance(msgs, list) or not all(
                isinstance(m, str) and len(m) == N + 1 and not set(m) - {"0", "1"} for m in msgs)):
            raise ConfigError("$.params.messages", f"must be a list of {N + 1}-bit strings")
    elif config.kind == "amplitude":
        theta = p.get("theta")
        if not isinstance(theta, (int, float)) or not 0 < theta < math.pi / 2:
            raise ConfigError("$.params.theta", "must lie strictly between 0 and pi/2")
    elif config.kind == "conference":
        n = _int(p, "n_users", 2, MAX_QUBITS // 2)
        _int(p, "rounds", 1, 10**7)
        if p.get("basis_mode", "single") not in ("single", "dual"):
            raise ConfigError("$.params.basis_mode", 'must be "single" or "dual"')
        eve = p.get("eavesdropper")
        if eve is not None:
            if not isinstance(eve, dict):
                raise ConfigError("$.params.eavesdropper", "must be null or an object")
            if not isinstance(eve.get("channel", 0), int) or not 0 <= eve.get("channel", 0) < n:
                raise ConfigError("$.params.eavesdropper.channel", f"must lie in [0, {n - 1}]")
            if eve.get("basis", "Z") not in ("X", "Y", "Z", "XY"):
                raise ConfigError("$.params.eavesdropper.basis", 'must be "X", "Y", "Z" or "XY"')
    elif config.kind == "timing-sweep":
        for key in ("L", "v", "t_m"):
            _number_list(p, key)
        levels = p.get("levels", [1])
        if not isinstance(levels, list) or not all(isinstance(k, int) and k >= 1 for k in levels):
            raise ConfigError("$.params.levels", "must be a list of integers >= 1")
        c = p.get("c", 1.0)
        if any(not 0 < v <= c for v in p["v"]):
            raise ConfigError("$.params.v", "speeds must satisfy 0 < v <= c")
        if any(x <= 0 for x in p["L"]) or any(x < 0 for x in p["t_m"]):
            raise ConfigError("$.params", "need L > 0 and t_m >= 0")


# -- execution -------------------------------------------------------------------

def run_scenario(config: ScenarioConfig) -> ProtocolReport:
    validate(config)
    p = config.params
    sampled = config.mode == "sampled"
    rng = np.random.default_rng(config.seed) if sampled else None
    kind = config.kind
    if kind == "swap":
        report = swap_report(_swap_scenario(p), rng, trials=config.trials)
    elif kind == "exchange":
        report = exchange_entangle(_topology(p), p["subset"], rng)
    elif kind == "grow":
        if p.get("from_bells"):
            report = ghz_from_bell_pairs(rng)
        elif "chain_to" in p:
            report = grow_chain(p.get("N", 2), p["chain_to"], rng)
        else:
            report = grow_cat(p["N"], rng)
    elif kind == "superdense":
        N = p["N"]
        assignment = SuperdenseAssignment(tuple(f"S{i + 1}" for i in range(N)),
                                          designated=p.get("designated", 0))
        messages = p.get("messages")
        if messages is None and sampled:
            messages = ["".join(map(str, rng.integers(2, size=N + 1))) for _ in range(config.trials)]
        report = superdense_table(N, assignment, messages)
    elif kind == "amplitude":
        report = amplitude_swap_correct(p["theta"], rng, config.trials)
    elif kind == "conference":
        eve = p.get("eavesdropper")
        report = conference_key(p["n_users"], p["rounds"], p.get("basis_mode", "single"),
                                config.seed,
                                None if eve is None else InterceptResend(eve.get("channel", 0),
                                                                         eve.get("basis", "Z")))
    else:
        rows = timing_sweep(p["L"], p["v"], p["t_m"], p.get("levels", [1]), p.get("c", 1.0),
                            bool(p.get("include_classical", False)))
        report = ProtocolReport("timing-sweep", data={"columns": list(SWEEP_COLUMNS), "rows": rows})
        by_level: dict[tuple, list] = {}
        for r in rows:
            by_level.setdefault((r["L"], r["v"], r["t_m"]), []).append((r["levels"], r["t2"]))
        monotone = all(t_b <= t_a for pts in by_level.values()
                       for (k_a, t_a), (k_b, t_b) in zip(sorted(pts), sorted(pts)[1:]))
        report.check("t2 non-increasing in levels", True, monotone)
    report.scenario = config.name or kind
    report.seed = config.seed
    report.mode = config.mode
    report.data = {"config": config.to_dict(), "version": __version__, **report.data}
    return report


# -- reports ---------------------------------------------------------------------

def _plain(value: Any) -> Any:
    """JSON-ready copy; floats become 12-significant-digit decimal strings."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return format(float(value), "#.12g")
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def emit_report(report: ProtocolReport, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(_plain(report.to_dict()), indent=2) + "\n"
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"scenario: {report.scenario}   seed: {report.seed}   mode: {report.mode}",
             f"outcomes: {len(report.outcomes)}"]
    for rec in report.outcomes[:32]:
        parts = []
        for key in ("outcome", "probability", "residual", "users_cat", "label", "message", "decoded"):
            if key in rec:
                val = rec[key]
                if isinstance(val, dict) and "pattern" in val:
                    val = str(CatLabel.from_record(val))
                elif isinstance(val, float):
                    val = format(val, ".6g")
                parts.append(f"{key}={val}")
        lines.append("  " + "  ".join(parts))
    if len(report.outcomes) > 32:
        lines.append(f"  ... {len(report.outcomes) - 32} more")
    width = max((len(c.name) for c in report.checks), default=0)
    lines.append("checks:")
    for c in report.checks:
        measured = format(c.measured, ".6g") if isinstance(c.measured, float) else c.measured
        lines.append(f"  {'PASS' if c.passed else 'FAIL'}  {c.name:<{width}}  "
                     f"expected={c.expected}  measured={measured}")
    lines.append("RESULT: " + ("PASS" if report.passed else "FAIL"))
    return "\n".join(lines) + "\n"


def bundled_scenarios() -> dict[str, str]:
    """Name -> JSON text of the scenario files shipped with the package."""
    root = resources.files("catswap") / "scenarios"
    return {p.name: p.read_text() for p in sorted(root.iterdir(), key=lambda p: p.name)
            if p.name.endswith(".json")}


# -- entry point -----------------------------------------------------------------

def _cmd_run(args) -> int:
    try:
        config = load_config(args.scenario)
    except ConfigError as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        config.seed = args.seed
    report = run_scenario(config)
    text = emit_report(report, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 1


def _cmd_verify(args) -> int:
    from .acceptance import run_all

    results = run_all()
    width = max(len(r.title) for r in results)
    for r in results:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.number:>2}. {r.title:<{width}}  {r.detail}")
    return 0 if all(r.passed for r in results) else 1


def _cmd_sweep(args) -> int:
    rows = timing_sweep(args.L, args.v, args.t_m, args.levels, args.c, args.classical)
    if args.format == "csv":
        sys.stdout.write(sweep_csv(rows))
    else:
        sys.stdout.write(json.dumps(_plain(rows), indent=2) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="catswap", description="Multiparticle entanglement swapping scenarios")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("scenario")
    run.add_argument("--seed", type=int)
    run.add_argument("--format", choices=("json", "table"), default="json")
    run.add_argument("--out")
    run.set_defaults(func=_cmd_run)

    verify = sub.add_parser("verify", help="run the acceptance criteria")
    verify.set_defaults(func=_cmd_verify)

    sweep = sub.add_parser("sweep", help="tabulate relay timing over a grid")
    sweep.add_argument("--L", type=float, nargs="+", default=[1.0])
    sweep.add_argument("--v", type=float, nargs="+", default=[0.5])
    sweep.add_argument("--t-m", dest="t_m", type=float, nargs="+", default=[0.0, 0.1, 0.25])
    sweep.add_argument("--levels", type=int, nargs="+", default=[1, 2, 3])
    sweep.add_argument("--c", type=float, default=1.0)
    sweep.add_argument("--classical", action="store_true", help="add the L/2c broadcast time")
    sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    sweep.set_defaults(func=_cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
