"""Command-line entry point: one subcommand per experiment mode."""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import List, Optional

from . import analysis
from .adversary import best_response
from .config import KEYS, MODES, ConfigError, ExperimentConfig, build_config, parse_adversary, scan
from .engine import Scenario, SimulationError, StrategyInapplicable, competitive_ratio, simulate
from .line_model import Target, format_rational
from .strategies import make_strategy


@dataclass
class RunResult:
    status: int
    output: str
    artifact: object = None


def _strategy_for(config: ExperimentConfig):
    return make_strategy(config.strategy, config.n, config.f, **config.strategy_params())


def _simulate(config: ExperimentConfig) -> RunResult:
    strategy = _strategy_for(config)
    scenario = Scenario(strategy.n, strategy.f, Target(config.side, config.d), strategy,
                        parse_adversary(config.adversary))
    tr = simulate(scenario)
    header = [
        f"# strategy {strategy.describe()} n {strategy.n} f {strategy.f}",
        f"# target {format_rational(scenario.target.position)}",
        f"# search_time {format_rational(tr.search_time)}",
        f"# ratio {format_rational(competitive_ratio(tr, config.d)) if tr.sound else 'unsound'}",
        f"# identified {','.join(map(str, sorted(tr.identified_faulty))) or '-'}",
    ]
    return RunResult(0, "\n".join(header) + "\n" + tr.to_text(), tr)


def _worst_case(config: ExperimentConfig) -> RunResult:
    strategy = _strategy_for(config)
    rep = best_response(strategy, strategy.n, strategy.f, config.m, config.d, node_budget=config.node_budget)
    return RunResult(0, rep.to_text(), rep)


def _alpha(config: ExperimentConfig) -> RunResult:
    value = analysis.alpha_max(config.tolerance)
    return RunResult(0, f"alpha_max {format_rational(value)} ~ {float(value):.4f}\n", value)


def run(config: ExperimentConfig) -> RunResult:
    """Execute one experiment; errors become a nonzero status with a diagnostic."""
    try:
        if config.mode == "simulate":
            result = _simulate(config)
        elif config.mode == "worst-case":
            result = _worst_case(config)
        elif config.mode == "table1":
            result = RunResult(0, analysis.table1_csv(config.m, config.node_budget))
        elif config.mode == "table2":
            result = RunResult(0, analysis.table2_csv(config.m, config.node_budget))
        else:
            result = _alpha(config)
    except StrategyInapplicable as exc:
        return RunResult(2, f"error: strategy not applicable: {exc}\n")
    except (SimulationError, ValueError) as exc:
        return RunResult(2, f"error: {exc}\n")
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(result.output)
    return result


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="byzline", description="Byzantine search on the line.")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode)
        p.add_argument("--config", help="file of key=value settings; flags override it")
        for key in KEYS:
            if key != "mode":
                p.add_argument("--" + key.replace("_", "-"), dest=key, metavar=key.upper())
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _merged_config(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    result = run(config)
    if result.status != 0:
        sys.stderr.write(result.output)
    elif not config.out:
        sys.stdout.write(result.output)
    return result.status


def _merged_config(args: argparse.Namespace) -> ExperimentConfig:
    """Settings from ``--config`` with any explicit flags taking precedence."""
    tokens = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            for key, raw, where in scan(fh.read(), f"{args.config} line"):
                if key in tokens:
                    raise ConfigError(f"duplicate key (first set at {tokens[key][2]})", key, where)
                tokens[key] = (key, raw, where)
    if "mode" in tokens and tokens["mode"][1] != args.mode:
        raise ConfigError(f"config file says {tokens['mode'][1]} but the subcommand is {args.mode}",
                          "mode", tokens["mode"][2])
    tokens["mode"] = ("mode", args.mode, "subcommand")
    for key in KEYS:
        value = getattr(args, key, None)
        if key != "mode" and value is not None:
            tokens[key] = (key, value, "flag --" + key.replace("_", "-"))
    return build_config(list(tokens.values()))


if __name__ == "__main__":
    sys.exit(main())
