"""Flat ``key=value`` experiment configuration with strict parsing."""
from __future__ import annotations

import re
from dataclasses import dataclass, field, fields
from typing import Dict, Optional, Tuple

from .line_model import Q, Rational, parse_rational
from .strategies import STRATEGY_NAMES

MODES = ("simulate", "worst-case", "table1", "table2", "alpha")
_FIXED = ("p41", "p51", "p62")


class ConfigError(ValueError):
    def __init__(self, message: str, key: Optional[str] = None, where: Optional[str] = None):
        prefix = f"{where}: " if where else ""
        what = f"key {key!r}: " if key is not None else ""
        super().__init__(prefix + what + message)
        self.key, self.where = key, where


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    n: Optional[int] = None
    f: Optional[int] = None
    strategy: Optional[str] = None
    adversary: str = "honest"
    d: Rational = Q(1)
    side: int = 1
    m: int = 16
    i: Optional[int] = None
    schedule: Optional[Tuple[Tuple[str, int], ...]] = None
    pad: int = 0
    r0: Rational = Q(1)
    tolerance: Rational = Q(1, 100)
    node_budget: int = 10 ** 7
    out: Optional[str] = None
    positions: Dict[str, str] = field(default_factory=dict, compare=False, repr=False)

    def strategy_params(self) -> dict:
        params = {}
        if self.i is not None:
            params["i"] = self.i
        if self.schedule is not None:
            params["schedule"] = self.schedule
        if self.pad:
            params["pad"] = self.pad
        if self.strategy == "zigzag":
            params["r0"] = self.r0
        return params


KEYS = tuple(f.name for f in fields(ExperimentConfig) if f.name != "positions")


def _int(text):
    if not re.fullmatch(r"-?\d+", text):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(text)


def _count(text):
    v = _int(text)
    if v < 0:
        raise ValueError(f"expected a non-negative integer, got {text}")
    return v


def _positive_int(text):
    v = _int(text)
    if v < 1:
        raise ValueError(f"expected a positive integer, got {text}")
    return v


def _positive_rational(text):
    v = parse_rational(text)
    if v <= 0:
        raise ValueError(f"must be > 0, got {text}")
    return v


def _mode(text):
    if text not in MODES:
        raise ValueError(f"unknown mode {text!r}; choose from {', '.join(MODES)}")
    return text


def _strategy(text):
    if text not in STRATEGY_NAMES:
        raise ValueError(f"unknown strategy {text!r}; choose from {', '.join(STRATEGY_NAMES)}")
    return text


def _side(text):
    v = _int(text)
    if v not in (-1, 1):
        raise ValueError("side must be 1 or -1")
    return v


def _schedule(text):
    steps = []
    for part in text.split(","):
        match = re.fullmatch(r"(rec1|rec2):(\d+)", part)
        if not match:
            raise ValueError(f"schedule steps look like rec2:10 or rec1:4, got {part!r}")
        steps.append((match.group(1), int(match.group(2))))
    return tuple(steps)


def _adversary(text):
    parse_adversary(text)
    return text


def _tolerance(text):
    v = parse_rational(text)
    if not 0 < v < 1:
        raise ValueError("tolerance must lie strictly between 0 and 1")
    return v


_PARSERS = {
    "mode": _mode, "n": _positive_int, "f": _count, "strategy": _strategy, "adversary": _adversary,
    "d": _positive_rational, "side": _side, "m": _positive_int, "i": _positive_int,
    "schedule": _schedule, "pad": _count, "r0": _positive_rational, "tolerance": _tolerance,
    "node_budget": _positive_int, "out": str,
}


def parse_adversary(text: str):
    """``honest``, ``silent:0,1`` (silent at the target) or ``lies:0@1/2,3@-1/4`` (false claims)."""
    from .adversary import FalseClaims, Honest, SilentAtTarget

    if text == "honest":
        return Honest()
    kind, _, body = text.partition(":")
    if kind == "silent" and body:
        return SilentAtTarget(frozenset(_count(r) for r in body.split(",")))
    if kind == "lies" and body:
        pairs = []
        for item in re.split(r"[,;]", body):
            robot, at, pos = item.partition("@")
            if not at:
                raise ValueError(f"lie {item!r} should look like robot@position")
            pairs.append((_count(robot), parse_rational(pos)))
        return FalseClaims(tuple(pairs))
    raise ValueError(f"adversary must be honest, silent:<ids> or lies:<id@pos,...>, got {text!r}")


_REQUIRED = {
    "simulate": ("strategy",),
    "worst-case": ("strategy",),
}


def scan(text: str, source: str = "line"):
    """Split config text into ``(key, raw value, location)`` tokens."""
    tokens = []
    for line_no, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0]
        for match in re.finditer(r"\S+", body):
            token, where = match.group(), f"{source} {line_no}, column {match.start() + 1}"
            key, eq, raw = token.partition("=")
            if not eq or not key:
                raise ConfigError(f"expected key=value, got {token!r}", where=where)
            tokens.append((key, raw, where))
    return tokens


def build_config(tokens) -> ExperimentConfig:
    values, positions = {}, {}
    for key, raw, where in tokens:
        if key not in _PARSERS:
            raise ConfigError(f"unknown key; valid keys are {', '.join(KEYS)}", key, where)
        if key in values:
            raise ConfigError(f"duplicate key (first set at {positions[key]})", key, where)
        try:
            values[key] = _PARSERS[key](raw)
        except ValueError as exc:
            raise ConfigError(str(exc), key, where) from None
        positions[key] = where
    if "mode" not in values:
        raise ConfigError("required key is missing", "mode")
    mode = values["mode"]
    for key in _REQUIRED.get(mode, ()):
        if key not in values:
            raise ConfigError(f"required for mode {mode}", key)
    strategy = values.get("strategy")
    if mode in _REQUIRED and strategy not in _FIXED and "f" not in values:
        raise ConfigError(f"required for strategy {strategy}", "f")
    if strategy == "middle" and "i" not in values:
        raise ConfigError("required for strategy middle", "i")
    if strategy == "chain" and "schedule" not in values:
        raise ConfigError("required for strategy chain", "schedule")
    return ExperimentConfig(positions=positions, **values)


def parse_config(text: str) -> ExperimentConfig:
    """Strictly parse whitespace-separated ``key=value`` pairs; ``#`` starts a comment."""
    return build_config(scan(text))
