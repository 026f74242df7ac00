"""Config parsing and artifact writers.

Configs are flat, line-oriented key=value text; '#' starts a comment.
Unknown keys are rejected.  CSV floats are written with repr, the shortest
representation that round-trips, so identical configs produce byte
identical artifacts.
"""

from __future__ import annotations

import json
from pathlib import Path


class ConfigError(ValueError):
    pass


def _parse_float_list(text: str) -> list[float]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        raise ConfigError(f"empty list value: {text!r}")
    return [float(s) for s in items]


CONFIG_SCHEMA = {
    "command": str,
    "j1": float,
    "j2": float,
    "amp": float,
    "omega": float,
    "width": float,
    "k0": float,
    "cells": int,
    "duration": float,
    "dt": float,
    "truncation": int,
    "steps_per_period": int,
    "kgrid_size": int,
    "q_display": int,
    "closure_threshold": float,
    "drift_tol": float,
    "amp_grid": _parse_float_list,
    "omega_grid": _parse_float_list,
    "out": str,
}

COMMANDS = ("spectrum", "trajectory", "density", "invariants", "phase-diagram", "validate",
            "reproduce-figures")


def parse_config_text(text: str) -> dict:
    """Parse key=value lines against the schema; unknown keys are fatal."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        caster = CONFIG_SCHEMA[key]
        try:
            out[key] = caster(value)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc
    if "command" in out and out["command"] not in COMMANDS:
        raise ConfigError(f"unknown command {out['command']!r}; choose from {COMMANDS}")
    return out


def parse_config_file(path) -> dict:
    return parse_config_text(Path(path).read_text())


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    lines = Path(path).read_text().strip().splitlines()
    if not lines:
        raise ValueError(f"empty CSV: {path}")
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
