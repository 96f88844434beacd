"""Run configuration: flat ``key = value`` files with command-line overrides."""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from ..errors import ConfigError
from ..njl.lattice import LatticeParams
from ..protocol import ProtocolConfig

DEFAULT_LAMBDA_A = (0.05, 0.0625, 0.075, 0.0875, 0.1)
DEFAULT_LAMBDA_B = (0.5, 2.0, 3.0)


@dataclass(frozen=True)
class SweepSpec:
    lambda_a: tuple[float, ...] = DEFAULT_LAMBDA_A
    lambda_b: tuple[float, ...] = DEFAULT_LAMBDA_B
    base: ProtocolConfig = field(default_factory=ProtocolConfig)
    output: Optional[str] = None
    format: str = "csv"
    split: bool = False
    export_circuit: Optional[str] = None

    def __post_init__(self):
        for name in ("lambda_a", "lambda_b"):
            vals = getattr(self, name)
            if not vals:
                raise ConfigError(f"{name} list must be non-empty")
            if not all(math.isfinite(v) for v in vals):
                raise ConfigError(f"{name} values must be finite")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")


# key -> value kind; command-line flags use the same names with dashes
_KEYS = {
    "lambda_a": "float list",
    "lambda_b": "float list",
    "sites": "int",
    "spacing": "float",
    "dt": "float",
    "steps": "int",
    "t0": "float",
    "t1": "float",
    "mdyn": "float",
    "coupling": "float",
    "site": "int",
    "mode": "str",
    "shots": "int",
    "seed": "int",
    "boundary": "str",
    "force_mu": "mu",
    "bob_rule": "str",
    "evolution": "str",
    "output": "str",
    "format": "str",
    "split": "bool",
    "export_circuit": "str",
}


def _convert(key: str, raw: str, where: str):
    kind = _KEYS[key]
    try:
        if kind == "float list":
            return tuple(float(v) for v in raw.replace(",", " ").split())
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            low = raw.strip().lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        if kind == "mu":
            low = raw.strip()
            if low in ("", "none"):
                return None
            val = int(low)
            if val not in (1, -1):
                raise ValueError(raw)
            return val
        return raw.strip()
    except ValueError:
        raise ConfigError(f"{where}: cannot read {key} = {raw!r} as {kind}") from None


def read_config_file(path) -> dict:
    values = {}
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _convert(key, raw, f"{path}:{lineno}")
    return values


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="njl-qet",
        description="Sweep the timelike QET protocol on the lattice NJL model.")
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--lambda-a", help="comma-separated Alice couplings")
    p.add_argument("--lambda-b", help="comma-separated Bob couplings")
    p.add_argument("--sites", help="lattice sites N")
    p.add_argument("--spacing", help="lattice spacing a")
    p.add_argument("--dt", help="Trotter step")
    p.add_argument("--steps", help="number of Trotter steps")
    p.add_argument("--t0", help="Alice's time (default 0)")
    p.add_argument("--t1", help="Bob's time (default t0 + steps*dt)")
    p.add_argument("--mdyn", help="dynamical mass")
    p.add_argument("--coupling", help="four-fermion coupling G")
    p.add_argument("--site", help="interaction site n0")
    p.add_argument("--mode", choices=["exact", "sampled"])
    p.add_argument("--shots", help="shots per Pauli term in sampled mode")
    p.add_argument("--seed", help="RNG seed")
    p.add_argument("--boundary", choices=["open", "periodic"])
    p.add_argument("--force-mu", help="force Alice's outcome (+1 or -1)")
    p.add_argument("--bob-rule", help="m_B rule: mu, -mu, +1, -1")
    p.add_argument("--evolution", choices=["trotter", "exact"])
    p.add_argument("--output", help="results path")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--split", action="store_const", const="true",
                   help="write one file per lambda_B")
    p.add_argument("--export-circuit", help="write OpenQASM 2.0 for the first grid point")
    p.add_argument("--log-level", default="WARNING")
    return p


def parse_config(config_path=None, argv: Optional[Sequence[str]] = None) -> SweepSpec:
    """Merge defaults, an optional file, and flags (flags win) into a SweepSpec."""
    flags = {}
    if argv is not None:
        try:
            ns = build_parser().parse_args(list(argv))
        except SystemExit as exc:
            raise ConfigError(f"bad command line: {' '.join(argv)}") from exc
        config_path = ns.config or config_path
        for key in _KEYS:
            raw = getattr(ns, key, None)
            if raw is not None:
                flags[key] = _convert(key, raw, f"--{key.replace('_', '-')}")
    values = read_config_file(config_path) if config_path else {}
    values.update(flags)
    return spec_from_values(values)


def spec_from_values(values: dict) -> SweepSpec:
    lat = LatticeParams()
    try:
        lattice = LatticeParams(
            sites=values.get("sites", lat.sites),
            spacing=values.get("spacing", lat.spacing),
            m_dyn=values.get("mdyn", lat.m_dyn),
            G=values.get("coupling", lat.G),
            boundary=values.get("boundary", lat.boundary),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid lattice: {exc}") from None
    base = ProtocolConfig()
    dt = values.get("dt", base.dt)
    steps = values.get("steps", base.steps)
    t0 = values.get("t0", base.t0)
    t1 = values.get("t1", t0 + steps * dt)
    la = values.get("lambda_a", DEFAULT_LAMBDA_A)
    lb = values.get("lambda_b", DEFAULT_LAMBDA_B)
    cfg = ProtocolConfig(
        lattice=lattice, n0=values.get("site", base.n0),
        lambda_a=la[0] if la else base.lambda_a, lambda_b=lb[0] if lb else base.lambda_b,
        t0=t0, t1=t1, dt=dt, steps=steps, mode=values.get("mode", base.mode),
        shots=values.get("shots", base.shots), seed=values.get("seed", base.seed),
        forced_outcome=values.get("force_mu", base.forced_outcome),
        bob_rule=values.get("bob_rule", base.bob_rule),
        evolution=values.get("evolution", base.evolution),
    )
    return SweepSpec(lambda_a=tuple(la), lambda_b=tuple(lb), base=cfg,
                     output=values.get("output"), format=values.get("format", "csv"),
                     split=values.get("split", False),
                     export_circuit=values.get("export_circuit"))
