"""Flat ``section.key=value`` run configuration.

Precedence is flags over file over defaults.  Every key has a default
except ``fiber.kind``.  Unknown keys are errors.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional

from .base import GOLDEN
from .trigpoly import TrigPoly

SUBCOMMANDS = ("rho", "classify", "lyap", "scan", "probe-lock", "probe-exponent", "selftest")


class ConfigError(ValueError):
    def __init__(self, key: str, where: str, message: str):
        self.key, self.where = key, where
        super().__init__(f"{where}: {key}: {message}")


def _bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _floats(s: str) -> tuple[float, ...]:
    return tuple(float(v) for v in s.split(",") if v.strip())


def _ints(s: str) -> tuple[int, ...]:
    return tuple(int(v) for v in s.split(",") if v.strip())


def _polys(s: str) -> tuple[TrigPoly, ...]:
    return tuple(TrigPoly.parse(p) for p in s.split("|") if p.strip())


def _choice(*options: str) -> Callable[[str], str]:
    def parse(s: str) -> str:
        s = s.strip()
        if s not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {s!r}")
        return s
    return parse


def _alpha(s: str) -> float:
    v = float(s)
    if not 0.0 <= v < 1.0:
        raise ValueError(f"alpha must lie in [0, 1), got {v}")
    return v


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise ValueError(f"must be >= 1, got {v}")
    return v


def _text(s: str) -> str:
    return s.strip()


def _fmt(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, TrigPoly):
        return v.format()
    if isinstance(v, tuple):
        if v and isinstance(v[0], TrigPoly):
            return " | ".join(p.format() for p in v)
        return ",".join(repr(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


# key -> (parser, default, description); None default means required
DEFAULTS: dict[str, tuple[Callable[[str], Any], Any, str]] = {
    "base.kind": (_choice("rotation", "skewshift", "odometer"), "rotation", "base map"),
    "base.omega": (_floats, (GOLDEN,), "rotation vector (comma separated)"),
    "base.alpha": (float, GOLDEN, "skew-shift rotation"),
    "base.radices": (_ints, (2,), "odometer radices, repeated cyclically"),
    "base.depth": (_positive_int, 32, "odometer digit window"),
    "fiber.kind": (_choice("arnold", "p", "trig"), None, "fiber family (required)"),
    "fiber.tau": (float, 0.0, "Arnold rotation parameter"),
    "fiber.alpha": (_alpha, 0.0, "Arnold nonlinearity in [0, 1)"),
    "fiber.beta": (float, 0.0, "Arnold forcing amplitude"),
    "fiber.q": (TrigPoly.parse, TrigPoly(0.0, (1.0,), (0.0,)), "Arnold forcing term"),
    "fiber.p": (TrigPoly.parse, TrigPoly(0.0, (0.0,), (0.1,)), "P-family fiber part"),
    "fiber.forcing": (TrigPoly.parse, TrigPoly(0.0, (1.0,), (0.0,)), "P-family forcing h"),
    "fiber.constant": (TrigPoly.parse, TrigPoly(0.0), "trig lift: constant term s(t)"),
    "fiber.cos": (_polys, (), "trig lift: A_k(t), '|' separated"),
    "fiber.sin": (_polys, (), "trig lift: B_k(t), '|' separated"),
    "command.name": (_choice(*SUBCOMMANDS), "rho", "subcommand"),
    "command.n": (_positive_int, 10000, "iterations for rho / lyap"),
    "command.grid_x": (_positive_int, 64, "base grid size"),
    "command.grid_y": (_positive_int, 64, "fiber grid size"),
    "command.workers": (int, 0, "scan workers; 0 means all cores"),
    "command.json": (_bool, False, "print JSON instead of text"),
    "scan.tau_lo": (float, 0.0, ""),
    "scan.tau_hi": (float, 0.2, ""),
    "scan.tau_count": (int, 64, ""),
    "scan.alpha_lo": (float, 0.2, ""),
    "scan.alpha_hi": (float, 0.8, ""),
    "scan.alpha_count": (int, 16, ""),
    "scan.rho_n": (_positive_int, 16384, "orbit length of the per-cell rho estimate"),
    "scan.pgm": (_bool, True, "also write the PGM image"),
    "probe.radius": (float, 0.1, "perturbation sup-radius"),
    "probe.trials": (_positive_int, 16, "lock search trials"),
    "probe.modes": (_positive_int, 8, "perturbed modes 0..K"),
    "probe.exhaustive": (_bool, False, "run every lock trial"),
    "probe.iterations": (_positive_int, 20, "descent proposals"),
    "probe.n": (_positive_int, 256, "descent exponent horizon"),
    "probe.grid": (_positive_int, 32, "descent exponent grid per axis"),
    "budget.n_list": (_ints, (512, 2048, 8192), "unlocked ladder horizons"),
    "budget.eps_list": (_floats, (0.02, 0.01, 0.005, 0.002), "unlocked ladder shifts"),
    "budget.grid_x": (_positive_int, 64, ""),
    "budget.grid_y": (_positive_int, 64, ""),
    "budget.transient": (_positive_int, 512, "strip transient"),
    "budget.x_nodes": (_positive_int, 256, "strip nodes"),
    "budget.radii": (_floats, (0.2, 0.1, 0.05, 0.02, 0.01), "strip radii tried"),
    "budget.steps": (_positive_int, 1, "strip return time"),
    "budget.cross_check": (_bool, False, "run both certificates"),
    "output.dir": (_text, ".", "export directory"),
    "output.prefix": (_text, "tonguelock", "export file prefix"),
    "seed": (int, 0, "root seed"),
}

ALIASES = {
    "tau": "fiber.tau", "alpha": "fiber.alpha", "beta": "fiber.beta", "q": "fiber.q",
    "kind": "fiber.kind", "n": "command.n", "workers": "command.workers",
    "json": "command.json", "out": "output.dir", "prefix": "output.prefix",
    "trials": "probe.trials", "radius": "probe.radius", "iterations": "probe.iterations",
}


@dataclass(frozen=True)
class RunConfig:
    values: dict = field(default_factory=dict)

    def __getitem__(self, key: str) -> Any:
        return self.values[ALIASES.get(key, key)]

    def __getattr__(self, name: str) -> Any:
        key = ALIASES.get(name)
        if key is None:
            raise AttributeError(name)
        return self.values[key]

    def section(self, name: str) -> dict:
        pre = name + "."
        return {k[len(pre):]: v for k, v in self.values.items() if k.startswith(pre)}

    def to_text(self) -> str:
        lines = [f"{k}={_fmt(v)}" for k, v in self.values.items() if v is not None]
        return "\n".join(lines) + "\n"


def _set(values: dict, key: str, raw: str, where: str):
    key = ALIASES.get(key, key)
    if key not in DEFAULTS:
        raise ConfigError(key, where, "unknown key")
    parser = DEFAULTS[key][0]
    try:
        values[key] = parser(raw)
    except ValueError as exc:
        raise ConfigError(key, where, str(exc)) from None


def _flag_pairs(flags: Iterable[str]):
    flags = list(flags)
    i = 0
    while i < len(flags):
        f = flags[i]
        if not f.startswith("--"):
            raise ConfigError(f, "flag", "expected --key=value")
        body = f[2:]
        if "=" in body:
            key, raw = body.split("=", 1)
        elif i + 1 < len(flags) and not flags[i + 1].startswith("--"):
            key, raw = body, flags[i + 1]
            i += 1
        else:
            key, raw = body, "true"
        yield key.replace("-", "_") if key not in DEFAULTS else key, raw, f"flag {f}"
        i += 1


def _check_writable(path: str, where: str):
    probe = os.path.abspath(path)
    while not os.path.exists(probe):
        parent = os.path.dirname(probe)
        if parent == probe:
            break
        probe = parent
    if not (os.path.isdir(probe) and os.access(probe, os.W_OK)):
        raise ConfigError("output.dir", where, f"{path!r} is not writable")


def parse_config(text: str = "", overrides: Optional[Iterable[str]] = None,
                 require_kind: bool = True) -> RunConfig:
    values = {k: spec[1] for k, spec in DEFAULTS.items()}
    dir_where = "default"
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        where = f"line {lineno}"
        if "=" not in body:
            raise ConfigError(body, where, "expected key=value")
        key, raw = (s.strip() for s in body.split("=", 1))
        _set(values, key, raw, where)
        if ALIASES.get(key, key) == "output.dir":
            dir_where = where
    for key, raw, where in _flag_pairs(overrides or ()):
        _set(values, key, raw, where)
        if ALIASES.get(key, key) == "output.dir":
            dir_where = where
    if require_kind and values["fiber.kind"] is None:
        raise ConfigError("fiber.kind", "config", "required key missing")
    _check_writable(values["output.dir"], dir_where)
    return RunConfig(values)


def defaults_table() -> str:
    """Markdown table of every key, its default and meaning."""
    rows = ["| key | default | meaning |", "| --- | --- | --- |"]
    for key, (_, default, doc) in DEFAULTS.items():
        shown = "(required)" if default is None else f"`{_fmt(default)}`"
        rows.append(f"| `{key}` | {shown} | {doc} |")
    return "\n".join(rows)
