"""``tonguelock`` command line.

    tonguelock SUBCOMMAND [--config FILE] [--key=value ...]

Exit codes: 0 decision reached, 2 bad input or I/O failure, 3 undecided
classification, 4 probe found nothing, 1 selftest failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace

from .base import Odometer, Rotation, SkewShift
from .config import SUBCOMMANDS, ConfigError, RunConfig, parse_config
from .fiber import ArnoldFamily, PFamily, TrigLift
from .locking import Budget, Locked, Undecided, classify
from .lyapunov import exponent_bounds
from .rotation import rotation_enclosure

EXIT_OK, EXIT_FAIL, EXIT_IO, EXIT_UNDECIDED, EXIT_NOT_FOUND = 0, 1, 2, 3, 4


def build_base(cfg: RunConfig):
    b = cfg.section("base")
    if b["kind"] == "rotation":
        return Rotation(tuple(b["omega"]))
    if b["kind"] == "skewshift":
        return SkewShift(b["alpha"])
    return Odometer(tuple(b["radices"]), b["depth"])


def build_family(cfg: RunConfig):
    f = cfg.section("fiber")
    if f["kind"] == "arnold":
        return ArnoldFamily(tau=f["tau"], alpha=f["alpha"], beta=f["beta"], q=f["q"])
    if f["kind"] == "p":
        return PFamily(P=f["p"], forcing=f["forcing"])
    return TrigLift(f["constant"], tuple(f["cos"]), tuple(f["sin"]))


def build_budget(cfg: RunConfig) -> Budget:
    b = cfg.section("budget")
    return Budget(n_list=tuple(b["n_list"]), eps_list=tuple(b["eps_list"]), grid_x=b["grid_x"],
                  grid_y=b["grid_y"], transient=b["transient"], x_nodes=b["x_nodes"],
                  radii=tuple(b["radii"]), steps=b["steps"], cross_check=b["cross_check"])


def _out_path(cfg: RunConfig, suffix: str) -> str:
    os.makedirs(cfg["output.dir"], exist_ok=True)
    return os.path.join(cfg["output.dir"], f"{cfg['output.prefix']}{suffix}")


def _write(path: str, text: str):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_rho(cfg: RunConfig) -> int:
    enc = rotation_enclosure(build_family(cfg), build_base(cfg), cfg["command.n"],
                             cfg["command.grid_x"], cfg["command.grid_y"])
    if cfg["command.json"]:
        print(json.dumps({"lo": enc.lo, "hi": enc.hi, "n": enc.n, "rigor": enc.rigor,
                          "flagged": enc.flagged}))
    else:
        print(f"{enc.lo:.6f} {enc.hi:.6f} {enc.n} {enc.rigor}" + (" flagged" if enc.flagged else ""))
    return EXIT_OK


def cmd_classify(cfg: RunConfig) -> int:
    cls = classify(build_family(cfg), build_base(cfg), build_budget(cfg))
    if cfg["command.json"]:
        print(json.dumps({"class": cls.label, "code": cls.code, "summary": cls.summary()}))
    else:
        print(cls.summary())
    return EXIT_UNDECIDED if isinstance(cls, Undecided) else EXIT_OK


def cmd_lyap(cfg: RunConfig) -> int:
    est = exponent_bounds(build_family(cfg), build_base(cfg), cfg["command.n"],
                          cfg["command.grid_x"], cfg["command.grid_y"])
    if cfg["command.json"]:
        print(json.dumps({"upper_L_plus": est.upper_L_plus, "lower_L_minus": est.lower_L_minus,
                          "margin_upper": est.margin_upper, "margin_lower": est.margin_lower,
                          "n": est.n, "rigor": est.rigor}))
    else:
        print(f"{est.upper_L_plus:.6f} {est.lower_L_minus:.6f} {est.n} {est.rigor}")
    return EXIT_OK


def scan_config(cfg: RunConfig):
    from .scan import ScanConfig, resolve_workers
    s = cfg.section("scan")
    if cfg["fiber.kind"] != "arnold":
        raise ConfigError("fiber.kind", "config", "scan needs the arnold family")
    return ScanConfig(tau_range=(s["tau_lo"], s["tau_hi"]), tau_count=s["tau_count"],
                      alpha_range=(s["alpha_lo"], s["alpha_hi"]), alpha_count=s["alpha_count"],
                      beta=cfg["fiber.beta"], q=cfg["fiber.q"], base=build_base(cfg),
                      budget=build_budget(cfg), seed=cfg["seed"],
                      workers=resolve_workers(cfg["command.workers"]), rho_n=s["rho_n"])


def cmd_scan(cfg: RunConfig) -> int:
    from .scan import locked_fraction, metadata_json, to_csv, to_pgm, tongue_scan
    grid = tongue_scan(scan_config(cfg))
    _write(_out_path(cfg, ".csv"), to_csv(grid))
    if cfg["scan.pgm"]:
        _write(_out_path(cfg, ".pgm"), to_pgm(grid))
    _write(_out_path(cfg, ".json"), metadata_json(grid))
    _write(_out_path(cfg, ".timings.json"), _dump(grid.timings))
    locked, undecided = locked_fraction(grid)
    print(f"locked={locked:.4f} undecided={undecided:.4f} cells={grid.shape[0] * grid.shape[1]}")
    return EXIT_OK


def cmd_probe_lock(cfg: RunConfig) -> int:
    from .probes import lock_search
    if cfg["fiber.kind"] != "arnold":
        raise ConfigError("fiber.kind", "config", "probe-lock needs the arnold family")
    p = cfg.section("probe")
    rep = lock_search(build_base(cfg), cfg["fiber.tau"], cfg["fiber.alpha"], cfg["fiber.beta"],
                      cfg["fiber.q"], p["radius"], p["trials"], cfg["seed"], build_budget(cfg),
                      p["modes"], p["exhaustive"])
    text = _dump(rep.to_dict())
    _write(_out_path(cfg, ".probe-lock.json"), text)
    print(text, end="")
    return EXIT_OK if rep.found is not None else EXIT_NOT_FOUND


def cmd_probe_exponent(cfg: RunConfig) -> int:
    from .probes import exponent_minimize
    p = cfg.section("probe")
    rep = exponent_minimize(build_base(cfg), build_family(cfg), p["radius"], p["iterations"],
                            cfg["seed"], p["grid"], p["grid"], p["n"], build_budget(cfg), p["modes"])
    text = _dump(rep.to_dict())
    _write(_out_path(cfg, ".probe-exponent.json"), text)
    print(text, end="")
    return EXIT_OK


def cmd_selftest(cfg: RunConfig) -> int:
    from .acceptance import run_all
    results = run_all(workers=max(2, cfg["command.workers"]), stream=sys.stdout)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


COMMANDS = {
    "rho": cmd_rho, "classify": cmd_classify, "lyap": cmd_lyap, "scan": cmd_scan,
    "probe-lock": cmd_probe_lock, "probe-exponent": cmd_probe_exponent, "selftest": cmd_selftest,
}


def run(cfg: RunConfig) -> int:
    try:
        return COMMANDS[cfg["command.name"]](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="tonguelock", description=__doc__.split("\n")[0],
                                 epilog="Any config key can be set as --section.key=value.")
    ap.add_argument("command", choices=SUBCOMMANDS)
    ap.add_argument("--config", help="flat section.key=value file")
    ap.add_argument("-v", "--verbose", action="store_true")
    args, rest = ap.parse_known_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        text = ""
        if args.config:
            with open(args.config) as fh:
                text = fh.read()
        cfg = parse_config(text, rest, require_kind=args.command != "selftest")
    except (OSError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    cfg = replace(cfg, values={**cfg.values, "command.name": args.command})
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
