"""Arnold-tongue scans over the (tau, alpha) plane."""
from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__, kernels
from .base import BaseMap, Rotation
from .fiber import ArnoldFamily
from .locking import Budget, LockClassification, classify
from .rotation import SCAN_N, rho_orbit_estimate
from .trigpoly import TrigPoly, cosine_forcing

PGM_LEVEL = {"L": 0, "U+": 1, "U-": 2, "?": 3}


@dataclass(frozen=True)
class ScanConfig:
    tau_range: tuple[float, float] = (0.0, 0.2)
    tau_count: int = 64
    alpha_range: tuple[float, float] = (0.2, 0.8)
    alpha_count: int = 16
    beta: float = 0.0
    q: TrigPoly = field(default_factory=cosine_forcing)
    base: BaseMap = field(default_factory=Rotation)
    budget: Budget = field(default_factory=Budget)
    seed: int = 0
    workers: int = 1
    rho_n: int = SCAN_N

    def __post_init__(self):
        if self.tau_count < 2 or self.alpha_count < 2:
            raise ValueError("scan counts must be >= 2")
        lo, hi = self.alpha_range
        if not 0.0 < lo <= hi < 1.0:
            raise ValueError(f"alpha range must lie strictly inside (0, 1), got {self.alpha_range}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def taus(self) -> np.ndarray:
        return np.linspace(*self.tau_range, self.tau_count)

    @property
    def alphas(self) -> np.ndarray:
        return np.linspace(*self.alpha_range, self.alpha_count)

    def family(self, tau: float, alpha: float) -> ArnoldFamily:
        return ArnoldFamily(tau=float(tau), alpha=float(alpha), beta=self.beta, q=self.q)

    def echo(self) -> dict:
        """Everything that determines the result (the worker hint does not)."""
        b = self.budget
        return {
            "tau_range": list(self.tau_range), "tau_count": self.tau_count,
            "alpha_range": list(self.alpha_range), "alpha_count": self.alpha_count,
            "beta": self.beta, "q": self.q.format(), "base": repr(self.base),
            "budget": {"n_list": list(b.n_list), "eps_list": list(b.eps_list),
                       "grid_x": b.grid_x, "grid_y": b.grid_y, "transient": b.transient,
                       "x_nodes": b.x_nodes, "radii": list(b.radii), "steps": b.steps},
            "seed": self.seed, "rho_n": self.rho_n,
        }


@dataclass(frozen=True, eq=False)
class TongueGrid:
    config: ScanConfig
    codes: tuple[tuple[str, ...], ...]
    rho: np.ndarray
    witnesses: tuple[LockClassification, ...] = ()
    timings: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.codes), len(self.codes[0])


_CFG: ScanConfig | None = None


def _init_worker(cfg: ScanConfig):
    global _CFG
    _CFG = cfg


def _scan_cell(index: int):
    cfg = _CFG
    a, t = divmod(index, cfg.tau_count)
    fam = cfg.family(cfg.taus[t], cfg.alphas[a])
    cls = classify(fam, cfg.base, cfg.budget)
    rho = rho_orbit_estimate(fam, cfg.base, cfg.base.origin(), 0.0, cfg.rho_n)
    return cls, rho


def resolve_workers(requested: int | None = None) -> int:
    env = os.environ.get("TONGUELOCK_THREADS")
    if env:
        return max(1, int(env))
    if requested:
        return requested
    return os.cpu_count() or 1


def tongue_scan(cfg: ScanConfig) -> TongueGrid:
    """Classify every cell independently; results are assembled by cell index,
    so the worker count cannot change them."""
    cells = cfg.tau_count * cfg.alpha_count
    start = time.perf_counter()
    if cfg.workers == 1:
        _init_worker(cfg)
        results = [_scan_cell(i) for i in range(cells)]
    else:
        chunk = max(1, cells // (4 * cfg.workers))
        with ProcessPoolExecutor(cfg.workers, initializer=_init_worker, initargs=(cfg,)) as ex:
            results = list(ex.map(_scan_cell, range(cells), chunksize=chunk))
    wall = time.perf_counter() - start
    codes = [r[0].code for r in results]
    rho = np.array([r[1] for r in results]).reshape(cfg.alpha_count, cfg.tau_count)
    rows = tuple(tuple(codes[a * cfg.tau_count:(a + 1) * cfg.tau_count]) for a in range(cfg.alpha_count))
    timings = {"wall_seconds": wall, "per_cell_seconds": wall / cells, "workers": cfg.workers,
               "backend": kernels.BACKEND}
    return TongueGrid(cfg, rows, rho, tuple(r[0] for r in results), timings)


def locked_fraction(grid: TongueGrid) -> tuple[float, float]:
    """Fractions of cells coded locked and undecided."""
    flat = [c for row in grid.codes for c in row]
    return flat.count("L") / len(flat), flat.count("?") / len(flat)


def row_fraction(grid: TongueGrid, row: int) -> float:
    codes = grid.codes[row]
    return codes.count("L") / len(codes)


def row_boundary(grid: TongueGrid, row: int) -> tuple[float | None, float | None]:
    """``(tau of the last locked cell, tau of the first unlocked cell)`` in a row."""
    taus = grid.config.taus
    codes = grid.codes[row]
    locked = [t for t, c in zip(taus, codes) if c == "L"]
    unlocked = [t for t, c in zip(taus, codes) if c in ("U+", "U-")]
    return (max(locked) if locked else None), (min(unlocked) if unlocked else None)


def to_csv(grid: TongueGrid) -> str:
    lines = ["tau,alpha,class,rho_est"]
    taus, alphas = grid.config.taus, grid.config.alphas
    for a, alpha in enumerate(alphas):
        for t, tau in enumerate(taus):
            lines.append(f"{tau:.10g},{alpha:.10g},{grid.codes[a][t]},{grid.rho[a, t]:.12g}")
    return "\n".join(lines) + "\n"


def to_pgm(grid: TongueGrid) -> str:
    """Plain PGM, one pixel row per alpha (first row = smallest alpha)."""
    h, w = grid.shape
    rows = [" ".join(str(PGM_LEVEL[c]) for c in row) for row in grid.codes]
    return f"P2\n{w} {h}\n3\n" + "\n".join(rows) + "\n"


def metadata(grid: TongueGrid) -> dict:
    locked, undecided = locked_fraction(grid)
    return {
        "config": grid.config.echo(),
        "versions": {"tonguelock": __version__, "numpy": np.__version__},
        "locked_fraction": locked,
        "undecided_fraction": undecided,
        "shape": list(grid.shape),
    }


def metadata_json(grid: TongueGrid) -> str:
    return json.dumps(metadata(grid), indent=2, sort_keys=True) + "\n"


def with_workers(cfg: ScanConfig, workers: int) -> ScanConfig:
    return replace(cfg, workers=workers)
