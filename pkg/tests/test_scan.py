import json

import numpy as np
import pytest

from tonguelock.locking import Budget, Locked, locked_certificate
from tonguelock.scan import (ScanConfig, TongueGrid, locked_fraction, metadata_json, row_boundary,
                             row_fraction, to_csv, to_pgm, tongue_scan, with_workers)

FAST = Budget(n_list=(512, 2048), eps_list=(0.02, 0.005), grid_x=32, grid_y=32)


@pytest.fixture(scope="module")
def small_grid():
    cfg = ScanConfig(tau_range=(0.0, 0.2), tau_count=16, alpha_range=(0.2, 0.8), alpha_count=3,
                     budget=FAST, rho_n=2048)
    return tongue_scan(cfg)


def test_two_by_two_shape():
    grid = tongue_scan(ScanConfig(tau_count=2, alpha_count=2, budget=FAST, rho_n=256))
    assert grid.shape == (2, 2)
    assert all(c in ("L", "U+", "U-", "?") for row in grid.codes for c in row)
    assert to_csv(grid).count("\n") == 5


def test_config_guards():
    with pytest.raises(ValueError):
        ScanConfig(alpha_range=(0.0, 0.5))
    with pytest.raises(ValueError):
        ScanConfig(alpha_range=(0.2, 1.0))
    with pytest.raises(ValueError):
        ScanConfig(tau_count=1)


def test_boundary_rows(small_grid):
    cfg = small_grid.config
    cell = (cfg.tau_range[1] - cfg.tau_range[0]) / (cfg.tau_count - 1)
    for a, alpha in enumerate(cfg.alphas):
        last_l, first_u = row_boundary(small_grid, a)
        edge = alpha / (2 * np.pi)
        assert abs(last_l - edge) <= cell
        assert abs(first_u - edge) <= cell


def test_row_fraction_grows_with_alpha(small_grid):
    assert row_fraction(small_grid, 2) >= row_fraction(small_grid, 0)
    cfg = small_grid.config
    assert row_fraction(small_grid, 1) == pytest.approx((0.5 / (2 * np.pi)) / 0.2, abs=1.5 / cfg.tau_count)


def test_witnesses_recheck(small_grid):
    cfg = small_grid.config
    for w, (a, t) in zip(small_grid.witnesses, np.ndindex(small_grid.shape)):
        if isinstance(w, Locked):
            fam = cfg.family(cfg.taus[t], cfg.alphas[a])
            assert locked_certificate(fam, cfg.base, w.strip, w.delta, w.steps) is not None


def test_all_undecided_fraction():
    cfg = ScanConfig(tau_count=2, alpha_count=2)
    grid = TongueGrid(cfg, (("?", "?"), ("?", "?")), np.zeros((2, 2)))
    assert locked_fraction(grid) == (0.0, 1.0)


def test_exports(small_grid):
    csv = to_csv(small_grid).splitlines()
    assert csv[0] == "tau,alpha,class,rho_est"
    assert len(csv) == 1 + 16 * 3
    # row-major in alpha then tau
    assert csv[1].split(",")[1] == csv[16].split(",")[1]
    pgm = to_pgm(small_grid).split("\n")
    assert pgm[:3] == ["P2", "16 3", "3"]
    meta = json.loads(metadata_json(small_grid))
    assert meta["shape"] == [3, 16]
    assert "workers" not in meta["config"]


def test_determinism_across_workers():
    cfg = ScanConfig(tau_range=(0.02, 0.12), tau_count=4, alpha_range=(0.3, 0.6), alpha_count=2,
                     budget=FAST, rho_n=1024)
    a = tongue_scan(cfg)
    b = tongue_scan(with_workers(cfg, 2))
    for export in (to_csv, to_pgm, metadata_json):
        assert export(a) == export(b)
