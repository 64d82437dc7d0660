import io

import numpy as np
import pytest

from hornfall.errors import ConfigError
from hornfall.experiments import (
    COLUMNS, SCHEMA, SweepConfig, evaluate_point, gamma_polyline, hausdorff, jump_probe,
    level_set, near_gamma, parse_axis, parse_config, read_csv, records_to_csv, run_sweep,
    wilson_halfwidth, worker_count,
)
from hornfall.theory import gamma_curve, gamma_d3


def test_only_negative_unit_point():
    rec = evaluate_point((0.0, 0.0, 0.0), n=10, trials=1, base_seed=0, point_index=0)
    assert rec.empirical_p == 1.0 and rec.phi == 1.0


def test_wilson_reference():
    # Wilson 95% interval for 50/100 is 0.5 +- 0.0962
    assert wilson_halfwidth(50, 100) == pytest.approx(0.0962, abs=1e-4)
    assert 0 < wilson_halfwidth(0, 200) < 0.02


def _small_cfg(**kw):
    base = dict(k=2, axes=[np.array([0.1]), np.linspace(0.5, 2.0, 4)], n=500, trials=12, seed=3)
    base.update(kw)
    return SweepConfig(**base)


def test_sweep_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_sweep(_small_cfg(output=str(a)))
    run_sweep(_small_cfg(output=str(b)))
    assert a.read_bytes() == b.read_bytes()
    run_sweep(_small_cfg(output=str(b), seed=4))
    assert a.read_bytes() != b.read_bytes()


def test_sweep_order_independent_of_workers(tmp_path, monkeypatch):
    monkeypatch.setenv("HORNFALL_THREADS", "2")
    monkeypatch.setattr("os.cpu_count", lambda: 4)
    assert worker_count(2) == 2
    one = records_to_csv(run_sweep(_small_cfg(workers=1)))
    two = records_to_csv(run_sweep(_small_cfg(workers=2)))
    assert one == two


def test_csv_schema():
    text = records_to_csv(run_sweep(_small_cfg()))
    lines = text.splitlines()
    assert lines[0] == f"# schema: {SCHEMA}"
    assert lines[1].split(",") == list(COLUMNS)
    rows = read_csv(text)
    assert len(rows) == 4
    assert rows[0]["d3"] == "0.0" and rows[0]["simple"] in ("true", "false")


def test_worker_cap(monkeypatch):
    monkeypatch.setenv("HORNFALL_THREADS", "1")
    assert worker_count(8) == 1
    monkeypatch.setenv("HORNFALL_THREADS", "lots")
    with pytest.raises(ConfigError):
        worker_count(2)


def test_parse_axis():
    assert parse_axis("0.5").tolist() == [0.5]
    assert parse_axis("0.1,0.3").tolist() == [0.1, 0.3]
    assert np.allclose(parse_axis("0:1:0.25"), [0, 0.25, 0.5, 0.75, 1.0])
    assert parse_axis("0.1:5.0:0.1").size == 50
    for bad in ("a", "1:0:0.1", "0:1", "0:1:0"):
        with pytest.raises(ConfigError):
            parse_axis(bad)


def test_parse_config():
    cfg = parse_config("# comment\nk=3\nd1 = 0:0.35:0.05\nd3=1,2 # trailing\nn=100\ntrials=5\nseed=9\nworkers=2\n")
    assert cfg.k == 3 and cfg.n == 100 and cfg.trials == 5 and cfg.seed == 9 and cfg.workers == 2
    assert len(cfg.points()) == 8 * 1 * 2
    assert cfg.points()[0] == (0.0, 0.0, 1.0)


@pytest.mark.parametrize("text", ["k=3\nbogus=1\n", "k=3\nd1\n", "k=2\nd3=1\n", "k=x\n", "k=4\n"])
def test_parse_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_probe_jump_at_three():
    r = jump_probe(0.1, 3.0, 0.1)
    assert r.phi_below == pytest.approx(0.905, abs=1e-3)
    assert r.phi_above == pytest.approx(0.064, abs=1e-3)
    assert r.empirical_below is None


def test_probe_discontinuous_d1_015():
    # d1 = 0.15 meets Gamma at d3 ~ 2.19; the gap does not close as the window shrinks
    d3 = gamma_d3(0.15)
    assert 2.1 < d3 < 2.3
    for w in (1e-2, 1e-4, 1e-6):
        r = jump_probe(0.15, d3, w)
        assert r.phi_below - r.phi_above > 0.3


def test_probe_continuous_d1_02():
    # d1 = 0.2 lies beyond the endpoint of Gamma: no crossing, gap vanishes with the window
    assert 0.2 > gamma_curve(2.0).d1
    for d3 in np.linspace(0.5, 8.0, 151):
        r = jump_probe(0.2, d3, 1e-3)
        assert abs(r.phi_below - r.phi_above) < 0.02


def test_probe_monte_carlo():
    r = jump_probe(0.1, 3.0, 0.3, n=4000, trials=30, seed=1)
    assert r.empirical_below > 0.6 and r.empirical_above < 0.3


def test_near_gamma():
    g = gamma_curve(3.0)
    assert near_gamma(g.d1 + 0.005, 3.0, 0.01)
    assert not near_gamma(g.d1 + 0.05, 3.0, 0.01)
    assert not near_gamma(0.1, 1.5, 0.5)


def test_level_set_of_analytic_surface_tracks_gamma():
    # analytic Phi on the 30 x 30 grid: its 0.5 contour follows Gamma for d3 >= 2.3
    d1s, d3s = np.linspace(0, 0.35, 30), np.linspace(0, 6, 30)
    from hornfall.formula import DensityVector
    from hornfall.theory import root_t0

    grid = np.array([[root_t0(DensityVector((a, 0.0, b))).phi for b in d3s] for a in d1s])
    pts = level_set(d1s, d3s, grid)
    pts = pts[(pts[:, 1] >= 2.3) & (pts[:, 1] <= 6.0)]
    assert hausdorff(pts, gamma_polyline(2.3, 6.0)) < 0.05


def test_hausdorff_basics():
    a = np.array([[0.0, 0.0], [1.0, 0.0]])
    b = np.array([[0.0, 0.5]])
    assert hausdorff(a, b) == pytest.approx(np.hypot(1.0, 0.5))
    assert hausdorff(a, np.empty((0, 2))) == np.inf
