import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topodec import bench
from topodec.bench import CurvePoint, find_threshold, wilson_interval
from topodec.codes import build_lattice
from topodec.decoders import MWPMDecoder, RemovalDecoder
from topodec.exgraph import build_graph


@given(st.integers(1, 10_000), st.data())
@settings(max_examples=200, deadline=None)
def test_wilson_contains_estimate(trials, data):
    k = data.draw(st.integers(0, trials))
    lo, hi = wilson_interval(k, trials)
    assert 0.0 <= lo <= k / trials <= hi <= 1.0


def test_wilson_known_value():
    # 10/100 at 95%: standard tabulated interval
    lo, hi = wilson_interval(10, 100)
    assert lo == pytest.approx(0.05523, abs=1e-4)
    assert hi == pytest.approx(0.17437, abs=1e-4)


def test_wilson_shrinks_with_trials():
    w1 = np.subtract(*wilson_interval(100, 1000)[::-1])
    w2 = np.subtract(*wilson_interval(1000, 10_000)[::-1])
    assert w2 < w1 / 3


def test_parse_p_range():
    ps = bench.parse_p_range("0.14:0.24:0.01")
    assert len(ps) == 11
    assert ps[0] == 0.14 and ps[-1] == 0.24
    assert bench.parse_p_range("0.1,0.2") == [0.1, 0.2]
    with pytest.raises(ValueError):
        bench.parse_p_range("0.2:0.1:0.01")
    with pytest.raises(ValueError):
        bench.parse_p_range("0.1:0.2")


def _synthetic(p_th, distances=(5, 7, 9), grid=None, trials=10**9):
    grid = grid if grid is not None else [round(0.10 + 0.01 * i, 4) for i in range(15)]
    pts = []
    for d in distances:
        for p in grid:
            pf = 0.5 * (p / p_th) ** ((d + 1) / 2) / (1 + (p / p_th) ** ((d + 1) / 2))
            pts.append(CurvePoint("toric", d, "bitphase", p, trials, int(round(pf * trials))))
    return pts


@pytest.mark.parametrize("p_th", [0.155, 0.19, 0.2033])
def test_threshold_recovers_synthetic_crossing(p_th):
    est = find_threshold(_synthetic(p_th))
    assert est.found
    assert est.p_th == pytest.approx(p_th, abs=2e-3)
    assert len(est.crossings) == 2


def test_threshold_exact_on_grid_point():
    est = find_threshold(_synthetic(0.17))
    assert est.p_th == pytest.approx(0.17, abs=1e-6)


def test_no_crossing_reported():
    est = find_threshold(_synthetic(0.5))
    assert not est.found
    assert "no crossing" in est.message
    assert "# crossing none" in bench.format_csv(_synthetic(0.5), est)


def test_single_distance_has_no_threshold():
    est = find_threshold(_synthetic(0.19, distances=(5,)))
    assert not est.found


def test_last_sign_change_used():
    # noisy small-p region flips sign early; the real crossing is later
    pts = []
    for d, vals in [(5, [0.0010, 0.05, 0.10, 0.20]), (7, [0.0011, 0.03, 0.09, 0.25])]:
        for p, v in zip([0.10, 0.12, 0.14, 0.16], vals):
            pts.append(CurvePoint("toric", d, "bitphase", p, 10**6, int(v * 10**6)))
    est = find_threshold(pts)
    assert 0.14 < est.p_th < 0.16


def test_csv_and_json_round_trip():
    pts = _synthetic(0.19, trials=20_000)
    est = find_threshold(pts)
    text = bench.format_csv(pts, est)
    lines = text.splitlines()
    assert lines[0] == ",".join(bench.CSV_COLUMNS)
    assert lines[-1].startswith("# crossing p_th=")
    assert "method=pairwise-crossing" in lines[-1]
    assert bench.read_csv(text) == pts
    import json

    doc = json.loads(bench.format_json(pts, est))
    assert len(doc["points"]) == len(pts)
    assert doc["threshold"]["p_th"] == pytest.approx(est.p_th)


def test_curve_point_fields():
    pt = CurvePoint("color", 5, "depol", 0.1, 1000, 100)
    assert pt.p_fail == 0.1
    assert pt.stderr == pytest.approx(math.sqrt(0.09 / 1000))
    assert pt.row()[3] == "0.100000"


def test_estimate_failure_reproducible():
    lat = build_lattice("toric", 5)
    g = build_graph(lat)
    dec = MWPMDecoder(g)
    a = bench.estimate_failure(lat, g, dec, "depol", 0.12, 3000, seed=5, block_size=1000)
    b = bench.estimate_failure(lat, g, dec, "depol", 0.12, 3000, seed=5, block_size=1000)
    c = bench.estimate_failure(lat, g, dec, "depol", 0.12, 3000, seed=6, block_size=1000)
    assert a == b
    assert a != c


def test_shared_failures_match_individual_runs():
    lat = build_lattice("color", 3)
    g = build_graph(lat)
    dec = RemovalDecoder(g)
    flags = bench.shared_failures(lat, [dec, dec], "bitphase", 0.1, 2500, seed=1, block_size=1000)
    assert flags.shape == (2, 2500)
    assert np.array_equal(flags[0], flags[1])
    pt = bench.estimate_failure(lat, g, dec, "bitphase", 0.1, 2500, seed=1, block_size=1000)
    assert pt.failures == flags[0].sum()


def test_failure_rate_increases_with_p():
    lat = build_lattice("toric", 5)
    g = build_graph(lat)
    dec = MWPMDecoder(g)
    rates = [bench.estimate_failure(lat, g, dec, "bitphase", p, 4000, seed=2).p_fail for p in (0.04, 0.1, 0.2)]
    assert rates[0] < rates[1] < rates[2]


def test_bad_recovery_is_caught():
    lat = build_lattice("toric", 3)
    g = build_graph(lat)

    class Broken(RemovalDecoder):
        name = "broken"

        def decode_batch(self, syndromes):
            return np.zeros((len(syndromes), 2 * lat.n), dtype=np.uint8)

    with pytest.raises(RuntimeError):
        bench.estimate_failure(lat, g, Broken(g), "depol", 0.2, 500, seed=0)
