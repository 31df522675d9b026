import json
import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bgnsar.bgn import BgnParams, bgn_pdf
from bgnsar.errors import DimensionError, DomainError, EmptyRegionError, ParseError
from bgnsar.mle import FitOptions
from bgnsar.rivals import criteria
from bgnsar.sarfit.compare import CRITERIA, compare
from bgnsar.sarfit.io import IntensityRegion, load_region, parse_rect, write_csv
from bgnsar.sarfit.mc import McConfig, ise, mc_study, parse_sweep
from bgnsar.sarfit.report import fmt, fmt_crit, to_json, to_text
from bgnsar.sarfit.stats import describe, rng_check


def _pgm(path, w, h, pixels, maxval=65535, comment=True):
    head = b"P5\n" + (b"# made in a test\n" if comment else b"") + f"{w} {h}\n{maxval}\n".encode()
    path.write_bytes(head + np.asarray(pixels, dtype=">u2").tobytes())


# --- ingestion ---------------------------------------------------------------

def test_csv_ones(tmp_path):
    f = tmp_path / "ones.csv"
    f.write_text("1,1,1\n1,1,1\n1,1,1\n")
    r = load_region(f)
    assert len(r) == 9 and np.all(r.values == 1.0)
    assert r.rejected == 0


def test_csv_comments_and_columns(tmp_path):
    f = tmp_path / "c.csv"
    f.write_text("# header\n0.5\n\n2.5\n# note\n3\n")
    np.testing.assert_array_equal(load_region(f).values, [0.5, 2.5, 3.0])


def test_csv_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3,x\n")
    with pytest.raises(ParseError, match="line 2"):
        load_region(bad)
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("1,2\n3\n")
    with pytest.raises(DimensionError):
        load_region(ragged)
    empty = tmp_path / "empty.csv"
    empty.write_text("# nothing\n")
    with pytest.raises(EmptyRegionError):
        load_region(empty)
    neg = tmp_path / "neg.csv"
    neg.write_text("-1\n0\n")
    with pytest.raises(EmptyRegionError):
        load_region(neg)


def test_pgm16_raw_values(tmp_path):
    f = tmp_path / "img.pgm"
    _pgm(f, 2, 2, [32768, 1, 65535, 7])
    r = load_region(f, "pgm16")
    np.testing.assert_array_equal(r.values, [32768, 1, 65535, 7])


def test_pgm16_rect_and_rejects(tmp_path):
    f = tmp_path / "img.pgm"
    px = np.arange(12).reshape(3, 4)  # contains one zero pixel
    _pgm(f, 4, 3, px.ravel(), comment=False)
    r = load_region(f, "pgm16", rect=(1, 1, 2, 2), channel="HV")
    np.testing.assert_array_equal(r.values, [5, 6, 9, 10])
    assert r.channel == "HV" and r.rect == (1, 1, 2, 2)
    whole = load_region(f, "pgm16")
    assert len(whole) == 11 and whole.rejected == 1
    with pytest.raises(DimensionError):
        load_region(f, "pgm16", rect=(3, 0, 2, 1))


def test_pgm16_errors(tmp_path):
    f = tmp_path / "short.pgm"
    _pgm(f, 3, 3, [1, 2, 3])
    with pytest.raises(DimensionError):
        load_region(f, "pgm16")
    g = tmp_path / "notpgm.pgm"
    g.write_bytes(b"P6\n1 1\n255\n\x00\x00\x00")
    with pytest.raises(ParseError):
        load_region(g, "pgm16")


def test_raw_f32le(tmp_path):
    f = tmp_path / "one.raw"
    f.write_bytes(bytes([0x00, 0x00, 0x80, 0x3F]))
    assert load_region(f, "raw_f32le", width=1, height=1).values.tolist() == [1.0]
    g = tmp_path / "grid.raw"
    g.write_bytes(struct.pack("<6f", 1, 2, 3, 4, 5, 6))
    r = load_region(g, "raw", rect=(0, 1, 3, 1), width=3, height=2)
    assert r.values.tolist() == [4.0, 5.0, 6.0]
    with pytest.raises(DimensionError):
        load_region(g, "raw_f32le", width=4, height=2)
    with pytest.raises(DimensionError):
        load_region(g, "raw_f32le")


def test_unknown_format(tmp_path):
    f = tmp_path / "x"
    f.write_text("1\n")
    with pytest.raises(ParseError):
        load_region(f, "tiff")


def test_parse_rect():
    assert parse_rect("1, 2,3,4") == (1, 2, 3, 4)
    with pytest.raises(ParseError):
        parse_rect("1,2,3")
    with pytest.raises(ParseError):
        parse_rect("a,b,c,d")
    with pytest.raises(DimensionError):
        parse_rect("0,0,0,5")


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(min_value=1e-300, max_value=1e300, allow_nan=False), min_size=1, max_size=50))
def test_csv_round_trip_bit_exact(tmp_path_factory, values):
    f = tmp_path_factory.mktemp("rt") / "v.csv"
    region = IntensityRegion(np.array(values))
    write_csv(region, f)
    back = load_region(f).values
    assert back.tobytes() == np.array(values, dtype=np.float64).tobytes()


# --- descriptive statistics ----------------------------------------------------

def test_describe_examples():
    d = describe(np.array([1.0, 2.0, 3.0, 4.0]))
    assert (d.mean, d.median) == (2.5, 2.5)
    assert d.sd == pytest.approx(1.2909944487358056, rel=1e-14)
    assert d.cv == pytest.approx(51.63977794943222, rel=1e-14)
    c = describe(np.full(7, 3.3))
    assert (c.sd, c.cv) == (0.0, 0.0)
    # cv is in percent: sd 1.96e-2 over mean 45.42e-3
    assert 100 * 1.96e-2 / 45.42e-3 == pytest.approx(43.15, abs=0.01)
    with pytest.raises(EmptyRegionError):
        describe(np.array([]))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(1e-3, 1e3), min_size=2, max_size=60))
def test_describe_matches_naive(values):
    d = describe(np.array(values))
    n = len(values)
    mean = math.fsum(values) / n
    srt = sorted(values)
    median = srt[n // 2] if n % 2 else 0.5 * (srt[n // 2 - 1] + srt[n // 2])
    sd = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (n - 1))
    assert d.mean == pytest.approx(mean, rel=1e-12)
    assert d.median == pytest.approx(median, rel=1e-12)
    assert d.sd == pytest.approx(sd, rel=1e-9, abs=1e-12)


# --- sampler check -----------------------------------------------------------

def test_rng_check_symmetric_peak():
    chk = rng_check(BgnParams(1, 1, 0, 1, 2), 100_000, 51, 3)
    peak = int(np.argmax(chk.histogram))
    assert chk.edges[peak] <= 0.0 <= chk.edges[peak + 1] or abs(chk.centers[peak]) < 2 * np.diff(chk.edges)[0]
    assert chk.ks_stat < 1.628 / math.sqrt(100_000)
    np.testing.assert_allclose(chk.density_curve, bgn_pdf(chk.centers, BgnParams(1, 1, 0, 1, 2)))
    assert np.sum(chk.histogram * np.diff(chk.edges)) == pytest.approx(1.0)


def test_rng_check_deterministic_and_validated():
    a = rng_check(BgnParams(0.1, 0.3, 0, 1, 2), 2000, 20, 9)
    b = rng_check(BgnParams(0.1, 0.3, 0, 1, 2), 2000, 20, 9)
    assert a.ks_stat == b.ks_stat
    np.testing.assert_array_equal(a.histogram, b.histogram)
    with pytest.raises(DomainError):
        rng_check(BgnParams(), 999)


# --- comparison --------------------------------------------------------------

@pytest.fixture(scope="module")
def gamma_report():
    x = np.random.default_rng(5).gamma(4.0, 1.0, 400)
    return compare(IntensityRegion(x, "synthetic", "HH"), FitOptions(n_starts=2))


def test_compare_winners_minimal(gamma_report):
    rep = gamma_report
    assert [m.name for m in rep.models] == ["BGN", "Gamma", "K", "G0"]
    for crit in CRITERIA:
        vals = {m.name: getattr(m.criteria, crit) for m in rep.models if m.converged}
        assert rep.winner_by[crit] == min(vals, key=vals.get)


def test_compare_criteria_recompute(gamma_report):
    rep = gamma_report
    for m in rep.models:
        assert m.criteria == criteria(m.loglik, m.k_params, rep.n)
    assert [m.k_params for m in rep.models] == [5, 2, 3, 3]
    assert rep.descriptive == describe(gamma_report_values())


def gamma_report_values():
    return np.random.default_rng(5).gamma(4.0, 1.0, 400)


def test_compare_preconditions():
    with pytest.raises(DomainError):
        compare(np.ones(20))
    with pytest.raises(DomainError):
        compare(np.r_[np.ones(40), -1.0])


def test_report_rendering(gamma_report):
    text = to_text(gamma_report)
    for name in ("BGN", "Gamma", "K", "G0"):
        assert name in text
    data = json.loads(to_json(gamma_report))
    assert data["winner_by"] == gamma_report.winner_by
    assert len(data["models"]) == 4
    assert fmt(1234567.0) == "1.23457e+06" and fmt(None) == "-" and fmt(3) == "3"
    assert fmt_crit(-12.3456) == "-12.35" and fmt_crit(None) == "-"


# --- Monte Carlo study ---------------------------------------------------------

class _Truth:
    def __init__(self, p):
        self.params, self.converged = p, True


def _truth_fitter(data, truth, opts):
    return _Truth(truth)


def test_mc_hook_gives_zero_mse():
    for scen in ("s", "beta", "alpha"):
        cfg = McConfig(replications=1, sample_sizes=(20,), scenario=scen, sweep=(1.0, 3.0))
        table = mc_study(cfg, fitter=_truth_fitter)
        assert [r.mse for r in table.rows] == [0.0, 0.0]
        assert all(r.used == 1 and r.excluded == 0 for r in table.rows)


def test_mc_deterministic_and_worker_invariant():
    cfg = McConfig(replications=2, sample_sizes=(40, 60), sweep=(1.5, 3.0), seed=11)
    a = mc_study(cfg)
    b = mc_study(cfg)
    c = mc_study(cfg, workers=2)
    assert to_json(a) == to_json(b) == to_json(c)
    assert [(r.value, r.size) for r in a.rows] == [(1.5, 40), (1.5, 60), (3.0, 40), (3.0, 60)]
    assert all(r.used + r.excluded == 2 for r in a.rows)


def test_ise_properties():
    p, q = BgnParams(1, 1, 0, 1, 2), BgnParams(1, 1, 0.3, 1, 2)
    assert ise(p, p) == 0.0
    # two normals with sd 1/sqrt(2): closed form of the squared L2 distance, less the clipped tails
    exact = 2 * (1 - math.exp(-0.3 ** 2 / 2)) / math.sqrt(2 * math.pi)
    assert ise(p, q, 4001) == pytest.approx(exact, rel=2e-3)


def test_mc_config_validation():
    with pytest.raises(DomainError):
        McConfig(replications=0)
    with pytest.raises(DomainError):
        McConfig(scenario="vary_mu")
    with pytest.raises(DomainError):
        McConfig(sweep=(0.0, 1.0))
    assert McConfig(scenario="beta").params_at(2.5) == BgnParams(1, 2.5, 0, 1, 1)


def test_parse_sweep():
    assert parse_sweep("1:5:0.5") == (1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0)
    assert parse_sweep("1, 2.5,4") == (1.0, 2.5, 4.0)
    with pytest.raises(DomainError):
        parse_sweep("1:5")
