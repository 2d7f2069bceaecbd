import json
from fractions import Fraction

import pytest

from arboreal.chebotarev import (
    ChebotarevReport,
    ReportFormatError,
    SweepConfig,
    compare,
    load_report,
    primes_between,
    save_report,
    sweep,
)
from arboreal.closure import census
from arboreal.tree_core import FrobeniusSignature, standard_wn_generators


def _trial_primes(lo, hi):
    return [n for n in range(max(lo, 2), hi + 1) if all(n % d for d in range(2, int(n**0.5) + 1))]


@pytest.mark.parametrize("lo,hi", [(0, 1), (2, 2), (3, 100), (1000, 1100), (262000, 262300), (10, 5)])
def test_sieve_matches_trial_division(lo, hi):
    assert primes_between(lo, hi) == _trial_primes(lo, hi)


def test_sieve_across_segments():
    ps = primes_between(3, 600000)
    assert len(ps) == 49097  # pi(600000) - 1
    assert ps[-1] == 599999


@pytest.fixture(scope="module")
def n1_report():
    return sweep(SweepConfig(1, 1, 3, 100))


def test_sweep_n1(n1_report):
    assert n1_report.counts == {"1,1": 11, "2": 13}
    assert n1_report.skipped == []
    assert n1_report.total_primes == 24
    ps = [p for p in _trial_primes(3, 100)]
    assert sum(p % 4 == 1 for p in ps) == 11 and sum(p % 4 == 3 for p in ps) == 13


def test_empty_range():
    rep = sweep(SweepConfig(1, 2, 24, 28))
    assert rep.counts == {} and rep.skipped == [] and rep.total_primes == 0
    assert sweep(SweepConfig(1, 2, 50, 10)).total_primes == 0


def test_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(1, 1, 2, 100)
    with pytest.raises(ValueError):
        SweepConfig(1, 13, 3, 100)


def test_skipped_ramified_and_conservation():
    rep = sweep(SweepConfig(1, 3, 3, 2000))
    assert (5, "ramified") in rep.skipped
    assert rep.sampled + len(rep.skipped) == rep.total_primes == len(primes_between(3, 2000))
    for key in rep.counts:
        assert FrobeniusSignature.parse(key).depth == 3


def test_worker_invariance():
    cfg = dict(c=1, n=3, pmin=3, pmax=3000, seed=7)
    one = sweep(SweepConfig(**cfg, workers=1)).to_json()
    many = sweep(SweepConfig(**cfg, workers=3)).to_json()
    assert one == many


def test_compare_n1(n1_report):
    w1 = census(standard_wn_generators(1))
    cmp = compare(n1_report, w1)
    assert [r.diff for r in cmp.rows] == [Fraction(1, 24), Fraction(1, 24)]
    assert cmp.max_abs_difference == Fraction(1, 24)
    assert cmp.foreign == []
    assert sum(r.observed for r in cmp.rows) == 1 == sum(r.census for r in cmp.rows)


def test_compare_empty_report():
    rep = sweep(SweepConfig(1, 2, 24, 28))
    cmp = compare(rep, census(standard_wn_generators(2)))
    assert all(r.observed == 0 for r in cmp.rows)


def test_compare_foreign_and_depth_mismatch(n1_report):
    cmp = compare(n1_report, {"2": 1})
    assert cmp.foreign == ["1,1"]
    with pytest.raises(ValueError):
        compare(n1_report, census(standard_wn_generators(2)))


def test_compare_csv(n1_report):
    text = compare(n1_report, census(standard_wn_generators(1))).to_csv()
    lines = text.splitlines()
    assert lines[0] == "signature,observed,census,diff"
    sig, obs, cen, diff = lines[1].rsplit(",", 3)
    assert sig == "1,1" and float(obs) == pytest.approx(11 / 24) and float(cen) == 0.5


def test_report_round_trip(tmp_path, n1_report):
    path = tmp_path / "r.json"
    save_report(n1_report, path)
    again = load_report(path)
    assert again == n1_report
    data = json.loads(path.read_text())
    assert list(data) == ["c", "n", "pmin", "pmax", "seed", "counts", "skipped", "total_primes"]


def test_round_trip_with_skips(tmp_path):
    rep = sweep(SweepConfig(1, 3, 3, 200))
    save_report(rep, tmp_path / "r.json")
    assert load_report(tmp_path / "r.json") == rep


def test_zero_counts_kept(tmp_path):
    rep = ChebotarevReport(1, 1, 3, 10, 0, {"2": 0, "1,1": 3}, [], 3)
    save_report(rep, tmp_path / "r.json")
    assert load_report(tmp_path / "r.json").counts == {"1,1": 3, "2": 0}


def test_truncated_file_rejected(tmp_path, n1_report):
    path = tmp_path / "r.json"
    save_report(n1_report, path)
    text = path.read_text()
    path.write_text(text[: len(text) // 2])
    with pytest.raises(ReportFormatError, match="line"):
        load_report(path)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("seed"),
        lambda d: d.update(extra=1),
        lambda d: d.update(counts={"2|3": 1}),
        lambda d: d.update(counts={"2|4": 1}),
        lambda d: d.update(skipped=[[3]]),
        lambda d: d.update(n="1"),
    ],
)
def test_malformed_reports(tmp_path, n1_report, mutate):
    data = n1_report.to_dict()
    mutate(data)
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    with pytest.raises(ReportFormatError):
        load_report(path)
