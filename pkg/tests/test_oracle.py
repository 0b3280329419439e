import json
from fractions import Fraction

import pytest

from _reference import brute_depth_laws
from dagdepth import exact_depths
from dagdepth.errors import BudgetError, DomainError
from dagdepth.oracle import ExactDepthResult, configuration_count, dump_golden, load_golden


def _golden(fixtures_dir):
    return {d["n"]: d for d in json.loads((fixtures_dir / "oracle_k2.json").read_text())}


def _laws(res):
    return res.dist_dn, res.dist_min_half, res.dist_max_all


def test_small_examples():
    r1 = exact_depths(1, 2)
    assert r1.dist_dn == {1: Fraction(1)} and r1.mean_dn == 1
    r2 = exact_depths(2, 2)
    assert r2.mean_dn == Fraction(7, 4)
    assert r2.dist_dn == {1: Fraction(1, 4), 2: Fraction(3, 4)}
    assert r2.configs_enumerated == 4


@pytest.mark.parametrize("n", range(1, 7))
def test_matches_golden_fixture(n, fixtures_dir, backend):
    g = _golden(fixtures_dir)[n]
    res = exact_depths(n, 2, backend=backend)
    assert res.configs_enumerated == g["configs"]
    for law, key in zip(_laws(res), ("dist_dn", "dist_min_half", "dist_max_all")):
        assert {str(d): str(p) for d, p in sorted(law.items())} == g[key]
    assert str(res.mean_dn) == g["mean_dn"]
    assert str(res.mean_min_half) == g["mean_min_half"]
    assert str(res.mean_max_all) == g["mean_max_all"]


@pytest.mark.parametrize("n, k", [(3, 1), (5, 1), (3, 3), (4, 3), (2, 4)])
def test_matches_recursive_reference(n, k):
    laws, total = brute_depth_laws(n, k)
    res = exact_depths(n, k)
    assert res.configs_enumerated == total == configuration_count(n, k)
    assert _laws(res) == laws


@pytest.mark.parametrize("n, k", [(4, 2), (6, 2), (5, 3)])
def test_invariants(n, k):
    res = exact_depths(n, k)
    for law in _laws(res):
        assert sum(law.values()) == 1
    assert set(res.dist_dn) <= set(range(1, n + 1))
    assert res.mean_min_half <= res.mean_dn <= res.mean_max_all


def test_known_means_n7():
    assert exact_depths(7, 2).mean_dn == Fraction(1761269, 470400)


def test_budget():
    assert configuration_count(7, 2) == 5040**2
    with pytest.raises(BudgetError):
        exact_depths(8, 2)
    with pytest.raises(BudgetError):
        exact_depths(5, 2, budget=1000)
    with pytest.raises(DomainError):
        exact_depths(0, 2)


def test_json_round_trip(tmp_path):
    results = [exact_depths(n, 2) for n in (1, 2, 3)]
    f = tmp_path / "g.json"
    dump_golden(results, f)
    assert load_golden(f) == results
    d = results[1].to_json()
    assert d["mean_dn"] == "7/4" and d["dist_dn"] == {"1": "1/4", "2": "3/4"}
    assert ExactDepthResult.from_json(json.loads(json.dumps(d))) == results[1]
