import json
from fractions import Fraction

import numpy as np
import pytest

from abgeo.bodies import (CoordSubspace, antiblocking_check, box, difference_polytope, make_vpolytope,
                          minkowski_sum, negate, simplex, subcube, hanner_pos)
from abgeo.constants import r_const, zeta
from abgeo.harness.campaign import (CampaignConfig, _run, id_matches, plan, read_jsonl, records_csv, run_campaign,
                                    summarize, summary_csv, to_jsonl, trial_seed)
from abgeo.harness.checks import REGISTRY, UnknownCheck, anchor_table, ratio_report, run_check
from abgeo.harness.instances import random_antiblocking, random_family, random_pair, random_subspace
from abgeo.harness.probes import plunnecke_probe, ratio_probe, sharpness_probe, triple_volume
from abgeo.lpsum import lp_difference_volume_mc
from abgeo.numerics import LpParam
from abgeo.volume import exact_volume

P1, P2, PINF = LpParam.from_p(1), LpParam.from_p(2), LpParam.from_p("inf")
FAST = {"samples": 4000, "inclusion_samples": 50}


# instances ------------------------------------------------------------------

def test_random_antiblocking_deterministic_and_dyadic():
    a, b = random_antiblocking(3, 5, 42), random_antiblocking(3, 5, 42)
    assert a == b
    assert random_antiblocking(3, 5, 43) != a
    assert all(v.denominator <= 2 ** 16 and 0 < v <= 1 for g in a.generators for v in g)
    assert antiblocking_check(a.orbit)


def test_one_generator_gives_box():
    for s in range(5):
        K = random_antiblocking(3, 1, s)
        (g,) = K.generators
        assert K == box(*g)
        assert exact_volume(K) == g[0] * g[1] * g[2]


def test_random_helpers():
    A, B = random_pair(3, 1)
    assert (A, B) == random_pair(3, 1) and A.dim == B.dim == 3
    assert len(random_family(2, 4, 0)) == 4
    E = random_subspace(4, 2, 3)
    assert E.size == 2 and E == random_subspace(4, 2, 3)
    with pytest.raises(ValueError):
        random_antiblocking(0, 1, 0)


def test_instances_identical_across_processes():
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(2) as ex:
        got = list(ex.map(random_antiblocking, [3, 3], [4, 4], [9, 9]))
    assert got[0] == got[1] == random_antiblocking(3, 4, 9)


# registry -------------------------------------------------------------------

def test_registry_ids_and_anchor_table():
    ids = set(REGISTRY)
    for tid in ("eq2.3", "eq2.4", "eq2.6", "thm3.1", "lemma4.1", "thm4.2", "cor4.3", "thm4.4", "eq5.2",
                "thm5.4", "lemma5.5", "lemma5.7", "thm5.8", "lemma5.9", "eq.volint", "thm6.1", "thm6.3",
                "lemma6.s-shift", "lemma6.4", "thm6.5", "eq6.1"):
        assert tid in ids
    table = anchor_table()
    assert [t for t, _ in table] == sorted(ids)
    assert all(statement for _, statement in table)


def test_unknown_check_and_range():
    with pytest.raises(UnknownCheck):
        run_check("thm9.9", {"n": 2})
    with pytest.raises(ValueError):
        run_check("thm4.4", {"n": 1})


def test_signed_sum_bound_exact():
    for m in (2, 3):
        rep = run_check("cor4.3", {"n": 3, "m": m}, 5)
        assert rep.method == "exact" and rep.passed and rep.constant == zeta(3, m).exact
        assert rep.margin >= 0 and rep.stderr == 0


def test_ratio_bound_simplex_example():
    D = simplex(1, 1, 1)
    E = CoordSubspace.spanned_by(3, [0, 1])
    rep = ratio_report(D, D, E)
    assert rep.lhs == Fraction(2, 3)
    # |D - D| = binom(6,3)/6 and |P_E(D - D)| = 3, both from the decomposition
    assert rep.rhs == r_const(3, 2).exact * Fraction(20, 6) / 3
    assert rep.passed


def test_sum_over_partitions_counts_four_covers():
    rep = run_check("lemma4.1", {"n": 2, "r": 2}, 3)
    assert rep.details["covers"] == 4 and rep.method == "exact" and rep.passed


@pytest.mark.parametrize("tid", sorted(REGISTRY))
def test_every_check_passes_small(tid):
    spec = REGISTRY[tid]
    n = max(spec.min_n, 2)
    p_values = ["1", "2", "inf"] if spec.lp else [None]
    for p in p_values:
        params = dict(FAST, n=n)
        if p:
            params["p"] = p
        rep = run_check(tid, params, 7)
        assert rep.passed, rep.to_dict()
        if rep.method == "exact":
            assert rep.stderr == 0
        assert json.loads(rep.to_json())["theorem_id"] == tid


def test_exact_checks_never_report_stderr():
    records, _ = run_campaign(CampaignConfig(dims=[2], trials=2, theorems=["eq2.*", "thm4.*", "cor4.3"],
                                             samples=2000))
    assert records and all(r["method"] == "exact" for r in records)
    assert all(r["lhs_stderr"] == 0 and r["rhs_stderr"] == 0 for r in records)


# probes ---------------------------------------------------------------------

def test_triple_volume_against_oracles():
    n = 3
    B = subcube(CoordSubspace.spanned_by(n, [1, 2]))
    C = subcube(CoordSubspace.spanned_by(n, [0]))
    A = hanner_pos(n, [1, 2]).scale(Fraction(1, 2))
    assert triple_volume(A, B, C, P1) == exact_volume(difference_polytope(A, minkowski_sum(B, C)))
    hull = make_vpolytope(list(A.orbit.vertices) + list(negate(B).vertices) + list(negate(C).vertices))
    assert triple_volume(A, B, C, PINF) == exact_volume(hull)
    est = lp_difference_volume_mc(A, [B, C], P2, 200_000, 3)
    assert abs(est.value - triple_volume(A, B, C, P2)) <= 3 * est.stderr


@pytest.mark.parametrize("cid,n,kw,want", [
    ("zeta", 3, {}, Fraction(4, 3)),
    ("r", 3, {"i": 2}, Fraction(4, 3)),
    ("b", 3, {"p": P1}, Fraction(4, 3)),
    ("b", 3, {"p": PINF}, 3),
    ("nu", 3, {"i": 2, "p": PINF}, 3),
])
def test_probes_climb_to_constant(cid, n, kw, want):
    res = sharpness_probe(cid, n, **kw)
    assert res.constant == want
    assert res.nondecreasing
    assert res.final_fraction >= 0.95
    assert all(isinstance(r, Fraction) for _, r in res.ratios)
    assert max(r for _, r in res.ratios) <= want


def test_probe_limits_agree_at_p1():
    a = sharpness_probe("r", 3, i=2)
    b = sharpness_probe("nu", 3, i=2, p=P1)
    assert a.ratios == b.ratios


def test_probe_finite_p():
    res = sharpness_probe("b", 3, p=P2)
    assert res.nondecreasing and res.final_fraction >= 0.95
    assert res.to_dict()["constant"] == pytest.approx(float(res.constant))


def test_probe_errors():
    with pytest.raises(ValueError):
        ratio_probe(3, 2, P1, j=0)
    with pytest.raises(ValueError):
        plunnecke_probe(3, P1, 1, 1)
    with pytest.raises(KeyError):
        sharpness_probe("kappa", 3)


# campaign -------------------------------------------------------------------

def test_id_matches():
    assert id_matches("thm5.4", ["5.*"]) and id_matches("lemma5.7", ["5.*"])
    assert not id_matches("thm4.4", ["5.*"])
    assert id_matches("lemma6.s-shift", ["lemma6.*"])
    assert id_matches("eq2.3", ["*"])


def test_filter_selects_only_lp_checks():
    cfg = CampaignConfig(dims=[2], trials=1, theorems=["5.*"], p_values=["2"])
    tasks = plan(cfg)
    assert {t[0] for t in tasks} == {"eq5.2", "lemma5.5", "lemma5.7", "lemma5.9", "thm5.4", "thm5.8"}
    assert all(t[1]["p"] == "2" for t in tasks)


def test_trial_seeds_distinct():
    seeds = [trial_seed(1, t) for t in range(100)]
    assert len(set(seeds)) == 100 and trial_seed(1, 0) == trial_seed(1, 0)


def test_campaign_deterministic_across_jobs(tmp_path):
    outs = []
    for jobs in (1, 2):
        path = tmp_path / f"r{jobs}.jsonl"
        cfg = CampaignConfig(dims=[1, 2], trials=2, theorems=["eq2.3", "lemma6.4", "eq5.2"], samples=3000,
                             output=str(path), jobs=jobs)
        records, summary = run_campaign(cfg)
        assert summary["ok"]
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    recs = read_jsonl(tmp_path / "r1.jsonl")
    keys = [(r["theorem_id"], r["instance"]["n"], r["instance"]["seed"], str(r["instance"].get("p", "")))
            for r in recs]
    assert keys == sorted(keys)


def test_summary_and_bonferroni():
    records, summary = run_campaign(CampaignConfig(dims=[2], trials=3, theorems=["lemma6.4", "eq2.4"],
                                                   samples=3000))
    assert summary["checks"] == 6 and summary["failures"] == 0
    assert summary["per_theorem"]["lemma6.4"]["mc"] == 3
    assert summary["mc_checks"] == 3
    assert summary["expected_false_failures"] == pytest.approx(3 * 0.0013498980316301, rel=1e-4)
    assert "false failures expected" in summary["bonferroni_note"]
    assert summary_csv(summary).splitlines()[0] == "theorem_id,total,pass,fail"
    assert records_csv(records).count("\n") == 7
    assert to_jsonl(records).count("\n") == 6


def test_crash_becomes_failed_record():
    rec = _run(("thm4.4", {"n": 1}, 5, 0))
    assert rec["pass"] is False and rec["method"] == "error" and "ValueError" in rec["error"]
    assert summarize([rec])["ok"] is False


def test_io_errors_carry_path(tmp_path):
    bad = tmp_path / "missing" / "out.jsonl"
    with pytest.raises(OSError, match="out.jsonl"):
        run_campaign(CampaignConfig(dims=[1], trials=1, theorems=["eq2.3"], output=str(bad)))
    with pytest.raises(OSError, match="nothing.jsonl"):
        read_jsonl(tmp_path / "nothing.jsonl")


def test_config_validation():
    with pytest.raises(ValueError):
        CampaignConfig(trials=0)
    with pytest.raises(ValueError):
        CampaignConfig(dims=[])
