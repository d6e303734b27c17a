import io
import json

import pytest

from k3cm import pipeline
from k3cm.cli import main
from k3cm.counting import load_curve
from k3cm.numfield import load_field
from k3cm.pipeline import (Config, MatchReport, PrimePlan, PrimeRecord, Scope, _conclude,
                           degree_one_primes, exterior_quotient, format_poly)


def run(*argv):
    out = io.StringIO()
    rc = main(list(argv), out)
    return rc, out.getvalue()


def test_format_poly():
    assert format_poly((1, -6, 255)) == "1 - 6*T + 255*T^2"
    assert format_poly((1, 0, 0, -1)) == "1 - T^3"
    assert format_poly((0,)) == "0"
    assert format_poly((-1, 1)) == "-1 + T"


def test_prime_plan_levels():
    plan = PrimePlan(200, 60, 20)
    assert plan.levels(17) == (1, 2, 3)
    assert plan.levels(59) == (1, 2)
    assert plan.levels(197) == (1,)
    assert plan.levels(211) == ()
    assert plan.capped(30) == PrimePlan(30, 30, 20)


def test_config_prime_bound():
    cfg = Config().with_prime_bound(40)
    assert cfg.surface_plan.bound == 40 and cfg.part_c_bound == 40 and cfg.part_c_extension == 40


def test_scope_selection():
    s = Scope.for_cases([4, 1])
    assert s.surfaces == (1,) and s.curves == (1, 4) and s.sigma == (1,)
    assert Scope.for_cases([2], "curve").surfaces == ()


def test_prime_record_verdicts():
    r = PrimeRecord(5, {1: 3}, 10)
    assert r.verdict == "pending"
    r.predicted = {1: 3}
    assert r.verdict == "ok"
    r.predicted = {1: 4}
    assert r.verdict == "mismatch"


def test_no_orbit_is_not_a_proof():
    rep = MatchReport(1, "X", 1, (), (), 1, 10, final_count=10)
    assert _conclude(rep, lambda p: {}).verdict == "inconclusive"
    rep = MatchReport(1, "X", 1, (), (), 1, 10, final_count=0)
    assert _conclude(rep, lambda p: {}).verdict == "no-survivors"


def test_exterior_quotient_degrees():
    K = load_field(1)
    E2, alg, Q = exterior_quotient(load_curve(1), K, 17)
    assert (E2.degree, alg.degree, len(Q) - 1) == (15, 3, 12)


def test_degree_one_primes():
    K = load_field(1)
    Ps = degree_one_primes(K, 12, {2, 3})
    assert len(Ps) >= 12 and all(P.f == 1 and P.e == 1 for P in Ps)
    assert len({(P.p, P.index) for P in Ps}) == len(Ps)


def test_reduced_run_is_inconclusive_not_wrong():
    # with very few primes the elimination cannot single out one orbit
    cfg = Config().with_prime_bound(5)
    rep = pipeline.match_surface(1, cfg)
    assert rep.verdict == "inconclusive" and rep.final_count > 6


# ---------------------------------------------------------------------- CLI

def test_cli_bad_primes():
    rc, text = run("bad-primes", "3")
    assert rc == 0 and "X_3: 2 7 11 19" in text


def test_cli_counts():
    rc, text = run("count-surface", "1", "--p", "17")
    assert rc == 0 and "S = 6" in text
    rc, text = run("count-curve", "1", "--p", "17")
    assert rc == 0 and "N = 12, t = 6" in text


def test_cli_enumerate():
    rc, text = run("enumerate", "--case", "psi-prime", "1", "--bad-primes", "", "--list")
    assert rc == 0
    assert "unit-compatible candidates: 12" in text
    assert text.count("orbit of size 6") == 2


def test_cli_input_errors():
    assert run("count-curve", "1", "--p", "3")[0] == 3
    assert run("count-surface", "9", "--p", "5")[0] == 3


def test_cli_usage_errors():
    with pytest.raises(SystemExit) as exc:
        run("match", "planet", "1")
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run("count-curve", "1", "--pp", "5")
    assert exc.value.code == 2


def test_cli_match_json_reduced():
    rc, text = run("--prime-bound", "7", "match", "curve", "1", "--json")
    rec = json.loads(text)
    assert rec["case"] == 1 and rec["target"] == "A"
    assert rc == (0 if rec["verdict"] == pipeline.PROVED else 1)
