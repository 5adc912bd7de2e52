import json

import pytest

from lgdiv.families import GroupInstance
from lgdiv.linalg import Submodule
from lgdiv.models.cohomology import GModule, h1
from lgdiv.models.matgroup import (GL2Element, close, gl2_generators, is_normal, reduction_split,
                                   trivial_group)
from lgdiv.verifier import hypotheses
from lgdiv.verifier.checks import (CHECKS, ClassificationCheck, CyclicCaseCheck, CyclicFormulaCheck,
                                   DimensionCheck, InflationRestrictionCheck, LocalDefinitionCheck,
                                   MainTheoremSearch, NonCyclicCaseCheck, NonCyclicDiagonalCheck,
                                   ScalarVanishingCheck, VerificationCheck, borel_case_problems,
                                   gamma_subgroup, h_prime, kernel_in_sylow, line_eigenvalue,
                                   normal_sylow, quotient_term, shard)
from lgdiv.verifier.identities import IDENTITIES, run_identities
from lgdiv.verifier.pool import run_check
from lgdiv.verifier.report import (EXIT_CODES, FAIL, INCONCLUSIVE, PASS, CheckSpec, VerdictReport,
                                   overall_verdict, reports_to_json, reports_to_table)
from lgdiv.models.classify import classify_G1
from tests.helpers import mat

SIGMA = (1, 1, 0, 1)

REGISTRY = ["def-h1loc", "thm-2.2", "lemma-2.3", "cor-2.4", "lemma-2.5", "lemma-2.6",
            "lemma-3.1", "prop-3.2", "prop-3.3", "inf-res", "main-thm-search"]


def spec_for(check_id, **kwargs):
    kwargs.setdefault("max_groups", 6)
    return CheckSpec(check_id, **kwargs)


def test_registry_is_complete():
    assert sorted(CHECKS) == sorted(REGISTRY)
    for check_id, cls in CHECKS.items():
        assert cls.id == check_id


@pytest.mark.parametrize("p", [5, 7])
@pytest.mark.parametrize("name", sorted(IDENTITIES))
def test_identities_hold(name, p):
    checked, bad = IDENTITIES[name](p)
    assert checked > 0
    assert bad == []


def test_gamma_power_example():
    gamma = GL2Element((2, 1, 0, 2), 5)
    assert (gamma ** 4).entries == (1, 2, 0, 1)


def test_run_identities_records_counts():
    report = VerdictReport(spec_for("lemma-2.5"))
    run_identities(["gamma-power"], 5, report)
    assert report.coverage["identity:gamma-power"] == 16
    assert report.verdict == PASS


def test_hypotheses():
    sigma = close([mat(SIGMA, 5)])
    assert hypotheses.contains_zeta_p(sigma)
    assert hypotheses.rational_point(sigma) == (1, 0)
    assert hypotheses.rational_point(close(gl2_generators(5))) is None
    assert hypotheses.k1_is_k_zeta_p(close([mat((2, 0, 0, 1), 5)]))
    assert not hypotheses.k1_is_k_zeta_p(sigma)
    assert hypotheses.excludes_L(close([mat(SIGMA, 25), mat((1, 0, 0, 6), 25)]))
    assert not hypotheses.excludes_L(close([mat(SIGMA, 25)]))
    assert hypotheses.k1_is_kprime_zeta_p(mat((1, 0, 0, 2), 5))
    assert not hypotheses.k1_is_kprime_zeta_p(mat((2, 0, 0, 3), 5))
    for G in (sigma, close(gl2_generators(5)), close([mat((2, 0, 0, 1), 5)])):
        assert hypotheses.consistent(G)


def test_det_kernel_is_normal():
    G = close(gl2_generators(5))
    K = hypotheses.det_kernel(G, 5)
    assert K.order == 120
    assert is_normal(K, G)


def test_borel_case_problems_on_a_borel_group():
    G1 = close([mat((1, 0, 0, 2), 5), mat(SIGMA, 5)])
    assert borel_case_problems(classify_G1(G1), G1) == []


def test_shard_covers_everything_once():
    items = list(range(23))
    parts = [shard(items, r, 4) for r in range(4)]
    assert sum(parts, []) == items
    assert shard(items, 0, 1) == items


def test_report_verdicts():
    report = VerdictReport(spec_for("lemma-2.3"))
    assert report.verdict == PASS
    report.budget_hit = True
    assert report.verdict == INCONCLUSIVE
    report.fail({"label": "x"}, {"why": "test"})
    assert report.verdict == FAIL
    assert report.exit_code == EXIT_CODES[FAIL] == 1
    assert EXIT_CODES[INCONCLUSIVE] == 2


def test_findings_do_not_fail():
    report = VerdictReport(spec_for("main-thm-search"))
    report.find({"label": "x"}, {"flag": "possibly-non-realizable"})
    report.observe({"label": "y"}, {"note": "n"})
    assert report.verdict == PASS


def test_overall_verdict():
    ok = VerdictReport(spec_for("lemma-2.3"))
    slow = VerdictReport(spec_for("lemma-2.6"))
    slow.budget_hit = True
    bad = VerdictReport(spec_for("cor-2.4"))
    bad.fail({"label": "x"}, {})
    assert overall_verdict([ok]) == PASS
    assert overall_verdict([ok, slow]) == INCONCLUSIVE
    assert overall_verdict([ok, slow, bad]) == FAIL


def test_merge_order_does_not_matter():
    a = VerdictReport(spec_for("lemma-2.3"))
    b = VerdictReport(spec_for("lemma-2.3"))
    a.fail({"label": "b"}, {})
    b.fail({"label": "a"}, {})
    b.tested()
    one = VerdictReport(spec_for("lemma-2.3")).merge(a).merge(b).to_dict()
    two = VerdictReport(spec_for("lemma-2.3")).merge(b).merge(a).to_dict()
    assert one == two
    assert [f["subject"]["label"] for f in one["failures"]] == ["a", "b"]


def test_timings_are_opt_in():
    report = VerdictReport(spec_for("lemma-2.3"))
    assert "elapsed" not in report.to_dict()
    assert "elapsed" in report.to_dict(timings=True)
    payload = json.loads(reports_to_json([report]))
    assert payload["verdict"] == PASS
    assert "lemma-2.3" in reports_to_table([report])


def test_base_check_needs_examine():
    with pytest.raises(NotImplementedError):
        VerificationCheck().examine(None, None, None)


def test_scalar_vanishing_runs_clean():
    check = ScalarVanishingCheck(max_groups=20, progress=False)
    report = check.run(spec_for("lemma-2.3", max_groups=20, n=1))
    assert report.verdict == PASS
    assert report.groups_tested == 20


def test_scalar_vanishing_skips_groups_without_scalars():
    check = ScalarVanishingCheck(progress=False)
    report = VerdictReport(spec_for("lemma-2.3"))
    inst = GroupInstance("sigma", "unipotent", 5, [SIGMA])
    check.examine(inst, inst.close(100), report)
    assert report.skipped["no-scalar"] == 1
    assert report.verdict == PASS


def test_local_definition_check():
    check = LocalDefinitionCheck(families={"random": {"count": 30, "cyclic_only": True},
                                           "borel": {}}, progress=False)
    report = check.run(spec_for("def-h1loc", max_groups=12, n=1))
    assert report.verdict == PASS
    assert report.coverage["cyclic"] > 0


def test_cyclic_formula_check_mod_5():
    check = CyclicFormulaCheck(progress=False)
    report = check.run(CheckSpec("lemma-3.1", p=5, n=1))
    assert report.verdict == PASS
    assert report.groups_tested == len(check.instances(CheckSpec("lemma-3.1", p=5, n=1)))


def test_classification_check_runs_identities():
    check = ClassificationCheck(families={"borel": {}}, progress=False)
    report = check.run(spec_for("lemma-2.5", max_groups=4))
    assert report.coverage["identity:gamma-power"] == 16
    assert report.verdict == PASS


def test_inflation_restriction_check():
    check = InflationRestrictionCheck(families={"borel": {"lift": {"random_slices": 0, "perturb": False}}},
                                      progress=False)
    report = check.run(spec_for("inf-res", max_groups=3))
    assert report.verdict == PASS
    assert report.groups_tested > 0


def test_main_theorem_search_reports_findings_not_failures():
    check = MainTheoremSearch(families={"unipotent": {}}, progress=False)
    report = check.run(spec_for("main-thm-search", max_groups=10))
    assert report.failures == []
    assert report.verdict == PASS


def test_zero_budget_is_inconclusive():
    check = ScalarVanishingCheck(progress=False)
    report = check.run(spec_for("lemma-2.3", budget_secs=0.0, n=1))
    assert report.budget_hit
    assert report.verdict == INCONCLUSIVE


def test_cap_skips_are_counted():
    check = ScalarVanishingCheck(families={"full": {}}, progress=False)
    report = check.run(spec_for("lemma-2.3", n=1, cap=50))
    assert report.skipped["cap"] == 2
    assert report.groups_tested == 0


def test_runs_are_reproducible():
    check = LocalDefinitionCheck(families={"random": {"count": 10}}, progress=False)
    a = check.run(spec_for("def-h1loc", max_groups=10, n=1, seed=11)).finalize().to_dict()
    b = check.run(spec_for("def-h1loc", max_groups=10, n=1, seed=11)).finalize().to_dict()
    assert json.dumps(a) == json.dumps(b)


@pytest.mark.slow
def test_worker_count_does_not_change_the_report():
    spec = spec_for("def-h1loc", max_groups=16, n=1)
    check = LocalDefinitionCheck(families={"random": {"count": 16}, "borel": {}}, progress=False)
    one = run_check(check, spec, workers=1).to_dict()
    three = run_check(check, spec, workers=3).to_dict()
    assert one == three



def lift_families(name, **lift):
    params = {"random_slices": 0, "perturb": False}
    params.update(lift)
    return {name: {"lift": params}}


def test_noncyclic_diagonal_check():
    check = NonCyclicDiagonalCheck(families={"split-diagonal": {}}, progress=False)
    report = check.run(spec_for("cor-2.4", max_groups=40, n=1))
    assert report.coverage["level-1"] > 0
    assert report.skipped["cyclic-GD"] > 0
    assert report.failures == []


def test_dimension_check_covers_several_dimensions():
    check = DimensionCheck(families=lift_families("unipotent"), progress=False)
    report = check.run(spec_for("lemma-2.6", max_groups=6))
    assert report.coverage["dim-1"] > 0
    assert report.coverage["dim-3"] > 0
    assert report.skipped["dim-2"] == 1
    assert report.coverage["sylow-loc-zero"] == report.groups_tested
    assert report.failures == []


def test_cyclic_case_check_runs_the_quotient_engine():
    check = CyclicCaseCheck(families=lift_families("split-diagonal", slices=["scalar"]), progress=False)
    report = check.run(spec_for("prop-3.2", max_groups=6))
    assert report.coverage["engine"] >= 2
    assert report.coverage["identity:lift-minus-identity"] > 0
    assert report.failures == []


def test_noncyclic_case_check_on_borel_lifts():
    check = NonCyclicCaseCheck(families=lift_families("borel", slices=["scalar"]), progress=False)
    report = check.run(spec_for("prop-3.3", max_groups=8))
    assert report.skipped["cyclic"] == 2
    assert report.coverage["borel"] == 6
    assert report.coverage["h-prime-ok"] == 6
    assert report.coverage["lambda1-one"] == 3
    assert report.coverage["h-prime-term"] == 3
    assert report.failures == []


def invariant_line(G1):
    return Submodule.span([(1, 0)], G1.modulus, 2)


def test_noncyclic_case_term_vanishes_on_a_borel_lift():
    # <diag(7,1), sigma, 6I> mod 25: H' = <sigma~>, G/H' cyclic of order 20
    G = close([mat((7, 0, 0, 1), 25), mat(SIGMA, 25), mat((6, 0, 0, 6), 25)])
    G1, Hk = reduction_split(G)
    cls = classify_G1(G1)
    inst = GroupInstance("rho-sigma", "borel-lift", 25, [(7, 0, 0, 1), SIGMA, (6, 0, 0, 6)])
    check = NonCyclicCaseCheck(progress=False)
    report = VerdictReport(spec_for("prop-3.3"))
    check.mechanics(inst, G, G1, Hk, cls, report, {})
    assert report.coverage["h-prime-term"] == 1
    assert report.failures == []
    term = quotient_term(G, h_prime(G, invariant_line(G1)), line=invariant_line(G1))
    assert term["cyclic"] and term["onto"]
    assert term["fixed_invariants"] == [25]
    assert term["eigenvalue"] not in (None, 1)


def kernel_pair():
    # <sigma~, I + 5 E_21> lies in SL_2(Z/25) and meets the kernel in its trace-zero part
    return close([mat(SIGMA, 25), mat((1, 0, 5, 1), 25)])


def test_gamma_subgroup_against_a_scan():
    G = kernel_pair()
    assert G.order == 625
    scan = [g for g in G.elements if g.reduce(5).is_identity() and int(g.det()) % 25 == 1]
    Gamma = gamma_subgroup(G)
    assert Gamma.order == len(scan) == 125
    assert is_normal(Gamma, G)


def test_h_prime_against_a_scan():
    G = kernel_pair()
    for v, want in (((1, 0), 625), ((0, 1), 125)):
        Hp = h_prime(G, Submodule.span([v], 5, 2))
        scan = [g for g in G.elements if int(g.det()) % 25 == 1 and g.reduce(5).act(v) == v]
        assert Hp.order == len(scan) == want


def test_kernel_in_sylow():
    G = kernel_pair()
    P = normal_sylow(G)
    assert P.order == G.order
    _, Hk = reduction_split(G)
    assert kernel_in_sylow(P, Hk)
    assert normal_sylow(close(gl2_generators(5))) is None


def test_quotient_term_of_the_unipotent_lift():
    G = close([mat(SIGMA, 25)])
    N = close([mat(SIGMA, 25) ** 5])
    term = quotient_term(G, N, line=Submodule.span([(1, 0)], 5, 2))
    assert (term["quotient_order"], term["fixed_order"]) == (5, 125)
    assert sorted(term["fixed_invariants"]) == [5, 25]
    assert term["cyclic"]
    assert not term["onto"]
    assert term["eigenvalue"] == 1


def test_quotient_term_of_a_split_torus_element():
    G = close([mat((2, 0, 0, 3), 25)])
    term = quotient_term(G, trivial_group(25), line=Submodule.span([(1, 0)], 5, 2))
    assert term["quotient_order"] == 20
    assert term["cyclic"] and term["onto"]
    assert term["h1"]["order"] == 1
    assert term["eigenvalue"] != 1


def test_line_eigenvalue():
    g = mat((2, 1, 0, 3), 5)
    assert line_eigenvalue(g, (1, 0)) == 2
    assert line_eigenvalue(g, (0, 1)) is None


class NonzeroH1Check(VerificationCheck):
    """ Fails on every group with nonzero H^1, to exercise replay. """

    id = "h1-nonzero"
    families = {"unipotent": {}, "split-diagonal": {}}

    def examine(self, inst, G, report):
        H = h1(G, GModule(G.modulus))
        report.tested()
        if not H.is_trivial():
            report.fail(inst.to_dict(), {"order": G.order, "invariants": list(H.invariants)})


def test_replay_reproduces_failure_data():
    check = NonzeroH1Check(progress=False)
    spec = spec_for("h1-nonzero", max_groups=10, n=1)
    report = check.run(spec).finalize()
    assert len(report.failures) == 2
    for failure in report.failures:
        assert check.replay(spec, failure) == [failure["data"]]


def test_replay_of_identity_failures(monkeypatch):
    monkeypatch.setitem(IDENTITIES, "broken", lambda p: (1, [{"p": p}]))
    report = VerdictReport(spec_for("lemma-2.5"))
    run_identities(["broken", "gamma-power"], 5, report)
    [failure] = report.failures
    check = ClassificationCheck(progress=False)
    assert check.replay(report.spec, failure) == [{"p": 5}]
    held = {"subject": {"identity": "gamma-power", "p": 5}, "data": {"a": 2}}
    assert check.replay(report.spec, held) == []
