import math

import numpy as np
import pytest

from gdsplit import GOLDEN_STABLE, GOLDEN_UNSTABLE, GridSpec, build_rotation, example_3_1, splitting_from_terms
from gdsplit.analysis import (
    EmpiricalMeasure,
    GdsParams,
    a_epsilon_membership,
    asymptotic_ratio_bound_check,
    check_dominated,
    check_gds,
    declared_minimality,
    liminf_probe,
    lyapunov_spectrum,
    measure_average_inf,
    minimality_probe,
    proof_bound_check,
    recurrence_analysis,
    uniform_negativity_search,
)
from gdsplit.errors import ParameterError, ResolutionError
from gdsplit.systems import ProductSystem

from conftest import E12

LS, LU = math.log(GOLDEN_STABLE), math.log(GOLDEN_UNSTABLE)


# --- classification --------------------------------------------------------


def test_params_validation():
    with pytest.raises(ParameterError) as err:
        GdsParams(lam=0.0)
    assert err.value.field == "GdsParams.lambda"
    for bad in ({"S": 0}, {"k_max": 0}, {"delta": 0.0}, {"lam": float("nan")}):
        with pytest.raises(ParameterError):
            GdsParams(**bad)


def test_check_dominated_cat_map(cat, cat_split):
    rep = check_dominated(cat, cat_split, 1, 0.2)
    assert rep.verdict == "dominated"
    assert rep.worst_ratio_log == pytest.approx(2 * LS, abs=1e-12)
    assert rep.worst_ratio_log <= math.log(0.2)
    assert "evidence" in rep.evidence


@pytest.mark.parametrize("S,lam", [(1, 0.5), (3, 0.99)])
def test_check_dominated_example_fails(ex31, ex31_splittings, S, lam):
    rep = check_dominated(ex31, ex31_splittings["E12_F3"], S, lam)
    assert rep.verdict == "not_dominated" and "conclusive" in rep.evidence
    assert rep.worst_point[0] == 0.5
    assert abs(rep.worst_ratio_log) <= 1e-12


def test_check_dominated_rotation(rot2, rot2_split):
    rep = check_dominated(rot2, rot2_split, 2, 0.9)
    assert rep.verdict == "not_dominated" and rep.worst_ratio_log == 0.0


@pytest.mark.parametrize("lam", [0.0, 1.0, 1.5])
def test_check_dominated_needs_lambda_below_one(cat, cat_split, lam):
    with pytest.raises(ParameterError):
        check_dominated(cat, cat_split, 1, lam)


def test_gds_example_verdicts(ex31, ex31_splittings):
    r1 = check_gds(ex31, ex31_splittings["E12_F3"])
    assert r1.verdict == "gds_not_dominated"
    assert r1.witness_x0.tolist() == [0.0, 0.0, 0.0]
    assert r1.witness_log_ratio == pytest.approx(LS - LU, abs=1e-12)
    r2 = check_gds(ex31, ex31_splittings["E2_F13"])
    assert r2.verdict == "gds_not_dominated"
    assert r2.details["best_witness"][0] == 0.5
    r3 = check_gds(ex31, ex31_splittings["E1_F23"])
    assert r3.verdict == "not_gds" and "conclusive" in r3.evidence
    assert r3.worst_point[0] == 0.5
    assert r3.details["violation_growth_rate_per_step"] == pytest.approx(2 * LU, abs=1e-9)
    assert r3.witness_x0 is None


def test_gds_rotation_conditions12_only(rot2, rot2_split):
    rep = check_gds(rot2, rot2_split, GdsParams(S=1, lam=1.0))
    assert rep.verdict == "conditions12_only" and rep.witness_x0 is None


def test_dominated_implies_gds(cat, cat_split, ex31):
    modified = example_3_1(beta=2.0)
    sp = splitting_from_terms(modified, *E12)
    for system, split, S, lam in ((cat, cat_split, 1, 0.2), (modified, sp, 1, 0.8), (modified, sp, 2, 0.6)):
        assert check_dominated(system, split, S, lam).verdict == "dominated"
        assert check_gds(system, split, GdsParams(S=S, lam=lam)).verdict == "dominated"


def test_k_max_monotone(ex31, ex31_splittings):
    sp = ex31_splittings["E1_F23"]
    verdicts = [check_gds(ex31, sp, GdsParams(k_max=k)).verdict for k in (1, 5, 20)]
    assert verdicts == ["not_gds"] * 3


def test_uniform_negativity(cat, cat_split, ex31, ex31_splittings):
    res = uniform_negativity_search(cat, cat_split, N_max=10)
    assert res.N == 1 and res.tau == pytest.approx(GOLDEN_STABLE**2, abs=1e-12)
    none = uniform_negativity_search(ex31, ex31_splittings["E12_F3"], N_max=30)
    assert none.N is None and not none.found


def test_uniform_negativity_soundness():
    modified = example_3_1(beta=2.0)
    sp = splitting_from_terms(modified, *E12)
    res = uniform_negativity_search(modified, sp, N_max=5)
    assert res.N == 1
    assert res.tau == pytest.approx(2 * GOLDEN_STABLE, abs=1e-12)  # g'(1/2) / lambda_u
    for tau2 in (res.tau + 1e-6, 0.5 * (res.tau + 1), 0.999):
        assert check_dominated(modified, sp, res.N, tau2).verdict == "dominated"


def test_extra_points_are_evaluated(ex31, ex31_splittings):
    grid = GridSpec((8, 2, 2), extra_points=[[0.3, 0.5, 0.5]])
    rep = check_gds(ex31, ex31_splittings["E12_F3"], grid=grid)
    assert rep.details["points_evaluated"] == 9


# --- Lyapunov ----------------------------------------------------------------


def test_lyapunov_examples(cat, ex31, rot2):
    assert np.allclose(lyapunov_spectrum(cat, [0.123, 0.456], 10**4), [-LU, LU], atol=1e-6)
    spec = lyapunov_spectrum(ex31, [0.0, 0.37, 0.81], 10**4)
    assert np.allclose(spec, [-LU, -LU, LU], atol=1e-6)
    assert np.all(lyapunov_spectrum(rot2, [0.1, 0.2], 1000) == 0.0)


def test_lyapunov_sum_rule(cat, rot2):
    assert abs(lyapunov_spectrum(cat, [0.7, 0.2], 5000).sum()) <= 1e-5
    assert abs(lyapunov_spectrum(rot2, [0.7, 0.2], 5000).sum()) <= 1e-5


def test_lyapunov_rejects_bad_n(cat):
    with pytest.raises(ParameterError):
        lyapunov_spectrum(cat, [0.1, 0.2], 0)


# --- A_eps, recurrence, proof bound --------------------------------------------


def test_a_epsilon_membership(ex31, ex31_splittings):
    sp = ex31_splittings["E12_F3"]
    assert a_epsilon_membership(ex31, sp, 1, 1.0, 0.5, [0.0, 0.3, 0.3])
    assert not a_epsilon_membership(ex31, sp, 1, 1.0, 0.5, [0.5, 0.3, 0.3])
    ratio = math.exp(2 * LS)
    assert ratio == pytest.approx((7 - 3 * math.sqrt(5)) / 2, abs=1e-12)
    with pytest.raises(ParameterError):
        a_epsilon_membership(ex31, sp, 1, 1.0, 1.0, [0.0, 0.3, 0.3])


def test_recurrence_examples(ex31, ex31_splittings, rot2, rot2_split):
    sp = ex31_splittings["E12_F3"]
    rec = recurrence_analysis(ex31, sp, 1, 1.0, 0.3, [0.25, 0.1, 0.2], 2000)
    assert rec.chi_star > 0.99 and np.all(np.diff(rec.times) > 0)
    assert abs(rec.chi_star - rec.ratio_estimate) <= 1 / math.sqrt(2000)
    fiber = recurrence_analysis(ex31, sp, 1, 1.0, 0.3, [0.5, 0.1, 0.2], 500)
    assert len(fiber.times) == 0 and fiber.chi_star == 0.0
    rot = recurrence_analysis(rot2, rot2_split, 1, 1.0, 0.01, [0.1, 0.2], 500)
    assert rot.chi_star == 0.0


def test_chi_star_grows_with_n(ex31, ex31_splittings):
    sp = ex31_splittings["E12_F3"]
    short = recurrence_analysis(ex31, sp, 1, 1.0, 0.3, [0.45, 0.1, 0.2], 20)
    long = recurrence_analysis(ex31, sp, 1, 1.0, 0.3, [0.45, 0.1, 0.2], 2000)
    assert short.chi_star < long.chi_star


def test_proof_bound_example(ex31, ex31_splittings):
    rep = proof_bound_check(ex31, ex31_splittings["E12_F3"], 1, 1.0, 0.3, [0.25, 0.1, 0.2], 1000)
    assert rep.hypothesis_met and rep.passed
    assert np.all(rep.margins >= -1e-6)
    assert rep.final_slope <= rep.predicted_slope <= math.log(0.7) * rep.record.chi_star + 1e-12
    assert rep.predicted_slope < 0


def test_proof_bound_fiber_half(ex31, ex31_splittings):
    rep = proof_bound_check(ex31, ex31_splittings["E12_F3"], 1, 1.0, 0.3, [0.5, 0.1, 0.2], 200)
    assert not rep.hypothesis_met and "hypothesis not met" in rep.reason
    assert rep.trace_rows() == []


def test_proof_bound_cat_map(cat, cat_split):
    eps = 0.6  # below 1 - lambda_s^2
    assert eps < 1 - GOLDEN_STABLE**2
    rep = proof_bound_check(cat, cat_split, 1, 1.0, eps, [0.2, 0.3], 300)
    assert rep.record.chi_star == 1.0 and rep.passed
    assert np.allclose(rep.c_values, 2 * LS * rep.visit_times, atol=1e-9)


def test_proof_bound_rejects_eps_lambda(cat, cat_split):
    with pytest.raises(ParameterError):
        proof_bound_check(cat, cat_split, 1, 0.5, 2.0, [0.2, 0.3], 10)


# --- measures and liminf ---------------------------------------------------------


def test_measure_weights_validated():
    with pytest.raises(ParameterError):
        EmpiricalMeasure(np.zeros((2, 2)), np.array([0.7, 0.7]))
    mu = EmpiricalMeasure.fiber_product([0.0, 0.0, 0.0], [1, 2], 5, seed=1)
    assert np.all(mu.points[:, 0] == 0.0) and mu.weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_measure_average_examples(ex31, ex31_splittings, rot2, rot2_split):
    sp = ex31_splittings["E12_F3"]
    sched = [1, 10, 100]
    low = measure_average_inf(ex31, sp, EmpiricalMeasure.dirac([0.0, 0.3, 0.6]), sched)
    assert low == pytest.approx(2 * LS, abs=1e-12)
    half = measure_average_inf(ex31, sp, EmpiricalMeasure.dirac([0.5, 0.3, 0.6]), sched)
    assert abs(half) <= 1e-12
    mu = EmpiricalMeasure.uniform(np.random.default_rng(0).random((10, 2)))
    assert measure_average_inf(rot2, rot2_split, mu, sched) == 0.0


def test_liminf_examples(ex31, ex31_splittings, rot2, rot2_split):
    sp = ex31_splittings["E12_F3"]
    assert liminf_probe(ex31, sp, [0.25, 0.1, 0.2], 2000, 200) < -1.9
    assert abs(liminf_probe(ex31, sp, [0.5, 0.1, 0.2], 500, 100)) <= 1e-12
    assert liminf_probe(rot2, rot2_split, [0.1, 0.2], 300, 50) == 0.0
    with pytest.raises(ParameterError):
        liminf_probe(rot2, rot2_split, [0.1, 0.2], 10, 20)


# --- minimality ------------------------------------------------------------------


def test_minimality_examples(ex31):
    golden = ProductSystem([build_rotation([(math.sqrt(5) - 1) / 2], "known-minimal")])
    assert minimality_probe(golden, [0.0], 10**5, 1000) == 1.0
    quarter = ProductSystem([build_rotation([0.25], "known-non-minimal")])
    assert minimality_probe(quarter, [0.1], 40, 1000) == pytest.approx(4 / 1000)
    frac = minimality_probe(ex31, [0.25, 0.1, 0.2], 2000, 1000, axes=[0])
    assert frac < 0.1


def test_minimality_box_guard(ex31):
    with pytest.raises(ResolutionError):
        minimality_probe(ex31, [0.1, 0.1, 0.1], 10, 1000)


def test_declared_minimality(ex31, rot2):
    assert declared_minimality(rot2) == "known-minimal"
    assert declared_minimality(ex31) == "unknown"
    pair = ProductSystem([build_rotation([0.5], "known-non-minimal"), build_rotation([0.3], "known-minimal")])
    assert declared_minimality(pair) == "known-non-minimal"


# --- asymptotic bound --------------------------------------------------------------


def test_asymptotic_bound_examples(ex31, ex31_splittings, cat, cat_split, rot2, rot2_split):
    pts = np.random.default_rng(2).random((12, 3))
    rep = asymptotic_ratio_bound_check(ex31, ex31_splittings["E12_F3"], GdsParams(), pts)
    assert rep.passed and rep.limit_slope == 0.0 and rep.C_source == "closed form"
    lam = GOLDEN_STABLE**2
    rep_cat = asymptotic_ratio_bound_check(cat, cat_split, GdsParams(lam=lam), pts[:, :2])
    assert rep_cat.passed
    assert np.all(rep_cat.normalized <= math.log(lam) + 1e-12)
    rep_rot = asymptotic_ratio_bound_check(rot2, rot2_split, GdsParams(), pts[:, :2], C="grid")
    assert rep_rot.passed and np.all(rep_rot.normalized == 0.0) and "grid estimate" in rep_rot.C_source
