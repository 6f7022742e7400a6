import math

import pytest

from lpdecode.errors import MarginNonpositive, OutOfDomain
from lpdecode.lattice import LpParams, fudge_E, fudge_Eq, lattice_sum
from lpdecode.rates import (BOUND, CONTINUOUS, CURVE_COLUMNS, DISCRETE, A_bound, W_bound,
                            comparison_curves, competitor, crossover, failure_prob,
                            failure_prob_via_gamma, mu, rate_ac, rate_wc, rate_wc_closed,
                            restricted_rate, wc_seed)

# 30-digit mpmath values
W_BOUND_P1_Q5 = 0.132843720784099103339980704574
MU_DISC_P1 = 0.790012829192986965302751630479


def test_w_bound_examples():
    L = lattice_sum(LpParams(2, 1.5), 11).value
    assert W_bound(2, 11, 0, 1.5) == pytest.approx(1 / math.sqrt(L), rel=1e-13)
    assert W_bound(1, 5, 1, 1) == pytest.approx(W_BOUND_P1_Q5, rel=1e-12)
    assert W_bound(1, 5, 1, 1) == pytest.approx(math.exp(-2) / math.sqrt(lattice_sum(LpParams(1, 1), 5).value))
    vals = [W_bound(1, 17, d, 2.0) for d in (0, 0.1, 0.5, 1, 3)]
    assert vals == sorted(vals, reverse=True)


def test_rate_wc_l2_unit_delta():
    plan = rate_wc(2, 10007, 1.0)
    assert plan.rate_bound == pytest.approx(1 / math.sqrt(2 * math.pi * math.e), abs=1e-4)
    assert plan.mode == "WC" and plan.delta == 1.0
    assert plan.s_star == pytest.approx(math.sqrt(4 * math.pi), rel=1e-2)


def test_rate_wc_small_delta_bound_method():
    assert rate_wc(2, 10007, 1e-3, method=BOUND).rate_bound == pytest.approx(0.93700, abs=2e-3)


def test_rate_wc_l1_large_delta():
    # q/delta = 10 keeps this away from the large-q limit 1/(2e); frozen value
    assert rate_wc(1, 10007, 1e3).rate_bound * 1e3 == pytest.approx(0.17468, abs=1e-4)
    assert rate_wc(1, 10 ** 7, 1e3).rate_bound * 1e3 == pytest.approx(1 / (2 * math.e), abs=1e-3)


def test_rate_wc_closed_examples():
    with pytest.raises(OutOfDomain):
        rate_wc_closed(2, 10007, 0.1)
    # approach to 1 is like delta ln(1/delta): 1e-4 sits just outside 1e-3, 1e-5 well inside
    assert rate_wc_closed(1, 10 ** 7, 1e-4) == pytest.approx(0.998910245458880654, rel=1e-12)
    assert rate_wc_closed(1, 10 ** 7, 1e-5) == pytest.approx(1, abs=1e-3)
    D = math.sqrt(2) + 1
    q = 10007
    want = (D - 1) / (D + 1) * fudge_E(1, q * math.log(D) / 4) / D
    assert rate_wc_closed(1, q, 1) == pytest.approx(want, rel=1e-14)
    assert rate_wc(1, q, 1).rate_bound == pytest.approx(want, rel=1e-6)


@pytest.mark.parametrize("p,q,delta", [(1, 17, 0.3), (1, 10007, 2.0), (2, 10007, 0.5), (2, 101, 1.2),
                                       (2, 10007, 5.0), (1, 101, 0.05)])
def test_optimizer_dominates_closed_form(p, q, delta):
    plan = rate_wc(p, q, delta)
    if plan.closed_form_bound is not None:
        assert plan.rate_bound >= plan.closed_form_bound - 1e-9


def test_mu_examples():
    assert mu(2, 1.3, 1.3) == pytest.approx(1 / math.sqrt(2))
    assert mu(1, 2.0, 2.0) == pytest.approx(0.5)
    d = mu(1, 1, 1, DISCRETE)
    assert d == pytest.approx(math.tanh(1) / math.tanh(2), rel=1e-13)
    assert d == pytest.approx(MU_DISC_P1, rel=1e-13)
    assert d > mu(1, 1, 1, CONTINUOUS)


def test_rate_ac_l2_closed_form():
    plan = rate_ac(2, 10007, 2)
    closed = fudge_Eq(2, 10007) ** 2 / (2 * math.sqrt(2))
    assert plan.closed_form_bound == pytest.approx(closed)
    assert plan.rate_bound >= closed - 1e-12
    assert plan.rate_bound == pytest.approx(0.35250, abs=1e-4)


def test_rate_ac_l1_small_r():
    assert rate_ac(1, 10007, 1e-3).rate_bound == pytest.approx(1, abs=1e-2)
    assert rate_ac(1, 10007, 1e-2).rate_bound == pytest.approx(0.96586, abs=1e-4)
    assert rate_ac(1, 10007, 1e-2, kind=DISCRETE).rate_bound == pytest.approx(1, abs=1e-2)


def test_rate_ac_l1_large_r():
    r = 200.0
    plan = rate_ac(1, 10 ** 7, r)
    assert plan.rate_bound >= math.tanh(2 / r) / 4 * (1 - 1e-6)
    assert plan.rate_bound == pytest.approx(math.tanh(2 / r) / 4, rel=5e-2)


def test_failure_prob_examples():
    args = dict(p=2, q=10007, r=2, s=2, n=256, rate_adj=0.2)
    assert failure_prob(alpha=1e-9, **args) == pytest.approx(1, abs=1e-12)
    a = failure_prob(alpha=0.5, **args)
    b = failure_prob_via_gamma(alpha=0.5, **args)
    assert a == pytest.approx(b, rel=0, abs=1e-12)
    doubled = failure_prob(p=2, q=10007, r=2, s=2, alpha=0.5, n=512, rate_adj=0.2)
    assert doubled == pytest.approx(a * a, rel=1e-12)
    with pytest.raises(MarginNonpositive):
        failure_prob(2, 10007, 2, 2, 0.5, 256, 0.5)


@pytest.mark.parametrize("p,q,r,s,alpha,n,R", [(1, 97, 1, 1.5, 0.3, 100, 0.05), (2, 97, 2, 2.1, 0.9, 96, 0.052),
                                                (1, 10007, 0.5, 0.7, 0.6, 1000, 0.3)])
def test_failure_prob_two_routes(p, q, r, s, alpha, n, R):
    a = failure_prob(p, q, r, s, alpha, n, R)
    b = failure_prob_via_gamma(p, q, r, s, alpha, n, R)
    assert a == pytest.approx(b, rel=1e-9, abs=1e-15)


def test_curve_columns_and_competitor():
    rows = comparison_curves(2, 10007, [0.7071])
    assert list(rows[0]) == list(CURVE_COLUMNS)
    assert rows[0]["competitor"] == pytest.approx(0, abs=1e-4)
    assert competitor(1, 0.3) == pytest.approx(0.7)


def test_crossovers_bound_method():
    d, R = crossover(2, 10007)
    assert d == pytest.approx(0.51797, abs=1e-3) and R == pytest.approx(0.46342, abs=1e-3)
    d, R = crossover(1, 10007)
    assert d == pytest.approx(0.78988, abs=1e-3) and R == pytest.approx(0.21012, abs=1e-3)


def test_restricted_rate():
    assert restricted_rate(0.4, 10, 10) == 0.4
    assert restricted_rate(0.4, 5, 10) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        restricted_rate(0.4, 0, 10)


@pytest.mark.parametrize("p", [1, 2])
def test_rates_in_unit_interval_and_monotone(p):
    wc = [rate_wc(p, 101, d).rate_bound for d in (0.05, 0.2, 0.5, 1.0, 2.0)]
    ac = [rate_ac(p, 101, r).rate_bound for r in (0.1, 0.5, 1.0, 3.0)]
    for seq in (wc, ac):
        assert all(0 < v <= 1 for v in seq)
        assert all(a >= b - 1e-12 for a, b in zip(seq, seq[1:]))


def test_wc_seeds():
    assert wc_seed(2, 1.0) == pytest.approx(math.sqrt(4 * math.pi))
    D = math.sqrt(2) + 1
    assert wc_seed(1, 1.0) == pytest.approx(4 / math.log(D))


def test_plan_json_fields():
    plan = rate_wc(2, 101, 0.8, rate_adj=0.1)
    assert plan.tau_suggestion == pytest.approx((math.sqrt(plan.rate_bound) - math.sqrt(0.1)) / 2)
    assert '"s_star"' in plan.to_json()


def test_a_bound_matches_definition():
    s, r = 1.7, 1.1
    L = lattice_sum(LpParams(2, s), 31).value
    assert A_bound(2, 31, r, s) == pytest.approx(s / math.hypot(r, s) / math.sqrt(L), rel=1e-13)


@pytest.mark.parametrize("p", [1, 2])
def test_ac_wc_gap(p):
    from lpdecode.lattice import c_p
    r = 1e3
    q = 10 ** 7
    ratio = rate_ac(p, q, r).rate_bound / rate_wc(p, q, r / (p ** (1 / p) * c_p(p))).rate_bound
    assert ratio == pytest.approx((math.e / 2) ** (1 / p), abs=5e-2)
