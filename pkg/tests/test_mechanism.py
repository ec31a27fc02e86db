import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alignmech.core import (TOL, Bid, CostModel, Grid, ProfitModel, Realization,
                            ValidationError)
from alignmech.mechanism import (ArityError, PaymentScheme, UnsupportedSchemeError,
                                 check_payment_property, compute_payment, select_winner)

THETA = Grid(0, 4, 0.25)
GAMMA = Grid(0, 4, 0.05)
LINEAR = CostModel.linear()


def bids(*reports):
    return [Bid(i, r) for i, r in enumerate(reports, start=1)]


@pytest.mark.parametrize("reports,expected", [
    ((3.0, 5.0, 7.0), (1, 5.0)),
    ((3.0, 3.0), (1, 3.0)),
    ((4.0, 2.0, 2.5), (2, 2.5)),
    ((2.0, 2.0, 2.0), (1, 2.0)),
])
def test_select_winner_examples(reports, expected):
    assert select_winner(bids(*reports)) == expected


def test_select_winner_errors():
    with pytest.raises(ArityError):
        select_winner(bids(1.0))
    with pytest.raises(ValidationError):
        select_winner([Bid(1, 1.0), Bid(1, 2.0)])
    with pytest.raises(ValidationError):
        Bid(1, -0.5)


@given(st.lists(st.sampled_from([0.0, 0.5, 1.0, 1.5, 2.0, 3.7]), min_size=2, max_size=6),
       st.randoms())
def test_select_winner_permutation_covariant(reports, rnd):
    bs = bids(*reports)
    expected = select_winner(bs)
    shuffled = list(bs)
    rnd.shuffle(shuffled)
    assert select_winner(shuffled) == expected
    winner_report = reports[expected[0] - 1]
    assert all(winner_report <= r for r in reports)


def test_second_price_linear_payment():
    s = PaymentScheme.second_price_linear()
    assert compute_payment(s, 5, Realization(1, 2), reported_theta=4) == 3
    # realization above the report pays nothing
    assert compute_payment(s, 3, 3.5, reported_theta=3) == 0
    uncapped = PaymentScheme.second_price_linear(enforce_realization_cap=False)
    assert compute_payment(uncapped, 3, 3.5, reported_theta=3) == -0.5


def test_claimed_effort_payment():
    s = PaymentScheme.claimed_effort()
    assert compute_payment(s, 0, 4, 4, cost_model=LINEAR) == 0
    assert compute_payment(s, 0, 1, 4, cost_model=LINEAR) == 3


def test_report_and_realization_only_payments():
    assert compute_payment(PaymentScheme.report_only(0, 0.5), 9, 1, 3) == 1.5
    assert compute_payment(PaymentScheme.realization_only(1, -1), 9, 0.25, 3) == 0.75


def test_vcg_payment_needs_models():
    s = PaymentScheme.vcg_style()
    with pytest.raises(Exception, match="VCGStyle"):
        compute_payment(s, 3, 0.5, 2)
    # S(0.5) - Pi*(2) = 3.75 - 2.25
    p = compute_payment(s, 3, 0.5, 2, ProfitModel(), LINEAR, GAMMA)
    assert p == pytest.approx(1.5, abs=1e-12)


@given(st.floats(0, 4), st.floats(0, 1), st.floats(0, 4))
def test_truthful_winner_gets_nonnegative_second_price(theta, u, extra):
    theta_bar = theta + extra
    gamma = theta * u
    assert compute_payment(PaymentScheme(), theta_bar, gamma, theta) >= 0


def brute_force_conditions(payment, theta_grid, gamma_grid):
    """Independent re-statement: enumerate pairs and gamma <= theta_w directly."""
    cond1, cond2 = [], []
    for tw, tb in itertools.product(theta_grid.points(), repeat=2):
        gammas = [g for g in gamma_grid.points() if g < tw - TOL] + [tw]
        diffs = [payment(tb, g, tw) - (tw - g) for g in gammas]
        if tw >= tb:
            cond1 += [(tw, tb, g) for g, d in zip(gammas, diffs) if d > TOL]
        elif not any(d > TOL for d in diffs):
            cond2.append((tw, tb))
    return cond1, cond2


def test_payment_property_second_price_linear_holds():
    rep = check_payment_property(PaymentScheme(), LINEAR, THETA, GAMMA)
    assert rep.condition1_holds and rep.condition2_holds and rep.passed
    assert rep.violations == []
    assert rep.grids_used["theta"]["step"] == 0.25


def test_payment_property_realization_only_fails_condition1():
    scheme = PaymentScheme.realization_only(1, -1)
    rep = check_payment_property(scheme, LINEAR, THETA, GAMMA)
    cond1, cond2 = brute_force_conditions(lambda tb, g, tw: 1 - g, THETA, GAMMA)
    assert not rep.condition1_holds
    got = [(v["theta_w"], v["theta_bar"], v["gamma"]) for v in rep.violations
           if v["condition"] == 1]
    assert len(got) == len(cond1) > 0
    assert got == pytest.approx(cond1)
    # every witness has P > h by construction
    for v in rep.violations:
        if v["condition"] == 1:
            assert v["payment"] > v["cost"]
    assert rep.condition2_holds == (not cond2)


def test_payment_property_vcg_fails_condition2():
    profit_model = ProfitModel()
    rep = check_payment_property(PaymentScheme.vcg_style(), LINEAR, THETA, GAMMA, profit_model)
    assert rep.condition1_holds
    assert not rep.condition2_holds
    # P - h = Pi(gamma) - Pi* <= 0 pointwise, so every pair with theta_w < theta_bar fails
    n = len(THETA)
    assert sum(v["condition"] == 2 for v in rep.violations) == n * (n - 1) // 2


def test_payment_property_rejects_out_of_signature_schemes():
    for s in (PaymentScheme.report_only(0, 1), PaymentScheme.claimed_effort()):
        with pytest.raises(UnsupportedSchemeError):
            check_payment_property(s, LINEAR, THETA, GAMMA)


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 2), st.floats(0.1, 3), st.floats(0.1, 1.0), st.floats(0.02, 0.5))
def test_payment_property_second_price_linear_any_grid(lo, width, tstep, gstep):
    rep = check_payment_property(PaymentScheme(), LINEAR, Grid(lo, lo + width, tstep),
                                 Grid(0, lo + width, gstep))
    assert rep.passed
