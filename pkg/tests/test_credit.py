import math

import numpy as np
import pytest
from oracles import flat_curve

from multicurve import (
    Date,
    DayCount,
    InterpScheme,
    YieldCurve,
    add_months,
    additive_basis,
    credit_implied_basis,
    multiplicative_basis,
    pillar_interval_basis,
    recovery_factor,
    risky_forwarding_curve,
    risky_xibor,
    risky_zcb,
)
from multicurve.credit import CreditSpec, forward_survival, survival

REF = Date.of(2026, 6, 15)
DISC = flat_curve(REF, 0.03)


def two_pillar_spec(recovery=0.4):
    return CreditSpec(
        REF, recovery,
        (add_months(REF, 12), add_months(REF, 24)),
        (0.98, 0.95),
    )


class TestCreditSpec:
    def test_validation(self):
        d1, d2 = add_months(REF, 12), add_months(REF, 24)
        with pytest.raises(ValueError):
            CreditSpec(REF, 1.5, (d1,), (0.98,))
        with pytest.raises(ValueError):
            CreditSpec(REF, 0.4, (), ())
        with pytest.raises(ValueError):
            CreditSpec(REF, 0.4, (d1, d2), (0.98,))
        with pytest.raises(ValueError):
            CreditSpec(REF, 0.4, (d2, d1), (0.98, 0.95))
        with pytest.raises(ValueError):
            CreditSpec(REF, 0.4, (REF,), (0.98,))
        with pytest.raises(ValueError):
            CreditSpec(REF, 0.4, (d1,), (0.0,))
        with pytest.raises(ValueError):
            CreditSpec(REF, 0.4, (d1, d2), (0.95, 0.98))

    def test_flat_hazard_matches_closed_form(self):
        h = 0.0175
        spec = CreditSpec.flat_hazard(REF, 0.4, h)
        for t in (0.0, 0.25, 1.0, 7.5, 30.0, 60.0):
            assert spec.survival_time(t) == pytest.approx(
                math.exp(-h * t), rel=1e-13
            )
        with pytest.raises(ValueError):
            CreditSpec.flat_hazard(REF, 0.4, -0.01)

    def test_survival_is_log_linear_between_pillars(self):
        spec = two_pillar_spec()
        t_mid = (spec._time(spec.dates[0]) + spec._time(spec.dates[1])) / 2.0
        assert spec.survival_time(t_mid) == pytest.approx(
            math.sqrt(0.98 * 0.95), rel=1e-14
        )
        t_half = spec._time(spec.dates[0]) / 2.0
        assert spec.survival_time(t_half) == pytest.approx(
            math.sqrt(0.98), rel=1e-14
        )

    def test_survival_extrapolates_the_last_hazard(self):
        spec = two_pillar_spec()
        t1, t2 = spec._time(spec.dates[0]), spec._time(spec.dates[1])
        slope = math.log(0.95 / 0.98) / (t2 - t1)
        t = t2 + 3.0
        assert spec.survival_time(t) == pytest.approx(
            0.95 * math.exp(slope * 3.0), rel=1e-14
        )

    def test_survival_edge_cases(self):
        spec = two_pillar_spec()
        assert spec.survival_time(0.0) == 1.0
        assert survival(spec, REF) == 1.0
        with pytest.raises(ValueError):
            spec.survival_time(-0.5)
        with pytest.raises(ValueError):
            forward_survival(spec, spec.dates[1], spec.dates[0])


class TestRecoveryFactor:
    def test_worked_zcb_example(self):
        # unit bond, riskless discount 0.97, recovery 0.4, survival 0.98
        maturity = add_months(REF, 12)
        disc = YieldCurve(REF, [(maturity, 0.97)])
        spec = CreditSpec(REF, 0.4, (maturity,), (0.98,))
        expected = 0.97 * (1.0 - (1.0 - 0.4) * (1.0 - 0.98))
        assert expected == 0.97 * 0.988
        assert risky_zcb(disc, spec, maturity) == pytest.approx(expected, rel=1e-15)

    def test_full_recovery_is_exactly_one(self):
        spec = two_pillar_spec(recovery=1.0)
        assert recovery_factor(spec, REF, spec.dates[1]) == 1.0

    def test_certain_survival_is_exactly_one(self):
        spec = CreditSpec(REF, 0.3, (add_months(REF, 120),), (1.0,))
        assert recovery_factor(spec, REF, add_months(REF, 60)) == 1.0

    def test_monotone_in_hazard(self):
        maturity = add_months(REF, 60)
        vals = [
            risky_zcb(DISC, CreditSpec.flat_hazard(REF, 0.4, h), maturity)
            for h in (0.0, 0.01, 0.02, 0.05)
        ]
        assert vals[0] == pytest.approx(float(DISC.discount(maturity)), rel=1e-15)
        assert all(a > b for a, b in zip(vals, vals[1:]))


class TestRiskyXibor:
    def test_sits_above_the_default_free_forward(self):
        spec = CreditSpec.flat_hazard(REF, 0.4, 0.02)
        t1, t2 = add_months(REF, 12), add_months(REF, 18)
        risky = risky_xibor(DISC, spec, t1, t2)
        clean = DISC.simple_forward(t1, t2, DISC.daycount)
        assert risky > clean

    def test_collapses_at_full_recovery(self):
        spec = two_pillar_spec(recovery=1.0)
        t1, t2 = add_months(REF, 6), add_months(REF, 12)
        risky = risky_xibor(DISC, spec, t1, t2)
        clean = DISC.simple_forward(t1, t2, DISC.daycount)
        assert risky == pytest.approx(clean, rel=1e-14)

    def test_matches_its_own_definition(self):
        spec = CreditSpec.flat_hazard(REF, 0.25, 0.03)
        t1, t2 = add_months(REF, 24), add_months(REF, 30)
        tau = (t2.serial - t1.serial) / 360.0
        ratio = float(DISC.discount(t1) / DISC.discount(t2))
        gamma = recovery_factor(spec, t1, t2)
        expected = (ratio / gamma - 1.0) / tau
        assert risky_xibor(DISC, spec, t1, t2) == pytest.approx(expected, rel=1e-14)


class TestCreditImpliedBasis:
    def test_worked_additive_example(self):
        # tau = 0.5, riskless growth 1.01, recovery 0.4, survival 0.98:
        # the additive basis is 2 * 1.01 * (1/0.988 - 1), about 245 bp
        t1 = REF.add_days(180)
        t2 = t1.add_days(180)
        disc = YieldCurve(REF, [(t1, 0.9797), (t2, 0.97)])
        spec = CreditSpec(REF, 0.4, (t1, t2), (1.0, 0.98))
        mult, add = credit_implied_basis(disc, spec, t1, t2)
        gamma = 1.0 - 0.6 * 0.02
        ratio = 0.9797 / 0.97
        assert add == pytest.approx(2.0 * ratio * (1.0 / gamma - 1.0), rel=1e-13)
        assert 0.0245 < add < 0.0246
        assert mult == pytest.approx(
            (ratio / gamma - 1.0) / (ratio - 1.0), rel=1e-13
        )

    def test_degenerate_limits_are_exact(self):
        t1, t2 = add_months(REF, 12), add_months(REF, 18)
        full_r = two_pillar_spec(recovery=1.0)
        assert credit_implied_basis(DISC, full_r, t1, t2) == (1.0, 0.0)
        certain = CreditSpec(REF, 0.3, (add_months(REF, 240),), (1.0,))
        assert credit_implied_basis(DISC, certain, t1, t2) == (1.0, 0.0)

    def test_positive_basis_under_default_risk(self):
        spec = CreditSpec.flat_hazard(REF, 0.4, 0.02)
        for months in (6, 12, 60, 120):
            t1 = add_months(REF, months)
            t2 = add_months(REF, months + 6)
            mult, add = credit_implied_basis(DISC, spec, t1, t2)
            assert mult > 1.0
            assert add > 0.0


class TestTwoRoutesAgree:
    def test_forwarding_curve_reproduces_the_closed_form(self):
        spec = CreditSpec.flat_hazard(REF, 0.4, 0.02)
        dates = [add_months(REF, 6 * k) for k in range(1, 21)]
        fwd = risky_forwarding_curve(DISC, spec, dates, tenor_label="fwd_6M")
        assert fwd.tenor_label == "fwd_6M"
        grid = pillar_interval_basis(fwd, DISC, dates)
        for i, (a, b) in enumerate(zip(grid.t1_dates, grid.t2_dates)):
            mult, add = credit_implied_basis(DISC, spec, a, b)
            assert grid.mult[i] == pytest.approx(mult, rel=1e-12)
            assert grid.add[i] == pytest.approx(add, rel=1e-12)

    def test_interval_extractors_agree_pointwise(self):
        spec = CreditSpec.flat_hazard(REF, 0.25, 0.035)
        dates = [add_months(REF, 6 * k) for k in range(1, 21)]
        fwd = risky_forwarding_curve(
            DISC, spec, dates, interpolation=InterpScheme.LOG_LINEAR_DISCOUNT
        )
        for a, b in zip([DISC.reference_date] + dates[:-1], dates):
            mult, add = credit_implied_basis(DISC, spec, a, b)
            assert multiplicative_basis(fwd, DISC, a, b) == pytest.approx(
                mult, rel=1e-12
            )
            assert additive_basis(fwd, DISC, a, b) == pytest.approx(add, rel=1e-12)

    def test_empty_pillars_rejected(self):
        spec = CreditSpec.flat_hazard(REF, 0.4, 0.02)
        with pytest.raises(ValueError):
            risky_forwarding_curve(DISC, spec, [])
