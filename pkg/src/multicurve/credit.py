"""A credit explanation of the tenor basis.

Model an interbank deposit as defaultable with recovery R and survival
curve Q.  A rolling lender can step out at each fixing, so only one
period of default risk is priced into each floating coupon; the index
rate then sits above the default-free forward and the gap between the
two reproduces a tenor basis.

Two routes to that basis must agree: the closed form below, and
building a forwarding curve whose pillar forwards equal the risky rate
and handing it to the generic basis functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import YieldCurve
from .interp import InterpScheme
from .timegrid import Date, DayCount, year_fraction

__all__ = [
    "CreditSpec",
    "survival",
    "forward_survival",
    "recovery_factor",
    "risky_zcb",
    "risky_xibor",
    "credit_implied_basis",
    "risky_forwarding_curve",
]


@dataclass(frozen=True)
class CreditSpec:
    """Recovery rate plus a survival term structure.

    Survival probabilities interpolate log-linearly in time (constant
    hazard per segment) with the final hazard extended flat, anchored
    at Q(t0) = 1.
    """

    reference_date: Date
    recovery: float
    dates: tuple[Date, ...]
    survival: tuple[float, ...]

    def __post_init__(self):
        if not 0.0 <= self.recovery <= 1.0:
            raise ValueError("recovery must lie in [0, 1]")
        if not self.dates:
            raise ValueError("survival curve needs at least one pillar")
        if len(self.dates) != len(self.survival):
            raise ValueError("dates and survival probabilities must pair up")
        serials = [d.serial for d in self.dates]
        if any(b <= a for a, b in zip(serials, serials[1:])):
            raise ValueError("survival pillar dates must be strictly increasing")
        if self.dates[0].serial <= self.reference_date.serial:
            raise ValueError("first survival pillar must lie after t0")
        probs = list(self.survival)
        if any(not 0.0 < q <= 1.0 for q in probs):
            raise ValueError("survival probabilities must lie in (0, 1]")
        if any(b > a for a, b in zip(probs, probs[1:])):
            raise ValueError("survival probabilities cannot increase")

    @classmethod
    def flat_hazard(
        cls,
        reference_date: Date,
        recovery: float,
        hazard: float,
        horizon_years: int = 50,
    ) -> "CreditSpec":
        """Constant-hazard spec: Q(t) = exp(-hazard * t) at every t."""
        if hazard < 0.0:
            raise ValueError("hazard must be non-negative")
        pillar = Date(reference_date.serial + 365 * horizon_years)
        q = float(np.exp(-hazard * horizon_years))
        return cls(reference_date, recovery, (pillar,), (q,))

    def _time(self, d: Date) -> float:
        return (d.serial - self.reference_date.serial) / 365.0

    def survival_time(self, t: float) -> float:
        """Q(t0, t) for an internal-clock time in years."""
        if t < 0.0:
            raise ValueError("no survival before the reference date")
        if t == 0.0:
            return 1.0
        ts = np.array([0.0] + [self._time(d) for d in self.dates])
        lnq = np.array([0.0] + [np.log(q) for q in self.survival])
        if t >= ts[-1]:
            if len(ts) == 1:
                return 1.0
            slope = (lnq[-1] - lnq[-2]) / (ts[-1] - ts[-2])
            return float(np.exp(lnq[-1] + slope * (t - ts[-1])))
        return float(np.exp(np.interp(t, ts, lnq)))

    def __call__(self, d: Date) -> float:
        return self.survival_time(self._time(d))


def survival(spec: CreditSpec, d: Date) -> float:
    """Survival probability Q(t0, T)."""
    return spec(d)


def forward_survival(spec: CreditSpec, t1: Date, t2: Date) -> float:
    """Survival over (T1, T2) conditional on surviving to T1."""
    if not t1 < t2:
        raise ValueError("forward survival needs T1 < T2")
    return spec(t2) / spec(t1)


def recovery_factor(spec: CreditSpec, t1: Date, t2: Date) -> float:
    """Expected payoff fraction R + (1-R) Q of a unit due at T2.

    Written as 1 - (1-R)(1-Q) so that full recovery or certain
    survival gives exactly 1 with no rounding residue.
    """
    q = forward_survival(spec, t1, t2)
    return 1.0 - (1.0 - spec.recovery) * (1.0 - q)


def _spot_recovery_factor(spec: CreditSpec, d: Date) -> float:
    q = spec(d)
    return 1.0 - (1.0 - spec.recovery) * (1.0 - q)


def risky_zcb(disc: YieldCurve, spec: CreditSpec, maturity: Date) -> float:
    """Price of a defaultable unit zero-coupon bond, P_d * [R + (1-R) Q]."""
    return float(disc.discount(maturity)) * _spot_recovery_factor(spec, maturity)


def risky_xibor(
    disc: YieldCurve,
    spec: CreditSpec,
    t1: Date,
    t2: Date,
    daycount: DayCount | None = None,
) -> float:
    """Index fixing over (T1, T2) implied by one period of default risk.

    The lender refreshes its counterparty each period, so the forward
    grows by the default-free ratio divided by the period recovery
    factor:

        1 + tau * L = [P_d(T1) / P_d(T2)] / [R + (1-R) Q(T1, T2)]
    """
    tau = year_fraction(t1, t2, daycount or disc.daycount)
    p = np.atleast_1d(disc.discount([t1, t2]))
    gamma = recovery_factor(spec, t1, t2)
    return float((p[0] / p[1]) / gamma - 1.0) / tau


def credit_implied_basis(
    disc: YieldCurve,
    spec: CreditSpec,
    t1: Date,
    t2: Date,
    daycount: DayCount | None = None,
) -> tuple[float, float]:
    """Closed-form (multiplicative, additive) basis from default risk.

    additive  = (1/tau) (P1/P2) (1/gamma - 1)
    multiplicative = ((P1/P2)/gamma - 1) / (P1/P2 - 1)

    Both collapse to (1, 0) exactly at full recovery or certain
    survival.
    """
    tau = year_fraction(t1, t2, daycount or disc.daycount)
    p = np.atleast_1d(disc.discount([t1, t2]))
    ratio = float(p[0] / p[1])
    gamma = recovery_factor(spec, t1, t2)
    add = (ratio / gamma - ratio) / tau
    mult = (ratio / gamma - 1.0) / (ratio - 1.0)
    return mult, add


def risky_forwarding_curve(
    disc: YieldCurve,
    spec: CreditSpec,
    pillar_dates: list[Date],
    interpolation: InterpScheme | None = None,
    tenor_label: str = "custom",
) -> YieldCurve:
    """Forwarding curve whose pillar-to-pillar forwards are risky rates.

    Recursion from P(t0) = 1:

        P_f(T_i) = P_f(T_i-1) * [P_d(T_i) / P_d(T_i-1)] * gamma_i

    with gamma_i the recovery factor over (T_i-1, T_i).  Feeding the
    result to the generic basis extractors on the same intervals must
    reproduce ``credit_implied_basis``.
    """
    if not pillar_dates:
        raise ValueError("need at least one pillar date")
    p_d = np.atleast_1d(disc.discount(pillar_dates))
    pillars = []
    prev_date = disc.reference_date
    prev_pd = 1.0
    prev_pf = 1.0
    for d, pd_ in zip(pillar_dates, p_d):
        gamma = recovery_factor(spec, prev_date, d)
        pf = prev_pf * (pd_ / prev_pd) * gamma
        pillars.append((d, pf))
        prev_date, prev_pd, prev_pf = d, pd_, pf
    return YieldCurve(
        disc.reference_date,
        pillars,
        interpolation or disc.interpolation,
        disc.daycount,
        tenor_label=tenor_label,
    )
