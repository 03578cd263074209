"""Synthetic market data shaped like the segmented post-2008 EUR market.

An analytic discounting curve plus four tenor curves sitting above it
by tenor-dependent instantaneous spreads generate the short-end money
market quotes; basis swap spreads are quoted directly from a decaying
term structure running from 80 bp at the 1Y maturity down to about
2 bp at 30Y for the widest tenor pair.  Everything is closed form, so
quote sets are cheap, deterministic, and independent of the curve
machinery they feed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bootstrap import InstrumentKind, InstrumentQuote
from .curve import YieldCurve
from .timegrid import Date, DayCount, add_months, generate_schedule, year_fraction

__all__ = [
    "SyntheticMarket",
    "default_market",
    "make_quote_sets",
    "make_ois_quotes",
    "BASIS_PAIR_SCALE",
    "TENOR_SPREAD_WEIGHT",
]

# Relative width of each quoted basis swap family; the 1M-vs-6M pair
# carries the full 80 bp -> 2 bp profile.
BASIS_PAIR_SCALE = {(1, 6): 1.0, (3, 6): 0.45, (6, 12): 0.5}

# Instantaneous forward spread of each tenor curve over discounting,
# as a multiple of the common decaying shape.
TENOR_SPREAD_WEIGHT = {1: 0.15, 3: 0.35, 6: 0.65, 12: 1.15}


@dataclass(frozen=True)
class SyntheticMarket:
    """Closed-form curves and quote rules for one valuation date."""

    reference_date: Date
    base_rate: float = 0.01
    long_rate: float = 0.06
    mean_reversion_years: float = 1.25
    spread_floor: float = 2e-4
    spread_peak: float = 78e-4
    spread_decay_years: float = 4.0

    def time(self, d: Date) -> float:
        return (d.serial - self.reference_date.serial) / 365.0

    def spread_scale(self, t: float) -> float:
        """Common decaying shape, 80 bp at t=1 easing to the floor."""
        return self.spread_floor + self.spread_peak * math.exp(
            -(t - 1.0) / self.spread_decay_years
        )

    def basis_quote(self, short_months: int, long_months: int, maturity: Date) -> float:
        scale = BASIS_PAIR_SCALE[(short_months, long_months)]
        return scale * self.spread_scale(self.time(maturity))

    def discount_df(self, d: Date) -> float:
        """Exact discount factor of the analytic discounting curve.

        The instantaneous forward relaxes from ``base_rate`` at t0 to
        ``long_rate`` with the given mean reversion time.
        """
        t = self.time(d)
        tau = self.mean_reversion_years
        integral = self.long_rate * t - (self.long_rate - self.base_rate) * tau * (
            1.0 - math.exp(-t / tau)
        )
        return math.exp(-integral)

    def tenor_df(self, months: int, d: Date) -> float:
        """Discount factor of the tenor-homogeneous curve for ``months``."""
        w = TENOR_SPREAD_WEIGHT[months]
        t = self.time(d)
        beta = self.spread_decay_years
        integral = w * (
            self.spread_floor * t
            + self.spread_peak
            * beta
            * math.exp(1.0 / beta)
            * (1.0 - math.exp(-t / beta))
        )
        return self.discount_df(d) * math.exp(-integral)


def default_market() -> SyntheticMarket:
    return SyntheticMarket(Date.of(2026, 6, 15))


def _act360(a: Date, b: Date) -> float:
    return year_fraction(a, b, DayCount.ACT_360)


def _depo(m: SyntheticMarket, months: int) -> InstrumentQuote:
    t0 = m.reference_date
    end = add_months(t0, months)
    rate = (1.0 / m.tenor_df(months, end) - 1.0) / _act360(t0, end)
    return InstrumentQuote(InstrumentKind.DEPOSIT, months, t0, end, rate)


def _fra_rate(m: SyntheticMarket, a: Date, b: Date, months: int) -> float:
    return (m.tenor_df(months, a) / m.tenor_df(months, b) - 1.0) / _act360(a, b)


def _fra(m: SyntheticMarket, start_m: int, end_m: int, months: int) -> InstrumentQuote:
    t0 = m.reference_date
    a, b = add_months(t0, start_m), add_months(t0, end_m)
    return InstrumentQuote(
        InstrumentKind.FRA, months, a, b, _fra_rate(m, a, b, months)
    )


def _futures(m: SyntheticMarket, start_m: int, end_m: int, months: int) -> InstrumentQuote:
    t0 = m.reference_date
    a, b = add_months(t0, start_m), add_months(t0, end_m)
    price = 100.0 * (1.0 - _fra_rate(m, a, b, months))
    return InstrumentQuote(InstrumentKind.FUTURES, months, a, b, price)


def _swap(m: SyntheticMarket, years: int, float_months: int = 6) -> InstrumentQuote:
    """Par rate of a fixed-vs-Xibor swap on the analytic curves."""
    t0 = m.reference_date
    end = add_months(t0, 12 * years)
    float_pv = 0.0
    fdates = generate_schedule(t0, end, float_months)
    for a, b in zip(fdates[:-1], fdates[1:]):
        ratio = m.tenor_df(float_months, a) / m.tenor_df(float_months, b)
        float_pv += m.discount_df(b) * (ratio - 1.0)
    ann = 0.0
    fixed = generate_schedule(t0, end, 12)
    for a, b in zip(fixed[:-1], fixed[1:]):
        ann += year_fraction(a, b, DayCount.THIRTY_360) * m.discount_df(b)
    return InstrumentQuote(
        InstrumentKind.SWAP,
        float_months,
        t0,
        end,
        float_pv / ann,
        fixed_frequency=12,
        daycount=DayCount.THIRTY_360,
    )


def _basis(
    m: SyntheticMarket, years: int, tenor: int, second: int
) -> InstrumentQuote:
    t0 = m.reference_date
    end = add_months(t0, 12 * years)
    lo, hi = sorted((tenor, second))
    return InstrumentQuote(
        InstrumentKind.BASIS_SWAP,
        tenor,
        t0,
        end,
        m.basis_quote(lo, hi, end),
        second_tenor=second,
    )


def make_quote_sets(market: SyntheticMarket | None = None) -> dict[str, list[InstrumentQuote]]:
    """Five bootstrappable quote sets keyed by curve label.

    The discounting set is overnight flavoured and self consistent, so
    its bootstrap recovers the analytic discounting curve.  Each
    forwarding set is tenor homogeneous: money market quotes come from
    the matching tenor curve, while the 1M, 3M and 12M curves are pinned
    beyond their first pillar by basis swap spreads against the 6M
    curve, quoted directly from the decaying spread profile.
    """
    m = market or default_market()
    return {
        "discount": make_ois_quotes(m),
        "fwd_6M": [
            _depo(m, 6), _fra(m, 6, 12, 6),
            *(_swap(m, y) for y in (2, 3, 4, 5, 7, 10, 15, 20, 30)),
        ],
        "fwd_3M": [
            _depo(m, 3),
            _futures(m, 3, 6, 3), _futures(m, 6, 9, 3), _futures(m, 9, 12, 3),
            *(_basis(m, y, 3, 6) for y in (2, 3, 5, 7, 10, 15, 20, 30)),
        ],
        "fwd_1M": [
            _depo(m, 1),
            *(_basis(m, y, 1, 6) for y in (1, 2, 3, 4, 5, 6, 7, 10, 15, 20, 30)),
        ],
        "fwd_12M": [
            _depo(m, 12),
            *(_basis(m, y, 12, 6) for y in (2, 3, 5, 7, 10, 15, 20, 30)),
        ],
    }


def make_ois_quotes(market: SyntheticMarket | None = None) -> list[InstrumentQuote]:
    """Overnight-indexed par quotes priced exactly on the discount curve."""
    m = market or default_market()
    t0 = m.reference_date
    quotes = []
    for months in (1, 3, 6):
        end = add_months(t0, months)
        rate = (1.0 - m.discount_df(end)) / (
            _act360(t0, end) * m.discount_df(end)
        )
        # sub-annual: a single fixed payment at maturity, same as a depo
        quotes.append(
            InstrumentQuote(InstrumentKind.DEPOSIT, months, t0, end, rate)
        )
    for years in (1, 2, 3, 5, 7, 10, 15, 20, 30):
        end = add_months(t0, 12 * years)
        ann = 0.0
        sched = generate_schedule(t0, end, 12)
        for a, b in zip(sched[:-1], sched[1:]):
            ann += _act360(a, b) * m.discount_df(b)
        rate = (1.0 - m.discount_df(end)) / ann
        quotes.append(
            InstrumentQuote(InstrumentKind.OIS, 1, t0, end, rate)
        )
    return quotes


def true_pillar_curve(
    market: SyntheticMarket,
    label: str,
    dates: list[Date],
) -> YieldCurve:
    """Analytic curve sampled onto pillars, for oracle comparisons."""
    if label == "discount":
        dfs = [market.discount_df(d) for d in dates]
    else:
        months = int(label.removeprefix("fwd_").removesuffix("M"))
        dfs = [market.tenor_df(months, d) for d in dates]
    return YieldCurve(
        market.reference_date,
        list(zip(dates, dfs)),
        tenor_label=label,
    )
