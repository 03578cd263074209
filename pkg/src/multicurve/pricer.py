"""Pricing of linear and optional rate instruments under two curves.

Cashflows are projected on the forwarding curve of their tenor and
discounted on the discounting curve.  A forward projected this way is
not a martingale under the discounting measure; the correction enters
as a multiplicative adjustment on the forward (see :mod:`.quanto`).
Option payoffs then use the adjusted forward inside the standard
lognormal (Black) formula with zero residual drift:

    Bl[F, K, var, w] = w * [F * N(w d+) - K * N(w d-)]
    d+- = [ln(F/K) + mu +- var/2] / sqrt(var)

Pricing with the adjusted forward *and* a non-zero drift mu would count
the same correction twice; the engine therefore fixes mu = 0 and keeps
the literal double-drift variant available behind ``paper_literal``
flags for comparison.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .curve import YieldCurve
from .quanto import SwapVolCorrSpec, VolCorrSpec, quanto_mult, swap_quanto_mult
from .timegrid import Date, DayCount, generate_schedule, year_fraction

__all__ = [
    "norm_cdf",
    "black",
    "annuity",
    "FraSpec",
    "SwapSpec",
    "OptionSpec",
    "price_float_zcb",
    "price_fra",
    "fair_swap_rate",
    "price_swap",
    "price_caplet_floorlet",
    "price_capfloor",
    "price_swaption",
    "Position",
    "parse_portfolio",
    "load_portfolio",
    "price_position",
    "price_portfolio",
    "PRICE_CSV_HEADER",
]

_SQRT_2PI = 2.506628274631000502415765284811


def _norm_cdf_scalar(x: float) -> float:
    # Hart's double-precision rational approximation; abs error < 1e-15
    xa = abs(x)
    if xa > 37.0:
        c = 0.0
    else:
        e = math.exp(-xa * xa / 2.0)
        if xa < 7.07106781186547:
            b = 3.52624965998911e-02 * xa + 0.700383064443688
            b = b * xa + 6.37396220353165
            b = b * xa + 33.912866078383
            b = b * xa + 112.079291497871
            b = b * xa + 221.213596169931
            b = b * xa + 220.206867912376
            num = e * b
            b = 8.83883476483184e-02 * xa + 1.75566716318264
            b = b * xa + 16.064177579207
            b = b * xa + 86.7807322029461
            b = b * xa + 296.564248779674
            b = b * xa + 637.333633378831
            b = b * xa + 793.826512519948
            b = b * xa + 440.413735824752
            c = num / b
        else:
            b = xa + 0.65
            b = xa + 4.0 / b
            b = xa + 3.0 / b
            b = xa + 2.0 / b
            b = xa + 1.0 / b
            c = e / (b * _SQRT_2PI)
    return 1.0 - c if x > 0.0 else c


def norm_cdf(x):
    """Standard normal CDF (Hart rational approximation).

    Accepts scalars or arrays; accurate to better than 1e-15 absolute.
    """
    if np.isscalar(x):
        return _norm_cdf_scalar(float(x))
    arr = np.asarray(x, dtype=float)
    return np.vectorize(_norm_cdf_scalar, otypes=[float])(arr)


def black(forward: float, strike: float, drift: float, variance: float, omega: int) -> float:
    """Undiscounted lognormal option kernel.

    ``omega`` is +1 for a call (caplet / payer) and -1 for a put
    (floorlet / receiver).  ``variance`` is the integrated squared
    volatility up to expiry.  ``forward`` should already carry any
    measure adjustment; ``drift`` shifts the d+- exercise terms only
    and exists for the literal variant that also feeds the adjustment
    through them.  With zero drift the zero-variance value degenerates
    to the intrinsic max(omega * (F - K), 0).
    """
    if omega not in (1, -1):
        raise ValueError("omega must be +1 or -1")
    if forward <= 0.0 or strike <= 0.0:
        raise ValueError("lognormal formula needs positive forward and strike")
    if variance < 0.0:
        raise ValueError("variance must be non-negative")
    if variance == 0.0:
        s = math.log(forward / strike) + drift
        return omega * (forward - strike) if omega * s > 0.0 else 0.0
    sd = math.sqrt(variance)
    d_plus = (math.log(forward / strike) + drift + 0.5 * variance) / sd
    d_minus = d_plus - sd
    return omega * (
        forward * norm_cdf(omega * d_plus) - strike * norm_cdf(omega * d_minus)
    )


def annuity(curve: YieldCurve, dates: list[Date], daycount: DayCount | None = None) -> float:
    """Sum of discounted accruals over consecutive schedule periods."""
    if len(dates) < 2:
        raise ValueError("annuity needs at least two schedule dates")
    dc = daycount or curve.daycount
    taus = np.array(
        [year_fraction(a, b, dc) for a, b in zip(dates[:-1], dates[1:])]
    )
    dfs = np.atleast_1d(curve.discount(dates[1:]))
    return float(np.dot(taus, dfs))


# ---------------------------------------------------------------------------
# instrument specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FraSpec:
    start: Date
    end: Date
    strike: float
    notional: float = 1.0
    daycount: DayCount | None = None  # None: use the forwarding curve's


@dataclass(frozen=True)
class SwapSpec:
    """A fixed-vs-floating swap; both legs share start and end dates."""

    start: Date
    end: Date
    fixed_rate: float
    notional: float = 1.0
    payer: bool = True
    float_tenor_months: int = 6
    fixed_frequency_months: int = 12
    daycount_float: DayCount = DayCount.ACT_360
    daycount_fixed: DayCount = DayCount.THIRTY_360

    def float_schedule(self) -> list[Date]:
        return generate_schedule(self.start, self.end, self.float_tenor_months)

    def fixed_schedule(self) -> list[Date]:
        return generate_schedule(self.start, self.end, self.fixed_frequency_months)


@dataclass(frozen=True)
class OptionSpec:
    """A caplet or floorlet on one forward-rate period."""

    start: Date
    end: Date
    strike: float
    omega: int = 1  # +1 caplet, -1 floorlet
    notional: float = 1.0
    daycount: DayCount | None = None


# ---------------------------------------------------------------------------
# linear instruments
# ---------------------------------------------------------------------------

def price_float_zcb(
    disc: YieldCurve,
    fwd: YieldCurve,
    maturity: Date,
    notional: float = 1.0,
) -> float:
    """Value of one floating coupon fixing today and paying at maturity.

    N * P_d(T) * tau_f * L_f(t0, T); the accrual-rate product collapses
    to 1/P_f(T) - 1 independently of day count.
    """
    if maturity == disc.reference_date:
        return 0.0
    p_d = disc.discount(maturity)
    p_f = fwd.discount(maturity)
    return notional * p_d * (1.0 / p_f - 1.0)


def price_fra(
    disc: YieldCurve,
    fwd: YieldCurve,
    spec: FraSpec,
    volcorr: VolCorrSpec | None = None,
) -> float:
    """PV of a forward rate agreement paying tau * (L - K) at the end date."""
    dc = spec.daycount or fwd.daycount
    tau = year_fraction(spec.start, spec.end, dc)
    f = fwd.simple_forward(spec.start, spec.end, dc)
    qa = quanto_mult(volcorr, 0.0, disc.time(spec.start))
    return spec.notional * disc.discount(spec.end) * tau * (f * qa - spec.strike)


def _float_leg_coupons(
    fwd: YieldCurve,
    dates: list[Date],
    volcorr: VolCorrSpec | list[VolCorrSpec] | None,
) -> np.ndarray:
    """Per-period accrual-rate products tau_f * F_f * QA as one array.

    tau * F is computed directly as the discount-factor ratio minus one,
    which telescopes exactly when projection and discounting share a
    curve.
    """
    p = np.atleast_1d(fwd.discount(dates))
    coupons = p[:-1] / p[1:] - 1.0
    if volcorr is not None:
        specs = volcorr if isinstance(volcorr, list) else [volcorr] * (len(dates) - 1)
        if len(specs) != len(dates) - 1:
            raise ValueError("need one vol/corr spec per floating period")
        qa = np.array(
            [
                quanto_mult(s, 0.0, fwd.time(d))
                for s, d in zip(specs, dates[:-1])
            ]
        )
        coupons = coupons * qa
    return coupons


def fair_swap_rate(
    disc: YieldCurve,
    fwd: YieldCurve,
    spec: SwapSpec,
    volcorr: VolCorrSpec | list[VolCorrSpec] | None = None,
) -> float:
    """Par fixed rate: adjusted floating leg over the fixed annuity."""
    fdates = spec.float_schedule()
    coupons = _float_leg_coupons(fwd, fdates, volcorr)
    p_d = np.atleast_1d(disc.discount(fdates[1:]))
    float_pv = float(np.dot(p_d, coupons))
    a_d = annuity(disc, spec.fixed_schedule(), spec.daycount_fixed)
    return float_pv / a_d


def price_swap(
    disc: YieldCurve,
    fwd: YieldCurve,
    spec: SwapSpec,
    volcorr: VolCorrSpec | list[VolCorrSpec] | None = None,
) -> float:
    """PV of the swap; positive when the payer side is in the money."""
    fdates = spec.float_schedule()
    coupons = _float_leg_coupons(fwd, fdates, volcorr)
    p_d = np.atleast_1d(disc.discount(fdates[1:]))
    float_pv = float(np.dot(p_d, coupons))
    a_d = annuity(disc, spec.fixed_schedule(), spec.daycount_fixed)
    pv = spec.notional * (float_pv - spec.fixed_rate * a_d)
    return pv if spec.payer else -pv


# ---------------------------------------------------------------------------
# optional instruments
# ---------------------------------------------------------------------------

def price_caplet_floorlet(
    disc: YieldCurve,
    fwd: YieldCurve,
    opt: OptionSpec,
    volcorr: VolCorrSpec | None = None,
    paper_literal: bool = False,
) -> float:
    """Black value of one caplet/floorlet on the adjusted forward.

    ``paper_literal`` additionally feeds the drift integral into the
    d+- terms, reproducing the literal double-adjusted variant.
    """
    dc = opt.daycount or fwd.daycount
    tau = year_fraction(opt.start, opt.end, dc)
    f = fwd.simple_forward(opt.start, opt.end, dc)
    t_fix = disc.time(opt.start)
    qa = quanto_mult(volcorr, 0.0, t_fix)
    variance = volcorr.variance_integral(0.0, t_fix) if volcorr else 0.0
    mu = volcorr.drift_integral(0.0, t_fix) if (paper_literal and volcorr) else 0.0
    kernel = black(f * qa, opt.strike, mu, variance, opt.omega)
    return opt.notional * disc.discount(opt.end) * tau * kernel


def price_capfloor(
    disc: YieldCurve,
    fwd: YieldCurve,
    schedule_dates: list[Date],
    strike,
    omega: int = 1,
    notional: float = 1.0,
    volcorr: VolCorrSpec | list[VolCorrSpec] | None = None,
    daycount: DayCount | None = None,
    paper_literal: bool = False,
) -> float:
    """Sum of caplets/floorlets over consecutive schedule periods.

    ``strike`` and ``volcorr`` may be scalars applied to every period or
    sequences with one entry per period.
    """
    n = len(schedule_dates) - 1
    if n < 1:
        raise ValueError("cap/floor schedule needs at least one period")
    strikes = np.broadcast_to(np.asarray(strike, dtype=float), (n,))
    specs = volcorr if isinstance(volcorr, list) else [volcorr] * n
    if len(specs) != n:
        raise ValueError("need one vol/corr spec per period")
    total = 0.0
    for i in range(n):
        opt = OptionSpec(
            start=schedule_dates[i],
            end=schedule_dates[i + 1],
            strike=float(strikes[i]),
            omega=omega,
            notional=notional,
            daycount=daycount,
        )
        total += price_caplet_floorlet(disc, fwd, opt, specs[i], paper_literal)
    return total


def price_swaption(
    disc: YieldCurve,
    fwd: YieldCurve,
    swap: SwapSpec,
    volcorr: SwapVolCorrSpec | None = None,
    paper_literal: bool = False,
) -> float:
    """European swaption (expiry = swap start) in the annuity measure.

    The adjusted forward swap rate S * QA prices against the strike in
    the Black kernel; a payer swaption is a call (omega +1).
    """
    t_exp = disc.time(swap.start)
    if t_exp <= 0.0:
        raise ValueError("swaption expiry must lie after the reference date")
    s = fair_swap_rate(disc, fwd, swap)
    a_d = annuity(disc, swap.fixed_schedule(), swap.daycount_fixed)
    qa = swap_quanto_mult(volcorr, 0.0, t_exp)
    variance = volcorr.variance_integral(0.0, t_exp) if volcorr else 0.0
    mu = volcorr.drift_integral(0.0, t_exp) if (paper_literal and volcorr) else 0.0
    omega = 1 if swap.payer else -1
    kernel = black(s * qa, swap.fixed_rate, mu, variance, omega)
    return swap.notional * a_d * kernel


# ---------------------------------------------------------------------------
# portfolios
# ---------------------------------------------------------------------------

PRICE_CSV_HEADER = "instrument_id,kind,pv,fair_rate_or_premium"

_POSITION_KINDS = ("fra", "swap", "caplet", "floorlet", "cap", "floor", "swaption")


@dataclass(frozen=True)
class Position:
    """One portfolio line: an instrument spec plus curve assignment."""

    id: str
    kind: str
    forwarding: str
    spec: object
    quantity: float = 1.0
    tenor_months: int | None = None  # cap/floor period roll

    def __post_init__(self):
        if self.kind not in _POSITION_KINDS:
            raise ValueError(f"unknown position kind {self.kind!r}")


def _parse_one(i: int, row: dict) -> Position:
    kind = row["kind"]
    pid = str(row.get("id", f"pos{i}"))
    fwd_label = row.get("forwarding", "discount")
    qty = float(row.get("quantity", 1.0))
    notional = float(row.get("notional", 1.0))
    start = Date.parse(row["start"])
    end = Date.parse(row["end"])
    if kind == "fra":
        dc = DayCount(row["daycount"]) if "daycount" in row else None
        spec = FraSpec(start, end, float(row["strike"]), notional, dc)
        return Position(pid, kind, fwd_label, spec, qty)
    if kind in ("swap", "swaption"):
        spec = SwapSpec(
            start=start,
            end=end,
            fixed_rate=float(row["fixed_rate" if kind == "swap" else "strike"]),
            notional=notional,
            payer=bool(row.get("payer", True)),
            float_tenor_months=int(row.get("float_tenor_months", 6)),
            fixed_frequency_months=int(row.get("fixed_freq_months", 12)),
            daycount_float=DayCount(row.get("daycount_float", "ACT_360")),
            daycount_fixed=DayCount(row.get("daycount_fixed", "THIRTY_360")),
        )
        return Position(pid, kind, fwd_label, spec, qty)
    if kind in ("caplet", "floorlet"):
        dc = DayCount(row["daycount"]) if "daycount" in row else None
        spec = OptionSpec(
            start, end, float(row["strike"]),
            1 if kind == "caplet" else -1, notional, dc,
        )
        return Position(pid, kind, fwd_label, spec, qty)
    if kind in ("cap", "floor"):
        dc = DayCount(row["daycount"]) if "daycount" in row else None
        spec = OptionSpec(
            start, end, float(row["strike"]),
            1 if kind == "cap" else -1, notional, dc,
        )
        return Position(
            pid, kind, fwd_label, spec, qty,
            tenor_months=int(row.get("tenor_months", 6)),
        )
    raise ValueError(f"unknown position kind {kind!r}")


def parse_portfolio(rows: list[dict]) -> list[Position]:
    if not isinstance(rows, list):
        raise ValueError("portfolio file must contain a JSON array")
    return [_parse_one(i, row) for i, row in enumerate(rows)]


def load_portfolio(path) -> list[Position]:
    with open(path) as fh:
        return parse_portfolio(json.load(fh))


def price_position(
    pos: Position,
    curves: dict[str, YieldCurve],
    volcorr: VolCorrSpec | None = None,
    swap_volcorr: SwapVolCorrSpec | None = None,
    single_curve: bool = False,
    paper_literal: bool = False,
) -> tuple[float, float]:
    """Value one position; returns (pv, fair rate or unit premium)."""
    disc = curves["discount"]
    fwd = disc if single_curve else curves[pos.forwarding]
    if pos.kind == "fra":
        pv = price_fra(disc, fwd, pos.spec, volcorr)
        qa = quanto_mult(volcorr, 0.0, disc.time(pos.spec.start))
        dc = pos.spec.daycount or fwd.daycount
        fair = fwd.simple_forward(pos.spec.start, pos.spec.end, dc) * qa
    elif pos.kind == "swap":
        pv = price_swap(disc, fwd, pos.spec, volcorr)
        fair = fair_swap_rate(disc, fwd, pos.spec, volcorr)
    elif pos.kind in ("caplet", "floorlet"):
        pv = price_caplet_floorlet(disc, fwd, pos.spec, volcorr, paper_literal)
        fair = pv / pos.spec.notional
    elif pos.kind in ("cap", "floor"):
        dates = generate_schedule(pos.spec.start, pos.spec.end, pos.tenor_months)
        pv = price_capfloor(
            disc, fwd, dates, pos.spec.strike, pos.spec.omega,
            pos.spec.notional, volcorr, pos.spec.daycount, paper_literal,
        )
        fair = pv / pos.spec.notional
    elif pos.kind == "swaption":
        pv = price_swaption(disc, fwd, pos.spec, swap_volcorr, paper_literal)
        fair = pv / pos.spec.notional
    else:  # pragma: no cover - guarded in the constructor
        raise ValueError(f"unknown position kind {pos.kind!r}")
    return pos.quantity * pv, fair


def price_portfolio(
    positions: list[Position],
    curves: dict[str, YieldCurve],
    **kwargs,
) -> list[dict]:
    rows = []
    for pos in positions:
        pv, fair = price_position(pos, curves, **kwargs)
        rows.append(
            {"instrument_id": pos.id, "kind": pos.kind, "pv": pv, "fair": fair}
        )
    return rows
