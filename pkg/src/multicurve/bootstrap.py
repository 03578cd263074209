"""Curve construction from market quotes.

Each quote pins the discount factor at its end date (the pillar).  The
solver walks pillars in maturity order, root-finding each discount
factor so the instrument reprices at its quote, then runs Gauss-Seidel
sweeps over all pillars until the whole set reprices simultaneously.
Sweeps matter because the monotone cubic is only semi-local: the slope
stored at knot i reacts to pillars i-1 and i+1, so solving pillar n can
disturb instruments that matured earlier.

Forwarding curves bootstrap against a fixed discounting curve; basis
swap quotes against one tenor may also reference a companion forwarding
curve for the other leg.  Passing no discounting curve reproduces the
classical single-curve recipe where the curve discounts itself.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .basis import ForwardBasisCurve
from .curve import YieldCurve
from .interp import InterpScheme
from .timegrid import Date, DayCount, generate_schedule, year_fraction

__all__ = [
    "InstrumentKind",
    "InstrumentQuote",
    "BootstrapConfig",
    "BootstrapError",
    "BasisDirection",
    "fair_quote",
    "instrument_pv",
    "repricing_errors",
    "select_pillar_instruments",
    "bootstrap_curve",
    "curve_from_basis",
    "read_quotes_csv",
    "write_quotes_csv",
    "bump_quote",
    "QUOTES_CSV_HEADER",
]

logger = logging.getLogger(__name__)

QUOTES_CSV_HEADER = (
    "kind,underlying_tenor_months,start,end,quote,"
    "fixed_freq_months,leg_daycount,second_tenor_months"
)


class InstrumentKind(Enum):
    DEPOSIT = "DEPOSIT"
    FRA = "FRA"
    FUTURES = "FUTURES"
    SWAP = "SWAP"
    BASIS_SWAP = "BASIS_SWAP"
    OIS = "OIS"


# When two quotes share an end date the higher rank keeps the pillar.
_PILLAR_RANK = {
    InstrumentKind.DEPOSIT: 0,
    InstrumentKind.FRA: 1,
    InstrumentKind.FUTURES: 1,
    InstrumentKind.SWAP: 2,
    InstrumentKind.BASIS_SWAP: 2,
    InstrumentKind.OIS: 2,
}


class BootstrapError(RuntimeError):
    """Raised when a quote set cannot be turned into a curve."""


@dataclass(frozen=True)
class InstrumentQuote:
    """One market quote.

    ``quote`` is a decimal rate for deposits, FRAs, swaps and overnight
    index swaps, a decimal spread for basis swaps, and a price on the
    100 scale for futures.  ``underlying_tenor`` is the floating index
    tenor in months (the roll of the floating schedule); for a basis
    swap ``second_tenor`` names the other leg.  ``daycount`` covers the
    money-market accrual of deposits / FRAs / futures and the fixed leg
    of (basis-free) swaps; ``float_daycount`` only accrues the basis
    swap spread.  ``convexity`` is the futures-to-forward rate
    correction already netted off the implied rate.
    """

    kind: InstrumentKind
    underlying_tenor: int
    start: Date
    end: Date
    quote: float
    fixed_frequency: int = 12
    daycount: DayCount = DayCount.ACT_360
    float_daycount: DayCount = DayCount.ACT_360
    second_tenor: int | None = None
    convexity: float = 0.0

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError("quote needs start < end")
        if self.underlying_tenor <= 0:
            raise ValueError("underlying tenor must be positive months")
        if not np.isfinite(self.quote):
            raise ValueError("quote must be finite")
        if self.kind is InstrumentKind.BASIS_SWAP and self.second_tenor is None:
            raise ValueError("basis swap quote needs second_tenor")

    def implied_rate(self) -> float:
        """The quote as a decimal rate (futures price unwound)."""
        if self.kind is InstrumentKind.FUTURES:
            return (100.0 - self.quote) / 100.0 - self.convexity
        return self.quote


@dataclass(frozen=True)
class BootstrapConfig:
    interpolation: InterpScheme = InterpScheme.LOG_DISCOUNT_MONOTONE_CUBIC
    daycount: DayCount = DayCount.ACT_360
    tolerance: float = 1e-12
    max_iterations: int = 100
    max_sweeps: int = 8
    df_bracket: tuple[float, float] = (1e-8, 2.0)


@lru_cache(maxsize=4096)
def _sched(start: Date, end: Date, months: int) -> tuple[Date, ...]:
    return tuple(generate_schedule(start, end, months))


@lru_cache(maxsize=4096)
def _taus(dates: tuple[Date, ...], dc: DayCount) -> tuple[float, ...]:
    return tuple(
        year_fraction(a, b, dc) for a, b in zip(dates[:-1], dates[1:])
    )


def _leg_pv(curve: YieldCurve, disc: YieldCurve, dates: tuple[Date, ...]) -> float:
    """Floating leg PV per unit notional: sum P_d(t_i) (P_f ratio - 1).

    The accrual-times-rate product is taken as the projection curve's
    discount ratio minus one, which is day-count free and telescopes
    exactly when projection and discounting coincide.
    """
    pf = np.atleast_1d(curve.discount(dates))
    pd_ = np.atleast_1d(disc.discount(dates[1:]))
    return float(np.dot(pd_, pf[:-1] / pf[1:] - 1.0))


def _fixed_annuity(disc: YieldCurve, dates: tuple[Date, ...], dc: DayCount) -> float:
    taus = np.array(_taus(dates, dc))
    pd_ = np.atleast_1d(disc.discount(dates[1:]))
    return float(np.dot(taus, pd_))


def _basis_leg_curve(
    q: InstrumentQuote,
    months: int,
    target: YieldCurve,
    companions: dict[int, YieldCurve] | None,
) -> YieldCurve:
    if months == q.underlying_tenor:
        return target
    if companions and months in companions:
        return companions[months]
    raise BootstrapError(
        f"basis swap leg needs a companion curve for the {months}M tenor"
    )


def fair_quote(
    q: InstrumentQuote,
    target: YieldCurve,
    discounting: YieldCurve | None = None,
    companions: dict[int, YieldCurve] | None = None,
) -> float:
    """Model value of the quote on the given curves, in quote units.

    ``target`` projects the quote's own tenor; ``discounting`` defaults
    to the target itself (single-curve pricing).
    """
    disc = discounting or target
    k = q.kind
    if k in (InstrumentKind.DEPOSIT, InstrumentKind.FRA):
        return target.simple_forward(q.start, q.end, q.daycount)
    if k is InstrumentKind.FUTURES:
        f = target.simple_forward(q.start, q.end, q.daycount)
        return 100.0 * (1.0 - (f + q.convexity))
    if k is InstrumentKind.SWAP:
        float_pv = _leg_pv(target, disc, _sched(q.start, q.end, q.underlying_tenor))
        ann = _fixed_annuity(disc, _sched(q.start, q.end, q.fixed_frequency), q.daycount)
        return float_pv / ann
    if k is InstrumentKind.OIS:
        p = np.atleast_1d(disc.discount([q.start, q.end]))
        ann = _fixed_annuity(disc, _sched(q.start, q.end, q.fixed_frequency), q.daycount)
        return float(p[0] - p[1]) / ann
    if k is InstrumentKind.BASIS_SWAP:
        short_m, long_m = sorted((q.underlying_tenor, q.second_tenor))
        short_curve = _basis_leg_curve(q, short_m, target, companions)
        long_curve = _basis_leg_curve(q, long_m, target, companions)
        pv_short = _leg_pv(short_curve, disc, _sched(q.start, q.end, short_m))
        pv_long = _leg_pv(long_curve, disc, _sched(q.start, q.end, long_m))
        ann = _fixed_annuity(disc, _sched(q.start, q.end, short_m), q.float_daycount)
        return (pv_long - pv_short) / ann
    raise BootstrapError(f"unknown instrument kind {k!r}")


def instrument_pv(
    q: InstrumentQuote,
    contract_quote: float,
    target: YieldCurve,
    discounting: YieldCurve | None = None,
    companions: dict[int, YieldCurve] | None = None,
    notional: float = 1.0,
) -> float:
    """PV of a unit payer position struck at ``contract_quote``.

    Payer means paying the contracted fixed rate (receiving the spread
    leg for a basis swap); money-market instruments settle FRA-style at
    the end date.  Futures contracts are struck at a price, converted
    to rate space internally.
    """
    disc = discounting or target
    k = q.kind
    if k in (InstrumentKind.DEPOSIT, InstrumentKind.FRA, InstrumentKind.FUTURES):
        f = target.simple_forward(q.start, q.end, q.daycount)
        if k is InstrumentKind.FUTURES:
            strike = (100.0 - contract_quote) / 100.0 - q.convexity
        else:
            strike = contract_quote
        tau = year_fraction(q.start, q.end, q.daycount)
        return notional * disc.discount(q.end) * tau * (f - strike)
    if k in (InstrumentKind.SWAP, InstrumentKind.OIS):
        par = fair_quote(q, target, discounting, companions)
        ann = _fixed_annuity(disc, _sched(q.start, q.end, q.fixed_frequency), q.daycount)
        return notional * (par - contract_quote) * ann
    if k is InstrumentKind.BASIS_SWAP:
        s = fair_quote(q, target, discounting, companions)
        short_m = min(q.underlying_tenor, q.second_tenor)
        ann = _fixed_annuity(disc, _sched(q.start, q.end, short_m), q.float_daycount)
        return notional * (s - contract_quote) * ann
    raise BootstrapError(f"unknown instrument kind {k!r}")


def repricing_errors(
    quotes: list[InstrumentQuote],
    target: YieldCurve,
    discounting: YieldCurve | None = None,
    companions: dict[int, YieldCurve] | None = None,
) -> np.ndarray:
    """Fair-minus-quote residual per instrument, futures in rate space."""
    out = np.empty(len(quotes))
    for i, q in enumerate(quotes):
        if q.kind is InstrumentKind.FUTURES:
            f = target.simple_forward(q.start, q.end, q.daycount)
            out[i] = f - q.implied_rate()
        else:
            out[i] = fair_quote(q, target, discounting, companions) - q.quote
    return out


def select_pillar_instruments(
    quotes: list[InstrumentQuote],
) -> list[InstrumentQuote]:
    """Sort by end date, resolving collisions by instrument precedence.

    Deposits yield to FRAs / futures, which yield to swap-class quotes.
    Two same-rank quotes on one end date is an error.
    """
    by_end: dict[int, InstrumentQuote] = {}
    for q in quotes:
        held = by_end.get(q.end.serial)
        if held is None:
            by_end[q.end.serial] = q
            continue
        rank_new, rank_old = _PILLAR_RANK[q.kind], _PILLAR_RANK[held.kind]
        if rank_new == rank_old:
            raise BootstrapError(
                f"two {held.kind.value} pillars collide at {q.end.iso()}"
            )
        winner, loser = (q, held) if rank_new > rank_old else (held, q)
        by_end[q.end.serial] = winner
        logger.warning(
            "pillar %s: dropping %s quote in favour of %s",
            q.end.iso(), loser.kind.value, winner.kind.value,
        )
    return [by_end[s] for s in sorted(by_end)]


class _Workspace:
    """Mutable pillar-df array evaluated through the interp kernels.

    The bootstrap mutates one discount factor per root-finding step;
    rebuilding a full curve object each time would dominate the run.
    Derived arrays (log-discounts, slopes or zero rates) refresh only
    when marked stale, and ``active`` restricts evaluation to the
    pillars solved so far during the first sequential pass.
    """

    __slots__ = ("ts", "dfs", "scheme", "active", "_stale", "_lnp", "_aux")

    def __init__(self, ts: np.ndarray, scheme: InterpScheme):
        self.ts = ts
        self.dfs = np.ones_like(ts)
        self.scheme = scheme
        self.active = 0
        self._stale = True
        self._lnp = None
        self._aux = None

    def set_df(self, i: int, df: float) -> None:
        self.dfs[i + 1] = df
        self._stale = True

    def df(self, t: np.ndarray) -> np.ndarray:
        from .interp import monotone_cubic_slopes, zero_rates_from_logdf

        m = self.active + 1
        ts, dfs = self.ts[:m], self.dfs[:m]
        if self._stale:
            self._lnp = np.log(dfs)
            if self.scheme is InterpScheme.LOG_DISCOUNT_MONOTONE_CUBIC:
                self._aux = monotone_cubic_slopes(ts, self._lnp)
            elif self.scheme is InterpScheme.LINEAR_ZERO:
                self._aux = zero_rates_from_logdf(ts, self._lnp)
            self._stale = False
        if self.scheme is InterpScheme.LOG_DISCOUNT_MONOTONE_CUBIC:
            return _kernels.eval_log_cubic(t, ts, dfs, self._lnp, self._aux)
        if self.scheme is InterpScheme.LINEAR_ZERO:
            return _kernels.eval_linear_zero(t, ts, dfs, self._aux)
        return _kernels.eval_log_linear(t, ts, dfs, self._lnp)


def _compile_residual(
    q: InstrumentQuote,
    ref: Date,
    ws: _Workspace,
    discounting: YieldCurve | None,
    companions: dict[int, YieldCurve] | None,
):
    """Residual closure over the workspace, arithmetic-identical to
    ``repricing_errors`` on the finished curve.

    Schedule dates convert to kernel times once; legs living on fixed
    curves (external discounting, basis companions) freeze to constant
    arrays.
    """

    def times(dates) -> np.ndarray:
        return np.array([(d.serial - ref.serial) / 365.0 for d in dates])

    def disc_getter(dates):
        t = times(dates)
        if discounting is not None:
            const = np.atleast_1d(discounting.discount_time(t))
            return lambda: const
        return lambda: ws.df(t)

    k = q.kind
    if k in (InstrumentKind.DEPOSIT, InstrumentKind.FRA, InstrumentKind.FUTURES):
        t_pair = times([q.start, q.end])
        tau = year_fraction(q.start, q.end, q.daycount)
        target = q.implied_rate()

        def res() -> float:
            p = ws.df(t_pair)
            return (p[0] - p[1]) / (tau * p[1]) - target

        return res

    if k is InstrumentKind.SWAP:
        fdates = _sched(q.start, q.end, q.underlying_tenor)
        t_float = times(fdates)
        get_pd = disc_getter(fdates[1:])
        xdates = _sched(q.start, q.end, q.fixed_frequency)
        taus = np.array(_taus(xdates, q.daycount))
        get_pd_fix = disc_getter(xdates[1:])

        def res() -> float:
            pf = ws.df(t_float)
            float_pv = float(np.dot(get_pd(), pf[:-1] / pf[1:] - 1.0))
            return float_pv / float(np.dot(taus, get_pd_fix())) - q.quote

        return res

    if k is InstrumentKind.OIS:
        t_pair = times([q.start, q.end])
        xdates = _sched(q.start, q.end, q.fixed_frequency)
        taus = np.array(_taus(xdates, q.daycount))
        if discounting is not None:
            p_const = np.atleast_1d(discounting.discount_time(t_pair))
            get_p = lambda: p_const
        else:
            get_p = lambda: ws.df(t_pair)
        get_pd_fix = disc_getter(xdates[1:])

        def res() -> float:
            p = get_p()
            ann = float(np.dot(taus, get_pd_fix()))
            return float(p[0] - p[1]) / ann - q.quote

        return res

    if k is InstrumentKind.BASIS_SWAP:
        short_m, long_m = sorted((q.underlying_tenor, q.second_tenor))

        def leg(months):
            dates = _sched(q.start, q.end, months)
            get_pd = disc_getter(dates[1:])
            if months == q.underlying_tenor:
                t_leg = times(dates)

                def pv() -> float:
                    p = ws.df(t_leg)
                    return float(np.dot(get_pd(), p[:-1] / p[1:] - 1.0))

            else:
                if not companions or months not in companions:
                    raise BootstrapError(
                        f"basis swap leg needs a companion curve for the "
                        f"{months}M tenor"
                    )
                comp = companions[months]
                ratio = np.atleast_1d(comp.discount(dates))
                ratio = ratio[:-1] / ratio[1:] - 1.0

                def pv() -> float:
                    return float(np.dot(get_pd(), ratio))

            return pv

        pv_short, pv_long = leg(short_m), leg(long_m)
        sdates = _sched(q.start, q.end, short_m)
        staus = np.array(_taus(sdates, q.float_daycount))
        get_pd_s = disc_getter(sdates[1:])

        def res() -> float:
            ann = float(np.dot(staus, get_pd_s()))
            return (pv_long() - pv_short()) / ann - q.quote

        return res

    raise BootstrapError(f"unknown instrument kind {k!r}")


def bootstrap_curve(
    quotes: list[InstrumentQuote],
    config: BootstrapConfig | None = None,
    discount_curve: YieldCurve | None = None,
    companions: dict[int, YieldCurve] | None = None,
    reference_date: Date | None = None,
    tenor_label: str = "custom",
) -> YieldCurve:
    """Build a curve whose pillars reprice the quotes.

    With ``discount_curve`` the result is a forwarding curve priced
    against external discounting; without it the curve discounts its
    own cashflows (the classical construction).  ``companions`` maps
    tenor months to already-built forwarding curves for the far legs of
    basis swaps.  The reference date defaults to the earliest quote
    start.
    """
    if not quotes:
        raise BootstrapError("no quotes to bootstrap from")
    cfg = config or BootstrapConfig()
    chosen = select_pillar_instruments(quotes)
    ref = reference_date or min(q.start for q in chosen)
    for q in chosen:
        if q.start < ref:
            raise BootstrapError(
                f"quote starting {q.start.iso()} precedes reference date {ref.iso()}"
            )
    if discount_curve is not None and discount_curve.reference_date != ref:
        raise BootstrapError("discounting curve has a different reference date")

    pillar_dates = [q.end for q in chosen]
    n = len(chosen)
    ts = np.empty(n + 1)
    ts[0] = 0.0
    ts[1:] = [(d.serial - ref.serial) / 365.0 for d in pillar_dates]
    ws = _Workspace(ts, cfg.interpolation)
    res_fns = [
        _compile_residual(q, ref, ws, discount_curve, companions) for q in chosen
    ]
    lo, hi = cfg.df_bracket
    rtol = 4 * np.finfo(float).eps

    def solve(i: int) -> None:
        def f(df: float) -> float:
            ws.set_df(i, df)
            return res_fns[i]()

        try:
            root = brentq(f, lo, hi, xtol=1e-15, rtol=rtol,
                          maxiter=cfg.max_iterations)
        except (ValueError, ZeroDivisionError) as exc:
            raise BootstrapError(
                f"pillar {pillar_dates[i].iso()} failed to solve: {exc}"
            ) from exc
        ws.set_df(i, float(root))

    for i in range(n):
        ws.active = i + 1
        solve(i)

    # Gauss-Seidel sweeps until every instrument reprices at once.
    for _ in range(cfg.max_sweeps):
        if max(abs(fn()) for fn in res_fns) <= cfg.tolerance:
            break
        for i in range(n):
            solve(i)

    curve = YieldCurve(
        ref,
        list(zip(pillar_dates, ws.dfs[1:].tolist())),
        cfg.interpolation,
        cfg.daycount,
        tenor_label,
    )
    # Closure check through the public pricing path; also guards the
    # compiled residuals against drifting from it.
    worst = np.max(np.abs(
        repricing_errors(chosen, curve, discount_curve, companions)
    ))
    if worst > cfg.tolerance:
        raise BootstrapError(
            f"bootstrap failed to converge: residual {worst:.3e} above "
            f"tolerance {cfg.tolerance:g} after {cfg.max_sweeps} sweeps"
        )
    return curve


# ---------------------------------------------------------------------------
# curve reconstruction from a basis term structure
# ---------------------------------------------------------------------------

class BasisDirection(Enum):
    DERIVE_FORWARDING = "derive_forwarding"
    DERIVE_DISCOUNT = "derive_discount"


def curve_from_basis(
    base: YieldCurve,
    basis: ForwardBasisCurve,
    direction: BasisDirection,
    interpolation: InterpScheme | None = None,
    daycount: DayCount | None = None,
) -> YieldCurve:
    """Rebuild the missing curve of a pair from the basis against it.

    The basis must cover chained intervals starting at the reference
    date (see ``pillar_interval_basis``).  The multiplicative basis per
    interval then fixes the unknown curve's discount factor recursively
    from the known one:

        grown ratio on unknown = 1 + BA * (grown ratio on base - 1)

    with the roles of the two curves swapped by ``direction``.
    """
    if len(basis) == 0:
        raise BootstrapError("empty basis term structure")
    if basis.t1_dates[0] != base.reference_date:
        raise BootstrapError("basis intervals must start at the reference date")
    for a, b in zip(basis.t2_dates[:-1], basis.t1_dates[1:]):
        if a != b:
            raise BootstrapError("basis intervals must chain end-to-start")
    if not np.all(np.isfinite(basis.mult)):
        raise BootstrapError("basis contains non-finite multiplicative entries")

    p_base = np.atleast_1d(base.discount(basis.t2_dates))
    p_prev_base = 1.0
    p_prev = 1.0
    pillars = []
    for date, p_b, ba in zip(basis.t2_dates, p_base, basis.mult):
        growth_base = p_prev_base / p_b - 1.0
        if direction is BasisDirection.DERIVE_FORWARDING:
            p_new = p_prev / (1.0 + ba * growth_base)
        else:
            if ba == 0.0:
                raise BootstrapError("zero multiplicative basis cannot be inverted")
            p_new = p_prev / (1.0 + growth_base / ba)
        if not np.isfinite(p_new) or p_new <= 0.0:
            raise BootstrapError(
                f"basis recursion produced invalid discount factor at {date.iso()}"
            )
        pillars.append((date, p_new))
        p_prev_base = p_b
        p_prev = p_new

    label = (
        basis.forwarding_label
        if direction is BasisDirection.DERIVE_FORWARDING
        else basis.discounting_label
    )
    return YieldCurve(
        base.reference_date,
        pillars,
        interpolation or base.interpolation,
        daycount or base.daycount,
        tenor_label=label,
    )


# ---------------------------------------------------------------------------
# quote CSV I/O
# ---------------------------------------------------------------------------

def write_quotes_csv(quotes: list[InstrumentQuote], fh, comment: str | None = None) -> None:
    """Write quotes as CSV; ``fh`` is an open text handle.

    Floating-spread day count and futures convexity are library-level
    settings, not columns; quotes round-trip at default values.
    """
    if comment:
        fh.write(f"# {comment}\n")
    fh.write(QUOTES_CSV_HEADER + "\n")
    for q in quotes:
        second = "" if q.second_tenor is None else str(q.second_tenor)
        fh.write(
            f"{q.kind.value},{q.underlying_tenor},{q.start.iso()},{q.end.iso()},"
            f"{q.quote!r},{q.fixed_frequency},{q.daycount.value},{second}\n"
        )


def read_quotes_csv(path) -> list[InstrumentQuote]:
    with open(path) as fh:
        text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    reader = csv.DictReader(io.StringIO("\n".join(lines)))
    expected = QUOTES_CSV_HEADER.split(",")
    if reader.fieldnames != expected:
        raise ValueError(
            f"bad quotes header: expected {expected}, got {reader.fieldnames}"
        )
    quotes = []
    for row in reader:
        second = row["second_tenor_months"].strip()
        quotes.append(
            InstrumentQuote(
                kind=InstrumentKind(row["kind"].strip()),
                underlying_tenor=int(row["underlying_tenor_months"]),
                start=Date.parse(row["start"].strip()),
                end=Date.parse(row["end"].strip()),
                quote=float(row["quote"]),
                fixed_frequency=int(row["fixed_freq_months"]),
                daycount=DayCount(row["leg_daycount"].strip()),
                second_tenor=int(second) if second else None,
            )
        )
    return quotes


def bump_quote(q: InstrumentQuote, rate_bump: float) -> InstrumentQuote:
    """Copy of the quote shifted by ``rate_bump`` in rate space.

    Futures prices move by -100 times the rate bump; every other kind
    quotes a rate or spread directly.
    """
    if q.kind is InstrumentKind.FUTURES:
        return replace(q, quote=q.quote - 100.0 * rate_bump)
    return replace(q, quote=q.quote + rate_bump)
