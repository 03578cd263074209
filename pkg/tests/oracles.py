"""Independent reference implementations used to cross-check the engine.

Everything here is written from first principles with a different
numerical route than the package (error functions instead of the
rational CDF approximation, adaptive quadrature instead of closed-form
segment sums, telescoping single-curve formulas instead of the dual
curve machinery).  Tests treat these as oracles and compare the engine
against them.
"""

import math
import warnings

from scipy.integrate import IntegrationWarning, quad

from multicurve import Date, DayCount, year_fraction


def norm_cdf_erfc(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def black_reference(forward, strike, drift, variance, omega):
    """Undiscounted Black price, recomputed with the erfc-based CDF.

    Mirrors the engine's kernel convention: the drift shifts the d+-
    terms only and does not scale the forward, so with nonzero drift
    this is not an expectation of a positive payoff.
    """
    if variance == 0.0:
        s = math.log(forward / strike) + drift
        return omega * (forward - strike) if omega * s > 0.0 else 0.0
    sd = math.sqrt(variance)
    d1 = (math.log(forward / strike) + drift + 0.5 * variance) / sd
    d2 = d1 - sd
    return omega * (
        forward * norm_cdf_erfc(omega * d1) - strike * norm_cdf_erfc(omega * d2)
    )


def black_quadrature(forward, strike, variance, omega):
    """Expected payoff under the lognormal terminal density, by quadrature.

    The terminal rate is F*exp(-variance/2 + sqrt(variance)*z) with z
    standard normal; the payoff max(omega*(rate - strike), 0) is
    integrated against the normal density over the in-the-money region.
    Matches the engine kernel only at zero drift, which is the engine's
    pricing convention (adjustments are applied to the forward).
    """
    sd = math.sqrt(variance)
    # payoff kink: rate == strike
    z_star = (math.log(strike / forward) + 0.5 * variance) / sd

    def integrand(z):
        rate = forward * math.exp(-0.5 * variance + sd * z)
        pdf = math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
        return max(omega * (rate - strike), 0.0) * pdf

    lo, hi = (z_star, z_star + 40.0) if omega > 0 else (z_star - 40.0, z_star)
    value, _ = quad(integrand, lo, hi, epsabs=1e-14, epsrel=1e-12, limit=200)
    return value


def drift_quadrature(spec, a: float, b: float) -> float:
    """Adaptive quadrature of -sigma_f*sigma_X*rho over [a, b]."""

    def integrand(t):
        i = 0
        while i < len(spec.breakpoints) and t >= spec.breakpoints[i]:
            i += 1
        return -spec.sigma_f[i] * spec.sigma_x[i] * spec.rho[i]

    pts = [p for p in spec.breakpoints if a < p < b]
    with warnings.catch_warnings():
        # the requested tolerance sits at roundoff level by design
        warnings.simplefilter("ignore", IntegrationWarning)
        value, _ = quad(
            integrand, a, b, points=pts or None, epsabs=1e-15, epsrel=1e-13, limit=400
        )
    return value


def single_curve_swap_pv(curve, start, end, fixed_rate, notional, payer,
                         float_months=6, fixed_months=12,
                         fixed_daycount=DayCount.THIRTY_360):
    """Telescoped single-curve payer swap PV.

    With one curve for forwarding and discounting the float leg
    collapses to P(start) - P(end); no forward ratios are needed.
    """
    from multicurve import generate_schedule

    float_pv = curve.discount(start) - curve.discount(end)
    ann = 0.0
    sched = generate_schedule(start, end, fixed_months)
    for a, b in zip(sched[:-1], sched[1:]):
        ann += year_fraction(a, b, fixed_daycount) * curve.discount(b)
    pv = float_pv - fixed_rate * ann
    return (pv if payer else -pv) * notional


def single_curve_fra_pv(curve, start, end, strike, notional,
                        daycount=DayCount.ACT_360):
    """Single-curve FRA PV: the forward comes from the discount ratios."""
    tau = year_fraction(start, end, daycount)
    fwd = (curve.discount(start) / curve.discount(end) - 1.0) / tau
    return notional * curve.discount(end) * tau * (fwd - strike)


def single_curve_caplet_pv(curve, start, end, strike, omega, notional,
                           variance, daycount=DayCount.ACT_360):
    """Single-curve caplet/floorlet via the reference Black formula."""
    tau = year_fraction(start, end, daycount)
    fwd = (curve.discount(start) / curve.discount(end) - 1.0) / tau
    price = black_reference(fwd, strike, 0.0, variance, omega)
    return notional * curve.discount(end) * tau * price


def flat_curve(reference: Date, rate: float, years: int = 40):
    """Deterministic continuously-compounded flat curve for fixtures."""
    from multicurve import YieldCurve

    dates = [reference.add_days(365 * k) for k in range(1, years + 1)]
    pillars = [(d, math.exp(-rate * (d.serial - reference.serial) / 365.0))
               for d in dates]
    return YieldCurve(reference, pillars)
