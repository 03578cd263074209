"""Vol/correlation adjustments for forwards projected on one curve but
priced under another curve's measure.

In the two-curve analogy with cross-currency pricing, a forward rate
fixed on the forwarding curve acquires a drift under the discounting
measure, driven by the forward's volatility, the volatility of the
ratio of discount factors between the curves, and their correlation.
With piecewise-constant parameters the adjustment over [t, T] is

    QA = exp( - integral_t^T sigma_f(u) * sigma_X(u) * rho_fX(u) du )

applied multiplicatively to the forward; the additive form is
QA' = F * (QA - 1).  Positive correlation therefore pushes the adjusted
forward down.  The swap-rate version has identical mechanics with the
swap-rate vol, annuity-ratio vol and their correlation.

Volatilities and correlations are piecewise constant on segments split
by ``breakpoints`` (interior knots, times in years); the final value
extends flat to infinity, so a spec with no breakpoints is constant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .basis import ForwardBasisCurve, additive_basis, multiplicative_basis
from .curve import YieldCurve
from .timegrid import Date, year_fraction

__all__ = [
    "VolCorrSpec",
    "SwapVolCorrSpec",
    "piecewise_product_integral",
    "drift_integral",
    "quanto_mult",
    "quanto_add",
    "swap_drift_integral",
    "swap_quanto_mult",
    "swap_quanto_add",
    "implied_sigma_x",
    "consistency_gap",
    "InfeasibleVolError",
]


class InfeasibleVolError(ValueError):
    """Raised when no non-negative volatility can reproduce a target."""


def _validate_piecewise(breakpoints, vols_a, vols_b, corr):
    n = len(breakpoints) + 1
    if not (len(vols_a) == len(vols_b) == len(corr) == n):
        raise ValueError(
            "piecewise arrays must have one more entry than breakpoints"
        )
    bp = np.asarray(breakpoints, dtype=float)
    if bp.size and (np.any(np.diff(bp) <= 0.0) or bp[0] <= 0.0):
        raise ValueError("breakpoints must be strictly increasing and positive")
    if any(v < 0.0 for v in vols_a) or any(v < 0.0 for v in vols_b):
        raise ValueError("volatilities must be non-negative")
    if any(abs(r) > 1.0 for r in corr):
        raise ValueError("correlations must lie in [-1, 1]")


def _segment_values(breakpoints, values, a, b):
    """Cut [a, b] at the breakpoints and pair sub-intervals with values."""
    bp = np.asarray(breakpoints, dtype=float)
    inner = bp[(bp > a) & (bp < b)]
    edges = np.concatenate(([a], inner, [b]))
    idx = np.searchsorted(bp, edges[:-1], side="right")
    vals = np.asarray(values, dtype=float)[idx]
    return edges, vals


def piecewise_product_integral(breakpoints, v1, v2, corr, a: float, b: float) -> float:
    """Exact integral of v1(u) * v2(u) * corr(u) over [a, b]."""
    if a < 0.0 or b < a:
        raise ValueError("need 0 <= a <= b")
    if a == b:
        return 0.0
    edges, x1 = _segment_values(breakpoints, v1, a, b)
    _, x2 = _segment_values(breakpoints, v2, a, b)
    _, xr = _segment_values(breakpoints, corr, a, b)
    return float(np.sum(x1 * x2 * xr * np.diff(edges)))


@dataclass(frozen=True)
class VolCorrSpec:
    """Piecewise-constant forward vol, exchange-ratio vol and correlation."""

    breakpoints: tuple[float, ...] = ()
    sigma_f: tuple[float, ...] = (0.0,)
    sigma_x: tuple[float, ...] = (0.0,)
    rho: tuple[float, ...] = (0.0,)

    def __post_init__(self):
        _validate_piecewise(self.breakpoints, self.sigma_f, self.sigma_x, self.rho)

    @classmethod
    def flat(cls, sigma_f: float, sigma_x: float, rho: float) -> "VolCorrSpec":
        return cls((), (sigma_f,), (sigma_x,), (rho,))

    def drift_integral(self, a: float, b: float) -> float:
        return -piecewise_product_integral(
            self.breakpoints, self.sigma_f, self.sigma_x, self.rho, a, b
        )

    def variance_integral(self, a: float, b: float) -> float:
        """Integral of sigma_f^2, the Black variance of the forward."""
        return piecewise_product_integral(
            self.breakpoints, self.sigma_f, self.sigma_f, [1.0] * len(self.sigma_f), a, b
        )

    def to_dict(self) -> dict:
        return {
            "breakpoints": list(self.breakpoints),
            "sigma_f": list(self.sigma_f),
            "sigma_X": list(self.sigma_x),
            "rho_fX": list(self.rho),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "VolCorrSpec":
        return cls(
            tuple(data.get("breakpoints", ())),
            tuple(data["sigma_f"]),
            tuple(data["sigma_X"]),
            tuple(data["rho_fX"]),
        )


@dataclass(frozen=True)
class SwapVolCorrSpec:
    """Swap-rate analogue of :class:`VolCorrSpec` (annuity-ratio vol)."""

    breakpoints: tuple[float, ...] = ()
    nu_f: tuple[float, ...] = (0.0,)
    nu_y: tuple[float, ...] = (0.0,)
    rho: tuple[float, ...] = (0.0,)

    def __post_init__(self):
        _validate_piecewise(self.breakpoints, self.nu_f, self.nu_y, self.rho)

    @classmethod
    def flat(cls, nu_f: float, nu_y: float, rho: float) -> "SwapVolCorrSpec":
        return cls((), (nu_f,), (nu_y,), (rho,))

    def drift_integral(self, a: float, b: float) -> float:
        return -piecewise_product_integral(
            self.breakpoints, self.nu_f, self.nu_y, self.rho, a, b
        )

    def variance_integral(self, a: float, b: float) -> float:
        return piecewise_product_integral(
            self.breakpoints, self.nu_f, self.nu_f, [1.0] * len(self.nu_f), a, b
        )

    def to_dict(self) -> dict:
        return {
            "breakpoints": list(self.breakpoints),
            "nu_f": list(self.nu_f),
            "nu_Y": list(self.nu_y),
            "rho_fY": list(self.rho),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SwapVolCorrSpec":
        return cls(
            tuple(data.get("breakpoints", ())),
            tuple(data["nu_f"]),
            tuple(data["nu_Y"]),
            tuple(data["rho_fY"]),
        )


def load_volcorr(path) -> VolCorrSpec | SwapVolCorrSpec:
    with open(path) as fh:
        data = json.load(fh)
    if "nu_f" in data:
        return SwapVolCorrSpec.from_dict(data)
    return VolCorrSpec.from_dict(data)


# -- forward-rate adjustment -------------------------------------------------

def drift_integral(spec: VolCorrSpec, a: float, b: float) -> float:
    return spec.drift_integral(a, b)


def quanto_mult(spec: VolCorrSpec | None, a: float, b: float) -> float:
    """Multiplicative adjustment QA over [a, b]; 1 when spec is None."""
    if spec is None:
        return 1.0
    return math.exp(spec.drift_integral(a, b))


def quanto_add(spec: VolCorrSpec | None, forward: float, a: float, b: float) -> float:
    """Additive adjustment QA' = F * (QA - 1)."""
    return forward * (quanto_mult(spec, a, b) - 1.0)


# -- swap-rate adjustment ----------------------------------------------------

def swap_drift_integral(spec: SwapVolCorrSpec, a: float, b: float) -> float:
    return spec.drift_integral(a, b)


def swap_quanto_mult(spec: SwapVolCorrSpec | None, a: float, b: float) -> float:
    if spec is None:
        return 1.0
    return math.exp(spec.drift_integral(a, b))


def swap_quanto_add(spec: SwapVolCorrSpec | None, rate: float, a: float, b: float) -> float:
    return rate * (swap_quanto_mult(spec, a, b) - 1.0)


# -- implied exchange-ratio vol ---------------------------------------------

def implied_sigma_x(
    basis: ForwardBasisCurve,
    forwards_f,
    forwards_d,
    sigma_f,
    rho,
) -> np.ndarray:
    """Bootstrap sigma_X segment by segment from a basis term structure.

    Convention: the whole basis is attributed to the measure adjustment
    by matching the additive forms, QA'(T1_i) = BA'(T1_i), i.e. the
    target cumulative adjustment for the forward fixing at T1_i is

        QA_i = 1 + (F_d,i / F_f,i) * (BA_i - 1)

    Segments run between consecutive fixing times (the first from the
    reference date); on each, sigma_X is read off the log-increment of
    the target.  A segment whose sign would require sigma_X < 0 raises
    :class:`InfeasibleVolError` rather than silently clamping.
    """
    n = len(basis)
    f_f = np.asarray(forwards_f, dtype=float)
    f_d = np.asarray(forwards_d, dtype=float)
    sf = np.broadcast_to(np.asarray(sigma_f, dtype=float), (n,))
    rh = np.broadcast_to(np.asarray(rho, dtype=float), (n,))
    if f_f.shape != (n,) or f_d.shape != (n,):
        raise ValueError("forward arrays must match the basis sample count")
    times = basis.fixing_times()
    if times[0] <= 0.0 or np.any(np.diff(times) <= 0.0):
        raise ValueError("basis fixings must be strictly increasing and after t0")

    qa_target = 1.0 + (f_d / f_f) * (basis.mult - 1.0)
    if np.any(qa_target <= 0.0):
        bad = np.nonzero(qa_target <= 0.0)[0].tolist()
        raise InfeasibleVolError(f"non-positive adjustment target at segments {bad}")
    ln_q = np.log(qa_target)
    incr = np.diff(np.concatenate(([0.0], ln_q)))
    dt = np.diff(np.concatenate(([0.0], times)))

    denom = sf * rh * dt
    if np.any(denom == 0.0):
        bad = np.nonzero(denom == 0.0)[0].tolist()
        raise InfeasibleVolError(
            f"cannot imply sigma_X with zero sigma_f or rho at segments {bad}"
        )
    out = -incr / denom
    neg = out < -1e-14
    if np.any(neg):
        bad = np.nonzero(neg)[0].tolist()
        raise InfeasibleVolError(
            f"sign-infeasible segments {bad}: basis and correlation imply sigma_X < 0"
        )
    return np.clip(out, 0.0, None)


def consistency_gap(
    fwd: YieldCurve,
    disc: YieldCurve,
    spec: VolCorrSpec,
    t1: Date,
    t2: Date,
) -> dict:
    """How much of the interval basis the vol/correlation spec explains.

    Under the same convention as :func:`implied_sigma_x` (match the
    additive adjustment to the additive basis), a spec fully explains
    the basis over [t1, t2] when QA' = BA', equivalently when the
    cumulative QA up to the fixing equals 1 + (F_d/F_f)(BA - 1).  The
    identification of basis with measure adjustment is a modeling
    choice, not an arbitrage identity, so both achieved and target
    values are reported along with their gaps instead of asserted.

    Both simple forwards are quoted in the discounting curve's day
    count so the additive comparison is exact.
    """
    b = (t1.serial - fwd.reference_date.serial) / 365.0
    qa = quanto_mult(spec, 0.0, b)
    f_f = fwd.simple_forward(t1, t2, disc.daycount)
    f_d = disc.simple_forward(t1, t2, disc.daycount)
    ba = multiplicative_basis(fwd, disc, t1, t2)
    ba_add = additive_basis(fwd, disc, t1, t2)
    qa_target = 1.0 + (f_d / f_f) * (ba - 1.0)
    qa_add = quanto_add(spec, f_f, 0.0, b)
    return {
        "qa": qa,
        "qa_target": qa_target,
        "mult_gap": qa - qa_target,
        "qa_add": qa_add,
        "ba_add": ba_add,
        "add_gap": qa_add - ba_add,
    }
