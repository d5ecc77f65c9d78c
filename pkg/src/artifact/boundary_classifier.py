"""Boundary behavior of dZ = sigma(Z-) dX at the infinite boundary points.

Two classification maps are produced for each (alpha, rho, sigma):

* the **explosion map** — can Z reach a boundary point in finite time? —
  with rows indexed by the three boundary points +inf, -inf and the
  two-sided point pm_inf (escape in absolute value with oscillating sign);
* the **entrance map** — can Z be started from the boundary point and enter
  the interior instantaneously in a Feller way?

Both maps are governed by finiteness of the tail functional

    I(sigma, alpha; A) = int_A sigma(x)^{-alpha} |x|^{alpha-1} dx,

over the relevant half-line or the full line, except at alpha = 1 where the
entrance condition uses the log variant int sigma(x)^{-1} log|x| dx instead.
The classification matrix (alpha against jump sidedness):

explosion:
    alpha < 1, increasing       -> tick at +inf  iff I(R_+) < inf
    alpha < 1, decreasing       -> tick at -inf  iff I(R_-) < inf
    alpha < 1, two-sided        -> tick at pm_inf iff I(R) < inf
    alpha >= 1                  -> cross everywhere (no explosion)
entrance:
    alpha < 1                   -> cross everywhere
    alpha = 1                   -> tick at pm_inf iff the log variant < inf
    alpha in (1,2), spectrally positive -> tick at +inf iff I(R_+) < inf
    alpha in (1,2), spectrally negative -> tick at -inf iff I(R_-) < inf
    alpha in (1,2), two-sided   -> tick at pm_inf iff I(R) < inf

At most one boundary point per map can carry a tick; an undecided integral
propagates to an "undecided" row, never to a silent guess.  alpha = 2 is
rejected outright (classical diffusive case, different theory).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import integrate

from .sigma_model import Composite, LogPower, SigmaFunction
from .stable_core import OutOfRangeError, Sidedness, StableParams

__all__ = [
    "Domain",
    "Method",
    "UndecidedIntegralError",
    "FinitenessVerdict",
    "integral_I",
    "integral_log",
    "RowVerdict",
    "BoundaryReport",
    "classify",
]

SCHEMA_VERSION = "1"


class Domain(Enum):
    POS_HALF = "pos_half"
    NEG_HALF = "neg_half"
    FULL_LINE = "full_line"


class Method(Enum):
    ANALYTIC_TAIL = "analytic_tail"
    ADAPTIVE_QUADRATURE = "adaptive_quadrature"


class UndecidedIntegralError(RuntimeError):
    """Raised by callers that cannot proceed without a decided integral."""


@dataclass(frozen=True)
class FinitenessVerdict:
    """Outcome of an improper-integral finiteness decision.

    status is one of "finite" (value > 0 with error_estimate/value < 1e-4),
    "infinite" (divergence_rate = tail exponent of the integrand, >= -1), or
    "undecided" (no declared tails and the quadrature ladder did not reach a
    decision).
    """

    status: str
    domain: Domain
    method: Method
    value: float | None = None
    error_estimate: float | None = None
    divergence_rate: float | None = None

    @property
    def finite(self) -> bool:
        return self.status == "finite"

    @property
    def decided(self) -> bool:
        return self.status != "undecided"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "domain": self.domain.value,
            "method": self.method.value,
            "value": self.value,
            "error_estimate": self.error_estimate,
            "divergence_rate": self.divergence_rate,
        }


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if alpha == 2.0:
        raise OutOfRangeError(
            "alpha = 2 is the classical diffusive boundary case and is out of "
            "scope for this classifier"
        )
    if not (0.0 < alpha < 2.0):
        raise OutOfRangeError(f"alpha must lie in (0, 2), got {alpha}")
    return alpha


# ---------------------------------------------------------------------------
# quadrature building blocks

_QUAD_KW = dict(epsabs=1e-12, epsrel=1e-10, limit=200)


def _half_integral_value(s: SigmaFunction, alpha: float, positive: bool) -> tuple[float, float]:
    """Numeric value of int_0^inf sigma(+/- x)^{-alpha} x^{alpha-1} dx.

    Head [0,1] via the substitution u = x^alpha (removes the x^{alpha-1}
    endpoint singularity); tail [1, inf) straight to QUADPACK's infinite
    transform.  Returns (value, error_estimate).
    """
    sign = 1.0 if positive else -1.0

    def head(u):
        x = u ** (1.0 / alpha)
        return s(sign * x) ** (-alpha) / alpha

    def tail(x):
        return s(sign * x) ** (-alpha) * x ** (alpha - 1.0)

    v1, e1 = integrate.quad(head, 0.0, 1.0, **_QUAD_KW)
    v2, e2 = integrate.quad(tail, 1.0, np.inf, **_QUAD_KW)
    return v1 + v2, e1 + e2


def _decade_piece(s: SigmaFunction, alpha: float, positive: bool, k: int) -> float:
    """int over [10^k, 10^{k+1}] of the I-integrand, log-substituted."""
    sign = 1.0 if positive else -1.0
    ln10 = math.log(10.0)

    def f(t):
        x = 10.0 ** t
        return s(sign * x) ** (-alpha) * x ** (alpha - 1.0) * x * ln10

    v, _ = integrate.quad(f, k, k + 1, **_QUAD_KW)
    return v


def _structural_tail(s: SigmaFunction, positive: bool) -> tuple[str, float | None, float | None]:
    """(kind, theta, log_q) describing the tail of sigma on the given side.

    kind: "power" (bare declared exponent), "logpower" (power theta with a
    (log)^q factor), or "unknown".
    """
    if isinstance(s, LogPower):
        return "logpower", s.theta, s.q
    if isinstance(s, Composite):
        theta = 0.0
        q = 0.0
        for part in s.parts:
            kind, th, qq = _structural_tail(part, positive)
            if kind == "unknown":
                return "unknown", None, None
            theta += th
            q += 0.0 if qq is None else qq
        return ("logpower" if q else "power"), theta, (q or None)
    t = s.tail_plus if positive else s.tail_minus
    if t is None:
        return "unknown", None, None
    return "power", float(t), None


def _half_verdict_analytic(
    s: SigmaFunction, alpha: float, positive: bool
) -> FinitenessVerdict | None:
    """Tail-exponent rule for one half-line, or None when no structure."""
    domain = Domain.POS_HALF if positive else Domain.NEG_HALF
    kind, theta, q = _structural_tail(s, positive)
    if kind == "unknown":
        return None
    rate = alpha - 1.0 - alpha * theta  # integrand tail exponent
    if theta > 1.0:
        value, err = _half_integral_value(s, alpha, positive)
        return FinitenessVerdict(
            "finite", domain, Method.ANALYTIC_TAIL, value=value, error_estimate=err
        )
    if theta < 1.0:
        return FinitenessVerdict(
            "infinite", domain, Method.ANALYTIC_TAIL, divergence_rate=rate
        )
    # theta == 1: bare power diverges logarithmically; a log factor decides
    if kind == "logpower" and q is not None and alpha * q > 1.0:
        value, err = _half_integral_value(s, alpha, positive)
        return FinitenessVerdict(
            "finite", domain, Method.ANALYTIC_TAIL, value=value, error_estimate=err
        )
    return FinitenessVerdict(
        "infinite", domain, Method.ANALYTIC_TAIL, divergence_rate=-1.0
    )


def _half_verdict_ladder(s: SigmaFunction, alpha: float, positive: bool) -> FinitenessVerdict:
    """Decade ladder [1, 1e8] with geometric (Richardson-type) extrapolation."""
    domain = Domain.POS_HALF if positive else Domain.NEG_HALF
    pieces = [_decade_piece(s, alpha, positive, k) for k in range(8)]
    ratios = [
        pieces[i + 1] / pieces[i] for i in range(len(pieces) - 1) if pieces[i] > 0
    ]
    if len(ratios) < 2:
        return FinitenessVerdict("undecided", domain, Method.ADAPTIVE_QUADRATURE)
    tail_ratios = ratios[-3:]
    rbar = float(np.exp(np.mean(np.log(tail_ratios))))
    fitted_e = math.log10(rbar) - 1.0  # integrand tail exponent
    if fitted_e >= -0.98:
        return FinitenessVerdict(
            "infinite", domain, Method.ADAPTIVE_QUADRATURE, divergence_rate=fitted_e
        )
    if fitted_e <= -1.05:
        head, ehead = integrate.quad(
            lambda u: s((1.0 if positive else -1.0) * u ** (1.0 / alpha)) ** (-alpha)
            / alpha,
            0.0,
            1.0,
            **_QUAD_KW,
        )
        body = head + sum(pieces)
        tail_extrap = pieces[-1] * rbar / (1.0 - rbar)
        spread = max(tail_ratios) - min(tail_ratios)
        extrap_err = abs(pieces[-1]) * spread / (1.0 - rbar) ** 2 + ehead
        value = body + tail_extrap
        if value > 0 and extrap_err / value < 1e-4:
            return FinitenessVerdict(
                "finite",
                domain,
                Method.ADAPTIVE_QUADRATURE,
                value=value,
                error_estimate=extrap_err,
            )
        return FinitenessVerdict("undecided", domain, Method.ADAPTIVE_QUADRATURE)
    return FinitenessVerdict("undecided", domain, Method.ADAPTIVE_QUADRATURE)


def integral_I(
    s: SigmaFunction, alpha: float, domain: Domain = Domain.FULL_LINE, method: str = "auto"
) -> FinitenessVerdict:
    """Finiteness verdict for I(sigma, alpha; domain).

    method "auto" uses declared/structural tail exponents when available
    (AnalyticTail) and otherwise the adaptive quadrature ladder;
    "analytic_tail" and "adaptive_quadrature" force one route (the former
    returns undecided when no tail structure exists).
    """
    alpha = _check_alpha(alpha)
    if domain == Domain.FULL_LINE:
        left = integral_I(s, alpha, Domain.NEG_HALF, method)
        right = integral_I(s, alpha, Domain.POS_HALF, method)
        if left.status == "infinite" or right.status == "infinite":
            rates = [
                v.divergence_rate
                for v in (left, right)
                if v.status == "infinite" and v.divergence_rate is not None
            ]
            used = left.method if left.status == "infinite" else right.method
            return FinitenessVerdict(
                "infinite", Domain.FULL_LINE, used, divergence_rate=max(rates)
            )
        if left.finite and right.finite:
            return FinitenessVerdict(
                "finite",
                Domain.FULL_LINE,
                left.method if left.method == right.method else Method.ADAPTIVE_QUADRATURE,
                value=left.value + right.value,
                error_estimate=left.error_estimate + right.error_estimate,
            )
        return FinitenessVerdict(
            "undecided", Domain.FULL_LINE, Method.ADAPTIVE_QUADRATURE
        )
    positive = domain == Domain.POS_HALF
    if method == "auto":
        verdict = _half_verdict_analytic(s, alpha, positive)
        if verdict is not None:
            return verdict
        return _half_verdict_ladder(s, alpha, positive)
    if method == "analytic_tail":
        verdict = _half_verdict_analytic(s, alpha, positive)
        if verdict is None:
            return FinitenessVerdict("undecided", domain, Method.ANALYTIC_TAIL)
        return verdict
    if method == "adaptive_quadrature":
        return _half_verdict_ladder(s, alpha, positive)
    raise ValueError(f"unknown method {method!r}")


def integral_log(s: SigmaFunction, method: str = "auto") -> FinitenessVerdict:
    """Finiteness of the alpha = 1 entrance functional int sigma^{-1} log|x| dx.

    The integrand is locally integrable near the origin for any admissible
    sigma, so finiteness is a pure tail question; the reported value is the
    positive-part integral int sigma(x)^{-1} log_+|x| dx (always > 0), which
    carries the same finiteness content.
    """
    # structural rule: sigma ~ |x|^theta (log^q): integrand ~ x^{-theta} log x
    verdicts = []
    for positive in (True, False):
        domain = Domain.POS_HALF if positive else Domain.NEG_HALF
        kind, theta, q = _structural_tail(s, positive)
        if kind == "unknown" or method == "adaptive_quadrature":
            verdicts.append(_log_ladder(s, positive))
            continue
        if theta > 1.0 or (theta == 1.0 and kind == "logpower" and q is not None and q > 2.0):
            value, err = _log_half_value(s, positive)
            verdicts.append(
                FinitenessVerdict(
                    "finite", domain, Method.ANALYTIC_TAIL, value=value, error_estimate=err
                )
            )
        else:
            verdicts.append(
                FinitenessVerdict(
                    "infinite", domain, Method.ANALYTIC_TAIL, divergence_rate=-theta
                )
            )
    right, left = verdicts
    if left.status == "infinite" or right.status == "infinite":
        rates = [
            v.divergence_rate
            for v in (left, right)
            if v.status == "infinite" and v.divergence_rate is not None
        ]
        return FinitenessVerdict(
            "infinite", Domain.FULL_LINE, Method.ANALYTIC_TAIL, divergence_rate=max(rates)
        )
    if left.finite and right.finite:
        return FinitenessVerdict(
            "finite",
            Domain.FULL_LINE,
            left.method,
            value=left.value + right.value,
            error_estimate=left.error_estimate + right.error_estimate,
        )
    return FinitenessVerdict("undecided", Domain.FULL_LINE, Method.ADAPTIVE_QUADRATURE)


def _log_half_value(s: SigmaFunction, positive: bool) -> tuple[float, float]:
    sign = 1.0 if positive else -1.0

    def f(x):
        return math.log(x) / s(sign * x)

    v, e = integrate.quad(f, 1.0, np.inf, **_QUAD_KW)
    return v, e


def _log_ladder(s: SigmaFunction, positive: bool) -> FinitenessVerdict:
    domain = Domain.POS_HALF if positive else Domain.NEG_HALF
    sign = 1.0 if positive else -1.0
    ln10 = math.log(10.0)
    pieces = []
    for k in range(8):
        v, _ = integrate.quad(
            lambda t: math.log(10.0 ** t) / s(sign * 10.0 ** t) * 10.0 ** t * ln10,
            k,
            k + 1,
            **_QUAD_KW,
        )
        pieces.append(v)
    ratios = [pieces[i + 1] / pieces[i] for i in range(len(pieces) - 1) if pieces[i] > 0]
    if len(ratios) < 2:
        return FinitenessVerdict("undecided", domain, Method.ADAPTIVE_QUADRATURE)
    rbar = float(np.exp(np.mean(np.log(ratios[-3:]))))
    if rbar >= 10 ** -0.02:
        return FinitenessVerdict(
            "infinite",
            domain,
            Method.ADAPTIVE_QUADRATURE,
            divergence_rate=math.log10(rbar) - 1.0,
        )
    if rbar <= 10 ** -0.05:
        value = sum(pieces) + pieces[-1] * rbar / (1.0 - rbar)
        return FinitenessVerdict(
            "finite",
            domain,
            Method.ADAPTIVE_QUADRATURE,
            value=value,
            error_estimate=abs(pieces[-1]) * rbar / (1.0 - rbar) ** 2 * 0.01,
        )
    return FinitenessVerdict("undecided", domain, Method.ADAPTIVE_QUADRATURE)


# ---------------------------------------------------------------------------
# the classification maps

BOUNDARY_POINTS = ("+inf", "-inf", "pm_inf")


@dataclass(frozen=True)
class RowVerdict:
    verdict: str  # "tick" | "cross" | "undecided"
    justification: str
    integral: FinitenessVerdict | None = None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "justification": self.justification,
            "integral": None if self.integral is None else self.integral.to_dict(),
        }


@dataclass(frozen=True)
class BoundaryReport:
    params: StableParams
    sigma_description: str
    explosion: dict
    entrance: dict

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "inputs": {
                "alpha": self.params.alpha,
                "rho": self.params.rho,
                "sidedness": self.params.sidedness.value,
                "sigma": self.sigma_description,
            },
            "explosion": {k: v.to_dict() for k, v in self.explosion.items()},
            "entrance": {k: v.to_dict() for k, v in self.entrance.items()},
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def ticks(self, which: str) -> list[str]:
        if which not in ("explosion", "entrance"):
            raise ValueError(f"which must be 'explosion' or 'entrance', got {which!r}")
        table = self.explosion if which == "explosion" else self.entrance
        return [k for k, v in table.items() if v.verdict == "tick"]


def _cross(justification: str) -> RowVerdict:
    return RowVerdict("cross", justification)


def _from_integral(v: FinitenessVerdict, rule: str) -> RowVerdict:
    if v.status == "undecided":
        return RowVerdict("undecided", rule + "; integral undecided", v)
    if v.finite:
        return RowVerdict("tick", rule + "; integral finite", v)
    return RowVerdict("cross", rule + "; integral infinite", v)


def classify(p: StableParams, s: SigmaFunction, method: str = "auto") -> BoundaryReport:
    """Explosion and entrance maps for dZ = sigma(Z-) dX with driver (alpha, rho)."""
    a = _check_alpha(p.alpha)
    side = p.sidedness
    explosion = {k: None for k in BOUNDARY_POINTS}
    entrance = {k: None for k in BOUNDARY_POINTS}

    no_explosion = "explosion requires alpha < 1 (time change cannot exhaust otherwise)"
    if a < 1.0:
        if side is Sidedness.SPECTRALLY_POSITIVE:  # increasing paths
            v = integral_I(s, a, Domain.POS_HALF, method)
            explosion["+inf"] = _from_integral(
                v, "explosion map, row alpha<1 increasing: reachable endpoint +inf, "
                   "test I(sigma,alpha; R_+)"
            )
            explosion["-inf"] = _cross("increasing paths cannot approach -inf")
            explosion["pm_inf"] = _cross("monotone paths have a one-sided limit")
        elif side is Sidedness.SPECTRALLY_NEGATIVE:  # decreasing paths
            v = integral_I(s, a, Domain.NEG_HALF, method)
            explosion["-inf"] = _from_integral(
                v, "explosion map, row alpha<1 decreasing: reachable endpoint -inf, "
                   "test I(sigma,alpha; R_-)"
            )
            explosion["+inf"] = _cross("decreasing paths cannot approach +inf")
            explosion["pm_inf"] = _cross("monotone paths have a one-sided limit")
        else:
            v = integral_I(s, a, Domain.FULL_LINE, method)
            explosion["pm_inf"] = _from_integral(
                v, "explosion map, row alpha<1 two-sided: oscillating escape pm_inf, "
                   "test I(sigma,alpha; R)"
            )
            explosion["+inf"] = _cross(
                "two-sided jumps oscillate: one-sided explosion impossible"
            )
            explosion["-inf"] = _cross(
                "two-sided jumps oscillate: one-sided explosion impossible"
            )
    else:
        for k in BOUNDARY_POINTS:
            explosion[k] = _cross(no_explosion)

    if a < 1.0:
        reason = (
            "entrance map, rows alpha<1: no entrance from infinity "
            "(monotone escape or transient oscillation)"
        )
        for k in BOUNDARY_POINTS:
            entrance[k] = _cross(reason)
    elif a == 1.0:
        v = integral_log(s, method)
        entrance["pm_inf"] = _from_integral(
            v, "entrance map, row alpha=1 two-sided: test int sigma^{-1} log|x| dx"
        )
        entrance["+inf"] = _cross("alpha=1 entrance is a two-sided (pm_inf) phenomenon")
        entrance["-inf"] = _cross("alpha=1 entrance is a two-sided (pm_inf) phenomenon")
    else:
        if side is Sidedness.SPECTRALLY_POSITIVE:
            v = integral_I(s, a, Domain.POS_HALF, method)
            entrance["+inf"] = _from_integral(
                v, "entrance map, row alpha in (1,2) spectrally positive: entrance "
                   "at +inf, test I(sigma,alpha; R_+)"
            )
            entrance["-inf"] = _cross("no downward jumps: -inf is not an entrance")
            entrance["pm_inf"] = _cross("one-sided case: entrance is one-sided")
        elif side is Sidedness.SPECTRALLY_NEGATIVE:
            v = integral_I(s, a, Domain.NEG_HALF, method)
            entrance["-inf"] = _from_integral(
                v, "entrance map, row alpha in (1,2) spectrally negative: entrance "
                   "at -inf, test I(sigma,alpha; R_-)"
            )
            entrance["+inf"] = _cross("no upward jumps: +inf is not an entrance")
            entrance["pm_inf"] = _cross("one-sided case: entrance is one-sided")
        else:
            v = integral_I(s, a, Domain.FULL_LINE, method)
            entrance["pm_inf"] = _from_integral(
                v, "entrance map, row alpha in (1,2) two-sided: entrance at pm_inf, "
                   "test I(sigma,alpha; R)"
            )
            entrance["+inf"] = _cross("two-sided case: entrance is the pm_inf point")
            entrance["-inf"] = _cross("two-sided case: entrance is the pm_inf point")

    return BoundaryReport(
        params=p,
        sigma_description=s.describe(),
        explosion=explosion,
        entrance=entrance,
    )
