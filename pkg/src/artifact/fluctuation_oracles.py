"""Closed-form fluctuation laws for the stable driver, used as oracles.

Every operation returns an :class:`OracleResult` carrying the value and an
absolute error estimate (zero for pure closed forms, the quadrature bound
otherwise).  Formulas that are only canonical up to one multiplicative
constant (the killed half-line potential) say so in their docstrings; all
others are exact in the package normalization ``Psi(z) = |z|^alpha
exp(i pi alpha (1/2 - rho) sgn z)``.

Notation: a = alpha rho, ahat = alpha rhohat throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .boundary_classifier import Domain, integral_I
from .sigma_model import SigmaFunction
from .stable_core import DomainError, OutOfRangeError, Sidedness, StableParams

__all__ = [
    "OracleResult",
    "WrongBranchError",
    "h_function",
    "overshoot_cdf",
    "exit_density_avoid_zero",
    "strip_exit_density",
    "positive_exit_density",
    "creep_probability",
    "killed_potential_density",
    "halfline_killed_potential",
    "cauchy_killed_potential",
    "expected_explosion_time",
    "spectrally_positive_interval_exit",
]


class WrongBranchError(ValueError):
    """The requested identity belongs to a different parameter branch."""


@dataclass(frozen=True)
class OracleResult:
    """A numeric oracle value with an absolute error estimate."""

    value: float
    abs_error_estimate: float = 0.0

    def __float__(self) -> float:
        return self.value


_QUAD_KW = dict(epsabs=1e-13, epsrel=1e-11, limit=400)


def _quad(f, a, b, **kw):
    opts = dict(_QUAD_KW)
    opts.update(kw)
    return integrate.quad(f, a, b, **opts)


# ---------------------------------------------------------------------------
# the h kernel (free potential / invariant density shape)


def h_function(p: StableParams, x: float) -> OracleResult:
    """Sided power kernel h governing occupation and duality weights.

        h(w) = |Gamma(1-alpha)|/pi * ( sin(pi a rhohat) 1{w >= 0}
                                     + sin(pi a rho)    1{w < 0} ) |w|^{alpha-1},

    for alpha != 1, and h == 1 identically at alpha = 1.  h(x - y) is the
    free potential density: the expected occupation density at y of a path
    started at x (downward reach is weighted by the rho-hat side).  For
    alpha < 1 it diverges at w = 0 (returns +inf there); for alpha > 1 it
    vanishes at 0.  Satisfies |w|^{2(alpha-1)} h(1/w) = h(w).
    """
    a = p.alpha
    if a == 1.0:
        return OracleResult(1.0, 0.0)
    x = float(x)
    coeff = abs(math.gamma(1.0 - a)) / math.pi
    side = math.sin(math.pi * a * p.rho_hat) if x >= 0 else math.sin(math.pi * a * p.rho)
    if x == 0.0:
        if side == 0.0:
            return OracleResult(0.0, 0.0)
        return OracleResult(math.inf if a < 1.0 else 0.0, 0.0)
    return OracleResult(coeff * side * abs(x) ** (a - 1.0), 0.0)


# ---------------------------------------------------------------------------
# first passage below a level


def overshoot_cdf(p: StableParams, z: float, level: float, y: float) -> OracleResult:
    """P(level - X_tau <= y) for tau the first passage below `level` from z > level.

    The undershoot depth law of the first passage below a level, i.e. the
    overshoot of the descending ladder process (index ahat = alpha rhohat):

        F(y) = sin(pi ahat)/pi * int_0^{y/(z-level)} t^{-ahat} (1+t)^{-1} dt.

    Equals the regularized incomplete beta I_{y/(z-level+y)}(1-ahat, ahat).
    Degenerate branches: no downward jumps and no downward creep (increasing
    paths) give the zero measure; downward creep (spectrally positive,
    ahat = 1) gives the point mass at depth 0.
    """
    z, level, y = float(z), float(level), float(y)
    if z <= level:
        raise DomainError(f"start z={z} must lie strictly above level={level}")
    ahat = p.alpha * p.rho_hat
    if ahat >= 1.0 - 1e-12:
        # continuous downward passage: depth is exactly zero
        return OracleResult(1.0 if y >= 0.0 else 0.0, 0.0)
    if y <= 0.0:
        return OracleResult(0.0, 0.0)
    if ahat <= 1e-12:
        return OracleResult(0.0, 0.0)  # never passes below: defective (zero) law
    if math.isinf(y):
        return OracleResult(1.0, 0.0)
    T = y / (z - level)
    # u = t^{1-ahat} flattens the endpoint singularity exactly
    ex = 1.0 / (1.0 - ahat)

    def f(u):
        return 1.0 / (1.0 + u**ex)

    upper = T ** (1.0 - ahat)
    v, e = _quad(f, 0.0, upper)
    c = math.sin(math.pi * ahat) / math.pi * ex
    return OracleResult(c * v, c * e)


# ---------------------------------------------------------------------------
# two-sided exit avoiding the origin


def exit_density_avoid_zero(p: StableParams, x: float, y: float) -> OracleResult:
    """Density in y of exiting [-1,1] above, before hitting 0, from x in (0,1).

        P_x( X at the exit of (-1,1) is in dy ; exit happens before the path
             hits the origin ) / dy,        y > 1,

    equal to

        sin(pi a)/pi [ (1+x)^{ahat} (1-x)^{a} (1+y)^{-ahat} (y-1)^{-a} (y-x)^{-1}
          - c (1+y)^{-ahat} (y-1)^{-a} y^{-1} x^{alpha-1}
              int_1^{1/x} (t-1)^{a-1} (t+1)^{ahat-1} dt ],

    with a = alpha rho, ahat = alpha rhohat and c = max(alpha-1, 0); for
    alpha <= 1 the origin is polar and the subtracted term vanishes.
    """
    x, y = float(x), float(y)
    if not (0.0 < x < 1.0):
        raise DomainError(f"x must lie in (0,1), got {x}")
    if y <= 1.0:
        raise DomainError(f"y must lie in (1, inf), got {y}")
    a = p.alpha * p.rho
    ahat = p.alpha * p.rho_hat
    if not (0.0 < a < 1.0):
        raise WrongBranchError(
            "exit law requires 0 < alpha rho < 1 (upward jumps present, no upward creep)"
        )
    c0 = math.sin(math.pi * a) / math.pi
    term1 = (
        c0
        * (1.0 + x) ** ahat
        * (1.0 - x) ** a
        * (1.0 + y) ** (-ahat)
        * (y - 1.0) ** (-a)
        / (y - x)
    )
    calpha = max(p.alpha - 1.0, 0.0)
    if calpha == 0.0:
        return OracleResult(term1, 0.0)
    # J = int_1^{1/x} (t-1)^{a-1}(t+1)^{ahat-1} dt via u = (t-1)^a
    def f(u):
        return (2.0 + u ** (1.0 / a)) ** (ahat - 1.0) / a

    upper = (1.0 / x - 1.0) ** a
    J, eJ = _quad(f, 0.0, upper)
    pref = c0 * (1.0 + y) ** (-ahat) * (y - 1.0) ** (-a) / y * x ** (p.alpha - 1.0)
    value = term1 - calpha * pref * J
    return OracleResult(value, calpha * pref * eJ)


# ---------------------------------------------------------------------------
# entry into the strip [-1,1] (transient case alpha < 1)


def strip_exit_density(p: StableParams, x: float, y: float) -> OracleResult:
    """Density in y of the position at first entry into [-1,1] from |x| > 1.

    For alpha < 1 with two-sided jumps (the strip is entered with
    probability < 1; this is the density of the defective entry law):

        f(y | x) = sin(pi ahat)/pi (1+x)^{a} (x-1)^{ahat}
                   (1+y)^{-a} (1-y)^{-ahat} (x-y)^{-1},       x > 1,

    and the mirror image (rho <-> rhohat, x -> -x, y -> -y) for x < -1.
    """
    x, y = float(x), float(y)
    if p.alpha >= 1.0:
        raise WrongBranchError("strip entry law is the transient branch alpha < 1")
    if not (0.0 < p.rho < 1.0):
        raise WrongBranchError("strip entry law needs two-sided jumps (0 < rho < 1)")
    if abs(x) <= 1.0:
        raise DomainError(f"start must lie outside [-1,1], got {x}")
    if not (-1.0 < y < 1.0):
        raise DomainError(f"entry position must lie in (-1,1), got {y}")
    if x < 0:
        x, y = -x, -y
        a, ahat = p.alpha * p.rho_hat, p.alpha * p.rho
    else:
        a, ahat = p.alpha * p.rho, p.alpha * p.rho_hat
    value = (
        math.sin(math.pi * ahat)
        / math.pi
        * (1.0 + x) ** a
        * (x - 1.0) ** ahat
        * (1.0 + y) ** (-a)
        * (1.0 - y) ** (-ahat)
        / (x - y)
    )
    return OracleResult(value, 0.0)


# ---------------------------------------------------------------------------
# exit of (-infty, 1] before (-infty, 0] : jump branch and creep branch


def positive_exit_density(p: StableParams, x: float, y: float) -> OracleResult:
    """Density of X at first passage above 1 before dropping below 0.

    Started at x in (0,1), on the branch with upward jumps (alpha rho < 1):

        P_x( X at tau^{(1,inf)} in dy ; tau^{(1,inf)} < tau^{(-inf,0)} )/dy
        = sin(pi a)/pi (1-x)^{a} x^{ahat} (y-1)^{-a} y^{-ahat} (y-x)^{-1},

    y > 1, a = alpha rho, ahat = alpha rhohat.
    """
    x, y = float(x), float(y)
    if not (0.0 < x < 1.0):
        raise DomainError(f"x must lie in (0,1), got {x}")
    if y <= 1.0:
        raise DomainError(f"y must lie in (1, inf), got {y}")
    a = p.alpha * p.rho
    ahat = p.alpha * p.rho_hat
    if a >= 1.0 - 1e-12:
        raise WrongBranchError(
            "alpha rho = 1 is the upward-creep branch: passage above is at the "
            "boundary point exactly; use creep_probability"
        )
    value = (
        math.sin(math.pi * a)
        / math.pi
        * (1.0 - x) ** a
        * x**ahat
        * (y - 1.0) ** (-a)
        * y ** (-ahat)
        / (y - x)
    )
    return OracleResult(value, 0.0)


def creep_probability(p: StableParams, x: float) -> OracleResult:
    """P_x( X reaches 1 continuously before dropping below 0 ), x in (0,1).

    Only the spectrally negative branch (rho = 1/alpha, alpha in (1,2))
    creeps upward; other parameters raise WrongBranchError.  The law of the
    position at first passage above 1 is then the unit mass at 1 on the
    event of no prior drop below 0, with

        P = 1 - sin(pi ahat)/pi * x^{ahat} (1-x)^{a}
              int_1^inf (y-1)^{-ahat} y^{-a} (y-1+x)^{-1} dy,

    a = alpha rho = 1, ahat = alpha - 1.  Equivalently P = x^{alpha-1}
    (the scale-function form, used as an independent regression check).
    """
    x = float(x)
    if not (0.0 < x < 1.0):
        raise DomainError(f"x must lie in (0,1), got {x}")
    if p.sidedness is not Sidedness.SPECTRALLY_NEGATIVE or p.alpha <= 1.0:
        raise WrongBranchError(
            "upward creep requires the spectrally negative branch rho = 1/alpha, "
            "alpha in (1,2)"
        )
    a = p.alpha * p.rho  # = 1 on this branch
    ahat = p.alpha * p.rho_hat  # = alpha - 1

    # near-edge piece [1,2] with u = (y-1)^{1-ahat}, then the smooth tail
    ex = 1.0 / (1.0 - ahat)

    def near(u):
        yy = 1.0 + u**ex
        return yy ** (-a) / (u**ex + x) * ex

    def far(yy):
        return (yy - 1.0) ** (-ahat) * yy ** (-a) / (yy - 1.0 + x)

    v1, e1 = _quad(near, 0.0, 1.0)
    v2, e2 = _quad(far, 2.0, np.inf)
    c = math.sin(math.pi * ahat) / math.pi * x**ahat * (1.0 - x) ** a
    return OracleResult(1.0 - c * (v1 + v2), c * (e1 + e2))


# ---------------------------------------------------------------------------
# potentials


def _sided_sin(p: StableParams, w: float) -> float:
    if w > 0:
        return math.sin(math.pi * p.alpha * p.rho)
    if w < 0:
        return math.sin(math.pi * p.alpha * p.rho_hat)
    return 0.0


def killed_potential_density(p: StableParams, x: float, y: float) -> OracleResult:
    """Potential density g(x, y) of the process killed on hitting the origin.

    For alpha in (1,2) (points are hit):

        g(x,y) = -Gamma(1-alpha)/pi ( |y|^{alpha-1} s(y)
                  - |y-x|^{alpha-1} s(y-x) + |x|^{alpha-1} s(-x) ),

    s(w) = sin(pi a rho) 1{w>0} + sin(pi a rhohat) 1{w<0}; equivalently
    g(x,y) = h(x) + h(-y) - h(x-y) in terms of the harmonic kernel
    h(w) = |Gamma(1-alpha)|/pi (sin(pi a rhohat) 1{w>=0} + sin(pi a rho)
    1{w<0}) |w|^{alpha-1}.  The normalization is pinned two ways: in the
    symmetric case the compensated resolvent kernel is
    (1/pi) int (1-cos(zw)) z^{-alpha} dz = -Gamma(1-alpha) sin(pi alpha/2)/pi
    * |w|^{alpha-1} = h(w), and Monte Carlo occupation measures of the
    origin-killed process match g with this constant (and are off by pi
    with 1/pi^2).  The ratio g(x,y)/g(y,y) is the probability of hitting y
    before 0 from x.
    """
    if not (1.0 < p.alpha < 2.0):
        raise OutOfRangeError("origin-killed potential requires alpha in (1,2)")
    x, y = float(x), float(y)
    a = p.alpha
    coeff = -math.gamma(1.0 - a) / math.pi
    value = coeff * (
        abs(y) ** (a - 1.0) * _sided_sin(p, y)
        - abs(y - x) ** (a - 1.0) * _sided_sin(p, y - x)
        + abs(x) ** (a - 1.0) * _sided_sin(p, -x)
    )
    return OracleResult(value, 0.0)


def halfline_killed_potential(p: StableParams, x: float, y: float) -> OracleResult:
    """Potential density (up to one multiplicative constant) on (0, inf) of the
    spectrally one-sided process killed on leaving the positive half-line:

        G(x, y) ∝ x^{alpha-1} - (x-y)^{alpha-1} 1{x >= y},    x, y > 0,

    alpha in (1,2).  Only ratios of values are normalization-free.
    """
    if not (1.0 < p.alpha < 2.0):
        raise OutOfRangeError("half-line potential requires alpha in (1,2)")
    if p.sidedness is Sidedness.TWO_SIDED:
        raise WrongBranchError("half-line potential is the spectrally one-sided branch")
    x, y = float(x), float(y)
    if x <= 0.0 or y <= 0.0:
        raise DomainError("x and y must be positive")
    a = p.alpha
    value = x ** (a - 1.0)
    if x >= y:
        value -= (x - y) ** (a - 1.0)
    return OracleResult(value, 0.0)


def cauchy_killed_potential(s: SigmaFunction, x: float, y: float) -> OracleResult:
    """Potential density of the time-changed Cauchy process killed on first
    entry into (-1, 1), evaluated at |y| >= 1 from |x| >= 1 (x may be +/-inf):

        g(x, y) = sigma(y)^{-1} (1/pi) arccosh| (1 - x y) / (x - y) |,

    and from the boundary-at-infinity start g(inf, y) = sigma(y)^{-1}
    (1/pi) arccosh|y|.  The argument of arccosh is >= 1 on the domain
    because (1-xy)^2 - (x-y)^2 = (x^2-1)(y^2-1) >= 0.
    """
    x, y = float(x), float(y)
    if abs(y) < 1.0:
        raise DomainError(f"y must satisfy |y| >= 1, got {y}")
    if math.isinf(x):
        w = abs(y)
    else:
        if abs(x) < 1.0:
            raise DomainError(f"x must satisfy |x| >= 1 (or be infinite), got {x}")
        if x == y:
            return OracleResult(math.inf, 0.0)
        w = abs((1.0 - x * y) / (x - y))
    w = max(w, 1.0)
    return OracleResult(math.acosh(w) / math.pi / float(s(y)), 0.0)


def expected_explosion_time(p: StableParams, s: SigmaFunction, x0: float) -> OracleResult:
    """E_{x0}[ T ] for the explosion time T of dZ = sigma(Z-) dX, alpha < 1.

        E_{x0}[T] = int_R sigma(y)^{-alpha} h(x0 - y) dy,

    finite exactly when the explosion integral I(sigma, alpha; domain of the
    reachable boundary) is finite; returns value +inf otherwise.
    """
    if p.alpha >= 1.0:
        raise OutOfRangeError("explosion requires alpha < 1")
    x0 = float(x0)
    a = p.alpha
    side = p.sidedness
    if side is Sidedness.SPECTRALLY_POSITIVE:
        domain = Domain.POS_HALF
    elif side is Sidedness.SPECTRALLY_NEGATIVE:
        domain = Domain.NEG_HALF
    else:
        domain = Domain.FULL_LINE
    verdict = integral_I(s, a, domain)
    if not verdict.decided:
        raise RuntimeError(
            "cannot certify finiteness of the explosion integral for this sigma"
        )
    if not verdict.finite:
        return OracleResult(math.inf, 0.0)

    coeff = abs(math.gamma(1.0 - a)) / math.pi
    cplus = coeff * math.sin(math.pi * a * p.rho_hat)  # weight of h on w > 0 (y < x0)
    cminus = coeff * math.sin(math.pi * a * p.rho)  # weight of h on w < 0 (y > x0)

    total, err = 0.0, 0.0
    # below the start: w = x0 - y > 0, u = (x0 - y)^alpha near the singularity
    if cplus > 0.0:
        v1, e1 = _quad(lambda u: s(x0 - u ** (1.0 / a)) ** (-a) / a, 0.0, 1.0)
        v2, e2 = _quad(
            lambda y: s(y) ** (-a) * (x0 - y) ** (a - 1.0), -np.inf, x0 - 1.0
        )
        total += cplus * (v1 + v2)
        err += cplus * (e1 + e2)
    if cminus > 0.0:
        v1, e1 = _quad(lambda u: s(x0 + u ** (1.0 / a)) ** (-a) / a, 0.0, 1.0)
        v2, e2 = _quad(
            lambda y: s(y) ** (-a) * (y - x0) ** (a - 1.0), x0 + 1.0, np.inf
        )
        total += cminus * (v1 + v2)
        err += cminus * (e1 + e2)
    return OracleResult(total, err)


# ---------------------------------------------------------------------------
# spectrally positive interval entry


def spectrally_positive_interval_exit(p: StableParams, z: float, y: float) -> OracleResult:
    """Law of the position at first entry into [-1, 1] for a spectrally
    positive driver started at z outside the interval, alpha in (1, 2).

    From above (z > 1) the process creeps downward: entry is at +1 with
    probability one.  From below (z < -1, b = |z|) entry happens either by
    an upward jump landing inside — the absolutely continuous part

        f(y) = sin(pi(alpha-1))/pi (b-1)^{alpha-1} (1+y)^{1-alpha} (b+y)^{-1},

    y in (-1, 1) — or by overshooting past +1 and creeping back down into
    the interval at +1, the atom

        m(z) = sin(pi(alpha-1))/pi int_0^{(b-1)/(b+1)} t^{alpha-2} (1-t)^{1-alpha} dt
             = I_{(b-1)/(b+1)}(alpha-1, 2-alpha)            (regularized beta).

    Calling convention: y in (-1,1) returns the density; y = +1 returns the
    atom mass at +1; y = -1 returns 0 (no atom there).  f integrates with the
    atom to total mass one.
    """
    if p.sidedness is not Sidedness.SPECTRALLY_POSITIVE or not (1.0 < p.alpha < 2.0):
        raise WrongBranchError(
            "interval entry law is for the spectrally positive branch, alpha in (1,2)"
        )
    z, y = float(z), float(y)
    if abs(z) <= 1.0:
        raise DomainError(f"start must lie outside [-1,1], got {z}")
    if not (-1.0 <= y <= 1.0):
        raise DomainError(f"entry position must lie in [-1,1], got {y}")
    a = p.alpha
    if z > 1.0:
        return OracleResult(1.0 if y == 1.0 else 0.0, 0.0)
    b = -z
    if y == -1.0:
        return OracleResult(0.0, 0.0)
    if y == 1.0:
        T = (b - 1.0) / (b + 1.0)
        # u = t^{alpha-1} flattens the left endpoint
        def f(u):
            return (1.0 - u ** (1.0 / (a - 1.0))) ** (1.0 - a) / (a - 1.0)

        v, e = _quad(f, 0.0, T ** (a - 1.0))
        c = math.sin(math.pi * (a - 1.0)) / math.pi
        return OracleResult(c * v, c * e)
    value = (
        math.sin(math.pi * (a - 1.0))
        / math.pi
        * (b - 1.0) ** (a - 1.0)
        * (1.0 + y) ** (1.0 - a)
        / (b + y)
    )
    return OracleResult(value, 0.0)
