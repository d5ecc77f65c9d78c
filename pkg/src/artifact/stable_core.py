"""Driving-noise primitives: strictly stable processes in the (alpha, rho) plane.

Everything in this package keys off a two-parameter family of strictly
stable Levy processes, normalized through the characteristic exponent

    Psi(z) = -log E[exp(i z X_1)]
           = |z|^alpha * exp( i pi alpha (1/2 - rho) sgn z ),      z real,

where ``alpha`` in (0, 2) is the stability index and ``rho = P(X_1 > 0)``
is the positivity parameter.  For ``alpha = 1`` only the symmetric
(Cauchy, ``rho = 1/2``) member is strictly stable and admitted here.
Admissible rho ranges:

* alpha < 1:   rho in [0, 1]; rho = 1 is an increasing process
  (a subordinator, Laplace transform ``exp(-lambda^alpha)``), rho = 0 a
  decreasing one.
* alpha = 1:   rho = 1/2 (Cauchy).
* alpha > 1:   rho in [1 - 1/alpha, 1/alpha]; the endpoints are the
  spectrally positive (no negative jumps... rho = 1 - 1/alpha) and
  spectrally negative (rho = 1/alpha) members.

The Levy jump measure consistent with this normalization has density

    pi(x) = Gamma(1+alpha)/pi * [ sin(pi alpha rho)    x^{-1-alpha},  x > 0
                                  sin(pi alpha rhohat) |x|^{-1-alpha}, x < 0 ]

with ``rhohat = 1 - rho``.

Sampling uses the Chambers–Mallows–Stuck construction written directly in
(alpha, rho).  With ``theta = pi alpha (1/2 - rho)`` (the phase of Psi on
z > 0), U uniform on (-pi/2, pi/2) and W standard exponential,

    X_1 = sin(alpha U - theta) / cos(U)^{1/alpha}
          * ( cos((1-alpha) U + theta) / W )^{(1-alpha)/alpha},

and for alpha = 1 simply ``X_1 = tan(U)``.  The cosine under the power is
strictly positive on the admissible range because
|(1-alpha) U + theta| < pi/2 there.  Setting rho = 1, alpha < 1 and
substituting V = U + pi/2 recovers Kanter's positive-stable sampler for
``exp(-lambda^alpha)``, which pins the normalization; the general case is
validated against the characteristic function in the test suite.
Self-similarity gives increments over a step dt as ``dt^{1/alpha} X_1``.

Random streams are counter-based (Philox) and splittable: ``stream(seed,
*key)`` yields independent generators for distinct keys, which is how the
Monte Carlo kernels key their batches.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

__all__ = [
    "OutOfRangeError",
    "InconsistentRhoError",
    "DomainError",
    "Sidedness",
    "StableParams",
    "validate_params",
    "char_exponent",
    "levy_density",
    "stream",
    "sample_increment",
    "sample_path",
    "sample_path_at",
    "Path",
]


class OutOfRangeError(ValueError):
    """A parameter lies outside its admissible interval."""


class InconsistentRhoError(ValueError):
    """rho is incompatible with alpha (e.g. alpha=1 with rho != 1/2)."""


class DomainError(ValueError):
    """An evaluation point lies outside the domain of the quantity."""


_EPS = 1e-12


class Sidedness(Enum):
    """Jump activity structure implied by (alpha, rho)."""

    TWO_SIDED = "two-sided"
    SPECTRALLY_POSITIVE = "spectrally-positive"
    SPECTRALLY_NEGATIVE = "spectrally-negative"


@dataclass(frozen=True)
class StableParams:
    """Validated (alpha, rho) pair; construction performs full validation.

    Attributes
    ----------
    alpha : stability index, in (0, 2) (the Gaussian boundary alpha = 2 is
        deliberately out of scope).
    rho : positivity parameter P(X_1 > 0).
    """

    alpha: float
    rho: float

    def __post_init__(self):
        a, r = self.alpha, self.rho
        if not (math.isfinite(a) and math.isfinite(r)):
            raise OutOfRangeError(f"non-finite parameters: alpha={a}, rho={r}")
        if not (0.0 < a < 2.0):
            raise OutOfRangeError(
                f"alpha must lie in (0, 2), got {a}"
                + (" (the alpha=2 boundary is the classical diffusive case,"
                   " outside this family)" if a == 2.0 else "")
            )
        if not (0.0 <= r <= 1.0):
            raise OutOfRangeError(f"rho must lie in [0, 1], got {r}")
        if a == 1.0 and abs(r - 0.5) > _EPS:
            raise InconsistentRhoError(
                f"alpha=1 admits only the symmetric member rho=1/2, got rho={r}"
            )
        if a > 1.0:
            lo, hi = 1.0 - 1.0 / a, 1.0 / a
            if r < lo - _EPS or r > hi + _EPS:
                raise InconsistentRhoError(
                    f"for alpha={a} rho must lie in [{lo:.6f}, {hi:.6f}], got {r}"
                )
        if a < 1.0 and r in (0.0, 1.0):
            # monotone members: fine, but note rho=1 means increasing.
            pass

    @property
    def rho_hat(self) -> float:
        return 1.0 - self.rho

    @property
    def theta(self) -> float:
        """Phase of the characteristic exponent on z > 0."""
        return math.pi * self.alpha * (0.5 - self.rho)

    @property
    def sidedness(self) -> Sidedness:
        a, r = self.alpha, self.rho
        if a < 1.0:
            if r >= 1.0 - _EPS:
                return Sidedness.SPECTRALLY_POSITIVE  # increasing
            if r <= _EPS:
                return Sidedness.SPECTRALLY_NEGATIVE  # decreasing
            return Sidedness.TWO_SIDED
        if a > 1.0:
            if abs(r - 1.0 / a) <= _EPS:
                return Sidedness.SPECTRALLY_NEGATIVE
            if abs(r - (1.0 - 1.0 / a)) <= _EPS:
                return Sidedness.SPECTRALLY_POSITIVE
            return Sidedness.TWO_SIDED
        return Sidedness.TWO_SIDED

    @property
    def is_monotone(self) -> bool:
        """True for the increasing/decreasing members (alpha < 1, rho in {0,1})."""
        return self.alpha < 1.0 and (self.rho <= _EPS or self.rho >= 1.0 - _EPS)


def validate_params(alpha: float, rho: float) -> StableParams:
    """Validate and package (alpha, rho); raises OutOfRangeError or
    InconsistentRhoError with a message naming the offending constraint."""
    return StableParams(float(alpha), float(rho))


def char_exponent(p: StableParams, z):
    """Characteristic exponent Psi(z) = |z|^alpha exp(i theta sgn z), theta =
    pi alpha (1/2 - rho).  Vectorized over real z; Psi(0) = 0 exactly."""
    z = np.asarray(z, dtype=float)
    out = np.empty(z.shape, dtype=complex)
    mag = np.abs(z) ** p.alpha
    out = mag * np.exp(1j * p.theta * np.sign(z))
    out = np.where(z == 0.0, 0.0 + 0.0j, out)
    if out.ndim == 0:
        return complex(out)
    return out


def levy_density(p: StableParams, x):
    """Levy jump density at x != 0 (DomainError at the origin).

    Gamma(1+alpha) sin(pi alpha rho)/pi * x^{-1-alpha} on x > 0, with rho
    replaced by rhohat on x < 0.  Vectorized.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x == 0.0):
        raise DomainError("Levy density is not defined at x = 0")
    g = math.gamma(1.0 + p.alpha) / math.pi
    cplus = g * math.sin(math.pi * p.alpha * p.rho)
    cminus = g * math.sin(math.pi * p.alpha * p.rho_hat)
    out = np.where(x > 0, cplus, cminus) * np.abs(x) ** (-1.0 - p.alpha)
    if out.ndim == 0:
        return float(out)
    return out


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent counter-based generator for the stream (seed, *key).

    Distinct keys give statistically independent Philox streams; the same
    (seed, key) always reproduces the same draws.
    """
    ss = np.random.SeedSequence((int(seed),) + tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def _as_generator(rng) -> tuple[np.random.Generator, int | None]:
    """Accept an int seed or a Generator; report the seed when known."""
    if isinstance(rng, np.random.Generator):
        return rng, None
    seed = int(rng)
    return stream(seed), seed


def _standard_draws(p: StableParams, rng: np.random.Generator, n: int) -> np.ndarray:
    """n i.i.d. copies of X_1 via Chambers–Mallows–Stuck in (alpha, rho)."""
    u = rng.uniform(-math.pi / 2.0, math.pi / 2.0, size=n)
    if p.alpha == 1.0:
        return np.tan(u)
    w = rng.standard_exponential(size=n)
    a = p.alpha
    th = p.theta
    s = np.sin(a * u - th) / np.cos(u) ** (1.0 / a)
    t = (np.cos((1.0 - a) * u + th) / w) ** ((1.0 - a) / a)
    return s * t


def sample_increment(p: StableParams, dt, rng, size: int | None = None):
    """Exact-in-law increments of X over elapsed time dt.

    dt may be a positive scalar (with ``size`` draws) or an array of
    positive step lengths (one draw per entry).  Self-similarity:
    X_{t+dt} - X_t  =law=  dt^{1/alpha} X_1.
    """
    gen, _ = _as_generator(rng)
    dt_arr = np.asarray(dt, dtype=float)
    if np.any(dt_arr < 0) or not np.all(np.isfinite(dt_arr)):
        raise OutOfRangeError("step lengths must be finite and nonnegative")
    if dt_arr.ndim == 0:
        n = 1 if size is None else int(size)
        draws = dt_arr ** (1.0 / p.alpha) * _standard_draws(p, gen, n)
        if size is None:
            return float(draws[0])
        return draws
    if size is not None:
        raise ValueError("size applies only to scalar dt")
    draws = _standard_draws(p, gen, dt_arr.size).reshape(dt_arr.shape)
    return dt_arr ** (1.0 / p.alpha) * draws


@dataclass
class Path:
    """A sampled cadlag trajectory on a finite grid.

    Invariants (enforced at construction): equal-length float arrays, times
    nondecreasing and strictly increasing after deduplication, all values
    finite, and no samples beyond ``killed_at`` when that is set.
    """

    times: np.ndarray
    values: np.ndarray
    alpha: float | None = None
    rho: float | None = None
    seed: int | None = None
    step: float | None = None
    killed_at: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.times, dtype=float))
        v = np.atleast_1d(np.asarray(self.values, dtype=float))
        if t.shape != v.shape or t.ndim != 1:
            raise ValueError("times and values must be 1-D arrays of equal length")
        if t.size:
            if np.any(np.diff(t) < 0):
                raise ValueError("times must be nondecreasing")
            if not np.all(np.isfinite(v)):
                raise ValueError("path values must be finite")
            if not np.all(np.isfinite(t)):
                raise ValueError("path times must be finite")
            # collapse duplicate consecutive times (keep the first sample) so
            # that times are strictly increasing afterwards
            keep = np.concatenate(([True], np.diff(t) > 0))
            t, v = t[keep], v[keep]
            if self.killed_at is not None and t.size and t[-1] > self.killed_at:
                raise ValueError("samples extend beyond killed_at")
        self.times, self.values = t, v

    def __len__(self) -> int:
        return self.times.size

    def to_csv(self, path_or_buf=None) -> str | None:
        """Write `time,value` rows with a commented header carrying the
        sampling metadata (alpha, rho, seed, step, killed_at).  With no
        destination, return the CSV text instead."""

        def fmt(x):
            if x is None:
                return ""
            return repr(x.item() if hasattr(x, "item") else x)

        header = (
            "# artifact-path v1\n"
            f"# alpha={fmt(self.alpha)} rho={fmt(self.rho)} seed={fmt(self.seed)}"
            f" step={fmt(self.step)} killed_at={fmt(self.killed_at)}\n"
        )
        if self.meta:
            header += "# meta=" + json.dumps(self.meta, separators=(",", ":")) + "\n"
        header += "time,value\n"
        body = "".join(
            f"{float(t)!r},{float(v)!r}\n" for t, v in zip(self.times, self.values)
        )
        if path_or_buf is None:
            return header + body
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(header + body)
        else:
            with open(path_or_buf, "w") as fh:
                fh.write(header + body)
        return None

    @classmethod
    def from_csv(cls, path_or_buf) -> "Path":
        if hasattr(path_or_buf, "read"):
            text = path_or_buf.read()
        else:
            with open(path_or_buf) as fh:
                text = fh.read()
        meta: dict[str, float | int | None] = {
            "alpha": None, "rho": None, "seed": None, "step": None, "killed_at": None,
        }
        extra: dict = {}
        times, values = [], []
        for line in io.StringIO(text):
            line = line.strip()
            if not line:
                continue
            if line.startswith("# meta="):
                extra = json.loads(line[len("# meta="):])
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if "=" in tok:
                        k, _, raw = tok.partition("=")
                        if k in meta:
                            meta[k] = None if raw == "" else float(raw)
                continue
            if line.startswith("time"):
                continue
            a, _, b = line.partition(",")
            times.append(float(a))
            values.append(float(b))
        seed = meta["seed"]
        return cls(
            times=np.asarray(times),
            values=np.asarray(values),
            alpha=meta["alpha"],
            rho=meta["rho"],
            seed=None if seed is None else int(seed),
            step=meta["step"],
            killed_at=meta["killed_at"],
            meta=extra,
        )

    def with_values(self, values: np.ndarray) -> "Path":
        return replace(self, values=np.asarray(values, dtype=float))


def sample_path(
    p: StableParams,
    x0: float,
    horizon: float,
    step: float | None = None,
    rng=0,
) -> Path:
    """Sample X on the uniform grid {0, step, 2 step, ..., horizon}.

    ``step`` defaults to 1e-3 * horizon.  horizon = 0 degenerates to the
    single sample (0, x0).  Requires 0 < step <= horizon otherwise.
    """
    if horizon < 0 or not math.isfinite(horizon):
        raise OutOfRangeError("horizon must be finite and nonnegative")
    gen, seed = _as_generator(rng)
    if horizon == 0.0:
        return Path(np.zeros(1), np.full(1, float(x0)),
                    alpha=p.alpha, rho=p.rho, seed=seed, step=step)
    if step is None:
        step = 1e-3 * horizon
    if not (0 < step <= horizon):
        raise OutOfRangeError(f"step must lie in (0, horizon], got {step}")
    n = int(round(horizon / step))
    times = np.linspace(0.0, n * step, n + 1)
    incs = sample_increment(p, step, gen, size=n)
    values = float(x0) + np.concatenate(([0.0], np.cumsum(incs)))
    return Path(times, values, alpha=p.alpha, rho=p.rho, seed=seed, step=float(step))


def sample_path_at(p: StableParams, x0: float, times, rng=0) -> Path:
    """Sample X exactly at an arbitrary nondecreasing grid of times."""
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("times must be a nonempty 1-D array")
    if t[0] < 0 or np.any(np.diff(t) < 0):
        raise OutOfRangeError("times must be nonnegative and nondecreasing")
    gen, seed = _as_generator(rng)
    dts = np.diff(t)
    pos = dts > 0
    incs = np.zeros_like(dts)
    if pos.any():
        incs[pos] = sample_increment(p, dts[pos], gen)
    values = float(x0) + np.concatenate(([0.0], np.cumsum(incs)))
    if t[0] > 0:
        values = values + sample_increment(p, float(t[0]), gen)
    return Path(t.copy(), values, alpha=p.alpha, rho=p.rho, seed=seed)
