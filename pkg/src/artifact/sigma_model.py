"""Coefficient functions sigma for the driven equation dZ = sigma(Z-) dX.

A ``SigmaFunction`` is a strictly positive, continuous function of the real
line together with optional *declared tail exponents*: sigma(x) ~ C |x|^theta
as x -> +/- infinity.  Declared tails let the boundary classifier decide
integral finiteness analytically; without them it falls back on adaptive
quadrature over a growing window and may honestly return "undecided".

Kinds
-----
PowerTail(c, theta)
    sigma(x) = c (1 + x^2)^{theta/2}.  Even, smooth, sigma(0) = c, tails
    |x|^theta on both sides (declared).
LogPower(c, theta, q)
    sigma(x) = c (1 + x^2)^{theta/2} (log(e + x^2))^q.  The slowly varying
    log factor means no *bare* power describes the tail to the precision the
    declared-tail contract demands, so tails are left undeclared; the
    classifier recognizes the structure and applies the exact boundary rule
    (the theta = 1 knife edge is decided by q).
Tabulated(xs, ys, tail_plus, tail_minus)
    Linear interpolation of strictly positive samples inside [xs[0], xs[-1]],
    matched power extrapolation sigma(x) = y_end (|x|/|x_end|)^theta beyond.
    Tail exponents are REQUIRED (classification would otherwise be a guess)
    and must be consistent with the data; loading from two-column CSV is
    provided.
Composite(parts)
    Pointwise product of component sigma functions.  Tail exponents add when
    every part declares them, otherwise the composite declares none.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "NonPositiveError",
    "SigmaFunction",
    "PowerTail",
    "LogPower",
    "Tabulated",
    "Composite",
    "parse_sigma_spec",
]


class NonPositiveError(ValueError):
    """sigma must be strictly positive; raised at construction time."""


class SigmaFunction:
    """Base class: positive continuous coefficient with optional tails."""

    #: declared tail exponents, or None when unknown
    tail_plus: float | None = None
    tail_minus: float | None = None

    def __call__(self, x):  # pragma: no cover - abstract
        raise NotImplementedError

    def describe(self) -> str:  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True)
class PowerTail(SigmaFunction):
    c: float = 1.0
    theta: float = 0.0

    def __post_init__(self):
        if not (self.c > 0) or not math.isfinite(self.c):
            raise NonPositiveError(f"scale c must be positive, got {self.c}")
        if not math.isfinite(self.theta):
            raise NonPositiveError(f"theta must be finite, got {self.theta}")
        object.__setattr__(self, "tail_plus", float(self.theta))
        object.__setattr__(self, "tail_minus", float(self.theta))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = self.c * (1.0 + x * x) ** (self.theta / 2.0)
        return float(out) if out.ndim == 0 else out

    def describe(self) -> str:
        return f"power:c={self.c:g},theta={self.theta:g}"


@dataclass(frozen=True)
class LogPower(SigmaFunction):
    c: float = 1.0
    theta: float = 0.0
    q: float = 1.0

    def __post_init__(self):
        if not (self.c > 0) or not math.isfinite(self.c):
            raise NonPositiveError(f"scale c must be positive, got {self.c}")
        if not (math.isfinite(self.theta) and math.isfinite(self.q)):
            raise NonPositiveError("theta and q must be finite")
        # deliberately no declared bare tails: the log factor shifts the
        # empirical log-log slope by ~ q/log|x|, more than the declared-tail
        # tolerance on any finite window

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = (
            self.c
            * (1.0 + x * x) ** (self.theta / 2.0)
            * np.log(math.e + x * x) ** self.q
        )
        return float(out) if out.ndim == 0 else out

    def describe(self) -> str:
        return f"logpower:c={self.c:g},theta={self.theta:g},q={self.q:g}"


@dataclass(frozen=True)
class Tabulated(SigmaFunction):
    xs: tuple
    ys: tuple
    tail_plus: float = 0.0
    tail_minus: float = 0.0

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise ValueError("need matching 1-D grids with at least two nodes")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("grid must be strictly increasing")
        if np.any(~np.isfinite(ys)) or np.any(ys <= 0):
            raise NonPositiveError("tabulated sigma values must be finite and positive")
        if self.tail_plus is None or self.tail_minus is None:
            raise ValueError("tabulated sigma requires declared tail exponents")
        object.__setattr__(self, "xs", tuple(float(v) for v in xs))
        object.__setattr__(self, "ys", tuple(float(v) for v in ys))

    def __call__(self, x):
        xs = np.asarray(self.xs)
        ys = np.asarray(self.ys)
        x = np.asarray(x, dtype=float)
        out = np.interp(x, xs, ys)
        # matched power extrapolation beyond the grid
        hi, lo = xs[-1], xs[0]
        mask = x > hi
        if np.any(mask):
            base = max(abs(hi), 1e-300)
            out = np.where(mask, ys[-1] * (np.abs(x) / base) ** self.tail_plus, out)
        mask = x < lo
        if np.any(mask):
            base = max(abs(lo), 1e-300)
            out = np.where(mask, ys[0] * (np.abs(x) / base) ** self.tail_minus, out)
        return float(out) if out.ndim == 0 else out

    @classmethod
    def from_csv(cls, path, tail_plus: float, tail_minus: float) -> "Tabulated":
        """Two-column `x,sigma` CSV (comments with # allowed)."""
        xs, ys = [], []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#") or line[0].isalpha():
                    continue
                a, _, b = line.partition(",")
                xs.append(float(a))
                ys.append(float(b))
        return cls(xs=tuple(xs), ys=tuple(ys),
                   tail_plus=float(tail_plus), tail_minus=float(tail_minus))

    def describe(self) -> str:
        return (f"table:[{self.xs[0]:g},{self.xs[-1]:g}]x{len(self.xs)},"
                f"theta_plus={self.tail_plus:g},theta_minus={self.tail_minus:g}")


@dataclass(frozen=True)
class Composite(SigmaFunction):
    parts: tuple

    def __post_init__(self):
        if not self.parts:
            raise ValueError("composite needs at least one part")
        for part in self.parts:
            if not isinstance(part, SigmaFunction):
                raise TypeError("composite parts must be SigmaFunction instances")
        object.__setattr__(self, "parts", tuple(self.parts))
        tp = [q.tail_plus for q in self.parts]
        tm = [q.tail_minus for q in self.parts]
        object.__setattr__(
            self, "tail_plus", None if any(v is None for v in tp) else float(sum(tp))
        )
        object.__setattr__(
            self, "tail_minus", None if any(v is None for v in tm) else float(sum(tm))
        )

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.ones_like(x)
        for part in self.parts:
            out = out * part(x)
        return float(out) if out.ndim == 0 else out

    def describe(self) -> str:
        return "composite:(" + "*".join(p.describe() for p in self.parts) + ")"


def _parse_kv(body: str, allowed: tuple[str, ...] | None = None) -> dict:
    out = {}
    for tok in body.split(","):
        tok = tok.strip()
        if not tok:
            continue
        k, sep, v = tok.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {tok!r}")
        k = k.strip()
        if allowed is not None and k not in allowed:
            raise ValueError(
                f"unknown sigma parameter {k!r}; expected one of {sorted(allowed)}"
            )
        out[k] = v.strip()
    return out


def parse_sigma_spec(text: str) -> SigmaFunction:
    """Parse the small sigma grammar used by the command line.

    * ``power:c=1,theta=2``
    * ``const:c=2``                      (alias for theta=0)
    * ``logpower:c=1,theta=1,q=2``
    * ``table:sigma.csv,theta_plus=2,theta_minus=2``
    """
    kind, sep, body = text.partition(":")
    kind = kind.strip().lower()
    if not sep:
        raise ValueError(f"malformed sigma spec {text!r}; expected kind:args")
    if kind == "power":
        kv = _parse_kv(body, allowed=("c", "theta"))
        return PowerTail(c=float(kv.get("c", 1.0)), theta=float(kv.get("theta", 0.0)))
    if kind == "const":
        kv = _parse_kv(body, allowed=("c",))
        return PowerTail(c=float(kv.get("c", 1.0)), theta=0.0)
    if kind == "logpower":
        kv = _parse_kv(body, allowed=("c", "theta", "q"))
        return LogPower(
            c=float(kv.get("c", 1.0)),
            theta=float(kv.get("theta", 0.0)),
            q=float(kv.get("q", 1.0)),
        )
    if kind == "table":
        first, _, rest = body.partition(",")
        kv = _parse_kv(rest, allowed=("theta_plus", "theta_minus")) if rest else {}
        if "theta_plus" not in kv or "theta_minus" not in kv:
            raise ValueError("table sigma requires theta_plus and theta_minus")
        return Tabulated.from_csv(
            first.strip(), float(kv["theta_plus"]), float(kv["theta_minus"])
        )
    raise ValueError(f"unknown sigma kind {kind!r}")
