"""Problem description: interval, endpoint strengths and a bounded potential."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = ["Potential", "BesselProblem", "parse_potential", "ConfigError"]


class ConfigError(ValueError):
    """Malformed or inconsistent problem specification."""


@dataclass(frozen=True)
class Potential:
    """Bounded real potential ``q``.

    ``kind`` is one of ``zero``, ``const``, ``poly`` (coefficients in powers
    of ``x``, lowest first) or ``callback`` (``func`` plus a declared sup-norm
    ``bound``).
    """

    kind: str = "zero"
    coeffs: tuple = ()
    func: Optional[Callable] = field(default=None, compare=False)
    bound: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("zero", "const", "poly", "callback"):
            raise ConfigError(f"unknown potential kind {self.kind!r}")
        if self.kind == "const" and len(self.coeffs) != 1:
            raise ConfigError("constant potential needs exactly one value")
        if self.kind == "poly" and len(self.coeffs) == 0:
            raise ConfigError("polynomial potential needs coefficients")
        if self.kind == "callback":
            if self.func is None or self.bound is None:
                raise ConfigError("callback potential needs func and a declared bound")
            if not self.bound >= 0:
                raise ConfigError("potential bound must be nonnegative")
        for c in self.coeffs:
            if not math.isfinite(c):
                raise ConfigError("potential coefficients must be finite")

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def const(cls, c: float):
        return cls("const", (float(c),))

    @classmethod
    def poly(cls, coeffs: Sequence[float]):
        return cls("poly", tuple(float(c) for c in coeffs))

    @classmethod
    def callback(cls, func: Callable, bound: float):
        return cls("callback", (), func, float(bound))

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or (self.kind in ("const", "poly") and not any(self.coeffs))

    def __call__(self, x):
        if self.kind == "zero":
            return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
        if self.kind == "const":
            c = self.coeffs[0]
            return np.full_like(np.asarray(x, dtype=float), c) if np.ndim(x) else c
        if self.kind == "poly":
            # Horner
            acc = 0.0
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        return self.func(x)

    def sup_bound(self, a: float, b: float) -> float:
        """Upper bound of ``|q|`` on ``[a, b]``."""
        if self.kind == "zero":
            return 0.0
        if self.kind == "const":
            return abs(self.coeffs[0])
        if self.kind == "poly":
            m = max(abs(a), abs(b))
            return float(sum(abs(c) * m ** k for k, c in enumerate(self.coeffs)))
        return float(self.bound)

    def spec(self) -> str:
        """String form understood by :func:`parse_potential`."""
        if self.kind == "zero":
            return "0"
        if self.kind == "const":
            return f"const:{self.coeffs[0]!r}"
        if self.kind == "poly":
            return "poly:" + ",".join(repr(c) for c in self.coeffs)
        raise ConfigError("callback potentials have no string form")


def parse_potential(text: str) -> Potential:
    """Parse ``"0"``, ``"const:<c>"`` or ``"poly:<c0,c1,...>"``."""
    t = text.strip()
    if t in ("0", "zero", "0.0"):
        return Potential.zero()
    try:
        if t.startswith("const:"):
            return Potential.const(float(t[6:]))
        if t.startswith("poly:"):
            parts = [p for p in t[5:].split(",")]
            if not parts or any(p.strip() == "" for p in parts):
                raise ConfigError(f"empty coefficient in {text!r}")
            return Potential.poly([float(p) for p in parts])
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"cannot parse potential {text!r}: {exc}") from None
    raise ConfigError(f"cannot parse potential {text!r}; expected 0, const:<c> or poly:<c0,...>")


@dataclass(frozen=True)
class BesselProblem:
    """``tau = -d^2/dx^2 + (s_a^2-1/4)/(x-a)^2 + (s_b^2-1/4)/(x-b)^2 + q`` on ``(a, b)``."""

    a: float = 0.0
    b: float = 1.0
    s_a: float = 0.5
    s_b: float = 0.5
    q: Potential = field(default_factory=Potential.zero)

    def __post_init__(self):
        for name in ("a", "b", "s_a", "s_b"):
            v = getattr(self, name)
            if not isinstance(v, (int, float, np.floating, np.integer)) or not math.isfinite(v):
                raise ConfigError(f"{name} must be a finite real number")
        if not self.a < self.b:
            raise ConfigError("need a < b")
        if self.s_a < 0 or self.s_b < 0:
            raise ConfigError("singularity strengths must be nonnegative")
        if isinstance(self.q, str):
            object.__setattr__(self, "q", parse_potential(self.q))

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)

    def strength(self, endpoint: str) -> float:
        if endpoint == "a":
            return self.s_a
        if endpoint == "b":
            return self.s_b
        raise ValueError(f"endpoint must be 'a' or 'b', not {endpoint!r}")

    def singular_part(self, x):
        return (self.s_a ** 2 - 0.25) / (x - self.a) ** 2 + (self.s_b ** 2 - 0.25) / (x - self.b) ** 2

    def potential(self, x):
        """Full potential ``V(x) = singular part + q(x)``."""
        return self.singular_part(x) + self.q(x)

    def coefficient(self, lam):
        """Callback ``c(x)`` with ``u'' = c(x) u`` equivalent to ``(tau - lam) u = 0``."""
        lam = np.asarray(lam) if np.ndim(lam) else lam

        def c(x):
            return self.potential(x) - lam

        return c

    def with_q(self, q: Potential) -> "BesselProblem":
        return BesselProblem(self.a, self.b, self.s_a, self.s_b, q)
