"""Right-hand sides g(x) of the equation.

Admissibility (g in C_{-1} for integer leading order, C^1_{-1} otherwise) is
documented per variant but not enforced:

* ``Zero``, ``Exponential``, ``Sinusoid``: smooth, always admissible.
* ``Power``: x^p with p > -1 is in C_{-1}; in C^1_{-1} when p = 0 or p > 0.
* ``Tabulated``: unknown; the user is responsible.
"""
from dataclasses import dataclass
import math

import numpy as np

from .exceptions import DomainError


class ForcingSpec:
    kind = None

    def __call__(self, x):
        raise NotImplementedError

    def scaled(self, c):
        raise NotImplementedError

    @property
    def is_zero(self):
        return False

    def to_dict(self):
        raise NotImplementedError

    def sample(self, grid):
        return self(grid.x)


@dataclass(frozen=True)
class Zero(ForcingSpec):
    kind = "zero"

    def __call__(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def scaled(self, c):
        return self

    @property
    def is_zero(self):
        return True

    def to_dict(self):
        return {"kind": "zero"}


@dataclass(frozen=True)
class Power(ForcingSpec):
    """scale * x**exponent"""

    scale: float = 1.0
    exponent: float = 0.0
    kind = "power"

    def __post_init__(self):
        if not self.exponent > -1:
            raise DomainError(f"power forcing needs exponent > -1, got {self.exponent}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.exponent == 0:
            return np.full_like(x, self.scale)
        with np.errstate(divide="ignore"):
            return self.scale * np.power(x, self.exponent)

    def scaled(self, c):
        return Power(self.scale * c, self.exponent)

    @property
    def is_zero(self):
        return self.scale == 0

    def to_dict(self):
        return {"kind": "power", "scale": self.scale, "exponent": self.exponent}


@dataclass(frozen=True)
class Exponential(ForcingSpec):
    """scale * exp(rate * x)"""

    scale: float = 1.0
    rate: float = 1.0
    kind = "exp"

    def __call__(self, x):
        return self.scale * np.exp(self.rate * np.asarray(x, dtype=float))

    def scaled(self, c):
        return Exponential(self.scale * c, self.rate)

    @property
    def is_zero(self):
        return self.scale == 0

    def to_dict(self):
        return {"kind": "exp", "scale": self.scale, "rate": self.rate}


@dataclass(frozen=True)
class Sinusoid(ForcingSpec):
    """scale * sin(angular_freq * x + phase)"""

    scale: float = 1.0
    angular_freq: float = 1.0
    phase: float = 0.0
    kind = "sin"

    def __call__(self, x):
        return self.scale * np.sin(self.angular_freq * np.asarray(x, dtype=float) + self.phase)

    def scaled(self, c):
        return Sinusoid(self.scale * c, self.angular_freq, self.phase)

    @property
    def is_zero(self):
        return self.scale == 0

    def to_dict(self):
        return {"kind": "sin", "scale": self.scale, "angular_freq": self.angular_freq, "phase": self.phase}


@dataclass(frozen=True)
class Tabulated(ForcingSpec):
    """Samples on a uniform grid, interpolated with order 0 (step) or 1 (linear)."""

    samples: object = None
    order: int = 1
    kind = "table"

    def __post_init__(self):
        if self.order not in (0, 1):
            raise DomainError("tabulated forcing supports interpolation order 0 or 1")
        if self.samples is None:
            raise DomainError("tabulated forcing needs samples")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        grid_x = self.samples.x
        if np.any(x > grid_x[-1] * (1 + 1e-12) + 1e-300) or np.any(x < grid_x[0] - 1e-300):
            raise DomainError("tabulated forcing evaluated outside its table")
        values = np.asarray(self.samples.values)
        if self.order == 1:
            return np.interp(x, grid_x, values)
        idx = np.clip(np.floor((x - grid_x[0]) / self.samples.step + 1e-9).astype(int), 0, len(values) - 1)
        return values[idx]

    def scaled(self, c):
        from .fracops import SampledFunction

        s = self.samples
        return Tabulated(SampledFunction(s.step, tuple(c * v for v in s.values), s.start), self.order)

    @property
    def is_zero(self):
        return all(v == 0 for v in self.samples.values)

    def to_dict(self):
        return {"kind": "table", "order": self.order, "step": self.samples.step,
                "start": self.samples.start, "values": list(self.samples.values)}


def power_integral(p, alpha):
    """Coefficient c with I^alpha x^p = c x^(p+alpha)."""
    return math.exp(math.lgamma(p + 1) - math.lgamma(p + alpha + 1))
