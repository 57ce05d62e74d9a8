"""Exact comparisons against quantities like ``c * L^(p/q)``.

Right-hand sides with fractional exponents are irrational in general, so
they are kept symbolic and compared by raising both sides to the q-th
power.  A float rendering is attached for reports only.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exact import q_str

__all__ = ["PowerTerm", "ceil_power", "iroot", "Inequality", "log2_ceil"]


def iroot(n: int, k: int) -> int:
    """floor(n^(1/k)) for n >= 0."""
    if n < 0 or k < 1:
        raise ValueError("need n >= 0 and k >= 1")
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


@dataclass(frozen=True)
class PowerTerm:
    """The positive real number ``coef * base ** exp`` with rational exp."""

    coef: Fraction
    base: Fraction
    exp: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coef", Fraction(self.coef))
        object.__setattr__(self, "base", Fraction(self.base))
        object.__setattr__(self, "exp", Fraction(self.exp))
        if self.base <= 0:
            raise ValueError("base must be positive")

    def _cmp(self, x) -> int:
        """Sign of ``x - self``, exactly."""
        x = Fraction(x)
        if self.coef == 0:
            return (x > 0) - (x < 0)
        if self.coef < 0:
            raise ValueError("negative coefficients are not supported")
        if x <= 0:
            return -1
        # x vs coef * base^(p/q)  <=>  (x/coef)^q vs base^p
        p, q = self.exp.numerator, self.exp.denominator
        lhs = (x / self.coef) ** q
        rhs = self.base**p
        return (lhs > rhs) - (lhs < rhs)

    def ge(self, x) -> bool:
        """``x <= self``."""
        return self._cmp(x) <= 0

    def le(self, x) -> bool:
        """``x >= self``."""
        return self._cmp(x) >= 0

    def scaled(self, c) -> "PowerTerm":
        return PowerTerm(self.coef * Fraction(c), self.base, self.exp)

    def approx(self) -> float:
        return float(self.coef) * float(self.base) ** float(self.exp)

    def to_json(self) -> dict:
        return {"coef": q_str(self.coef), "base": q_str(self.base), "exp": q_str(self.exp), "value_approx": self.approx()}


def ceil_power(base: int, exp: Fraction) -> int:
    """Least integer n with n >= base^exp (base a positive integer, exp >= 0)."""
    exp = Fraction(exp)
    if exp < 0:
        raise ValueError("exponent must be nonnegative")
    p, q = exp.numerator, exp.denominator
    target = base**p
    n = iroot(target, q)
    return n if n**q == target else n + 1


def log2_ceil(n: int) -> int:
    """Least J with 2^J >= n."""
    if n < 1:
        raise ValueError("need n >= 1")
    return (n - 1).bit_length()


@dataclass
class Inequality:
    """One checked inequality ``lhs <= rhs`` (or ``>=``) with exact sides."""

    name: str
    lhs: Fraction
    rhs: object
    holds: bool
    relation: str = "<="
    note: Optional[str] = None

    @classmethod
    def at_most(cls, name: str, lhs, rhs, note: Optional[str] = None) -> "Inequality":
        if isinstance(rhs, PowerTerm):
            ok = rhs.ge(lhs)
        else:
            ok = Fraction(lhs) <= Fraction(rhs)
        return cls(name, Fraction(lhs), rhs, ok, "<=", note)

    @classmethod
    def at_least(cls, name: str, lhs, rhs, note: Optional[str] = None) -> "Inequality":
        if isinstance(rhs, PowerTerm):
            ok = rhs.le(lhs)
        else:
            ok = Fraction(lhs) >= Fraction(rhs)
        return cls(name, Fraction(lhs), rhs, ok, ">=", note)

    def to_json(self) -> dict:
        if isinstance(self.rhs, PowerTerm):
            rhs = self.rhs.to_json()
            approx = self.rhs.approx()
        else:
            rhs = q_str(self.rhs)
            approx = float(Fraction(self.rhs))
        out = {"name": self.name, "relation": self.relation, "lhs": q_str(self.lhs), "rhs": rhs, "rhs_approx": approx, "holds": self.holds}
        if self.note:
            out["note"] = self.note
        return out
