"""Truncated power series with exact coefficients, and polynomial ratios.

Series live in a formal variable u = q^(1/scale) for a declared positive
integer scale, so fractional exponents (dual lattices, rational rescalings)
stay exact.  Coefficients are Fractions (mpmath floats are tolerated during
irrational-cosine intermediate work; see theta.py).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


def poly_trim(c: list) -> tuple:
    i = len(c)
    while i > 0 and c[i - 1] == 0:
        i -= 1
    return tuple(c[:i])


def poly_add(a, b):
    n = max(len(a), len(b))
    return poly_trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                      for i in range(n)])


def poly_mul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return poly_trim(out)


def poly_pow(a, k: int):
    result = (1,)
    while k:
        if k & 1:
            result = poly_mul(result, a)
        a = poly_mul(a, a)
        k >>= 1
    return result


def poly_eval(a, x):
    acc = 0 * x
    for c in reversed(a):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class PowerSeries:
    """Coefficients c_0..c_K of a series in u = q^(1/scale), exact mod u^(K+1)."""

    coeffs: tuple
    scale: int = 1

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def from_poly(cls, coeffs, order: int, scale: int = 1) -> "PowerSeries":
        c = list(coeffs[: order + 1]) + [Fraction(0)] * (order + 1 - len(coeffs))
        return cls(tuple(Fraction(x) if isinstance(x, int) else x for x in c), scale)

    def rescaled(self, new_scale: int) -> "PowerSeries":
        """Re-grid to a finer exponent lattice (new_scale must be a multiple)."""
        if new_scale == self.scale:
            return self
        if new_scale % self.scale:
            raise ValueError("new scale must be a multiple of the old one")
        f = new_scale // self.scale
        coeffs = [Fraction(0)] * (self.order * f + 1)
        for i, c in enumerate(self.coeffs):
            coeffs[i * f] = c
        return PowerSeries(tuple(coeffs), new_scale)

    def _common(self, other: "PowerSeries"):
        s = self.scale * other.scale // math.gcd(self.scale, other.scale)
        a, b = self.rescaled(s), other.rescaled(s)
        k = min(a.order, b.order)
        return a, b, k

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        a, b, k = self._common(other)
        return PowerSeries(tuple(x + y for x, y in zip(a.coeffs[: k + 1], b.coeffs[: k + 1])),
                           a.scale)

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        a, b, k = self._common(other)
        return PowerSeries(tuple(x - y for x, y in zip(a.coeffs[: k + 1], b.coeffs[: k + 1])),
                           a.scale)

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            a, b, k = self._common(other)
            out = [Fraction(0)] * (k + 1)
            for i, x in enumerate(a.coeffs[: k + 1]):
                if x:
                    for j in range(min(len(b.coeffs), k + 1 - i)):
                        if b.coeffs[j]:
                            out[i + j] += x * b.coeffs[j]
            return PowerSeries(tuple(out), a.scale)
        return PowerSeries(tuple(c * other for c in self.coeffs), self.scale)

    __rmul__ = __mul__

    def reciprocal(self) -> "PowerSeries":
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("reciprocal needs a unit constant term")
        k = self.order
        inv0 = 1 / c0 if isinstance(c0, Fraction) else c0 ** -1
        out = [inv0]
        for i in range(1, k + 1):
            acc = 0 * inv0
            for j in range(1, min(i, len(self.coeffs) - 1) + 1):
                acc += self.coeffs[j] * out[i - j]
            out.append(-inv0 * acc)
        return PowerSeries(tuple(out), self.scale)

    def pow(self, k: int) -> "PowerSeries":
        result = PowerSeries.from_poly([Fraction(1)], self.order, self.scale)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def truncate(self, order: int) -> "PowerSeries":
        if order >= self.order:
            return self
        return PowerSeries(self.coeffs[: order + 1], self.scale)

    def q_terms(self) -> list[tuple[Fraction, Fraction]]:
        """Nonzero terms as (exponent in q, coefficient), exponent = i/scale."""
        return [(Fraction(i, self.scale), c) for i, c in enumerate(self.coeffs) if c != 0]

    def integerized(self) -> "PowerSeries":
        """Check all coefficients are integers (raises ValueError otherwise)."""
        out = []
        for c in self.coeffs:
            if isinstance(c, Fraction):
                if c.denominator != 1:
                    raise ValueError(f"non-integer coefficient {c}")
                out.append(Fraction(int(c)))
            else:
                out.append(c)
        return PowerSeries(tuple(out), self.scale)


@dataclass(frozen=True)
class ThetaRational:
    """Exact ratio P(u)/Q(u) of integer polynomials, u = q^(1/scale)."""

    numer: tuple
    denom: tuple
    scale: int = 1

    def series(self, order: int) -> PowerSeries:
        """Long division to the requested order (in u)."""
        q0 = self.denom[0]
        if q0 == 0:
            raise ZeroDivisionError("denominator has no constant term")
        out = []
        for i in range(order + 1):
            acc = Fraction(self.numer[i]) if i < len(self.numer) else Fraction(0)
            for j in range(1, min(i, len(self.denom) - 1) + 1):
                acc -= self.denom[j] * out[i - j]
            out.append(acc / q0)
        return PowerSeries(tuple(out), self.scale)

    def series_q(self, order_q: int) -> PowerSeries:
        """Series up to q^order_q (i.e. u^(order_q * scale))."""
        return self.series(order_q * self.scale)

    def eval_q(self, q: float, dps: int = 40) -> float:
        """Evaluate at a real 0 <= q < 1 via high-precision arithmetic."""
        import mpmath

        if not 0 <= q < 1:
            raise ValueError("q must be in [0, 1)")
        with mpmath.workdps(dps):
            u = mpmath.mpf(q) ** (mpmath.mpf(1) / self.scale)
            num = poly_eval(self.numer, u)
            den = poly_eval(self.denom, u)
            return float(num / den)

    def as_string(self) -> str:
        var = "q" if self.scale == 1 else f"q^(1/{self.scale})"
        return f"({_poly_str(self.numer, var)}) / ({_poly_str(self.denom, var)})"


def _poly_str(coeffs, var: str) -> str:
    parts = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        if i == 0:
            parts.append(str(c))
        else:
            mono = var if i == 1 else f"{var}^{i}"
            if c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += f" + {p}" if not p.startswith("-") else f" - {p[1:]}"
    return out
