"""Generating-function oracle for components of the uniform-degree random network.

Degrees are uniform on ``1..k_max``. Everything that has a rational value
is computed exactly with ``fractions.Fraction``; only the fixed point ``u``
(irrational for ``k_max >= 4``) and quantities derived from it fall back to
floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

DEFAULT_S_MAX = 200


class PowerSeries:
    """Truncated power series with exact coefficients.

    ``coeffs[k]`` is the coefficient of ``x**k``; terms of order above
    ``order`` are discarded by every operation.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs, order: int | None = None):
        cs = [Fraction(c) for c in coeffs]
        if order is None:
            order = max(len(cs) - 1, 0)
        cs = cs[:order + 1]
        cs += [Fraction(0)] * (order + 1 - len(cs))
        self.coeffs = cs
        self.order = order

    @classmethod
    def x(cls, order: int) -> "PowerSeries":
        return cls([0, 1], order)

    @classmethod
    def const(cls, c, order: int) -> "PowerSeries":
        return cls([c], order)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k <= self.order else Fraction(0)

    def __len__(self):
        return self.order + 1

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        m = min(self.order, other.order)
        return self.coeffs[:m + 1] == other.coeffs[:m + 1]

    def __repr__(self):
        terms = [f"{c}*x^{k}" for k, c in enumerate(self.coeffs) if c]
        return f"PowerSeries({' + '.join(terms) or '0'}; O(x^{self.order + 1}))"

    def _coerce(self, other) -> "PowerSeries":
        if isinstance(other, PowerSeries):
            return other
        return PowerSeries.const(other, self.order)

    def __add__(self, other):
        o = self._coerce(other)
        m = min(self.order, o.order)
        return PowerSeries([a + b for a, b in zip(self.coeffs[:m + 1], o.coeffs[:m + 1])], m)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            f = Fraction(other)
            return PowerSeries([c * f for c in self.coeffs], self.order)
        m = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        nza = [(i, c) for i, c in enumerate(a[:m + 1]) if c]
        nzb = [(j, c) for j, c in enumerate(b[:m + 1]) if c]
        out = [Fraction(0)] * (m + 1)
        for i, ca in nza:
            for j, cb in nzb:
                if i + j > m:
                    break
                out[i + j] += ca * cb
        return PowerSeries(out, m)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, PowerSeries):
            return self * (1 / Fraction(other))
        m = min(self.order, other.order)
        b = other.coeffs
        if b[0] == 0:
            raise ZeroDivisionError("divisor has zero constant term")
        out = []
        for k in range(m + 1):
            acc = self[k] - sum((out[i] * b[k - i] for i in range(k)), Fraction(0))
            out.append(acc / b[0])
        return PowerSeries(out, m)

    def derivative(self) -> "PowerSeries":
        cs = [k * c for k, c in enumerate(self.coeffs)][1:]
        return PowerSeries(cs or [0], max(self.order - 1, 0))

    def compose(self, inner: "PowerSeries") -> "PowerSeries":
        """``self(inner(x))`` by Horner's rule.

        Exact to the truncation order when ``inner`` has no constant term,
        or when ``self`` is a polynomial that fits within its order.
        """
        m = inner.order
        acc = PowerSeries.const(0, m)
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def degree(self) -> int:
        for k in range(self.order, -1, -1):
            if self.coeffs[k]:
                return k
        return 0

    def __call__(self, x):
        """Evaluate the (truncated) polynomial at ``x``; exact for int and Fraction input."""
        exact = isinstance(x, (int, Fraction))
        if exact:
            x = Fraction(x)
        acc = 0 * x
        for c in reversed(self.coeffs[:self.degree() + 1]):
            acc = acc * x + (c if exact else float(c))
        return acc

    def sum_coeffs(self) -> Fraction:
        return sum(self.coeffs, Fraction(0))


def g0(k_max: int, order: int | None = None) -> PowerSeries:
    """Degree generating function: ``x^k`` weighted by ``1/k_max`` for k in 1..k_max."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    p = Fraction(1, k_max)
    return PowerSeries([0] + [p] * k_max, k_max if order is None else order)


def z1z2(k_max: int) -> tuple[Fraction, Fraction]:
    """Mean degree and mean number of second neighbours, as exact rationals."""
    d1 = g0(k_max).derivative()
    return d1.sum_coeffs(), d1.derivative().sum_coeffs()


def has_giant(k_max: int) -> bool:
    z1, z2 = z1z2(k_max)
    return z2 > z1


def g1(k_max: int, order: int | None = None) -> PowerSeries:
    """Excess-degree generating function, ``G0'(x) / G0'(1)``."""
    z1, _ = z1z2(k_max)
    d = g0(k_max).derivative() / z1
    return d if order is None else PowerSeries(d.coeffs, order)


def g0_closed(k_max: int, order: int) -> PowerSeries:
    """``(x / k_max) (1 - x^k_max) / (1 - x)`` expanded by series division."""
    x = PowerSeries.x(order)
    num = x * (1 - _xpow(k_max, order)) / k_max
    return num / (1 - x)


def g1_closed(k_max: int, order: int) -> PowerSeries:
    """``[1 - 2z x^k + k x^(k+1)] / (z k (1 - x)^2)`` expanded by series division."""
    z, _ = z1z2(k_max)
    x = PowerSeries.x(order)
    num = (1 - _xpow(k_max, order) * (2 * z) + _xpow(k_max + 1, order) * k_max) / (z * k_max)
    return num / ((1 - x) * (1 - x))


def _xpow(k: int, order: int) -> PowerSeries:
    return PowerSeries([0] * k + [1], order)


@lru_cache(maxsize=32)
def _lagrange_table(k_max: int, s_max: int) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Coefficients of H1 and H0 up to ``x^s_max`` by Lagrange inversion.

    With ``G1 = A(y)/D`` for the integer polynomial ``A = sum (j+1) y^j`` and
    ``D = k_max (k_max+1) / 2``:

        [x^s] H1 = [y^(s-1)] A^s / (s D^s)
        [x^s] H0 = z [y^(s-2)] A^s / ((s-1) D^s),   s >= 2

    Only integer polynomial powers are formed, so this stays fast at large
    ``s_max``. ``h1_by_iteration`` is the independent cross-check.
    """
    a = list(range(1, k_max + 1))
    d = k_max * (k_max + 1) // 2
    z = Fraction(k_max + 1, 2)
    top = max(s_max - 1, 0)
    power = [1]
    h1 = [Fraction(0)] * (s_max + 1)
    h0 = [Fraction(0)] * (s_max + 1)
    for s in range(1, s_max + 1):
        nxt = [0] * min(len(power) + len(a) - 1, top + 1)
        for i, pi in enumerate(power):
            if pi == 0:
                continue
            for j, aj in enumerate(a):
                if i + j > top:
                    break
                nxt[i + j] += pi * aj
        power = nxt
        ds = d ** s
        if s - 1 < len(power):
            h1[s] = Fraction(power[s - 1], s * ds)
        if s >= 2 and s - 2 < len(power):
            h0[s] = z * Fraction(power[s - 2], (s - 1) * ds)
    return tuple(h1), tuple(h0)


def h1(k_max: int, s_max: int = DEFAULT_S_MAX) -> PowerSeries:
    """Series solving ``H1 = x G1(H1)``, truncated at ``x^s_max``."""
    if s_max < 1:
        raise ValueError("s_max must be >= 1")
    return PowerSeries(_lagrange_table(k_max, s_max)[0], s_max)


def h0(k_max: int, s_max: int = DEFAULT_S_MAX) -> PowerSeries:
    """Series ``x G0(H1(x))``: coefficient s is the chance a random agent sits in a size-s component."""
    if s_max < 1:
        raise ValueError("s_max must be >= 1")
    return PowerSeries(_lagrange_table(k_max, s_max)[1], s_max)


def h1_by_iteration(k_max: int, s_max: int) -> PowerSeries:
    """Literal fixed-point iteration ``H <- x G1(H)`` from ``H = 0``.

    Iteration ``m`` settles coefficient ``m``, so after ``s_max`` passes the
    truncated series is exact. Each pass only carries the orders it can
    already have fixed. Quadratic-per-pass; meant for moderate ``s_max``.
    """
    gen = g1(k_max)
    h = PowerSeries.const(0, 0)
    for m in range(1, s_max + 1):
        inner = PowerSeries(h.coeffs, m)
        h = PowerSeries.x(m) * gen.compose(inner)
    return h


def p_s(k_max: int, s: int, s_max: int = DEFAULT_S_MAX) -> Fraction:
    if s < 1:
        raise ValueError("s must be >= 1")
    return h0(k_max, max(s, s_max))[s]


def chi_weights(k_max: int, s_max: int = DEFAULT_S_MAX) -> list[Fraction]:
    """Unnormalized component-size weights ``P_s / s``; index ``s``, zero below 2."""
    hs = h0(k_max, s_max)
    return [Fraction(0), Fraction(0)] + [hs[s] / s for s in range(2, s_max + 1)]


def chi_total(k_max: int, s_max: int = DEFAULT_S_MAX) -> Fraction:
    """Normalizer ``sum_s P_s / s`` truncated at ``s_max`` (see ``GfModel.chi_tail_bound``)."""
    return sum(chi_weights(k_max, s_max), Fraction(0))


def chi(k_max: int, s: int, s_max: int = DEFAULT_S_MAX) -> Fraction:
    if s < 2:
        raise ValueError("component-size distribution is defined for s >= 2")
    w = chi_weights(k_max, max(s, s_max))
    return w[s] / sum(w, Fraction(0))


def _g1_floats(k_max: int) -> np.ndarray:
    return np.array([float(c) for c in g1(k_max).coeffs])


def solve_u(k_max: int, tol: float = 1e-12, grid: int = 10_000) -> float:
    """Smallest root of ``G1(u) = u`` on [0, 1].

    Scans ``G1(u) - u`` on a uniform grid for the first sign change, then
    bisects to ``tol``. ``u = 1`` is always a root and is the fallback.
    """
    coeffs = _g1_floats(k_max)

    def f(u):
        return np.polynomial.polynomial.polyval(u, coeffs) - u

    xs = np.linspace(0.0, 1.0, grid)
    fs = f(xs)
    for k in range(grid - 1):
        if fs[k] == 0.0:
            return float(xs[k])
        if fs[k] * fs[k + 1] < 0:
            lo, hi = xs[k], xs[k + 1]
            flo = fs[k]
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                fm = f(mid)
                if fm == 0.0:
                    return float(mid)
                if (fm < 0) == (flo < 0):
                    lo, flo = mid, fm
                else:
                    hi = mid
            return float(0.5 * (lo + hi))
    return 1.0


def _exact_root(k_max: int, u: float) -> Fraction | None:
    """The rational root near ``u``, when ``G1`` has one there."""
    gen = g1(k_max)
    r = Fraction(u).limit_denominator(10_000)
    return r if gen(r) == r else None


def giant_fraction(k_max: int, u: float | Fraction | None = None) -> float | Fraction:
    if u is None:
        u = solve_u(k_max)
        u = _exact_root(k_max, u) or u
    return 1 - g0(k_max)(u)


def mean_component_size(k_max: int, u: float | Fraction | None = None) -> float | Fraction:
    """Mean size of the finite component containing a random agent.

    Returns ``math.inf`` at the transition, where ``1 - G1'(u)`` vanishes.
    """
    if u is None:
        u = solve_u(k_max)
        u = _exact_root(k_max, u) or u
    z, _ = z1z2(k_max)
    s_frac = giant_fraction(k_max, u)
    denom = (1 - s_frac) * (1 - g1(k_max).derivative()(u))
    if denom == 0:
        return math.inf
    zz = z if isinstance(u, Fraction) else float(z)
    return 1 + zz * u * u / denom


@dataclass(frozen=True)
class GfModel:
    k_max: int
    z1: Fraction
    z2: Fraction
    u: float
    u_exact: Fraction | None
    s_frac: float
    mean_s: float
    s_max: int
    finite_mass: float
    chi_t: Fraction

    @property
    def has_giant(self) -> bool:
        return self.z2 > self.z1

    @property
    def tail_mass(self) -> float:
        """Probability mass in finite components beyond ``s_max``."""
        return max(0.0, 1.0 - self.s_frac - self.finite_mass)

    @property
    def chi_tail_bound(self) -> float:
        """Upper bound on the part of the normalizer cut off by truncation."""
        return self.tail_mass / (self.s_max + 1)


def gf_model(k_max: int, s_max: int = DEFAULT_S_MAX) -> GfModel:
    z1, z2 = z1z2(k_max)
    u = solve_u(k_max)
    ue = _exact_root(k_max, u)
    uu = ue if ue is not None else u
    hs = h0(k_max, s_max)
    return GfModel(k_max=k_max, z1=z1, z2=z2, u=float(uu), u_exact=ue,
                   s_frac=float(giant_fraction(k_max, uu)),
                   mean_s=float(mean_component_size(k_max, uu)),
                   s_max=s_max, finite_mass=float(hs.sum_coeffs()),
                   chi_t=chi_total(k_max, s_max))
