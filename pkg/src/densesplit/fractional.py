"""Exact-rational points of the unit box over a graph's vertices, and the
potential functions driving the density splitter.

All arithmetic in this module is exact rational (``fractions.Fraction`` over
arbitrary-precision ints).  Floating point is deliberately absent: the
splitter's branch decisions are strict inequalities whose margins can be tiny,
and a single rounding error would corrupt the case analysis.  Denominators
grow along the rounding trajectory; Fraction keeps them exact and canonical
(positive denominator, reduced form).

Values are immutable and every operation is a pure function, so everything
here is safe for parallel evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

from .graphs import Graph, iter_bits

if TYPE_CHECKING:
    from .splitter import CliqueRoundState


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" or a plain integer string. Decimal notation is rejected."""
    text = text.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        return Fraction(int(num), int(den))
    if not (text.lstrip("+-").isdigit() and text.lstrip("+-")):
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(int(text))


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class SplitParams:
    """The two density targets. Both must be at least 1."""

    s: Fraction
    t: Fraction

    def __post_init__(self):
        object.__setattr__(self, "s", Fraction(self.s))
        object.__setattr__(self, "t", Fraction(self.t))
        if self.s < 1 or self.t < 1:
            raise ValueError("density targets must satisfy s >= 1 and t >= 1")

    def swapped(self) -> "SplitParams":
        return SplitParams(self.t, self.s)


@dataclass(frozen=True)
class BalanceReport:
    """Outcome of the four balancedness conditions, one flag per condition."""

    f_ok: bool        # f(x) above its threshold (strict)
    g_ok: bool        # g(x) above its threshold (strict)
    mass_ok: bool     # |x|_1 >= s + 1
    co_mass_ok: bool  # |1 - x|_1 >= t + 1

    @property
    def ok(self) -> bool:
        return self.f_ok and self.g_ok and self.mass_ok and self.co_mass_ok

    def __bool__(self) -> bool:
        return self.ok

    def failed(self) -> list[str]:
        names = ("f", "g", "mass", "co_mass")
        flags = (self.f_ok, self.g_ok, self.mass_ok, self.co_mass_ok)
        return [name for name, flag in zip(names, flags) if not flag]

    def as_tuple(self) -> tuple[bool, bool, bool, bool]:
        return (self.f_ok, self.g_ok, self.mass_ok, self.co_mass_ok)


@dataclass(frozen=True)
class FracVector:
    """A point of ``[0,1]^V(host)`` with exact rational coordinates."""

    host: Graph
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        entries = tuple(Fraction(e) for e in self.entries)
        object.__setattr__(self, "entries", entries)
        if len(entries) != self.host.n:
            raise ValueError("entry count does not match host vertex count")
        for v, e in enumerate(entries):
            if not 0 <= e <= 1:
                raise ValueError(f"coordinate {v} = {e} outside [0, 1]")

    @classmethod
    def constant(cls, host: Graph, value) -> "FracVector":
        return cls(host, (Fraction(value),) * host.n)

    def __getitem__(self, v: int) -> Fraction:
        return self.entries[v]

    def l1(self) -> Fraction:
        return sum(self.entries, Fraction(0))

    def complement(self) -> "FracVector":
        return FracVector(self.host, tuple(1 - e for e in self.entries))

    def updated(self, changes: dict[int, Fraction]) -> "FracVector":
        entries = list(self.entries)
        for v, value in changes.items():
            entries[v] = Fraction(value)
        return FracVector(self.host, tuple(entries))

    def ones_mask(self) -> int:
        m = 0
        for v, e in enumerate(self.entries):
            if e == 1:
                m |= 1 << v
        return m

    def zeros_mask(self) -> int:
        m = 0
        for v, e in enumerate(self.entries):
            if e == 0:
                m |= 1 << v
        return m

    def fractional_mask(self) -> int:
        m = 0
        for v, e in enumerate(self.entries):
            if 0 < e < 1:
                m |= 1 << v
        return m

    def is_integral(self) -> bool:
        return self.fractional_mask() == 0

    def to_strings(self) -> list[str]:
        return [format_rational(e) for e in self.entries]


def _check_host(g: Graph, x: FracVector) -> None:
    if x.host != g:
        raise ValueError("vector does not live over the given graph")


def quad_edge_sum(g: Graph, x: FracVector) -> Fraction:
    """Sum of ``x_i * x_j`` over the edges ``ij`` of the host graph."""
    _check_host(g, x)
    total = Fraction(0)
    for u in range(g.n):
        xu = x.entries[u]
        if xu == 0:
            continue
        row = g.adj[u] >> (u + 1)
        for k in iter_bits(row):
            xv = x.entries[u + 1 + k]
            if xv:
                total += xu * xv
    return total


def f_potential(g: Graph, x: FracVector, p: SplitParams) -> Fraction:
    """Density surplus of the fractional part: ``e(x) - (s + 1/2) * |x|_1``."""
    _check_host(g, x)
    return quad_edge_sum(g, x) - (p.s + Fraction(1, 2)) * x.l1()


def g_potential(g: Graph, x: FracVector, p: SplitParams) -> Fraction:
    """Density surplus of the complement: ``e(1-x) - (t + 1/2) * |1-x|_1``."""
    _check_host(g, x)
    co = x.complement()
    return quad_edge_sum(g, co) - (p.t + Fraction(1, 2)) * co.l1()


def balance_thresholds(p: SplitParams) -> tuple[Fraction, Fraction]:
    """Strict lower thresholds for the f and g balancedness conditions."""
    denom = p.s + p.t + 1
    half = Fraction(1, 2)
    return (-((p.s + half) ** 2) / denom, -((p.t + half) ** 2) / denom)


def is_balanced(g: Graph, x: FracVector, p: SplitParams) -> BalanceReport:
    """Evaluate the four balancedness conditions exactly.

    The report records which condition failed, so traces can show which
    constraint is tight.  The report is truthy iff all four hold.
    """
    _check_host(g, x)
    f_thr, g_thr = balance_thresholds(p)
    mass = x.l1()
    return BalanceReport(
        f_ok=f_potential(g, x, p) > f_thr,
        g_ok=g_potential(g, x, p) > g_thr,
        mass_ok=mass >= p.s + 1,
        co_mass_ok=g.n - mass >= p.t + 1,
    )


def fractional_support(x: FracVector) -> frozenset[int]:
    """Vertices whose coordinate is strictly between 0 and 1."""
    return frozenset(iter_bits(x.fractional_mask()))


def _clique_pair_sum(x: FracVector, c_mask: int) -> Fraction:
    members = list(iter_bits(c_mask))
    total = Fraction(0)
    for idx, u in enumerate(members):
        xu = x.entries[u]
        if xu == 0:
            continue
        for v in members[idx + 1:]:
            xv = x.entries[v]
            if xv:
                total += xu * xv
    return total


def fbar_potential(g: Graph, x: FracVector, state: "CliqueRoundState",
                   p: SplitParams) -> Fraction:
    """Adjusted f potential for the clique rounding stage.

    Replaces the quadratic clique term with its affine upper bound, so the
    result is jointly affine in the clique coordinates:

        r * sum_{i in C} x_i - r(r+1)/2 - sum_{{i,j} in C} x_i x_j
        + e(x) - s * |x|_1
    """
    _check_host(g, x)
    r = state.r
    c_sum = sum((x.entries[v] for v in iter_bits(state.c_mask)), Fraction(0))
    return (
        r * c_sum
        - Fraction(r * (r + 1), 2)
        - _clique_pair_sum(x, state.c_mask)
        + quad_edge_sum(g, x)
        - p.s * x.l1()
    )


def gbar_potential(g: Graph, x: FracVector, state: "CliqueRoundState",
                   p: SplitParams) -> Fraction:
    """Adjusted g potential, the complement-side analogue of fbar with
    coefficient ``c - r - 1``."""
    _check_host(g, x)
    co = x.complement()
    rr = state.c - state.r - 1
    c_sum = sum((co.entries[v] for v in iter_bits(state.c_mask)), Fraction(0))
    return (
        rr * c_sum
        - Fraction((state.c - state.r) * rr, 2)
        - _clique_pair_sum(co, state.c_mask)
        + quad_edge_sum(g, co)
        - p.t * co.l1()
    )
