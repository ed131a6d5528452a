"""Constructive splitting of a dense graph into two vertex-disjoint subgraphs
of prescribed densities, with a full audit trace and an always-on verifier.

Given exact rational targets ``s, t >= 1`` and a graph with
``e(G) > (s+t+1) * (v(G)-1)``, ``split`` produces disjoint non-null vertex
sets ``P1, P2`` with ``e(G[P1]) > s*(|P1|-1)`` and ``e(G[P2]) > t*(|P2|-1)``.

The construction works on a fractional relaxation over ``[0,1]^V``:

1. Start from the balanced constant vector ``(s + 1/2) / (s + t + 1)``.
2. While two fractional coordinates are non-adjacent, both potentials f and g
   are jointly affine in that pair, so some pair direction improves neither
   potential downward; move maximally inside the box until a coordinate
   becomes integral.  The fractional support ends up a clique C.
3. Inside C the potentials are adjusted (fbar, gbar) so the clique quadratic
   term cancels and both become jointly affine on C.  Depending on how the
   clique mass ``q`` splits (``r = floor(q)`` against ``2s``, ``c - r - 1``
   against ``2t``) either a second pair-rounding pass finishes the vector, or
   a one-sided pass leaves a large sub-clique of C as one output part.

Every move is recorded as a TraceStep; potentials are non-decreasing within a
stage by construction and this is asserted exactly after every move.  A
violated assertion or failed certificate raises InternalProofGap carrying the
replayable trace; it is never patched silently.  ``replay_trace`` re-simulates
a result from its trace and re-verifies every recorded quantity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .graphs import Graph, iter_bits, mask_of
from .fractional import (
    BalanceReport,
    FracVector,
    SplitParams,
    f_potential,
    fbar_potential,
    format_rational,
    g_potential,
    gbar_potential,
    is_balanced,
    parse_rational,
)


class SplitError(Exception):
    """Base error for the splitter."""


class PreconditionDensity(SplitError):
    """The density hypothesis e(G) > (s+t+1)(v(G)-1) does not hold."""


class InternalProofGap(SplitError):
    """A proof-guided branch produced an invalid state or split.

    Carries the trace recorded so far, so the failure can be replayed.
    """

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []


class NoImprovingDirection(InternalProofGap):
    """No pair direction improves both potentials; impossible for jointly
    affine potentials, so this is an internal error."""


class TraceAuditError(SplitError):
    """A recorded trace does not replay to the recorded values."""


@dataclass(frozen=True)
class CliqueRoundState:
    """Frozen bookkeeping for the clique rounding stage.

    ``a_mask``, ``b_mask``, ``c_mask`` partition the vertices into the ones,
    zeros, and fractional support of the entry vector; ``q`` is the fractional
    mass on C and ``r = floor(q)``.  The state is fixed on entry and never
    recomputed mid-stage.
    """

    a_mask: int
    b_mask: int
    c_mask: int
    q: Fraction
    r: int

    @property
    def a(self) -> int:
        return self.a_mask.bit_count()

    @property
    def b(self) -> int:
        return self.b_mask.bit_count()

    @property
    def c(self) -> int:
        return self.c_mask.bit_count()

    @property
    def clique(self) -> frozenset[int]:
        return frozenset(iter_bits(self.c_mask))

    @classmethod
    def from_vector(cls, g: Graph, y: FracVector) -> "CliqueRoundState":
        c_mask = y.fractional_mask()
        if not g.is_clique_mask(c_mask):
            raise ValueError("fractional support is not a clique")
        q = sum((y.entries[v] for v in iter_bits(c_mask)), Fraction(0))
        return cls(
            a_mask=y.ones_mask(),
            b_mask=y.zeros_mask(),
            c_mask=c_mask,
            q=q,
            r=math.floor(q),
        )

    def swapped(self) -> "CliqueRoundState":
        """State of the complemented problem (x -> 1-x, s <-> t).

        The swapped ``r`` is ``c - r - 1``, the coefficient that makes the
        swapped fbar coincide exactly with the original gbar.  It equals
        ``floor(c - q)`` except when q is integral, where it is one lower;
        both choices keep ``q' - r'`` in [0, 1], which is all the stage needs.
        """
        return CliqueRoundState(
            a_mask=self.b_mask,
            b_mask=self.a_mask,
            c_mask=self.c_mask,
            q=self.c - self.q,
            r=self.c - self.r - 1,
        )


@dataclass
class TraceStep:
    """One recorded move of the splitter."""

    stage: str  # init | pair_move | clique_enter | clique_move | final_round | fallback
    touched: tuple[int, ...]
    direction: tuple[Fraction, ...]
    step: Fraction
    potentials_after: tuple[Fraction, Fraction]
    fr_count: int
    l1: Fraction
    balanced: BalanceReport | None = None
    extra: dict[str, str] = field(default_factory=dict)
    note: str = ""

    def to_json_dict(self) -> dict:
        return {
            "stage": self.stage,
            "touched": list(self.touched),
            "direction": [format_rational(d) for d in self.direction],
            "step": format_rational(self.step),
            "potentials_after": [format_rational(p) for p in self.potentials_after],
            "fr_count": self.fr_count,
            "l1": format_rational(self.l1),
            "balanced": list(self.balanced.as_tuple()) if self.balanced else None,
            "extra": dict(self.extra),
            "note": self.note,
        }


@dataclass(frozen=True)
class SplitResult:
    """Certified output partition with its audit trace."""

    part1: frozenset[int]
    part2: frozenset[int]
    densities: tuple[int, int, int, int]  # (e1, v1, e2, v2)
    certificate_ok: bool
    trace: tuple[TraceStep, ...]
    route: str  # direct | main | fallback-t | fallback-s | exhaustive-rescue

    def to_json_dict(self) -> dict:
        e1, v1, e2, v2 = self.densities
        return {
            "part1": sorted(self.part1),
            "part2": sorted(self.part2),
            "densities": {"e1": e1, "v1": v1, "e2": e2, "v2": v2},
            "certificate_ok": self.certificate_ok,
            "route": self.route,
        }


def trace_json_document(g: Graph, p: SplitParams, result: SplitResult) -> dict:
    return {
        "params": {"s": format_rational(p.s), "t": format_rational(p.t), "n": g.n},
        "steps": [step.to_json_dict() for step in result.trace],
        "result": result.to_json_dict(),
    }


def verify_certificate(g: Graph, parts, p: SplitParams) -> bool:
    """Exact check: disjoint non-empty parts, both density inequalities strict."""
    part1, part2 = parts
    part1, part2 = frozenset(part1), frozenset(part2)
    if not part1 or not part2 or part1 & part2:
        return False
    if any(not 0 <= v < g.n for v in part1 | part2):
        return False
    e1 = g.edge_count_within(mask_of(part1))
    e2 = g.edge_count_within(mask_of(part2))
    return e1 > p.s * (len(part1) - 1) and e2 > p.t * (len(part2) - 1)


_ZERO = Fraction(0)
_ONE = Fraction(1)
_HALF = Fraction(1, 2)

# Fixed probe order for pair directions: axes, then diagonals, then the
# zero-line of the first potential oriented to not decrease the second.
_DIRECTION_CANDIDATES = (
    (_ONE, _ZERO),
    (-_ONE, _ZERO),
    (_ZERO, _ONE),
    (_ZERO, -_ONE),
    (_ONE, _ONE),
    (_ONE, -_ONE),
    (-_ONE, _ONE),
    (-_ONE, -_ONE),
)


def _primitive(vi: Fraction, vj: Fraction) -> tuple[Fraction, Fraction]:
    scale = math.lcm(vi.denominator, vj.denominator)
    a, b = int(vi * scale), int(vj * scale)
    d = math.gcd(a, b)
    if d == 0:
        raise ValueError("zero direction")
    return Fraction(a, d), Fraction(b, d)


def find_pair_direction(coeffs_f, coeffs_g) -> tuple[Fraction, Fraction]:
    """A nonzero direction (v_i, v_j) with nonnegative movement for both
    affine potentials whose pair coefficients are given.

    Two half-planes through the origin always share a ray, so a direction
    always exists.  Probes the eight signed axis and diagonal directions in a
    fixed order, then falls back to the line where the first potential is
    constant, oriented so the second does not decrease.
    """
    af, bf = Fraction(coeffs_f[0]), Fraction(coeffs_f[1])
    ag, bg = Fraction(coeffs_g[0]), Fraction(coeffs_g[1])
    for vi, vj in _DIRECTION_CANDIDATES:
        if af * vi + bf * vj >= 0 and ag * vi + bg * vj >= 0:
            return (vi, vj)
    if af == bf == 0:
        raise NoImprovingDirection("axis directions must cover a zero gradient")
    vi, vj = _primitive(-bf, af)
    if ag * vi + bg * vj < 0:
        vi, vj = -vi, -vj
    if af * vi + bf * vj < 0 or ag * vi + bg * vj < 0:
        raise NoImprovingDirection("orthogonal fallback failed")
    return (vi, vj)


def _max_box_step(x: FracVector, i: int, j: int, vi: Fraction,
                  vj: Fraction) -> Fraction:
    """Largest eps keeping both moved coordinates inside [0, 1]."""
    eps = None
    for idx, w in ((i, vi), (j, vj)):
        if w > 0:
            cand = (1 - x.entries[idx]) / w
        elif w < 0:
            cand = x.entries[idx] / (-w)
        else:
            continue
        eps = cand if eps is None else min(eps, cand)
    if eps is None:
        raise NoImprovingDirection("direction moves no coordinate")
    return eps


def init_balanced(g: Graph, p: SplitParams) -> FracVector:
    """The balanced constant starting vector ``(s + 1/2) / (s + t + 1)``."""
    _check_hypothesis(g, p)
    x = FracVector.constant(g, (p.s + _HALF) / (p.s + p.t + 1))
    report = is_balanced(g, x, p)
    if not report:
        raise InternalProofGap(
            f"constant starting vector not balanced: failed {report.failed()}")
    return x


def _check_hypothesis(g: Graph, p: SplitParams) -> None:
    if g.n == 0:
        raise PreconditionDensity("input graph is null")
    bound = (p.s + p.t + 1) * (g.n - 1)
    if not Fraction(g.edge_count) > bound:
        raise PreconditionDensity(
            f"need e(G) > (s+t+1)(v(G)-1) = {bound}, have e(G) = {g.edge_count}")


def _f_pair_coeffs(g: Graph, x: FracVector, p: SplitParams, i: int, j: int):
    def coeff(v):
        s = sum((x.entries[u] for u in iter_bits(g.adj[v])), _ZERO)
        return s - (p.s + _HALF)
    return (coeff(i), coeff(j))


def _g_pair_coeffs(g: Graph, x: FracVector, p: SplitParams, i: int, j: int):
    def coeff(v):
        s = sum((1 - x.entries[u] for u in iter_bits(g.adj[v])), _ZERO)
        return (p.t + _HALF) - s
    return (coeff(i), coeff(j))


def _lex_nonadjacent_pair(g: Graph, fr_mask: int):
    members = list(iter_bits(fr_mask))
    for a_idx, i in enumerate(members):
        for j in members[a_idx + 1:]:
            if not g.has_edge(i, j):
                return (i, j)
    return None


def round_off_clique(g: Graph, x: FracVector, p: SplitParams,
                     trace: list[TraceStep] | None = None) -> FracVector:
    """First rounding stage: move on non-adjacent fractional pairs until the
    fractional support is a clique.  Balancedness and both potentials are
    preserved at every step; each step makes at least one coordinate integral.
    """
    if not is_balanced(g, x, p):
        raise ValueError("input vector is not balanced")
    fv, gv = f_potential(g, x, p), g_potential(g, x, p)
    steps = 0
    while True:
        pair = _lex_nonadjacent_pair(g, x.fractional_mask())
        if pair is None:
            return x
        steps += 1
        if steps > g.n:
            raise InternalProofGap("pair rounding exceeded its step bound", trace)
        i, j = pair
        vi, vj = find_pair_direction(
            _f_pair_coeffs(g, x, p, i, j), _g_pair_coeffs(g, x, p, i, j))
        eps = _max_box_step(x, i, j, vi, vj)
        if eps <= 0:
            raise InternalProofGap("non-positive step on an interior pair", trace)
        new_x = x.updated({i: x.entries[i] + eps * vi,
                           j: x.entries[j] + eps * vj})
        fv2, gv2 = f_potential(g, new_x, p), g_potential(g, new_x, p)
        report = is_balanced(g, new_x, p)
        if fv2 < fv or gv2 < gv:
            raise InternalProofGap("potential decreased during pair rounding", trace)
        if new_x.fractional_mask().bit_count() >= x.fractional_mask().bit_count():
            raise InternalProofGap("pair move did not shrink the support", trace)
        if not report:
            raise InternalProofGap(
                f"balance lost after pair move: failed {report.failed()}", trace)
        if trace is not None:
            trace.append(TraceStep(
                stage="pair_move", touched=(i, j), direction=(vi, vj), step=eps,
                potentials_after=(fv2, gv2),
                fr_count=new_x.fractional_mask().bit_count(),
                l1=new_x.l1(), balanced=report))
        x, fv, gv = new_x, fv2, gv2


def _fbar_coeff(g: Graph, state: CliqueRoundState, p: SplitParams, v: int) -> Fraction:
    return Fraction(state.r + (g.adj[v] & state.a_mask).bit_count()) - p.s


def _gbar_coeff(g: Graph, state: CliqueRoundState, p: SplitParams, v: int) -> Fraction:
    return p.t - (state.c - state.r - 1) - (g.adj[v] & state.b_mask).bit_count()


def _claim4_lower_bounds(g, y, state, p):
    half_sq_f = (p.s + _HALF) ** 2 / (p.s + p.t + 1)
    half_sq_g = (p.t + _HALF) ** 2 / (p.s + p.t + 1)
    qq = state.q * state.q / (2 * state.c) if state.c else _ZERO
    cq = (state.c - state.q) ** 2 / (2 * state.c) if state.c else _ZERO
    return (Fraction(state.a, 2) + qq - half_sq_f,
            Fraction(state.b, 2) + cq - half_sq_g)


def _mass_on(x: FracVector, mask: int) -> Fraction:
    return sum((x.entries[v] for v in iter_bits(mask)), _ZERO)


def _finish(g, p, part1, part2, trace, route) -> SplitResult:
    part1, part2 = frozenset(part1), frozenset(part2)
    e1 = g.edge_count_within(mask_of(part1))
    e2 = g.edge_count_within(mask_of(part2))
    if not verify_certificate(g, (part1, part2), p):
        raise InternalProofGap(
            f"certificate failed on route {route}: "
            f"e1={e1} v1={len(part1)} e2={e2} v2={len(part2)}", trace)
    return SplitResult(
        part1=part1, part2=part2, densities=(e1, len(part1), e2, len(part2)),
        certificate_ok=True, trace=tuple(trace) if trace else (), route=route)


def clique_stage(g: Graph, y: FracVector, p: SplitParams,
                 trace: list[TraceStep] | None = None) -> SplitResult:
    """Second stage: freeze the clique state and finish the rounding.

    Routes: direct readout when y is already integral; the two-potential pass
    when ``r <= 2s`` and ``c - r - 1 <= 2t``; otherwise the one-sided pass on
    whichever bound fails (complement side first, recorded in the trace).
    """
    if trace is None:
        trace = []
    if not is_balanced(g, y, p):
        raise ValueError("input vector is not balanced")
    state = CliqueRoundState.from_vector(g, y)
    fb, gb = fbar_potential(g, y, state, p), gbar_potential(g, y, state, p)
    low_f, low_g = _claim4_lower_bounds(g, y, state, p)
    if not (fb > low_f and gb > low_g):
        raise InternalProofGap(
            "entry bounds for the adjusted potentials do not hold", trace)
    trace.append(TraceStep(
        stage="clique_enter", touched=(), direction=(), step=_ZERO,
        potentials_after=(fb, gb), fr_count=state.c, l1=y.l1(),
        extra={
            "a": str(state.a), "b": str(state.b), "c": str(state.c),
            "q": format_rational(state.q), "r": str(state.r),
            "claim4_f": format_rational(low_f), "claim4_g": format_rational(low_g),
        }))
    if state.c == 0:
        part1 = frozenset(iter_bits(state.a_mask))
        part2 = frozenset(iter_bits(state.b_mask))
        return _finish(g, p, part1, part2, trace, "direct")
    if state.r <= 2 * p.s and state.c - state.r - 1 <= 2 * p.t:
        return clique_round_main(g, y, state, p, trace)
    if state.c - state.r - 1 > 2 * p.t:
        return clique_fallback(g, y, state, p, trace, side="t")
    return clique_fallback(g, y, state, p, trace, side="s")


def clique_round_main(g: Graph, y: FracVector, state: CliqueRoundState,
                      p: SplitParams, trace: list[TraceStep] | None = None) -> SplitResult:
    """Finish inside the clique with both adjusted potentials non-decreasing.

    Pair moves keep ``|z|_1 > 1`` and ``|1-z|_1 > 1``; the entry bounds make
    the boundary unreachable, so a binding clamp is surfaced as a proof gap.
    The last fractional coordinate rounds down at a tie.
    """
    if trace is None:
        trace = []
    z = y
    fb, gb = fbar_potential(g, z, state, p), gbar_potential(g, z, state, p)
    while True:
        fr = sorted(iter_bits(z.fractional_mask()))
        if len(fr) <= 1:
            break
        i, j = fr[0], fr[1]
        vi, vj = find_pair_direction(
            (_fbar_coeff(g, state, p, i), _fbar_coeff(g, state, p, j)),
            (_gbar_coeff(g, state, p, i), _gbar_coeff(g, state, p, j)))
        eps_box = _max_box_step(z, i, j, vi, vj)
        drift = vi + vj
        eps = eps_box
        if drift < 0:
            clamp = (z.l1() - 1) / (-drift)
            if clamp <= eps_box:
                raise InternalProofGap(
                    "move stalled at the lower mass boundary", trace)
        elif drift > 0:
            clamp = (g.n - z.l1() - 1) / drift
            if clamp <= eps_box:
                raise InternalProofGap(
                    "move stalled at the upper mass boundary", trace)
        new_z = z.updated({i: z.entries[i] + eps * vi,
                           j: z.entries[j] + eps * vj})
        fb2 = fbar_potential(g, new_z, state, p)
        gb2 = gbar_potential(g, new_z, state, p)
        if fb2 < fb or gb2 < gb:
            raise InternalProofGap("adjusted potential decreased", trace)
        if new_z.fractional_mask().bit_count() >= len(fr):
            raise InternalProofGap("clique move did not shrink the support", trace)
        if not (new_z.l1() > 1 and g.n - new_z.l1() > 1):
            raise InternalProofGap("mass bound violated after clique move", trace)
        trace.append(TraceStep(
            stage="clique_move", touched=(i, j), direction=(vi, vj), step=eps,
            potentials_after=(fb2, gb2),
            fr_count=new_z.fractional_mask().bit_count(), l1=new_z.l1(),
            extra={"clique_mass": format_rational(_mass_on(new_z, state.c_mask))}))
        z, fb, gb = new_z, fb2, gb2

    fr = sorted(iter_bits(z.fractional_mask()))
    if fr:
        i = fr[0]
        target = _ZERO if z.entries[i] <= _HALF else _ONE
        new_z = z.updated({i: target})
        fb, gb = fbar_potential(g, new_z, state, p), gbar_potential(g, new_z, state, p)
        trace.append(TraceStep(
            stage="final_round", touched=(i,), direction=(target - z.entries[i],),
            step=_ONE, potentials_after=(fb, gb), fr_count=0, l1=new_z.l1(),
            note="main"))
        z = new_z
    if not (fb > -p.s and gb > -p.t):
        raise InternalProofGap(
            "rounded vector misses the final potential bounds", trace)
    part1 = frozenset(iter_bits(z.ones_mask()))
    part2 = frozenset(iter_bits(z.zeros_mask()))
    return _finish(g, p, part1, part2, trace, "main")


def clique_fallback(g: Graph, y: FracVector, state: CliqueRoundState,
                    p: SplitParams, trace: list[TraceStep] | None = None,
                    side: str = "t") -> SplitResult:
    """One-sided pass: round maximizing fbar while weakly decreasing the
    clique mass; the zero part of the clique stays a large clique.

    ``side='t'`` handles ``c - r - 1 > 2t`` directly.  ``side='s'`` handles
    ``r > 2s`` by running the same pass on the complemented problem
    (x -> 1-x, s <-> t) and swapping the resulting parts back.
    """
    if trace is None:
        trace = []
    if side == "s":
        trace.append(TraceStep(
            stage="fallback", touched=(), direction=(), step=_ZERO,
            potentials_after=(fbar_potential(g, y, state, p),
                              gbar_potential(g, y, state, p)),
            fr_count=state.c, l1=y.l1(),
            note="enter:s-side-swap",
            extra={"swap": "x -> 1-x, s <-> t"}))
        swapped_y = y.complement()
        swapped_p = p.swapped()
        swapped_state = state.swapped()
        part_ones, part_w = _fallback_t_side(
            g, swapped_y, swapped_state, swapped_p, trace)
        # Parts swap roles when mapped back to the original orientation.
        return _finish(g, p, part_w, part_ones, trace, "fallback-s")
    trace.append(TraceStep(
        stage="fallback", touched=(), direction=(), step=_ZERO,
        potentials_after=(fbar_potential(g, y, state, p),
                          gbar_potential(g, y, state, p)),
        fr_count=state.c, l1=y.l1(), note="enter:t-side"))
    part_ones, part_w = _fallback_t_side(g, y, state, p, trace)
    return _finish(g, p, part_ones, part_w, trace, "fallback-t")


def _fallback_t_side(g: Graph, z: FracVector, state: CliqueRoundState,
                     p: SplitParams, trace: list[TraceStep]):
    """Shared one-sided rounding; requires ``c - r - 1 > 2t`` for its state.

    Returns ``(ones_part, w_part)`` where ``ones_part`` is the full set of
    coordinates rounded to one and ``w_part`` the clique coordinates rounded
    to zero (a clique on more than ``2t`` vertices).
    """
    if not state.c - state.r - 1 > 2 * p.t:
        raise InternalProofGap("one-sided pass entered without its bound", trace)
    fb = fbar_potential(g, z, state, p)
    mass = _mass_on(z, state.c_mask)
    while True:
        fr = sorted(iter_bits(z.fractional_mask()))
        if len(fr) <= 1:
            break
        i, j = fr[0], fr[1]
        vi, vj = find_pair_direction(
            (_fbar_coeff(g, state, p, i), _fbar_coeff(g, state, p, j)),
            (-_ONE, -_ONE))
        eps = _max_box_step(z, i, j, vi, vj)
        if eps <= 0:
            raise InternalProofGap("non-positive one-sided step", trace)
        new_z = z.updated({i: z.entries[i] + eps * vi,
                           j: z.entries[j] + eps * vj})
        fb2 = fbar_potential(g, new_z, state, p)
        mass2 = _mass_on(new_z, state.c_mask)
        if fb2 < fb or mass2 > mass:
            raise InternalProofGap("one-sided invariant violated", trace)
        if new_z.fractional_mask().bit_count() >= len(fr):
            raise InternalProofGap("one-sided move did not shrink the support", trace)
        trace.append(TraceStep(
            stage="clique_move", touched=(i, j), direction=(vi, vj), step=eps,
            potentials_after=(fb2, gbar_potential(g, new_z, state, p)),
            fr_count=new_z.fractional_mask().bit_count(), l1=new_z.l1(),
            note="claim8",
            extra={"clique_mass": format_rational(mass2)}))
        z, fb, mass = new_z, fb2, mass2

    fr = sorted(iter_bits(z.fractional_mask()))
    if fr:
        i = fr[0]
        k = _fbar_coeff(g, state, p, i)
        target = _ONE if k >= 0 else _ZERO
        new_z = z.updated({i: target})
        fb2 = fbar_potential(g, new_z, state, p)
        if fb2 < fb:
            raise InternalProofGap("final one-sided rounding decreased fbar", trace)
        trace.append(TraceStep(
            stage="final_round", touched=(i,),
            direction=(target - z.entries[i],), step=_ONE,
            potentials_after=(fb2, gbar_potential(g, new_z, state, p)),
            fr_count=0, l1=new_z.l1(), note="claim8",
            extra={"coeff": format_rational(k),
                   "clique_mass": format_rational(_mass_on(new_z, state.c_mask))}))
        z, fb = new_z, fb2
    final_mass = _mass_on(z, state.c_mask)
    if final_mass > math.ceil(state.q):
        raise InternalProofGap("clique mass exceeded its ceiling", trace)
    w_mask = state.c_mask & z.zeros_mask()
    if w_mask.bit_count() < state.c - state.r - 1:
        raise InternalProofGap("residual clique is too small", trace)
    ones = frozenset(iter_bits(z.ones_mask()))
    if not ones:
        # The entry bounds exclude this, but it is detected rather than assumed.
        raise InternalProofGap("one-sided pass produced an empty dense part", trace)
    return ones, frozenset(iter_bits(w_mask))


def split(g: Graph, p: SplitParams, *,
          fallback_exhaustive: bool = False) -> SplitResult:
    """Produce a certified two-part density split of ``g``.

    Raises PreconditionDensity when the hypothesis fails and InternalProofGap
    when a proof-guided branch produces an invalid split.  With
    ``fallback_exhaustive`` (off in library use; meant for diagnosis) a proof
    gap on a graph with at most 16 vertices triggers an exhaustive search for
    a valid certificate before the error propagates, which distinguishes a
    gap in the construction from genuine non-existence.
    """
    _check_hypothesis(g, p)
    trace: list[TraceStep] = []
    x0 = init_balanced(g, p)
    trace.append(TraceStep(
        stage="init", touched=(), direction=(), step=_ZERO,
        potentials_after=(f_potential(g, x0, p), g_potential(g, x0, p)),
        fr_count=x0.fractional_mask().bit_count(), l1=x0.l1(),
        balanced=is_balanced(g, x0, p),
        extra={"value": format_rational(x0.entries[0])}))
    try:
        y = round_off_clique(g, x0, p, trace)
        return clique_stage(g, y, p, trace)
    except InternalProofGap as gap:
        if fallback_exhaustive and g.n <= 16:
            found = exhaustive_split_search(g, p)
            if found is not None:
                part1, part2 = found
                trace.append(TraceStep(
                    stage="fallback", touched=(), direction=(), step=_ZERO,
                    potentials_after=(_ZERO, _ZERO), fr_count=0, l1=_ZERO,
                    note="exhaustive-rescue",
                    extra={"gap": str(gap)}))
                return _finish(g, p, part1, part2, trace, "exhaustive-rescue")
        if not gap.trace:
            gap.trace = trace
        raise


def exhaustive_split_search(g: Graph, p: SplitParams):
    """Search all pairs of disjoint vertex sets for a valid certificate.

    Subset dynamic programming over the 2^n masks; None means no pair of
    disjoint non-empty sets satisfies both density inequalities, which is an
    exhaustive non-existence verdict. Limited to 16 vertices.
    """
    n = g.n
    if n > 16:
        raise ValueError("exhaustive search limited to 16 vertices")
    size = 1 << n
    esub = [0] * size
    for mask in range(1, size):
        low = mask & -mask
        v = low.bit_length() - 1
        rest = mask ^ low
        esub[mask] = esub[rest] + (g.adj[v] & rest).bit_count()

    def valid(mask: int, target: Fraction) -> bool:
        return mask != 0 and esub[mask] > target * (mask.bit_count() - 1)

    ok_t = bytearray(size)
    for mask in range(1, size):
        if valid(mask, p.t):
            ok_t[mask] = 1
            continue
        m = mask
        while m:
            low = m & -m
            if ok_t[mask ^ low]:
                ok_t[mask] = 1
                break
            m ^= low
    full = size - 1
    for mask in range(1, size):
        if valid(mask, p.s) and ok_t[full ^ mask]:
            rest = full ^ mask
            while not valid(rest, p.t):
                m = rest
                while m:
                    low = m & -m
                    if ok_t[rest ^ low]:
                        rest ^= low
                        break
                    m ^= low
            return (frozenset(iter_bits(mask)), frozenset(iter_bits(rest)))
    return None


def replay_trace(g: Graph, p: SplitParams, result: SplitResult) -> None:
    """Re-simulate a result from its trace, re-verifying every recorded value.

    Reconstructs each intermediate vector, recomputes potentials exactly, and
    checks stage monotonicity, the box constraint, support shrinkage,
    balancedness after every first-stage move, and the final certificate.
    Raises TraceAuditError on the first discrepancy.
    """
    if result.route == "exhaustive-rescue":
        if not verify_certificate(g, (result.part1, result.part2), p):
            raise TraceAuditError("rescued result fails its certificate")
        return
    steps = list(result.trace)
    if not steps or steps[0].stage != "init":
        raise TraceAuditError("trace must start with an init step")

    x = FracVector.constant(g, (p.s + _HALF) / (p.s + p.t + 1))
    params = p
    state: CliqueRoundState | None = None
    last_pair = (f_potential(g, x, p), g_potential(g, x, p))
    last_fr = x.fractional_mask().bit_count()
    last_mass: Fraction | None = None

    def expect(cond: bool, message: str) -> None:
        if not cond:
            raise TraceAuditError(message)

    for idx, step in enumerate(steps):
        if step.stage == "init":
            expect(idx == 0, "init step not at the start")
            expect(step.potentials_after == last_pair, "init potentials differ")
            expect(step.fr_count == last_fr, "init support count differs")
            expect(step.balanced is not None and step.balanced.ok,
                   "init vector not recorded balanced")
            expect(bool(is_balanced(g, x, p)), "init vector not balanced")
        elif step.stage == "pair_move":
            expect(state is None, "pair move after the clique stage began")
            i, j = step.touched
            vi, vj = step.direction
            x = x.updated({i: x.entries[i] + step.step * vi,
                           j: x.entries[j] + step.step * vj})
            pots = (f_potential(g, x, params), g_potential(g, x, params))
            expect(pots == step.potentials_after, "pair move potentials differ")
            expect(pots[0] >= last_pair[0] and pots[1] >= last_pair[1],
                   "pair move decreased a potential")
            fr = x.fractional_mask().bit_count()
            expect(fr < last_fr, "pair move did not shrink the support")
            expect(fr == step.fr_count, "recorded support count differs")
            expect(x.l1() == step.l1, "recorded l1 differs")
            report = is_balanced(g, x, params)
            expect(report.ok, f"balance lost after pair move: {report.failed()}")
            last_pair, last_fr = pots, fr
        elif step.stage == "clique_enter":
            state = CliqueRoundState.from_vector(g, x)
            expect(int(step.extra["a"]) == state.a, "recorded a differs")
            expect(int(step.extra["b"]) == state.b, "recorded b differs")
            expect(int(step.extra["c"]) == state.c, "recorded c differs")
            expect(parse_rational(step.extra["q"]) == state.q, "recorded q differs")
            expect(int(step.extra["r"]) == state.r, "recorded r differs")
            pots = (fbar_potential(g, x, state, params),
                    gbar_potential(g, x, state, params))
            expect(pots == step.potentials_after, "entry potentials differ")
            low_f, low_g = _claim4_lower_bounds(g, x, state, params)
            expect(pots[0] > low_f and pots[1] > low_g,
                   "entry lower bounds do not hold")
            last_pair = pots
            last_mass = _mass_on(x, state.c_mask)
        elif step.stage == "fallback":
            if step.note == "enter:s-side-swap":
                expect(state is not None, "swap before the clique stage")
                x = x.complement()
                params = params.swapped()
                state = state.swapped()
                last_pair = (fbar_potential(g, x, state, params),
                             gbar_potential(g, x, state, params))
                last_mass = _mass_on(x, state.c_mask)
        elif step.stage == "clique_move":
            expect(state is not None, "clique move before the clique stage")
            i, j = step.touched
            vi, vj = step.direction
            x = x.updated({i: x.entries[i] + step.step * vi,
                           j: x.entries[j] + step.step * vj})
            pots = (fbar_potential(g, x, state, params),
                    gbar_potential(g, x, state, params))
            expect(pots == step.potentials_after, "clique move potentials differ")
            expect(pots[0] >= last_pair[0], "fbar decreased")
            mass = _mass_on(x, state.c_mask)
            if step.note == "claim8":
                expect(last_mass is not None and mass <= last_mass,
                       "clique mass increased in the one-sided pass")
            else:
                expect(pots[1] >= last_pair[1], "gbar decreased")
                expect(x.l1() > 1 and g.n - x.l1() > 1,
                       "mass bound violated after clique move")
            fr = x.fractional_mask().bit_count()
            expect(fr < last_fr, "clique move did not shrink the support")
            expect(fr == step.fr_count, "recorded support count differs")
            expect(x.l1() == step.l1, "recorded l1 differs")
            last_pair, last_fr, last_mass = pots, fr, mass
        elif step.stage == "final_round":
            expect(state is not None, "final rounding before the clique stage")
            (i,) = step.touched
            x = x.updated({i: x.entries[i] + step.direction[0]})
            expect(x.entries[i] in (0, 1), "final rounding left a fraction")
            pots = (fbar_potential(g, x, state, params),
                    gbar_potential(g, x, state, params))
            expect(pots == step.potentials_after, "final potentials differ")
            if step.note == "claim8":
                expect(pots[0] >= last_pair[0], "final rounding decreased fbar")
                expect(_mass_on(x, state.c_mask) <= math.ceil(state.q),
                       "clique mass exceeded its ceiling")
            else:
                expect(pots[0] > -params.s and pots[1] > -params.t,
                       "final potential bounds do not hold")
            last_pair = pots
        else:
            raise TraceAuditError(f"unknown trace stage {step.stage!r}")
        for e in x.entries:
            expect(0 <= e <= 1, "intermediate vector left the unit box")

    expect(x.is_integral(), "trace did not end in an integral vector")
    if result.route in ("direct", "main"):
        part1 = frozenset(iter_bits(x.ones_mask()))
        part2 = frozenset(iter_bits(x.zeros_mask()))
    elif result.route == "fallback-t":
        expect(state is not None, "missing clique state")
        part1 = frozenset(iter_bits(x.ones_mask()))
        part2 = frozenset(iter_bits(state.c_mask & x.zeros_mask()))
    elif result.route == "fallback-s":
        expect(state is not None, "missing clique state")
        # Swapped frame: the clique zeros are the dense s-side part.
        part1 = frozenset(iter_bits(state.c_mask & x.zeros_mask()))
        part2 = frozenset(iter_bits(x.ones_mask()))
    else:
        raise TraceAuditError(f"unknown route {result.route!r}")
    expect(part1 == result.part1, "reconstructed part1 differs")
    expect(part2 == result.part2, "reconstructed part2 differs")
    expect(verify_certificate(g, (part1, part2), p),
           "replayed parts fail the certificate")
    e1 = g.edge_count_within(sum(1 << v for v in part1))
    e2 = g.edge_count_within(sum(1 << v for v in part2))
    expect(result.densities == (e1, len(part1), e2, len(part2)),
           "recorded densities differ")
