"""Exact brute-force oracles at desk scale.

Balanced-word enumeration, finite FK partition functions computed on both
sides of the bijection, rigorous truncated bounds on the law of the
hamburger hitting time tau^h, and ring counts for the gasket decomposition.
All probability mass here is exact rational arithmetic; floats enter only
through the loop partition function F_ell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import maps as M
from . import words as W
from .analytics import ModelParams, partition_F

__all__ = [
    "enumerate_balanced_words",
    "finite_fk_partition",
    "tau_law_bounds",
    "rational_p",
    "count_rings",
    "ring_count_closed_form",
    "gasket_weight",
    "ExactWeightTable",
    "BoundsPair",
]

ENUMERATION_CAP = 6  # largest k for exhaustive word enumeration


@dataclass
class ExactWeightTable:
    entries: dict = field(default_factory=dict)

    @property
    def total(self):
        return sum(self.entries.values())


@dataclass(frozen=True)
class BoundsPair:
    lower: object
    upper: object

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")

    def contains(self, x) -> bool:
        return self.lower <= x <= self.upper

    @property
    def width(self):
        return self.upper - self.lower


def enumerate_balanced_words(k: int) -> list[str]:
    """All words of length 2k reducing to the empty word, sorted.

    Depth-first search over the five letters with stack-feasibility pruning:
    an unmatched order can never be absorbed later, and unmatched burgers
    must not outnumber the remaining positions.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > ENUMERATION_CAP:
        raise ValueError(f"k={k} exceeds the enumeration cap {ENUMERATION_CAP}")
    out: list[str] = []
    letters = sorted(W.ALPHABET)
    n = 2 * k

    def dfs(prefix: list[str], nc: int, nh: int) -> None:
        depth = len(prefix)
        if depth == n:
            out.append("".join(prefix))
            return
        remaining = n - depth
        for s in letters:
            if s == "c":
                if nc + nh + 1 <= remaining - 1:
                    prefix.append(s)
                    dfs(prefix, nc + 1, nh)
                    prefix.pop()
            elif s == "h":
                if nc + nh + 1 <= remaining - 1:
                    prefix.append(s)
                    dfs(prefix, nc, nh + 1)
                    prefix.pop()
            elif s == "C":
                if nc > 0:
                    prefix.append(s)
                    dfs(prefix, nc - 1, nh)
                    prefix.pop()
            elif s == "H":
                if nh > 0:
                    prefix.append(s)
                    dfs(prefix, nc, nh - 1)
                    prefix.pop()
            else:  # F eats the freshest burger of either type
                if nc + nh > 0:
                    # which stack shrinks depends on the freshest burger;
                    # track both stacks explicitly via the word itself
                    prefix.append(s)
                    last = _freshest_type(prefix)
                    if last == "c":
                        dfs(prefix, nc - 1, nh)
                    else:
                        dfs(prefix, nc, nh - 1)
                    prefix.pop()

    dfs([], 0, 0)
    return out


def _freshest_type(prefix: list[str]) -> str:
    """Type of the burger the final F of `prefix` consumes."""
    w = "".join(prefix)
    matches = W.match_positions(w)
    return w[matches[len(w)] - 1]


def finite_fk_partition(k: int, q) -> tuple[ExactWeightTable, ExactWeightTable]:
    """Per-configuration FK weights with k edges, word-side and map-side.

    Word-side weight of a balanced word is n^{#F+1} with n = sqrt(q);
    map-side weight of the corresponding decorated map is q^{#loops/2} =
    n^{#loops}.  The two tables must agree entry by entry; when sqrt(q) is
    rational everything stays in exact rationals.
    """
    n = _sqrt_exact(q)
    word_side = ExactWeightTable()
    map_side = ExactWeightTable()
    for w in enumerate_balanced_words(k):
        word_side.entries[w] = n ** (w.count("F") + 1)
        m, omega = M.word_to_map(w)
        map_side.entries[w] = n ** M.loop_count(m, omega)
    return word_side, map_side


def rational_p(q, max_denominator: int = 10**4) -> Fraction:
    """p = sqrt(q) / (2 + sqrt(q)) as an exact or nearby rational.

    Exact whenever sqrt(q) is rational; otherwise sqrt(q) is replaced by its
    best rational approximation with the given denominator cap (error below
    1e-7 already, far inside any Monte Carlo resolution the bounds are
    compared against).
    """
    n = _sqrt_exact(q)
    if not isinstance(n, Fraction):
        n = Fraction(n).limit_denominator(max_denominator)
    return n / (2 + n)


def _sqrt_exact(q):
    """sqrt(q) as a Fraction when exact, else a float."""
    qf = Fraction(q)
    if qf <= 0 or qf >= 4:
        raise ValueError(f"q must lie in (0, 4), got {q}")
    rn = math.isqrt(qf.numerator)
    rd = math.isqrt(qf.denominator)
    if rn * rn == qf.numerator and rd * rd == qf.denominator:
        return Fraction(rn, rd)
    return math.sqrt(float(qf))


# ---------------------------------------------------------------------------
# Rigorous bounds on the law of tau^h
# ---------------------------------------------------------------------------


def tau_law_bounds(
    ell_max: int,
    depth_cap: int = 30,
    p: Fraction = None,
    state_cap: int = 50_000,
    mass_floor: Fraction = Fraction(1, 10**10),
) -> list[BoundsPair]:
    """Exact bracketing of P(tau^h = ell + 1) for ell = 0..ell_max.

    The letters left of the origin are generated one at a time (reading
    right to left) and parsed on the fly into the block decomposition:
    single top-level letters and maximal F-excursions.  The hamburger walk
    steps -1 on a top-level h, +1 on a top-level H, and by the reduced
    length of each closing type-c excursion; tau^h is the number of such
    steps when the walk first hits -1.

    The DP state is (steps so far, walk value, open-excursion string): the
    string lists the unabsorbed orders of the open maximal excursion in
    reading order, starting with the F that opened it (empty at top level).
    A burger c removes the last C-or-F, a burger h the last H-or-F, and
    removing the leading F closes the excursion, whose reduced length is the
    number of surviving opposite orders behind it.  Pending orders at top
    level are dropped: a top-level letter is a block of its own whether or
    not it finds a match, and an open excursion can only consume orders
    placed after its F, so top-level leftovers never influence the walk.

    Lower bounds sum the mass resolved within depth_cap letters; upper
    bounds add every unresolved or capped state that could still produce
    the given value of tau^h (at least one more step is needed, and the
    walk must be low enough to reach -1 in the remaining budget).
    """
    if p is None:
        p = Fraction(1, 3)  # q = 1: p = sqrt(q) / (2 + sqrt(q))
    p = Fraction(p)
    if not (0 < p < Fraction(1, 2)):
        raise ValueError(f"p must lie in (0, 1/2), got {p}")
    probs = {
        "c": Fraction(1, 4),
        "h": Fraction(1, 4),
        "C": (1 - p) / 4,
        "H": (1 - p) / 4,
        "F": p / 2,
    }
    # All masses at a given depth share the denominator denom^depth, so the
    # DP carries integer numerators only (exactness without gcd overhead).
    denom = math.lcm(*(pr.denominator for pr in probs.values()))
    num = {letter: int(pr * denom) for letter, pr in probs.items()}
    trans = {}  # (pend, letter) -> (pend2, ds, dh, top_h) memoised

    def transition(pend: str, letter: str):
        key = (pend, letter)
        got = trans.get(key)
        if got is None:
            kind, payload = _parse_letter(0, 0, pend, letter)
            if kind == "hit":
                got = ("", 1, -1, True)
            else:
                s2, h2, pend2 = payload
                got = (pend2, s2, h2, letter == "h" and not pend)
            trans[key] = got
        return got

    states: dict[tuple[int, int, str], int] = {(0, 0, ""): 1}
    resolved = [Fraction(0)] * (ell_max + 1)
    parked: dict[tuple[int, int], Fraction] = {}
    scale = 1  # denom**depth

    def park(s: int, h: int, numerator: int, scale: int) -> None:
        key = (min(s, ell_max + 1), min(h, ell_max + 1))
        parked[key] = parked.get(key, Fraction(0)) + Fraction(numerator, scale)

    for _ in range(depth_cap):
        scale *= denom
        # states below mass_floor are parked into the upper-bound slack
        floor_num = int(scale * mass_floor)
        nxt: dict[tuple[int, int, str], int] = {}
        for (s, h, pend), mass in states.items():
            for letter, w in num.items():
                m2 = mass * w
                pend2, ds, dh, top_h = transition(pend, letter)
                if top_h and h == 0:
                    if s <= ell_max:
                        resolved[s] += Fraction(m2, scale)
                    continue
                s2, h2 = s + ds, h + dh
                if s2 + h2 > ell_max:
                    # at least h2 + 1 more steps are needed, so
                    # tau^h >= s2 + h2 + 1 > ell_max + 1: untracked
                    continue
                key = (s2, h2, pend2)
                nxt[key] = nxt.get(key, 0) + m2
        if floor_num:
            small = [k for k, v in nxt.items() if v < floor_num]
            for k in small:
                park(k[0], k[1], nxt.pop(k), scale)
        if len(nxt) > state_cap:
            ranked = sorted(nxt.items(), key=lambda kv: (-kv[1], kv[0]))
            nxt = dict(ranked[:state_cap])
            for (s2, h2, _), m2 in ranked[state_cap:]:
                park(s2, h2, m2, scale)
        states = nxt

    pending_mass = dict(parked)
    for (s, h, _), mass in states.items():
        key = (s, h)
        pending_mass[key] = pending_mass.get(key, Fraction(0)) + Fraction(mass, scale)
    bounds = []
    for ell in range(ell_max + 1):
        slack = sum(
            (
                mass
                for (s, h), mass in pending_mass.items()
                if s <= ell and h <= ell - s
            ),
            Fraction(0),
        )
        bounds.append(BoundsPair(lower=resolved[ell], upper=resolved[ell] + slack))
    return bounds


def _parse_letter(s: int, h: int, pend: str, letter: str):
    """One backward letter; returns ('hit', tau) or ('state', (s, h, pend))."""
    if not pend:  # top level: every letter is (or opens) a block
        if letter == "h":
            if h == 0:
                return "hit", s + 1
            return "state", (s + 1, h - 1, "")
        if letter == "H":
            return "state", (s + 1, h + 1, "")
        if letter == "F":
            return "state", (s, h, "F")
        return "state", (s, h, "")  # c and C move the cheeseburger walk
    if letter in "CHF":
        return "state", (s, h, pend + letter)
    eligible = "HF" if letter == "h" else "CF"
    idx = max(i for i, o in enumerate(pend) if o in eligible)
    pend2 = pend[:idx] + pend[idx + 1 :]
    if idx > 0:  # internal match (possibly closing a nested excursion)
        return "state", (s, h, pend2)
    # the opening F is consumed: the maximal excursion closes with the type
    # of this burger and its residue of unmatched orders is dropped
    if letter == "h":
        return "state", (s, h, "")  # type-h excursion moves the c walk
    jump = sum(1 for o in pend2 if o == "H")
    return "state", (s + 1, h + jump, "")


# ---------------------------------------------------------------------------
# Ring counts and gasket weights
# ---------------------------------------------------------------------------


def count_rings(k: int, kp: int, inner_convention: str = "include") -> int:
    """A_{k -> k'}: rings of k + k' triangles between boundaries of length
    k (outer, carrying the root) and k' (inner), traversed by a single loop.

    Exhaustive oracle: a ring is a cyclic arrangement of k down-pointing
    triangles (base on the outer boundary) and k' up-pointing ones, rooted
    at a down triangle; linearising at the root leaves all arrangements of
    k-1 down and k' up triangles, which are enumerated one by one.

    The degenerate inner boundary k' = 0 (inner face of degree zero) counts
    1 under ``include`` and 0 under ``exclude``.
    """
    if k < 1 or kp < 0:
        raise ValueError("need k >= 1 and k' >= 0")
    if k + kp > 2 * ENUMERATION_CAP + 16:
        raise ValueError("ring size exceeds the enumeration cap")
    if kp == 0:
        if inner_convention == "include":
            return 1
        if inner_convention == "exclude":
            return 0
        raise ValueError(f"unknown convention {inner_convention!r}")
    total = 0
    slots = k - 1 + kp
    for placement in combinations(range(slots), kp):
        total += 1  # each choice of up-triangle slots is a distinct ring
    return total


def ring_count_closed_form(k: int, kp: int) -> int:
    """binom(k + k' - 1, k'); validated against count_rings by tests."""
    return math.comb(k + kp - 1, kp)


def gasket_weight(
    k: int, params: ModelParams, kp_max: int = 8, inner_convention: str = "include"
) -> BoundsPair:
    """Bracket of the gasket face weight g_k = n sum_k' A_{k->k'} x^{k+k'} F_k'.

    Lower bound: partial sum to kp_max.  Upper bound: adds the tail using
    A_{k->k'} <= binom(k+k', k) and F_k' <= gamma_plus^k' (the scaled
    partition function ell -> F_ell gamma_plus^-ell is a decreasing-mass
    integral bounded by F_0 = 1), so each tail term is at most
    binom(k+k', k) x^k (x gamma_plus)^k' with x gamma_plus = 1/2, and the
    tail is a remainder of the negative binomial series (1-t)^-(k+1).
    """
    x = params.x_c
    n = params.n
    partial = 0.0
    for kp in range(kp_max + 1):
        a = count_rings(k, kp, inner_convention=inner_convention)
        if a:
            partial += a * x ** (k + kp) * partition_F(kp, params)
    t = x * params.gamma_plus  # = 1/2
    if not t < 1.0:
        raise ValueError("tail majorant does not converge")
    full_series = (1.0 - t) ** (-(k + 1))
    partial_series = sum(math.comb(k + j, k) * t**j for j in range(kp_max + 1))
    tail = n * x**k * (full_series - partial_series)
    return BoundsPair(lower=n * partial, upper=n * partial + tail)
