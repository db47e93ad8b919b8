"""Symbolic calculus on hamburger-cheeseburger words.

A word is an ASCII string over the five-letter alphabet {c, h, C, H, F}.
Lower-case letters are burgers, upper-case letters are orders; F is the
flexible order that consumes the freshest burger of either type.  All
positions reported by this module are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

ALPHABET = "chCHF"
BURGERS = "ch"
ORDERS = "CHF"

Weight = Union[Fraction, float]


def validate_word(w: str) -> None:
    for i, s in enumerate(w):
        if s not in ALPHABET:
            raise ValueError(f"invalid symbol {s!r} at position {i + 1}")


@dataclass(frozen=True)
class ReducedWord:
    """Canonical reduced form: unmatched orders followed by unmatched burgers."""

    orders: str
    burgers: str

    def __post_init__(self) -> None:
        if any(s not in ORDERS for s in self.orders):
            raise ValueError(f"orders block contains a non-order: {self.orders!r}")
        if any(s not in BURGERS for s in self.burgers):
            raise ValueError(f"burgers block contains a non-burger: {self.burgers!r}")

    @property
    def word(self) -> str:
        return self.orders + self.burgers

    def __len__(self) -> int:
        return len(self.orders) + len(self.burgers)

    @property
    def is_empty(self) -> bool:
        return not self.orders and not self.burgers


@dataclass(frozen=True)
class FExcursion:
    """A word starting with a burger whose final F consumes that burger."""

    word: str
    type: str  # 'h' or 'c'

    def __post_init__(self) -> None:
        if self.type not in BURGERS:
            raise ValueError(f"excursion type must be 'h' or 'c', got {self.type!r}")
        if not self.word or self.word[0] != self.type or self.word[-1] != "F":
            raise ValueError(f"not a type-{self.type} excursion: {self.word!r}")

    @property
    def reduced_length(self) -> int:
        """Length of the reduced excursion (all C's for type h, H's for type c)."""
        return len(reduce(self.word).word)

    @property
    def interior(self) -> str:
        return self.word[1:-1]


@dataclass(frozen=True)
class SkeletonDecomposition:
    """Alternating decomposition burger + R,S,R,...,S,R + F of an excursion.

    ``s_blocks`` holds the same-side blocks (for a type-h excursion these lie
    in A_h = {h, H, type-c excursion}) left to right; ``r_runs`` holds the
    ℓ+1 possibly-empty opposite-side runs interleaved around them, so that
    burger + r_runs[0] + s_blocks[0] + r_runs[1] + ... + F restores the word.
    """

    type: str
    s_blocks: tuple[str, ...]
    r_runs: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.r_runs) != len(self.s_blocks) + 1:
            raise ValueError("need exactly one more R run than S blocks")

    def reassemble(self) -> str:
        parts = [self.type]
        for run, block in zip(self.r_runs, self.s_blocks):
            parts.append(run)
            parts.append(block)
        parts.append(self.r_runs[-1])
        parts.append("F")
        return "".join(parts)

    @property
    def sk_tilde(self) -> tuple[str, ...]:
        """S blocks with each surviving sub-excursion collapsed to 'cF'/'hF'."""
        out = []
        for b in self.s_blocks:
            out.append(b if len(b) == 1 else b[0] + "F")
        return tuple(out)


def _match_state(w: str):
    """One left-to-right pass; returns (matches, unmatched_orders, burger_stacks).

    matches maps 1-based order position -> 1-based burger position.  Burger
    stacks are kept per type so C/H pop their own kind while F pops the
    freshest burger of either type.
    """
    validate_word(w)
    stack_c: list[int] = []
    stack_h: list[int] = []
    matches: dict[int, int] = {}
    unmatched_orders: list[int] = []
    for pos, s in enumerate(w, start=1):
        if s == "c":
            stack_c.append(pos)
        elif s == "h":
            stack_h.append(pos)
        elif s == "C":
            if stack_c:
                matches[pos] = stack_c.pop()
            else:
                unmatched_orders.append(pos)
        elif s == "H":
            if stack_h:
                matches[pos] = stack_h.pop()
            else:
                unmatched_orders.append(pos)
        else:  # F: freshest burger of either type
            if stack_c or stack_h:
                if not stack_h or (stack_c and stack_c[-1] > stack_h[-1]):
                    matches[pos] = stack_c.pop()
                else:
                    matches[pos] = stack_h.pop()
            else:
                unmatched_orders.append(pos)
    return matches, unmatched_orders, stack_c, stack_h


def match_positions(w: str) -> dict[int, int]:
    """Map each fulfilled order position to the burger position it consumes."""
    matches, _, _, _ = _match_state(w)
    return matches


def reduce(w: str) -> ReducedWord:
    """Canonical form after cancelling matched pairs and commuting the rest."""
    _, unmatched_orders, stack_c, stack_h = _match_state(w)
    orders = "".join(w[p - 1] for p in unmatched_orders)
    burgers = "".join(w[p - 1] for p in sorted(stack_c + stack_h))
    return ReducedWord(orders=orders, burgers=burgers)


def is_balanced(w: str) -> bool:
    return reduce(w).is_empty


def first_unbalanced_position(w: str) -> int | None:
    """1-based position of the first symbol surviving reduction, if any."""
    _, unmatched_orders, stack_c, stack_h = _match_state(w)
    leftovers = unmatched_orders + stack_c + stack_h
    return min(leftovers) if leftovers else None


def classify_excursion(w: str) -> FExcursion | None:
    """Return the excursion with its type, or None if w is not an F-excursion."""
    if len(w) < 2 or not w or w[0] not in BURGERS or w[-1] != "F":
        return None
    matches = match_positions(w)
    if matches.get(len(w)) != 1:
        return None
    return FExcursion(word=w, type=w[0])


def maximal_excursion_decomposition(backward_word: str) -> list[str]:
    """Split X(-m)...X(0) into maximal blocks, keeping X(0) as its own block.

    The final symbol is the distinguished X(0); everything before it is cut
    into single letters and maximal F-excursions (outermost burger..F spans
    under the matching of the prefix alone).  Concatenating the returned
    blocks restores the input.
    """
    validate_word(backward_word)
    if not backward_word:
        return []
    prefix = backward_word[:-1]
    matches = match_positions(prefix)
    # Excursion spans are the (burger .. F) match intervals; they are laminar,
    # so the outermost ones are those not covered by an earlier-opening span.
    spans = sorted(
        (i, j) for j, i in matches.items() if prefix[j - 1] == "F"
    )
    blocks: list[str] = []
    pos = 1
    for i, j in spans:
        if i < pos:
            continue  # nested inside the previously emitted excursion
        while pos < i:
            blocks.append(prefix[pos - 1])
            pos += 1
        blocks.append(prefix[i - 1 : j])
        pos = j + 1
    while pos <= len(prefix):
        blocks.append(prefix[pos - 1])
        pos += 1
    blocks.append(backward_word[-1])
    return blocks


def block_side(block: str) -> str:
    """Which walk coordinate a block moves: 'h' for A_h blocks, 'c' for A_c.

    A_h = {h, H, type-c excursion}: these move the hamburger count.
    """
    if len(block) == 1:
        if block in "hH":
            return "h"
        if block in "cC":
            return "c"
        raise ValueError(f"single-letter block cannot be {block!r}")
    exc = classify_excursion(block)
    if exc is None:
        raise ValueError(f"block {block!r} is not an F-excursion")
    return "h" if exc.type == "c" else "c"


def skeleton(e: FExcursion) -> tuple[str, SkeletonDecomposition]:
    """Skeleton word sk(e) and the collapsed decomposition of an excursion.

    For a type-h excursion the skeleton keeps the enclosing h...F, drops all
    top-level opposite-side clutter (c/C letters and type-h sub-excursions),
    and keeps the A_h blocks verbatim.
    """
    if classify_excursion(e.word) is None:
        raise ValueError(f"not an F-excursion: {e.word!r}")
    own = e.type  # 'h': A_h blocks are {h, H, type-c excursion}
    blocks = _decompose_plain(e.interior)
    s_blocks: list[str] = []
    r_runs: list[str] = [""]
    for b in blocks:
        side = block_side(b)
        if (own == "h" and side == "h") or (own == "c" and side == "c"):
            s_blocks.append(b)
            r_runs.append("")
        else:
            r_runs[-1] += b
    sk = own + "".join(s_blocks) + "F"
    dec = SkeletonDecomposition(type=own, s_blocks=tuple(s_blocks), r_runs=tuple(r_runs))
    return sk, dec


def _decompose_plain(w: str) -> list[str]:
    """Decompose a word (no distinguished terminal) into maximal blocks."""
    if not w:
        return []
    matches = match_positions(w)
    spans = sorted((i, j) for j, i in matches.items() if w[j - 1] == "F")
    blocks: list[str] = []
    pos = 1
    for i, j in spans:
        if i < pos:
            continue
        while pos < i:
            blocks.append(w[pos - 1])
            pos += 1
        blocks.append(w[i - 1 : j])
        pos = j + 1
    while pos <= len(w):
        blocks.append(w[pos - 1])
        pos += 1
    return blocks


def symbol_weight(s: str, p: Weight) -> Weight:
    """i.i.d. letter weight: w(c)=w(h)=1/4, w(C)=w(H)=(1-p)/4, w(F)=p/2."""
    if not (0 < p < Fraction(1, 2)):
        raise ValueError(f"p must lie in (0, 1/2), got {p}")
    if isinstance(p, Fraction):
        quarter, half = Fraction(1, 4), Fraction(1, 2)
    else:
        quarter, half = 0.25, 0.5
    if s in "ch":
        return quarter
    if s in "CH":
        return (1 - p) * quarter
    if s == "F":
        return p * half
    raise ValueError(f"invalid symbol {s!r}")
