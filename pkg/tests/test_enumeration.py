import itertools
from fractions import Fraction

import pytest

from fkloop import enumeration as E
from fkloop import words as W


class TestWordEnumeration:
    def test_k1(self):
        assert E.enumerate_balanced_words(1) == ["cC", "cF", "hF", "hH"]

    def test_counts(self):
        assert len(E.enumerate_balanced_words(2)) == 36
        assert len(E.enumerate_balanced_words(3)) == 432

    def test_all_balanced(self):
        for w in E.enumerate_balanced_words(2):
            assert W.is_balanced(w)

    def test_cap(self):
        with pytest.raises(ValueError):
            E.enumerate_balanced_words(E.ENUMERATION_CAP + 1)


class TestFinitePartition:
    def test_word_and_map_routes_agree(self):
        for q in (1.0, 2.0, Fraction(9, 4)):
            for k in (1, 2):
                word_side, map_side = E.finite_fk_partition(k, q)
                assert word_side.entries.keys() == map_side.entries.keys()
                for w in word_side.entries:
                    a, b = word_side.entries[w], map_side.entries[w]
                    if isinstance(a, Fraction):
                        assert a == b
                    else:
                        assert a == pytest.approx(b, rel=1e-12)

    def test_exact_totals(self):
        word_side, _ = E.finite_fk_partition(1, 1)
        assert word_side.total == 4
        word_side, _ = E.finite_fk_partition(1, Fraction(9, 4))
        assert word_side.total == Fraction(15, 2)
        word_side, _ = E.finite_fk_partition(2, Fraction(9, 4))
        assert word_side.total == Fraction(165, 2)

    def test_rational_sqrt_stays_exact(self):
        word_side, _ = E.finite_fk_partition(1, Fraction(9, 4))
        assert all(isinstance(v, Fraction) for v in word_side.entries.values())

    def test_rational_p(self):
        assert E.rational_p(1) == Fraction(1, 3)
        assert E.rational_p(Fraction(9, 4)) == Fraction(3, 7)
        # irrational sqrt(q): close rational stand-in
        approx = E.rational_p(2.0)
        assert abs(float(approx) - 2.0**0.5 / (2.0 + 2.0**0.5)) < 1e-6


def oracle_tau_masses(depth, p):
    """Exact resolved P(tau^h = ell+1) by brute force over letter streams.

    Independent route: build the left-of-origin word from the stream,
    decompose it with the words module, and walk the blocks right to left.
    """
    masses = {}
    letters = "chCHF"
    for stream in itertools.product(letters, repeat=depth):
        # stream[i] is the letter at position -(i+1); the written word is
        # the reverse of the stream
        word = "".join(reversed(stream))
        blocks = W._decompose_plain(word)
        h = 0
        steps = 0
        tau = None
        used = 0
        for b in reversed(blocks):
            used += len(b)
            if len(b) == 1:
                if b == "F":
                    break  # excursion stays open beyond the window
                if b == "h":
                    steps += 1
                    h -= 1
                elif b == "H":
                    steps += 1
                    h += 1
            else:
                exc = W.classify_excursion(b)
                if exc is None:
                    break  # dangling partial excursion blocks the parse
                if exc.type == "c":
                    steps += 1
                    h += exc.reduced_length
            if h == -1:
                tau = steps
                break
        if tau is None:
            continue
        # only streams fully determined by their first `used` letters count
        # once: skip continuations to avoid double counting
        if used < depth:
            continue
        mass = Fraction(1)
        for s in stream:
            mass *= W.symbol_weight(s, p)
        masses[tau] = masses.get(tau, Fraction(0)) + mass
    return masses


class TestTauLawBounds:
    def test_brute_force_oracle_depth7(self):
        depth = 7
        p = Fraction(1, 3)
        bounds = E.tau_law_bounds(3, depth_cap=depth, p=p)
        # resolved-within-depth masses, including shorter resolutions
        resolved = {}
        for d in range(1, depth + 1):
            for tau, m in oracle_tau_masses(d, p).items():
                resolved[tau] = resolved.get(tau, Fraction(0)) + m
        for ell in range(4):
            exact = resolved.get(ell + 1, Fraction(0))
            assert bounds[ell].lower == exact
            assert bounds[ell].upper >= exact

    def test_monotone_in_depth(self):
        p = Fraction(1, 3)
        shallow = E.tau_law_bounds(2, depth_cap=8, p=p)
        deep = E.tau_law_bounds(2, depth_cap=14, p=p)
        for ell in range(3):
            assert deep[ell].lower >= shallow[ell].lower
            assert deep[ell].upper <= shallow[ell].upper

    def test_ell0_contains_half(self):
        bounds = E.tau_law_bounds(0, depth_cap=16, p=Fraction(1, 3))
        assert bounds[0].contains(Fraction(1, 2))

    def test_bounds_pair_invariant(self):
        with pytest.raises(ValueError):
            E.BoundsPair(lower=1, upper=0)


class TestRings:
    def test_oracle_matches_closed_form(self):
        for k in range(1, 6):
            for kp in range(0, 6):
                assert E.count_rings(k, kp) == E.ring_count_closed_form(k, kp)

    def test_reciprocity(self):
        # k' A_{k->k'} = k A_{k'->k}
        for k in range(1, 6):
            for kp in range(1, 6):
                assert kp * E.count_rings(k, kp) == k * E.count_rings(kp, k)

    def test_inner_conventions(self):
        assert E.count_rings(3, 0, inner_convention="include") == 1
        assert E.count_rings(3, 0, inner_convention="exclude") == 0
        with pytest.raises(ValueError):
            E.count_rings(3, 0, inner_convention="other")


class TestGasket:
    def test_bracket_narrows(self):
        from fkloop.analytics import params_from_q

        pr = params_from_q(2.0)
        b8 = E.gasket_weight(1, pr, kp_max=8)
        b12 = E.gasket_weight(1, pr, kp_max=12)
        assert b8.lower <= b12.lower <= b12.upper <= b8.upper
        assert b8.lower == pytest.approx(0.3069135814, abs=1e-9)
        assert b8.upper == pytest.approx(0.3185408413, abs=1e-9)

    def test_positive(self):
        from fkloop.analytics import params_from_q

        pr = params_from_q(1.0)
        for k in (1, 2, 3):
            b = E.gasket_weight(k, pr)
            assert 0 < b.lower <= b.upper
