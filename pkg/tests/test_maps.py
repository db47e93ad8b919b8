import pytest

from fkloop import maps as M
from fkloop import words as W
from fkloop.enumeration import enumerate_balanced_words


GOLDEN_WORD = "hhhhhccHCHHcHHFF"
GOLDEN_TEXT = (
    "alpha: 1 0 3 2 5 4 7 6 9 8 11 10 13 12 15 14\n"
    "sigma: 10 2 1 15 3 6 5 12 7 13 14 9 8 11 0 4\n"
    "root: 0\n"
)
GOLDEN_OMEGA = frozenset({0, 1, 2, 3, 4, 5, 7})


def all_words(kmax):
    for k in range(1, kmax + 1):
        yield from enumerate_balanced_words(k)


class TestPlanarMap:
    def test_single_edge(self):
        m = M.PlanarMap(sigma=(0, 1), root=0)
        assert m.n_vertices() == 2 and m.n_edges() == 1 and m.n_faces() == 1

    def test_loop_edge(self):
        m = M.PlanarMap(sigma=(1, 0), root=0)
        assert m.n_vertices() == 1 and m.n_faces() == 2

    def test_invalid(self):
        with pytest.raises(ValueError):
            M.PlanarMap(sigma=(0, 0), root=0)
        with pytest.raises(ValueError):
            M.PlanarMap(sigma=(0, 1, 2, 3), root=0)  # disconnected

    def test_text_roundtrip(self):
        m = M.PlanarMap.from_text(GOLDEN_TEXT)
        assert M.PlanarMap.from_text(m.to_text()) == m

    def test_euler_everywhere(self):
        for w in all_words(3):
            m, _ = M.word_to_map(w)
            assert m.n_vertices() - m.n_edges() + m.n_faces() == 2


class TestBijection:
    def test_word_count_k1(self):
        assert enumerate_balanced_words(1) == ["cC", "cF", "hF", "hH"]

    def test_roundtrip_small(self):
        for w in all_words(3):
            m, omega = M.word_to_map(w)
            assert M.map_to_word(m, omega) == w

    def test_distinct_words_distinct_maps(self):
        seen = {}
        for w in all_words(3):
            m, omega = M.word_to_map(w)
            key = (m.canonical_form(), tuple(sorted(omega)))
            assert key not in seen, (w, seen.get(key))
            seen[key] = w

    def test_reverse_roundtrip(self):
        # map -> word -> map lands on an isomorphic decorated map
        for w in all_words(3):
            m, omega = M.word_to_map(w)
            w2 = M.map_to_word(m, omega)
            m2, omega2 = M.word_to_map(w2)
            assert m2.is_isomorphic(m)
            assert omega2 == omega

    def test_edge_count_matches_word(self):
        for w in all_words(3):
            m, _ = M.word_to_map(w)
            assert 2 * m.n_edges() == len(w)

    def test_golden_pair(self):
        m, omega = M.word_to_map(GOLDEN_WORD)
        assert m.to_text() == GOLDEN_TEXT
        assert omega == GOLDEN_OMEGA
        assert (m.n_vertices(), m.n_edges(), m.n_faces()) == (6, 8, 4)
        assert M.loop_count(m, omega) == 3
        assert M.map_to_word(m, omega) == GOLDEN_WORD


class TestDuality:
    def test_involution(self):
        for w in all_words(3):
            m, omega = M.word_to_map(w)
            md = M.dual(m)
            omd = M.dual_edge_subset(m, omega)
            assert M.dual(md).is_isomorphic(m)
            assert omd == frozenset(range(m.n_edges())) - omega

    def test_loop_count_invariant(self):
        for w in all_words(3):
            m, omega = M.word_to_map(w)
            assert M.loop_count(M.dual(m), M.dual_edge_subset(m, omega)) == \
                M.loop_count(m, omega)

    def test_vertex_face_swap(self):
        m, _ = M.word_to_map(GOLDEN_WORD)
        md = M.dual(m)
        assert md.n_vertices() == m.n_faces()
        assert md.n_faces() == m.n_vertices()


class TestTutte:
    def test_triangulation_invariants(self):
        for w in all_words(3):
            m, omega = M.word_to_map(w)
            tri, loops = M.tutte_triangulation(m, omega)
            t = tri.map
            n_tri = 2 * m.n_edges()
            assert len(tri.triangle_kind) == t.n_faces() == n_tri
            assert all(len(f) == 3 for f in t.faces())
            # companions share the diagonal of their quad, hence its kind
            for f in range(n_tri):
                g = tri.companion[f]
                assert g != f and tri.companion[g] == f
                assert tri.triangle_kind[f] == tri.triangle_kind[g]
            assert len(tri.fictional) == m.n_edges()

    def test_fully_packed(self):
        # every triangle is crossed by exactly one loop
        for w in all_words(2):
            m, omega = M.word_to_map(w)
            tri, loops = M.tutte_triangulation(m, omega)
            crossed = [f for loop in loops.loops for f in loop]
            assert sorted(crossed) == list(range(2 * m.n_edges()))

    def test_loop_count_is_f_count_plus_one(self):
        for w in all_words(3):
            m, omega = M.word_to_map(w)
            _, loops = M.tutte_triangulation(m, omega)
            assert loops.n_loops == w.count("F") + 1
            assert M.loop_count(m, omega) == loops.n_loops


class TestWeights:
    def test_fk_weight(self):
        m, omega = M.word_to_map("hF")
        assert M.loop_count(m, omega) == 2
        assert M.fk_weight(m, omega, 2.0) == pytest.approx(2.0)

    def test_word_side_equals_map_side(self):
        q = 2.0
        n = q**0.5
        for w in all_words(2):
            m, omega = M.word_to_map(w)
            assert M.fk_weight(m, omega, q) == pytest.approx(
                n ** (w.count("F") + 1)
            )
