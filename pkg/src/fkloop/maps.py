"""Half-edge planar maps, FK decoration, Tutte triangulations and both
directions of the word bijection.

Representation.  A map with E edges has half-edges 0..2E-1; alpha pairs
2e <-> 2e+1; sigma gives the counterclockwise next half-edge around the
origin vertex.  Faces are orbits of sigma∘alpha (face kept on the left of
each oriented boundary half-edge).

The bijection is implemented on a quadrangulation complex: one quad per
edge, four cyclically ordered sides (quadrangulation edges), corner colours
fixed as [dual, primal, dual, primal] (corner t sits between sides t and
t+1), and a diagonal bit: bit 0 splits the quad into side-pairs {0,1}/{2,3}
with a primal diagonal, bit 1 into {1,2}/{3,0} with a dual diagonal.  The
fully packed loops connect the two sides of each triangle and cross
quadrangulation edges; diagonal flips toggle the bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import words as W

__all__ = [
    "PlanarMap",
    "TutteTriangulation",
    "LoopConfig",
    "dual",
    "tutte_triangulation",
    "loop_count",
    "map_to_word",
    "word_to_map",
    "fk_weight",
]


@dataclass(frozen=True)
class PlanarMap:
    sigma: tuple[int, ...]
    root: int

    def __post_init__(self) -> None:
        n = len(self.sigma)
        if n == 0 or n % 2:
            raise ValueError("need a positive even number of half-edges")
        if sorted(self.sigma) != list(range(n)):
            raise ValueError("sigma is not a permutation")
        if not (0 <= self.root < n):
            raise ValueError("root out of range")
        if not self.is_connected():
            raise ValueError("map must be connected")
        if self.n_vertices() - self.n_edges() + self.n_faces() != 2:
            raise ValueError("Euler relation fails: not a planar (genus-0) map")

    # alpha(i) = i ^ 1 pairs half-edges into edges
    def alpha(self, h: int) -> int:
        return h ^ 1

    @property
    def n_half_edges(self) -> int:
        return len(self.sigma)

    def n_edges(self) -> int:
        return len(self.sigma) // 2

    def _orbits(self, perm) -> list[list[int]]:
        n = len(self.sigma)
        seen = [False] * n
        out = []
        for s in range(n):
            if seen[s]:
                continue
            orb = []
            h = s
            while not seen[h]:
                seen[h] = True
                orb.append(h)
                h = perm(h)
            out.append(orb)
        return out

    def vertices(self) -> list[list[int]]:
        return self._orbits(lambda h: self.sigma[h])

    def faces(self) -> list[list[int]]:
        return self._orbits(lambda h: self.sigma[h ^ 1])

    def n_vertices(self) -> int:
        return len(self.vertices())

    def n_faces(self) -> int:
        return len(self.faces())

    def is_connected(self) -> bool:
        n = len(self.sigma)
        seen = {0}
        stack = [0]
        while stack:
            h = stack.pop()
            for g in (self.sigma[h], h ^ 1):
                if g not in seen:
                    seen.add(g)
                    stack.append(g)
        return len(seen) == n

    def canonical_form(self) -> tuple[int, ...]:
        """Root-preserving breadth-first relabelling; equal forms iff the
        rooted maps are isomorphic (orientation-preserving)."""
        n = len(self.sigma)
        label = {self.root: 0}
        order = [self.root]
        i = 0
        while i < len(order):
            h = order[i]
            i += 1
            for g in (self.sigma[h], h ^ 1):
                if g not in label:
                    label[g] = len(order)
                    order.append(g)
        sig = tuple(label[self.sigma[h]] for h in order)
        alp = tuple(label[h ^ 1] for h in order)
        return sig + alp

    def is_isomorphic(self, other: "PlanarMap") -> bool:
        return self.canonical_form() == other.canonical_form()

    def to_text(self) -> str:
        alpha = " ".join(str(h ^ 1) for h in range(len(self.sigma)))
        sigma = " ".join(map(str, self.sigma))
        return f"alpha: {alpha}\nsigma: {sigma}\nroot: {self.root}\n"

    @classmethod
    def from_text(cls, text: str) -> "PlanarMap":
        fields = {}
        for line in text.strip().splitlines():
            key, _, rest = line.partition(":")
            fields[key.strip()] = rest.split()
        sigma = tuple(int(x) for x in fields["sigma"])
        root = int(fields["root"][0])
        alpha = [int(x) for x in fields["alpha"]]
        if alpha != [h ^ 1 for h in range(len(sigma))]:
            raise ValueError("alpha must pair half-edges 2e <-> 2e+1")
        return cls(sigma=sigma, root=root)


def dual(m: PlanarMap) -> PlanarMap:
    """Planar dual on the same half-edge set: vertices become faces.

    The dual root is alpha(root), which encodes the crossing convention and
    makes dual an exact involution.
    """
    n = len(m.sigma)
    sigma_dual = tuple(m.sigma[h ^ 1] for h in range(n))
    return PlanarMap(sigma=sigma_dual, root=m.root ^ 1)


def dual_edge_subset(m: PlanarMap, omega: frozenset[int]) -> frozenset[int]:
    """omega-dagger: dual edges of the closed primal edges."""
    return frozenset(e for e in range(m.n_edges()) if e not in omega)


# ---------------------------------------------------------------------------
# Quadrangulation complex
# ---------------------------------------------------------------------------


@dataclass
class QuadComplex:
    """One quad per edge; sides[q] lists four quadrangulation-edge ids in ccw
    order; partner maps each (quad, slot) to the slot glued to it; bits[q]
    selects the diagonal (0 primal, 1 dual)."""

    sides: list[list[int]]
    bits: list[int]
    root_quad: int
    partner: dict[tuple[int, int], tuple[int, int]] = field(init=False)

    def __post_init__(self) -> None:
        where: dict[int, list[tuple[int, int]]] = {}
        for q, ss in enumerate(self.sides):
            for t, s in enumerate(ss):
                where.setdefault(s, []).append((q, t))
        self.partner = {}
        for s, slots in where.items():
            if len(slots) != 2:
                raise ValueError(f"quadrangulation edge {s} glued {len(slots)} times")
            a, b = slots
            self.partner[a] = b
            self.partner[b] = a

    @property
    def k(self) -> int:
        return len(self.sides)

    def triangle_slots(self, q: int, half: int) -> tuple[int, int]:
        """Side-slot indices of triangle (q, half) under the current bit."""
        if self.bits[q] == 0:
            return (0, 1) if half == 0 else (2, 3)
        return (1, 2) if half == 0 else (3, 0)

    def triangle_of_slot(self, q: int, t: int) -> int:
        """Which half of quad q contains side slot t."""
        a, b = self.triangle_slots(q, 0)
        return 0 if t in (a, b) else 1

    def flip(self, q: int) -> None:
        self.bits[q] ^= 1

    def corner_orbits(self) -> list[list[tuple[int, int]]]:
        """Vertex orbits of the quadrangulation; corner t of quad q lies
        between sides t and t+1 and rotates to the glued slot of side t+1."""
        seen: set[tuple[int, int]] = set()
        orbits = []
        for q in range(self.k):
            for t in range(4):
                if (q, t) in seen:
                    continue
                orb = []
                cur = (q, t)
                while cur not in seen:
                    seen.add(cur)
                    orb.append(cur)
                    cq, ct = cur
                    cur = self.partner[(cq, (ct + 1) % 4)]
                orbits.append(orb)
        return orbits

    def validate_planar(self) -> None:
        orbits = self.corner_orbits()
        for orb in orbits:
            colors = {t % 2 for _, t in orb}
            if len(colors) != 1:
                raise ValueError("inconsistent vertex bipartition colouring")
        v = len(orbits)
        if v - 2 * self.k + self.k != 2:
            raise ValueError("quadrangulation is not genus 0")

    def loops(self) -> list[list[tuple[int, int]]]:
        """Fully packed loops as cyclic lists of triangles (quad, half)."""
        # A loop visit is a directed crossing into a triangle; undirected
        # loops are orbits of the step taking a triangle-side to the triangle
        # across the next side.
        seen: set[tuple[int, int]] = set()
        loops = []
        for q in range(self.k):
            for half in (0, 1):
                if (q, half) in seen:
                    continue
                orb = []
                cur_q, cur_t = q, self.triangle_slots(q, half)[0]
                while True:
                    h = self.triangle_of_slot(cur_q, cur_t)
                    if (cur_q, h) in seen:
                        break
                    seen.add((cur_q, h))
                    orb.append((cur_q, h))
                    a, b = self.triangle_slots(cur_q, h)
                    out = b if cur_t == a else a
                    cur_q, cur_t = self.partner[(cur_q, out)]
                loops.append(orb)
        return loops

    def exploration(self, start: tuple[int, int]) -> list[tuple[int, int, int]]:
        """Directed loop through the triangle entered via slot `start`;
        returns visits (quad, entered_slot, exit_slot)."""
        visits = []
        cur = start
        while True:
            q, t = cur
            h = self.triangle_of_slot(q, t)
            a, b = self.triangle_slots(q, h)
            out = b if t == a else a
            visits.append((q, t, out))
            cur = self.partner[(q, out)]
            if cur == start:
                return visits


# ---------------------------------------------------------------------------
# word -> decorated map
# ---------------------------------------------------------------------------


def word_to_map(w: str) -> tuple[PlanarMap, frozenset[int]]:
    """Rebuild the decorated map from a balanced word of even length."""
    if len(w) % 2:
        raise ValueError("word length must be even")
    if not w:
        raise ValueError("empty word has no rooted map")
    bad = W.first_unbalanced_position(w)
    if bad is not None:
        raise ValueError(f"word does not reduce to the empty word (position {bad})")
    qc, pos_to_quad = _word_complex(w)
    qc.validate_planar()

    # primal half-edges: corner 3 of quad e -> 2e, corner 1 -> 2e+1
    he_of_corner = {}
    for q in range(qc.k):
        he_of_corner[(q, 3)] = 2 * q
        he_of_corner[(q, 1)] = 2 * q + 1
    sigma = [0] * (2 * qc.k)
    for orb in qc.corner_orbits():
        if orb[0][1] % 2 == 0:
            continue  # dual vertex
        hes = [he_of_corner[c] for c in orb]
        for a, b in zip(hes, hes[1:] + hes[:1]):
            sigma[a] = b
    quad0 = pos_to_quad[0]
    root = 2 * quad0 if w[0] == "h" else 2 * quad0 + 1
    m = PlanarMap(sigma=tuple(sigma), root=root)
    omega = frozenset(q for q in range(qc.k) if qc.bits[q] == 0)
    return m, omega


def _word_complex(w: str) -> tuple[QuadComplex, dict[int, int]]:
    """Quad complex of the Tutte triangulation encoded by a balanced word.

    Crossing c_t separates triangles t and t+1 (cyclically); the quad of a
    matched pair (burger at i, order at j) collects the four crossings
    around its two triangles.  In the exploration triangulation the diagonal
    has the burger's type; matched F's flip it in the Tutte triangulation.
    """
    n = len(w)
    matches = W.match_positions(w)  # 1-based order -> burger
    sides: list[list[int]] = []
    bits: list[int] = []
    pos_to_quad: dict[int, int] = {}
    for j1, i1 in sorted(matches.items(), key=lambda kv: kv[1]):
        i, j = i1 - 1, j1 - 1  # 0-based triangle indices
        q = len(sides)
        pos_to_quad[i] = q
        pos_to_quad[j] = q
        ci_in, ci_out = (i - 1) % n, i
        cj_in, cj_out = (j - 1) % n, j
        if w[i] == "h":
            sides.append([ci_in, ci_out, cj_in, cj_out])
            tprime_bit = 0
        else:
            sides.append([cj_in, ci_out, ci_in, cj_out])
            tprime_bit = 1
        flipped = w[j] == "F"
        bits.append(tprime_bit ^ flipped)
    return QuadComplex(sides=sides, bits=bits, root_quad=pos_to_quad[0]), pos_to_quad


# ---------------------------------------------------------------------------
# decorated map -> Tutte triangulation / word
# ---------------------------------------------------------------------------


def _map_complex(m: PlanarMap, omega: frozenset[int]) -> QuadComplex:
    """Quad complex of T(m, omega) with the root quad laid out from the root
    half-edge.

    Quadrangulation edges are indexed by map corners: corner kappa(g) lies
    at the target of g between g and its face successor.  The quad of edge
    e = {h, h^1} has ccw sides [kappa(h^1), kappa(prev(h^1)), kappa(h),
    kappa(prev(h))], where prev is the face-orbit predecessor.
    """
    sigma = m.sigma
    sigma_inv = [0] * len(sigma)
    for i, s in enumerate(sigma):
        sigma_inv[s] = i

    def prev(g: int) -> int:
        return sigma_inv[g] ^ 1  # alpha(sigma^{-1}(g))

    sides = []
    for e in range(m.n_edges()):
        h = 2 * e
        if e == m.root // 2:
            h = m.root
        hb = h ^ 1
        sides.append([hb, prev(hb), h, prev(h)])
    bits = [0 if e in omega else 1 for e in range(m.n_edges())]
    return QuadComplex(sides=sides, bits=bits, root_quad=m.root // 2)


def map_to_word(m: PlanarMap, omega: frozenset[int]) -> str:
    """Space-filling exploration word of the decorated map."""
    if not all(0 <= e < m.n_edges() for e in omega):
        raise ValueError("omega contains an invalid edge index")
    qc = _map_complex(m, omega)
    start = (qc.root_quad, 0)
    fictional: set[int] = set()
    n_tri = 2 * qc.k
    while True:
        visits = qc.exploration(start)
        if len(visits) == n_tri:
            break
        # last visited quad whose companion triangle is on a distinct loop,
        # i.e. whose quad appears exactly once on the current loop
        counts: dict[int, int] = {}
        for q, _, _ in visits:
            counts[q] = counts.get(q, 0) + 1
        target = None
        for q, _, _ in reversed(visits):
            if counts[q] == 1:
                target = q
                break
        if target is None:
            raise ValueError("exploration cannot reach all triangles")
        qc.flip(target)
        fictional.add(target)
    letters = []
    seen: set[int] = set()
    for q, _, _ in visits:
        if q not in seen:
            seen.add(q)
            letters.append("h" if qc.bits[q] == 0 else "c")
        elif q in fictional:
            letters.append("F")
        else:
            letters.append("H" if qc.bits[q] == 0 else "C")
    return "".join(letters)


# ---------------------------------------------------------------------------
# Tutte triangulation as an explicit map, loops, FK weight
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TutteTriangulation:
    map: PlanarMap
    triangle_kind: tuple[str, ...]  # per face of `map`, "primal" or "dual"
    companion: tuple[int, ...]  # face index -> companion face index
    fictional: tuple[bool, ...]  # per quadrilateral (edge of the base map)


@dataclass(frozen=True)
class LoopConfig:
    loops: tuple[tuple[int, ...], ...]  # cyclic lists of face indices

    @property
    def n_loops(self) -> int:
        return len(self.loops)


def tutte_triangulation(
    m: PlanarMap, omega: frozenset[int]
) -> tuple[TutteTriangulation, LoopConfig]:
    """Tutte triangulation T(m, omega) and its fully packed loops."""
    qc = _map_complex(m, omega)
    # half-edge ids for the triangulation: 8 per quad (4 quadrangulation
    # side slots + 2 diagonal slots x... build via explicit slot keys)
    slot_id: dict[tuple[int, int, str], int] = {}

    def sid(q: int, t, kind: str) -> int:
        key = (q, t, kind)
        if key not in slot_id:
            slot_id[key] = len(slot_id)
        return slot_id[key]

    faces = []  # list of (triangle key, ccw slot-id cycle)
    tri_index: dict[tuple[int, int], int] = {}
    for q in range(qc.k):
        for half in (0, 1):
            a, b = qc.triangle_slots(q, half)
            cyc = [sid(q, a, "side"), sid(q, b, "side"), sid(q, half, "diag")]
            tri_index[(q, half)] = len(faces)
            faces.append(cyc)
    # gluings
    alpha: dict[int, int] = {}
    for q in range(qc.k):
        for t in range(4):
            pq, pt = qc.partner[(q, t)]
            alpha[sid(q, t, "side")] = sid(pq, pt, "side")
        alpha[sid(q, 0, "diag")] = sid(q, 1, "diag")
        alpha[sid(q, 1, "diag")] = sid(q, 0, "diag")
    n = len(slot_id)
    nxt = [0] * n
    face_of_slot = [0] * n
    for fi, cyc in enumerate(faces):
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            nxt[a] = b
            face_of_slot[a] = fi
    # renumber so alpha becomes i <-> i^1
    new_id = [0] * n
    counter = 0
    for i in range(n):
        if alpha[i] > i:
            new_id[i] = counter
            new_id[alpha[i]] = counter + 1
            counter += 2
    sigma = [0] * n
    for i in range(n):
        sigma[new_id[alpha[i]]] = new_id[nxt[i]]  # sigma = next o alpha
    root_slot = sid(qc.root_quad, 0, "side")
    tmap = PlanarMap(sigma=tuple(sigma), root=new_id[root_slot])
    kinds = tuple(
        "primal" if qc.bits[q] == 0 else "dual"
        for (q, _half) in sorted(tri_index, key=tri_index.get)
    )
    companion = [0] * len(faces)
    for q in range(qc.k):
        companion[tri_index[(q, 0)]] = tri_index[(q, 1)]
        companion[tri_index[(q, 1)]] = tri_index[(q, 0)]
    loops = tuple(
        tuple(tri_index[tri] for tri in loop) for loop in qc.loops()
    )
    tri = TutteTriangulation(
        map=tmap,
        triangle_kind=kinds,
        companion=tuple(companion),
        fictional=tuple(False for _ in range(qc.k)),
    )
    return tri, LoopConfig(loops=loops)


def loop_count(m: PlanarMap, omega: frozenset[int]) -> int:
    return len(_map_complex(m, omega).loops())


def fk_weight(m: PlanarMap, omega: frozenset[int], q: float) -> float:
    """q^{#loops/2}; the self-dual FK weight of the decorated map."""
    if not (0.0 < q < 4.0):
        raise ValueError(f"q must lie in (0, 4), got {q}")
    return float(q) ** (loop_count(m, omega) / 2.0)
