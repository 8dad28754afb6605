from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qusp.relcore import (
    GroundSet,
    NormalSequence,
    Relation,
    compose,
    ground,
    image,
    inverse,
    is_preorder,
    iter_bits,
    min_small_cover,
)

G3 = ground("a", "b", "c")
DELTA3 = Relation.identity(G3)
FULL3 = Relation.full(G3)


def rel3(pairs):
    return Relation.from_pairs(G3, pairs, reflexive=True)


@st.composite
def relations(draw, n_min=1, n_max=4, reflexive=False):
    n = draw(st.integers(n_min, n_max))
    g = GroundSet(tuple(f"x{i}" for i in range(n)))
    rows = []
    for i in range(n):
        row = draw(st.integers(0, (1 << n) - 1))
        if reflexive:
            row |= 1 << i
        rows.append(row)
    return Relation(g, tuple(rows))


@st.composite
def relation_triples(draw, n_min=1, n_max=4):
    n = draw(st.integers(n_min, n_max))
    g = GroundSet(tuple(f"x{i}" for i in range(n)))

    def one():
        return Relation(g, tuple(draw(st.integers(0, (1 << n) - 1)) for _ in range(n)))

    return one(), one(), one()


class TestCompose:
    def test_identity_is_unit(self):
        r = rel3([("a", "b"), ("c", "a")])
        assert compose(DELTA3, r) == r
        assert compose(r, DELTA3) == r

    def test_hand_expansion(self):
        r = rel3([("a", "b")])
        s = rel3([("b", "c")])
        assert compose(r, s) == rel3([("a", "b"), ("b", "c"), ("a", "c")])

    def test_preorder_idempotent(self):
        r = rel3([("a", "b"), ("b", "c"), ("a", "c")])
        assert is_preorder(r)
        assert compose(r, r) == r

    @given(relation_triples())
    def test_associative(self, triple):
        r, s, t = triple
        assert compose(compose(r, s), t) == compose(r, compose(s, t))

    @given(relation_triples())
    def test_inverse_reverses(self, triple):
        r, s, _ = triple
        assert inverse(compose(r, s)) == compose(inverse(s), inverse(r))

    def test_ground_mismatch(self):
        with pytest.raises(ValueError):
            compose(DELTA3, Relation.identity(ground("a", "b")))


class TestInverse:
    def test_diagonal(self):
        assert inverse(DELTA3) == DELTA3

    def test_single_pair(self):
        assert inverse(rel3([("a", "b")])) == rel3([("b", "a")])

    def test_full(self):
        assert inverse(FULL3) == FULL3

    @given(relations())
    def test_involution(self, r):
        assert inverse(inverse(r)) == r


class TestImage:
    def test_identity(self):
        for mask in range(8):
            assert image(DELTA3, mask) == mask

    def test_single_pair(self):
        assert image(rel3([("a", "b")]), G3.mask_of(["a"])) == G3.mask_of(["a", "b"])

    def test_empty(self):
        assert image(FULL3, 0) == 0

    @given(relation_triples(n_max=4))
    def test_image_of_composition(self, triple):
        # exhaustive over all subsets for each drawn pair
        r, s, _ = triple
        n = r.ground.size
        for a in range(1 << n):
            assert image(compose(r, s), a) == image(s, image(r, a))

    def test_image_of_composition_exhaustive_n2(self):
        g = ground("a", "b")
        rels = [Relation(g, (p, q)) for p in range(4) for q in range(4)]
        for r in rels:
            for s in rels:
                for a in range(4):
                    assert image(compose(r, s), a) == image(s, image(r, a))


class TestIsPreorder:
    def test_examples(self):
        assert is_preorder(DELTA3)
        assert is_preorder(FULL3)
        assert not is_preorder(rel3([("a", "b"), ("b", "c")]))


class TestNormalSequence:
    def test_levels_must_square_down(self):
        lvl1 = rel3([("a", "b"), ("b", "c")])
        with pytest.raises(ValueError, match="not a normal sequence"):
            NormalSequence(G3, (lvl1, lvl1))
        wide = compose(lvl1, lvl1) | lvl1
        seq = NormalSequence(G3, (wide, lvl1))
        assert seq.depth == 2

    def test_levels_must_be_reflexive(self):
        bare = Relation.from_pairs(G3, [("a", "b")])
        with pytest.raises(ValueError, match="not reflexive"):
            NormalSequence(G3, (bare,))

    @given(relations(reflexive=True))
    def test_image_contraction(self, bottom):
        top = compose(bottom, bottom)
        seq = NormalSequence(bottom.ground, (top, bottom))
        n = bottom.ground.size
        for a in range(1 << n):
            twice = image(seq.levels[1], image(seq.levels[1], a))
            assert twice & ~image(seq.levels[0], a) == 0


def _small_masks(u):
    n = u.ground.size
    inv = inverse(u)
    sym = [u.rows[i] & inv.rows[i] for i in range(n)]
    out = []
    for mask in range(1, 1 << n):
        if all(mask & ~sym[i] == 0 for i in iter_bits(mask)):
            out.append(mask)
    return out


def _brute_min_cover(u):
    """Oracle: try all part multisets of increasing size over all small sets."""
    n = u.ground.size
    full = (1 << n) - 1
    smalls = _small_masks(u)
    for k in range(1, n + 1):
        for combo in combinations(smalls, k):
            acc = 0
            for c in combo:
                acc |= c
            if acc == full:
                return k
    raise AssertionError("singletons always cover")


class TestMinSmallCover:
    def test_full_relation(self):
        assert min_small_cover(FULL3)[0] == 1

    def test_diagonal(self):
        assert min_small_cover(DELTA3)[0] == 3

    def test_symmetric_pair(self):
        count, parts = min_small_cover(rel3([("a", "b"), ("b", "a")]))
        assert count == 2
        covered = 0
        for p in parts:
            covered |= p
        assert covered == G3.full_mask

    def test_rejects_non_reflexive(self):
        with pytest.raises(ValueError, match="not reflexive"):
            min_small_cover(Relation.from_pairs(G3, [("a", "b")]))

    def test_size_cap(self):
        g = GroundSet(tuple(f"x{i}" for i in range(13)))
        with pytest.raises(ValueError, match="capped"):
            min_small_cover(Relation.identity(g))

    def test_against_brute_force_exhaustive_n3(self):
        g = G3
        for bits in range(1 << 6):
            rows = []
            k = 0
            for i in range(3):
                row = 1 << i
                for j in range(3):
                    if j != i:
                        if bits >> k & 1:
                            row |= 1 << j
                        k += 1
                rows.append(row)
            u = Relation(g, tuple(rows))
            count, parts = min_small_cover(u)
            assert count == _brute_min_cover(u)
            covered = 0
            for p in parts:
                covered |= p
                assert all(p & ~ (u.rows[i] & inverse(u).rows[i]) == 0 for i in iter_bits(p))
            assert covered == g.full_mask

    def test_symmetric_part_invariant(self):
        for bits in range(64):
            rows = []
            k = 0
            for i in range(3):
                row = 1 << i
                for j in range(3):
                    if j != i:
                        if bits >> k & 1:
                            row |= 1 << j
                        k += 1
                rows.append(row)
            u = Relation(G3, tuple(rows))
            sym = u & inverse(u)
            assert min_small_cover(u) == min_small_cover(sym)


class TestSerialization:
    def test_shape(self):
        r = rel3([("a", "b")])
        data = r.to_json()
        assert data == {"n": 3, "labels": ["a", "b", "c"], "rows": ["110", "010", "001"]}

    @given(relations())
    def test_round_trip(self, r):
        assert Relation.from_json(r.to_json()) == r

    def test_bad_rows(self):
        with pytest.raises(ValueError):
            Relation.from_json({"n": 2, "labels": ["a", "b"], "rows": ["10", "2x"]})


class TestGroundSet:
    def test_duplicate_labels(self):
        with pytest.raises(ValueError):
            GroundSet(("a", "a"))

    def test_mask_round_trip(self):
        mask = G3.mask_of(["c", "a"])
        assert G3.labels_of(mask) == ("a", "c")
