from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qusp.intervals import EMPTY, GROUND, Interval, RationalIntervalSet, iv, point
from qusp.ratcover import (
    EUCLID,
    LOWER,
    UPPER,
    CoverError,
    MetricOracle,
    OmegaCover,
    cert_boundedhaus,
    cert_monotonecover,
    cert_monotonehaus,
    cert_not_entourage,
    chain_cover_from_sequence,
    connectivity_certificate,
    cover_normal_sequence,
    cover_successor_of_point,
    dense_scenario,
    iv_image,
    oracle_by_kind,
    pwm_via_metrics_check,
    random_interval_sets,
    refined_base,
    star_cover,
    uniformly_isolated_witness,
)
from qusp.serialize import parse_frac

PROBE_POINTS = [F(i, 101) for i in range(1, 101)]


def flagship(depth=64):
    cover, cert = dense_scenario(F(1, 2), depth)
    assert cert["passed"]
    return cover


def ref_inf_dist(kind, piece, y):
    lo, hi = piece.lo, piece.hi
    if kind == "euclid":
        return max(lo - y, y - hi, F(0))
    if kind == "upper":
        return max(y - hi, F(0))
    return max(lo - y, F(0))


class TestOracleImages:
    def test_upper_halfline(self):
        assert iv_image(UPPER, F(1, 4), iv(0, F(1, 2))) == iv(0, F(3, 4))

    def test_euclid_point(self):
        assert iv_image(EUCLID, F(1, 4), point(F(1, 2))) == iv(F(1, 4), F(3, 4))

    def test_empty(self):
        for oracle in (EUCLID, UPPER, LOWER):
            assert iv_image(oracle, F(1, 4), EMPTY) == EMPTY

    def test_lower_halfline(self):
        assert iv_image(LOWER, F(1, 8), iv(F(1, 2), F(3, 4))) == iv(F(3, 8), 1)

    @given(st.sampled_from(["euclid", "upper", "lower"]), st.integers(1, 40), st.integers(1, 23))
    @settings(max_examples=60)
    def test_pointwise_against_reference(self, kind, eps_num, spread):
        oracle = oracle_by_kind(kind)
        eps = F(eps_num, 40)
        a = iv(F(spread, 25), F(spread + 1, 25), lo_open=spread % 2 == 0) | point(F(1, 2))
        img = oracle.image(eps, a)
        for y in PROBE_POINTS:
            truth = min(ref_inf_dist(kind, piece, y) for piece in a.intervals) < eps
            assert (y in img) == truth, (kind, eps, y)

    @given(st.sampled_from(["euclid", "upper", "lower"]), st.integers(1, 16), st.integers(1, 16))
    @settings(max_examples=40)
    def test_image_composition_bound(self, kind, e1, e2):
        oracle = oracle_by_kind(kind)
        a = iv(F(1, 3), F(2, 5)) | iv(F(1, 2), F(5, 8), hi_open=False)
        eps, delta = F(e1, 32), F(e2, 32)
        twice = oracle.image(delta, oracle.image(eps, a))
        assert twice <= oracle.image(eps + delta, a)

    def test_monotone_in_radius_and_set(self):
        a = iv(F(1, 4), F(1, 2))
        b = a | iv(F(2, 3), F(3, 4))
        for oracle in (EUCLID, UPPER, LOWER):
            assert oracle.image(F(1, 16), a) <= oracle.image(F(1, 8), a)
            assert oracle.image(F(1, 16), a) <= oracle.image(F(1, 16), b)

    def test_inverse_image_duality(self):
        a = iv(F(1, 3), F(1, 2))
        assert UPPER.inv_image(F(1, 8), a) == LOWER.image(F(1, 8), a)
        assert LOWER.inv_image(F(1, 8), a) == UPPER.image(F(1, 8), a)
        assert EUCLID.inv_image(F(1, 8), a) == EUCLID.image(F(1, 8), a)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            MetricOracle("manhattan")


class TestSmallness:
    def test_half_open_at_exact_scale(self):
        assert EUCLID.is_small(iv(0, F(1, 4)), F(1, 4))
        assert EUCLID.is_small(iv(F(1, 4), F(1, 2), lo_open=False), F(1, 4))
        assert not EUCLID.is_small(iv(F(1, 4), F(1, 2), lo_open=False, hi_open=False), F(1, 4))

    def test_witness_pair_is_exact(self):
        a = iv(F(1, 8), F(7, 8))
        for oracle in (EUCLID, UPPER, LOWER):
            pair = oracle.small_violation(a, F(1, 4))
            assert pair is not None
            x, y = pair
            assert x in a and y in a
            assert oracle.dist(x, y) >= F(1, 4)

    def test_one_sided_orientation(self):
        a = iv(F(1, 8), F(7, 8))
        x, y = LOWER.small_violation(a, F(1, 2))
        assert x > y  # lower oracle charges downward moves
        x2, y2 = UPPER.small_violation(a, F(1, 2))
        assert y2 > x2

    def test_multi_component_span(self):
        a = iv(F(1, 8), F(1, 4)) | iv(F(3, 4), F(7, 8))
        assert not EUCLID.is_small(a, F(1, 2))
        assert EUCLID.is_small(a, F(7, 8))


class TestChainCover:
    def test_flagship_sets(self):
        cover = flagship()
        assert cover.sets[0] == iv(F(1, 2), 1)
        assert cover.sets[1] == iv(F(1, 4), 1)
        assert cover.truncation_depth == 64
        assert pwm_via_metrics_check(cover)

    def test_constant_sets_rejected(self):
        with pytest.raises(CoverError, match="strictly increasing"):
            chain_cover_from_sequence(
                EUCLID, lambda n: iv(F(1, 2), 1), lambda n: F(1, 8), depth=4
            )

    def test_oversized_scales_rejected(self):
        with pytest.raises(CoverError, match="witness fails at n="):
            chain_cover_from_sequence(
                EUCLID,
                lambda n: iv(F(1, n + 2), 1),
                lambda n: F(1, 2),
                depth=4,
            )

    def test_upper_oracle_chain(self):
        cover = chain_cover_from_sequence(
            UPPER,
            lambda n: iv(0, 1 - F(1, n + 2)),
            lambda n: F(1, n + 2) - F(1, n + 3),
            depth=16,
        )
        assert cover.sets[0] == iv(0, F(1, 2))
        assert pwm_via_metrics_check(cover)

    def test_lower_oracle_chain(self):
        cover = chain_cover_from_sequence(
            LOWER,
            lambda n: iv(F(1, n + 2), 1),
            lambda n: F(1, n + 2) - F(1, n + 3),
            depth=16,
        )
        assert pwm_via_metrics_check(cover)

    def test_ladder_scales_nonincreasing_and_halving(self):
        cover = flagship()
        for n in range(cover.truncation_depth):
            assert cover.base_scales[n + 1] <= cover.base_scales[n]
            assert cover.scale(n, 1) == cover.scale(n, 0) / 2


class TestSuccessor:
    def test_first_set_maps_to_second(self):
        cover = flagship()
        assert cover_successor_of_point(cover, F(3, 4)) == cover.sets[1]

    def test_boundary_point(self):
        cover = flagship()
        # 1/2 first appears in set 1, so its successor is set 2
        assert cover_successor_of_point(cover, F(1, 2)) == cover.sets[2]

    def test_nested_successors(self):
        cover = flagship()
        # deeper point, shallower point: successor sets are nested
        deep = cover_successor_of_point(cover, F(1, 100))
        shallow = cover_successor_of_point(cover, F(3, 4))
        assert shallow <= deep

    def test_outside_ground(self):
        with pytest.raises(CoverError, match="outside the ground"):
            cover_successor_of_point(flagship(), F(3, 2))

    def test_beyond_truncation(self):
        cover = flagship(depth=8)
        with pytest.raises(CoverError, match="not covered within truncation"):
            cover_successor_of_point(cover, F(1, 1000))


class TestStarCover:
    def test_interleaving_order(self):
        cover = flagship(depth=16)
        star = star_cover(cover)
        assert star.truncation_depth == 2 * 16
        for n in range(16):
            img = EUCLID.image(cover.scale(n, 1), cover.sets[n])
            assert star.sets[2 * n] == cover.sets[n]
            assert star.sets[2 * n + 1] == img
            assert cover.sets[n].proper_subset_of(img)
            assert img <= cover.sets[n + 1]

    def test_double_star_keeps_omega_shape(self):
        cover = flagship(depth=8)
        twice = star_cover(star_cover(cover))
        assert twice.truncation_depth == 2 * (2 * 8)
        for n in range(twice.truncation_depth):
            assert twice.sets[n].proper_subset_of(twice.sets[n + 1])

    def test_squared_relation_containment_on_grid(self):
        cover = flagship(depth=32)
        star = star_cover(cover)
        for x in PROBE_POINTS:
            kx = star.min_index_of(x)
            nx = cover.min_index_of(x)
            if kx is None or nx is None:
                continue
            if kx + 2 > star.truncation_depth or nx + 1 > cover.truncation_depth:
                continue
            # the squared successor image is exactly the set two steps up
            assert star.sets[kx + 2] <= cover.sets[nx + 1]

    def test_collision_detected(self):
        # engineered degenerate ladder: half-scale image lands exactly on the successor
        sets = (iv(F(1, 2), 1), iv(F(1, 4), 1), iv(F(1, 8), 1))
        doctored = OmegaCover(EUCLID, sets, (F(1, 2), F(1, 4), F(1, 8)), validate=False)
        with pytest.raises(CoverError, match="collides with successor"):
            star_cover(doctored)


class TestNormalSequence:
    def test_depth_zero_is_base_alone(self):
        cover = flagship(depth=8)
        rb = cover_normal_sequence(cover, 0)
        assert len(rb.covers) == 1 and rb.covers[0] is cover
        assert rb.certificate["passed"] and rb.certificate["pairs"] == []

    def test_depth_three_certifies(self):
        cover = flagship(depth=16)
        rb = cover_normal_sequence(cover, 3, grid_size=256)
        assert len(rb.covers) == 4
        assert rb.certificate["passed"]
        for pair in rb.certificate["pairs"]:
            assert pair["exact_failures"] == []
            assert pair["grid_violations"] == 0
            assert pair["exact_stratum_checks"] > 0


class TestMonotoneCoverCert:
    def test_bounded_probe(self):
        cert = cert_monotonecover(flagship(), iv(F(1, 4), F(1, 3)))
        assert cert["passed"] and cert["branch"] == "bounded"
        assert cert["smallest_meeting"] <= cert["smallest_containing"]

    def test_point_probe_meets_equals_contains(self):
        cert = cert_monotonecover(flagship(), point(F(1, 3)))
        assert cert["passed"]
        assert cert["smallest_meeting"] == cert["smallest_containing"]

    def test_cofinal_probe(self):
        cert = cert_monotonecover(flagship(), iv(0, F(1, 2)))
        assert cert["passed"] and cert["branch"] == "cofinal"
        cover = flagship()
        for n, w in enumerate(cert["escape_witnesses"]):
            q = parse_frac(w)
            assert q in iv(0, F(1, 2)) and q not in cover.sets[n]

    def test_rejects_empty(self):
        with pytest.raises(ValueError, match="nonempty"):
            cert_monotonecover(flagship(), EMPTY)

    def test_truncation_error(self):
        with pytest.raises(CoverError, match="truncation"):
            cert_monotonecover(flagship(depth=8), iv(F(1, 1000), F(1, 999)))

    def test_seeded_probe_family(self):
        cover = flagship()
        for probe in random_interval_sets(1234, 30):
            cert = cert_monotonecover(cover, probe)
            assert cert["passed"], cert


class TestMonotoneHausCert:
    def test_contained_branch(self):
        cert = cert_monotonehaus(flagship(), F(1, 8), iv(F(1, 4), F(1, 3)))
        assert cert["passed"] and cert["branch"] == "contained"

    def test_unbounded_branch_with_witnesses(self):
        cover = flagship()
        probe = iv(0, F(1, 2))
        cert = cert_monotonehaus(cover, F(1, 8), probe)
        assert cert["passed"] and cert["branch"] == "unbounded"
        assert cert["hypothesis_exact"]
        m = cert["hypothesis_index"]
        inside = probe & cover.sets[m]
        deep = probe - cover.sets[cover.truncation_depth]
        for w in cert["probe_witnesses"]:
            x = parse_frac(w["x"])
            near = parse_frac(w["inside_witness"])
            far = parse_frac(w["deep_witness"])
            assert x in probe and x not in cover.sets[m]
            assert near in inside and EUCLID.dist(x, near) < F(1, 16)
            assert far in deep and EUCLID.dist(far, x) < F(1, 16)

    def test_hypothesis_failure_reported(self):
        probe = point(F(1, 1000)) | iv(F(1, 3), 1)
        cert = cert_monotonehaus(flagship(), F(1, 64), probe)
        assert cert["passed"] is False
        assert cert["reason"] == "hypothesis fails for this A"

    def test_scale_must_be_positive(self):
        with pytest.raises(ValueError, match="positive"):
            cert_monotonehaus(flagship(), F(0), GROUND)


class TestBoundedHausCert:
    def test_moderate_scale_single_piece(self):
        cert = cert_boundedhaus(flagship(), F(1, 10))
        assert cert["passed"] and cert["piece_count"] == 1 and not cert["chopped"]

    def test_huge_scale_index_zero(self):
        cert = cert_boundedhaus(flagship(), F(2))
        assert cert["passed"] and cert["index"] == 0 and cert["piece_count"] == 1

    def test_tiny_scale_chops(self):
        cover = flagship()
        cert = cert_boundedhaus(cover, F(1, 256))
        assert cert["passed"] and cert["chopped"] and cert["piece_count"] >= 2
        pieces = [Interval.from_json(p) for p in cert["pieces"]]
        union = RationalIntervalSet(tuple(pieces))
        assert union == cover.sets[cert["index"]].complement()
        for p in pieces:
            assert EUCLID.is_small(RationalIntervalSet.of(p), F(1, 256))

    def test_lower_oracle_one_sided(self):
        cover = chain_cover_from_sequence(
            LOWER,
            lambda n: iv(F(1, n + 2), 1),
            lambda n: F(1, n + 2) - F(1, n + 3),
            depth=16,
        )
        cert = cert_boundedhaus(cover, F(1, 8))
        assert cert["passed"]
        for p in cert["pieces"]:
            assert LOWER.is_small(RationalIntervalSet.of(Interval.from_json(p)), F(1, 8))


class TestNotEntourageCert:
    def test_dyadic_scales(self):
        cover = flagship()
        cert = cert_not_entourage(cover, [F(1, 1 << k) for k in range(9)])
        assert cert["passed"]
        for w in cert["witnesses"]:
            x, y = parse_frac(w["x"]), parse_frac(w["y"])
            eps = parse_frac(w["scale"])
            assert EUCLID.dist(x, y) < eps
            assert y not in cover_successor_of_point(cover, x)

    def test_large_scale(self):
        cert = cert_not_entourage(flagship(), [F(2)])
        assert cert["passed"]

    def test_needs_scales(self):
        with pytest.raises(ValueError, match="at least one"):
            cert_not_entourage(flagship(), [])

    def test_scale_below_every_materialized_gap_fails_explicitly(self):
        # deepest consecutive gap of the depth-64 chain is 1/(2*64*65); below
        # that no materialized stratum can escape its successor
        cert = cert_not_entourage(flagship(), [F(1, 20000)])
        assert cert["passed"] is False
        assert cert["witnesses"][0] == {"scale": "1/20000", "found": False}

    def test_deeper_index_selected_for_smaller_scales(self):
        cover = flagship()
        shallow = cert_not_entourage(cover, [F(1, 4)])["witnesses"][0]["stratum"]
        deep = cert_not_entourage(cover, [F(1, 256)])["witnesses"][0]["stratum"]
        assert deep > shallow


class TestRefinedBase:
    def test_flagship_bundle(self):
        cover = flagship()
        probes = random_interval_sets(77, 10)
        rb = refined_base(cover, 2, [F(1, 4), F(1, 16)], probes, grid_size=128)
        assert rb.certificate["passed"]
        assert len(rb.certificate["base"]) == 6
        assert rb.base_description() == rb.certificate["base"]
        assert len(rb.certificate["membership"]) == 6 * len(probes)

    def test_trivial_scale_one(self):
        cover = flagship(depth=16)
        rb = refined_base(cover, 0, [F(1)], [], grid_size=64)
        assert rb.certificate["base"] == [{"cover": 0, "scale": "1/1"}]

    def test_aborts_on_failing_probe(self):
        cover = flagship(depth=16)
        bad_probe = point(F(1, 1000)) | iv(F(1, 3), 1)
        with pytest.raises(CoverError, match="membership certificate failed"):
            refined_base(cover, 0, [F(1, 64)], [bad_probe], grid_size=64)


class TestDenseScenario:
    def test_eps_half_instantiation(self):
        cover, cert = dense_scenario(F(1, 2), depth=16)
        for n in range(5):
            assert cover.sets[n] == iv(F(1, 2 * (n + 1)), 1)
        assert cert["no_set_is_ground"]
        assert cert["connectivity"]["passed"]

    def test_chain_witnesses_are_gaps(self):
        _, cert = dense_scenario(F(1, 2), depth=16)
        assert cert["chain_witness_scales"][0] == "1/4"
        assert cert["chain_witness_scales"][1] == "1/12"

    def test_eps_one_rejected(self):
        with pytest.raises(ValueError, match="covers the whole ground"):
            dense_scenario(F(1))

    def test_eps_nonpositive_rejected(self):
        with pytest.raises(ValueError, match="positive"):
            dense_scenario(F(0))

    def test_bounded_scales_included(self):
        _, cert = dense_scenario(F(1, 2), depth=16, bounded_scales=(F(1, 4),))
        assert len(cert["bounded"]) == 1 and cert["bounded"][0]["passed"]


class TestConnectivity:
    def test_no_interval_set_is_isolated(self):
        for oracle in (EUCLID, UPPER, LOWER):
            for probe in (iv(F(1, 4), F(1, 2)), iv(0, F(1, 2)), iv(F(1, 2), 1)):
                assert uniformly_isolated_witness(oracle, F(1, 16), probe) is None

    def test_certificate_shape(self):
        cert = connectivity_certificate(EUCLID, F(1, 8), [iv(F(1, 4), F(1, 2))])
        assert cert["passed"] and cert["fixed_set"] is None


class TestPwmCheck:
    def test_flagship_true(self):
        assert pwm_via_metrics_check(flagship(depth=16))

    def test_bad_ladder_false(self):
        cover = flagship(depth=16)
        doctored = OmegaCover(
            cover.oracle,
            cover.sets[:4],
            (F(1, 8), F(1, 4), F(1, 8), F(1, 16)),
            validate=False,
        )
        assert not pwm_via_metrics_check(doctored)

    def test_degenerate_single_set_vacuous(self):
        lonely = OmegaCover(EUCLID, (iv(F(1, 2), 1),), (F(1, 8),), validate=False)
        assert pwm_via_metrics_check(lonely)


class TestSerialization:
    def test_cover_json(self):
        cover = flagship(depth=4)
        data = cover.to_json()
        assert data["oracle"] == {"kind": "euclid"}
        assert data["truncation_depth"] == 4
        assert len(data["sets"]) == 5 and len(data["base_scales"]) == 5
        assert data["base_scales"][0] == "1/4"


class TestProbeGeneration:
    def test_deterministic(self):
        assert random_interval_sets(42, 5) == random_interval_sets(42, 5)

    def test_all_nonempty_and_bounded(self):
        for probe in random_interval_sets(7, 20):
            assert not probe.is_empty
            assert probe.inf_cut[0] >= F(1, 64)
