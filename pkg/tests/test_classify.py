import itertools
import random

import jsonschema
import pytest

from torelli.classify import (
    HOLOMAP_SCHEMA,
    CollisionAt,
    CrossRatioSpec,
    ForgetfulSpec,
    QuadraticWitness,
    TooManyCoordinates,
    ValidMap,
    _printed_lift,
    all_specs,
    apply_forgetful,
    collision_case,
    collision_free,
    collision_witness,
    enumerate_maps,
    extend_to_group_element,
    find_valid_tuple,
    forgetful,
    lc_map,
    lift_permutation,
    lift_permutation_detailed,
    validate_tuple,
    verify_lift,
    witness_holds,
)
from torelli.errors import AmbientMismatch, BudgetExhausted, NoExtension, TargetLargerThanSource
from torelli.factored import evaluate, parse_map
from torelli.group import closure, find_permutation, standard_generators, theta, theta_image
from torelli.permutations import Permutation, enumerate_group, parse_permutation
from torelli.projective import OmegaPoint, sample_omega_point


def C(k, *idx):
    return CrossRatioSpec(k, idx)


def P(text, degree):
    return parse_permutation(text, degree)


class TestSpecs:
    def test_invariants(self):
        for bad in [(1, 2, 3), (1, 1, 2, 3), (1, 2, 3, 6), (0, 1, 2, 3)]:
            with pytest.raises(ValueError):
                CrossRatioSpec(4, bad)
        assert len(all_specs(4)) == 120
        assert CrossRatioSpec.parse("1,2,3,5", 4) == C(4, 1, 2, 3, 5)


class TestLcMap:
    def test_examples(self):
        assert lc_map(C(4, 1, 2, 3, 4)) == parse_map("1*z1", 4)
        assert lc_map(C(4, 2, 1, 3, 4)) == parse_map("1*z1^-1", 4)
        assert lc_map(C(4, 1, 3, 2, 5)) == parse_map("-1*(z2-1)", 4)

    def test_klein_four_collapse(self):
        for k in (3, 4, 5):
            images = {lc_map(c) for c in all_specs(k)}
            assert len(images) * 4 == len(all_specs(k))


class TestCollisionCriterion:
    def test_examples(self):
        assert collision_case(C(4, 1, 2, 3, 4), C(4, 1, 2, 3, 5)) == "a"
        assert not collision_free(C(4, 1, 2, 3, 4), C(4, 2, 1, 3, 4))
        assert not collision_free(C(4, 1, 2, 3, 4), C(4, 1, 2, 3, 4))

    @pytest.mark.parametrize(
        "c2, case",
        [((1, 2, 5, 4), "b"), ((1, 5, 3, 4), "c"), ((5, 2, 3, 4), "d")],
    )
    def test_each_case(self, c2, case):
        assert collision_case(C(4, 1, 2, 3, 4), C(4, *c2)) == case

    def test_same_map_written_differently(self):
        # (2,1,5,3) is a Klein-four rearrangement of (1,2,3,5), i.e. z2 again
        assert lc_map(C(4, 2, 1, 5, 3)) == lc_map(C(4, 1, 2, 3, 5))
        assert collision_case(C(4, 1, 2, 3, 4), C(4, 2, 1, 5, 3)) == "a"

    def test_symmetric(self):
        specs = all_specs(4)
        for a in specs[::7]:
            for b in specs:
                assert collision_free(a, b) == collision_free(b, a)

    def test_ambient_mismatch(self):
        with pytest.raises(AmbientMismatch):
            collision_free(C(4, 1, 2, 3, 4), C(5, 1, 2, 3, 4))


class TestWitness:
    def test_inverse_pair(self):
        z = collision_witness(C(4, 1, 2, 3, 4), C(4, 2, 1, 3, 4))
        assert isinstance(z, OmegaPoint)
        assert z.values()[0] == -1

    def test_swap_last_two(self):
        # [∞,0,z1,1] = 1/z1, so again z1 = -1
        c1, c2 = C(4, 1, 2, 3, 4), C(4, 1, 2, 4, 3)
        z = collision_witness(c1, c2)
        assert z.values()[0] == -1
        assert evaluate(lc_map(c1), z) == evaluate(lc_map(c2), z)

    def test_case_a_never_has_witness(self):
        for budget in (1, 10, 200):
            with pytest.raises(BudgetExhausted):
                collision_witness(C(4, 1, 2, 3, 4), C(4, 1, 2, 3, 5), budget=budget)

    def test_irrational_collision(self):
        # z1 = 1/(1 - z1) has only the primitive sixth roots of unity as solutions
        c1, c2 = C(4, 1, 2, 3, 4), C(4, 1, 3, 4, 2)
        assert lc_map(c2) == parse_map("-1*(z1-1)^-1", 4)
        w = collision_witness(c1, c2)
        assert isinstance(w, QuadraticWitness)
        assert w.free_index == 1 and w.root.d < 0
        assert witness_holds(lc_map(c1), lc_map(c2), w)
        assert (w.root**2 - w.root + 1).is_zero()

    def test_identical_maps_collide_everywhere(self):
        z = collision_witness(C(4, 1, 2, 3, 4), C(4, 2, 1, 4, 3))
        assert isinstance(z, OmegaPoint)

    def test_deterministic(self):
        a = collision_witness(C(5, 1, 4, 2, 6), C(5, 3, 2, 5, 4), seed=3)
        b = collision_witness(C(5, 1, 4, 2, 6), C(5, 3, 2, 5, 4), seed=3)
        assert str(a) == str(b)

    def test_k5_random_pairs_agree_with_criterion(self):
        rng = random.Random(5)
        specs = all_specs(5)
        for _ in range(2000):
            a, b = rng.choice(specs), rng.choice(specs)
            if rng.random() < 0.3:
                # bias towards near-misses so every case is exercised
                kept = [x if rng.random() < 0.75 else None for x in a.indices]
                fill = [x for x in range(1, 7) if x not in kept]
                rng.shuffle(fill)
                b = CrossRatioSpec(5, tuple(x if x is not None else fill.pop() for x in kept))
            free = collision_free(a, b)
            try:
                w = collision_witness(a, b, budget=50)
            except BudgetExhausted:
                assert free
            else:
                assert not free
                assert witness_holds(lc_map(a), lc_map(b), w)


class TestValidateTuple:
    def test_examples(self):
        assert validate_tuple([C(4, 1, 2, 3, 4), C(4, 1, 2, 3, 5)], 4) == ValidMap(4)
        assert validate_tuple([C(4, 1, 2, 3, 4), C(4, 2, 1, 3, 4)], 4) == CollisionAt(1, 2)
        three = [C(4, 1, 2, 3, 4), C(4, 1, 2, 3, 5), C(4, 2, 1, 3, 4)]
        assert validate_tuple(three, 4) == TooManyCoordinates(3, 2)
        assert validate_tuple([C(4, 2, 4, 1, 5)], 4) == ValidMap(3)

    def test_no_valid_triple_over_A4(self):
        assert find_valid_tuple(4, 3) is None
        assert find_valid_tuple(4, 2) is not None
        assert find_valid_tuple(5, 3) is not None
        assert find_valid_tuple(5, 4) is None


class TestExtend:
    def test_examples(self):
        assert extend_to_group_element([C(4, 1, 2, 3, 4)], 4) == theta(4, Permutation.identity(5))
        g = extend_to_group_element([C(4, 1, 3, 2, 5)], 4)
        assert g.coords[0] == parse_map("-1*(z2-1)", 4)
        candidates = [h for _, h in theta_image(4) if h.coords[0] == g.coords[0]]
        assert theta(4, P("(2 3)(4 5)", 5)) in candidates

    def test_full_tuples_extend_to_themselves(self):
        specs = all_specs(4)
        for a, b in itertools.product(specs[::3], specs[::5]):
            if not isinstance(validate_tuple([a, b], 4), ValidMap):
                continue
            g = extend_to_group_element([a, b], 4)
            assert g.coords == (lc_map(a), lc_map(b))
            assert theta(4, find_permutation(4, g)) == g

    def test_every_valid_prefix_extends_k5(self):
        specs = all_specs(5)
        rng = random.Random(1)
        for _ in range(300):
            tup = rng.sample(specs, rng.randint(1, 3))
            if isinstance(validate_tuple(tup, 5), ValidMap):
                g = extend_to_group_element(tup, 5)
                assert g.coords[: len(tup)] == tuple(map(lc_map, tup))

    def test_invalid(self):
        with pytest.raises(NoExtension):
            extend_to_group_element([C(4, 1, 2, 3, 4), C(4, 2, 1, 3, 4)], 4)


class TestEnumerate:
    def test_counts(self):
        assert len(enumerate_maps(3, 3)) == 6
        assert len(enumerate_maps(4, 3)) == 30
        assert len(enumerate_maps(4, 4)) == 120

    def test_target_larger(self):
        with pytest.raises(TargetLargerThanSource):
            enumerate_maps(4, 5)

    @pytest.mark.parametrize("m", [3, 4, 5])
    def test_n3_is_the_lc_image(self, m):
        found = {d.coords[0] for d in enumerate_maps(m, 3)}
        assert found == {lc_map(c) for c in all_specs(m)}

    def test_self_maps_are_the_group(self):
        found = {d.coords for d in enumerate_maps(4, 4)}
        assert found == {g.coords for g in closure(4, standard_generators(4))}

    def test_descriptor_coords_match_theta(self):
        for d in enumerate_maps(5, 4):
            T = theta(5, d.sigma)
            assert d.coords == tuple(T.coords[j - 1] for j in d.J)
            jsonschema.validate(d.to_json(), HOLOMAP_SCHEMA)

    @pytest.mark.parametrize("m, n", [(4, 3), (4, 4), (5, 4)])
    def test_descriptors_land_in_target(self, m, n):
        descs = enumerate_maps(m, n)
        pts = [sample_omega_point(m, s) for s in range(100)]
        rng = random.Random(m * 10 + n)
        for d in rng.sample(descs, min(len(descs), 40)):
            for z in pts:
                assert d(z).k == n


class TestForgetful:
    def test_examples(self):
        z = OmegaPoint.of([2, 3, 5])
        assert apply_forgetful(ForgetfulSpec(5, 4, (1, 2)), z) == OmegaPoint.of([2, 3])
        w = OmegaPoint.of([2, 3])
        assert apply_forgetful(ForgetfulSpec(4, 4, (1, 2)), w) == w
        assert apply_forgetful(ForgetfulSpec(4, 4, (2, 1)), w) == OmegaPoint.of([3, 2])

    def test_descriptor(self):
        d = forgetful(ForgetfulSpec(5, 4, (3, 1)))
        assert d.coords == (parse_map("1*z3", 5), parse_map("1*z1", 5))

    def test_invalid(self):
        for m, n, J in [(4, 5, (1, 2, 3)), (5, 4, (1,)), (5, 4, (1, 1)), (5, 4, (1, 4))]:
            with pytest.raises(ValueError):
                ForgetfulSpec(m, n, J)


class TestLift:
    def test_worked_example(self):
        sigma = P("(2 3)(4 5)", 5)
        hat = lift_permutation(sigma, 5, (1, 2))
        assert hat == P("(2 3)(4 5)", 6)
        assert theta(5, hat).coords == tuple(
            parse_map(t, 5) for t in ("-1*(z2-1)", "-1*(z1-1)", "-1*(z3-1)")
        )

    def test_printed_rule_misindexes_the_worked_example(self):
        # the printed rule sends 4 to sigma(j_2) + 3 = 6 instead of 5
        assert _printed_lift(P("(2 3)(4 5)", 5), 5, (1, 2)) != P("(2 3)(4 5)", 6)

    def test_identity(self):
        assert lift_permutation(Permutation.identity(5), 6, (2, 4)) == Permutation.identity(7)

    def test_transposition_into_omega6(self):
        lift = lift_permutation_detailed(P("(1 2)", 5), 6, (1, 3))
        assert lift.verified
        assert verify_lift(P("(1 2)", 5), lift.sigma_hat, ForgetfulSpec(6, 4, (1, 3)), seed=9)

    def test_lift_fixes_points_outside_support(self):
        for sigma in enumerate_group(5):
            hat = lift_permutation(sigma, 7, (4, 2))
            assert all(hat(x) == x for x in (4, 6, 8))

    def test_naturality_exhaustive(self):
        for J in itertools.permutations((1, 2, 3), 2):
            spec = ForgetfulSpec(5, 4, J)
            for sigma in enumerate_group(5):
                hat = lift_permutation(sigma, 5, J)
                assert verify_lift(sigma, hat, spec, points=5, seed=1)
