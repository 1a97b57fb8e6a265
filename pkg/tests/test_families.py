import itertools
import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subposet_lab.errors import OutOfRange
from subposet_lab.families import (
    IntervalChainSpec,
    SetFamily,
    Subset,
    apply_permutation,
    count_trailing_zero_profile,
    family_from_text,
    family_to_text,
    interval_chain,
    level_count,
    lubell,
    permutation_hit_count,
    permutation_hit_count_exhaustive,
    unrelated_below,
    unrelated_below_count,
    worst_set,
)


def subsets_of(n, *element_lists):
    return [Subset.from_elements(n, elems) for elems in element_lists]


class TestSubset:
    def test_weight_is_popcount(self):
        s = Subset.from_elements(5, [1, 3, 4])
        assert s.weight == 3
        assert s.elements() == (1, 3, 4)
        assert s.indicator() == (1, 0, 1, 1, 0)

    def test_rejects_out_of_range_elements(self):
        with pytest.raises(ValueError):
            Subset.from_elements(3, [4])
        with pytest.raises(ValueError):
            Subset(3, 1 << 3)

    def test_containment(self):
        a = Subset.from_elements(4, [1, 2])
        b = Subset.from_elements(4, [1, 2, 4])
        assert a.is_proper_subset(b)
        assert a.related(b) and b.related(a)
        assert not b.issubset(a)

    @given(st.integers(0, 2**8 - 1), st.integers(0, 2**8 - 1))
    def test_related_matches_set_semantics(self, m1, m2):
        a, b = Subset(8, m1), Subset(8, m2)
        sa, sb = set(a.elements()), set(b.elements())
        assert a.related(b) == (sa <= sb or sb <= sa)


class TestSetFamily:
    def test_canonical_order_and_dedup(self):
        fam = SetFamily(
            3,
            subsets_of(3, [1, 2], [3], [1, 2], [], [1]),
        )
        # weight first, then indicator order within a weight: {3} < {1}
        assert list(fam) == subsets_of(3, [], [3], [1], [1, 2])

    def test_constructors_share_canonical_order(self):
        rng = random.Random(3)
        masks = rng.sample(range(32), 12)
        a = SetFamily.from_masks(5, masks)
        b = SetFamily.from_masks(5, reversed(masks))
        assert a.sets == b.sets

    def test_mixed_ground_sets_rejected(self):
        with pytest.raises(ValueError):
            SetFamily(3, [Subset.empty(4)])

    def test_power_set_and_levels(self):
        assert len(SetFamily.power_set(4)) == 16
        assert len(SetFamily.levels(4, [2])) == 6

    def test_file_round_trip(self, tmp_path):
        fam = SetFamily(4, subsets_of(4, [], [2], [1, 3], [1, 2, 3, 4]))
        text = family_to_text(fam)
        assert text.splitlines()[0] == "n=4"
        assert "{}" in text
        assert family_from_text(text) == fam

    def test_file_rejects_missing_header(self):
        with pytest.raises(ValueError):
            family_from_text("1,2\n")


class TestLubell:
    def test_full_middle_level_is_one(self):
        assert lubell(SetFamily.levels(4, [2])) == 1

    def test_empty_and_full(self):
        fam = SetFamily(6, [Subset.empty(6), Subset.full(6)])
        assert lubell(fam) == 2

    def test_direct_sum(self):
        fam = SetFamily(2, subsets_of(2, [], [1], [1, 2]))
        assert lubell(fam) == Fraction(5, 2)

    @given(st.sets(st.integers(0, 2**6 - 1), max_size=20), st.randoms(use_true_random=False))
    @settings(max_examples=60, deadline=None)
    def test_permutation_invariance(self, masks, rnd):
        fam = SetFamily.from_masks(6, masks)
        perm = list(range(1, 7))
        rnd.shuffle(perm)
        assert lubell(apply_permutation(fam, perm)) == lubell(fam)


class TestApplyPermutation:
    def test_identity(self):
        fam = SetFamily.power_set(3)
        assert apply_permutation(fam, [1, 2, 3]) == fam

    def test_swap(self):
        fam = SetFamily(2, subsets_of(2, [1], [1, 2]))
        swapped = apply_permutation(fam, [2, 1])
        assert swapped == SetFamily(2, subsets_of(2, [2], [1, 2]))

    def test_preserves_size_and_weights(self):
        rng = random.Random(5)
        fam = SetFamily.from_masks(5, rng.sample(range(32), 10))
        perm = [3, 5, 1, 2, 4]
        image = apply_permutation(fam, perm)
        assert len(image) == len(fam)
        assert sorted(s.weight for s in image) == sorted(s.weight for s in fam)

    def test_preserves_inclusion_order(self):
        from subposet_lab.posets import are_isomorphic, inclusion_poset

        rng = random.Random(11)
        fam = SetFamily.from_masks(4, rng.sample(range(16), 7))
        image = apply_permutation(fam, [2, 4, 1, 3])
        assert are_isomorphic(inclusion_poset(fam), inclusion_poset(image))

    def test_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            apply_permutation(SetFamily.power_set(2), [1, 1])


class TestIntervalChain:
    def test_k1_is_the_base_chain(self):
        spec = IntervalChainSpec.canonical(5, 1)
        fam = interval_chain(spec)
        assert len(fam) == 6
        assert all(s.mask == (1 << s.weight) - 1 for s in fam)

    def test_k2_n4_membership(self):
        fam = interval_chain(IntervalChainSpec.canonical(4, 2))
        expected = SetFamily(
            4,
            subsets_of(4, [], [1], [2], [1, 2], [1, 3], [1, 2, 3], [1, 2, 4], [1, 2, 3, 4]),
        )
        assert fam == expected

    def test_k_equals_n_gives_power_set(self):
        assert interval_chain(IntervalChainSpec.canonical(4, 4)) == SetFamily.power_set(4)

    def test_membership_rule_matches_enumeration(self):
        for n, k in [(6, 2), (7, 3), (8, 4)]:
            spec = IntervalChainSpec.canonical(n, k)
            fam = interval_chain(spec)
            for mask in range(1 << n):
                assert spec.contains(Subset(n, mask)) == (Subset(n, mask) in fam)

    def test_non_canonical_base(self):
        base = [Subset.empty(3)]
        for e in (2, 3, 1):
            base.append(Subset(3, base[-1].mask | 1 << (e - 1)))
        spec = IntervalChainSpec(3, 2, tuple(base))
        assert not spec.is_canonical
        fam = interval_chain(spec)
        perm = spec.base_permutation()
        canonical = interval_chain(IntervalChainSpec.canonical(3, 2))
        assert apply_permutation(fam, perm) == canonical

    def test_rejects_bad_base(self):
        with pytest.raises(ValueError):
            IntervalChainSpec(3, 2, (Subset.empty(3),) * 4)
        with pytest.raises(ValueError):
            IntervalChainSpec.canonical(3, 4)


class TestLevelCount:
    @pytest.mark.parametrize("k", [2, 3, 4, 5])
    def test_formula_matches_enumeration_in_window(self, k):
        for n in range(2 * k, 13):
            fam = interval_chain(IntervalChainSpec.canonical(n, k))
            spec = IntervalChainSpec.canonical(n, k)
            for m in range(k, n - k + 1):
                assert level_count(spec, m) == 1 << (k - 1)
                assert fam.count_of_size(m) == 1 << (k - 1)

    def test_named_values(self):
        assert level_count(IntervalChainSpec.canonical(10, 3), 5) == 4
        assert level_count(IntervalChainSpec.canonical(4, 2), 0) == 1
        # below the window the count falls back to enumeration
        assert level_count(IntervalChainSpec.canonical(12, 4), 2) == 7

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            level_count(IntervalChainSpec.canonical(4, 2), 9)


class TestTrailingZeroProfile:
    def _enumerated(self, spec, m, j):
        count = 0
        for s in interval_chain(spec):
            if s.weight != m:
                continue
            bits = s.indicator()
            last_one = max(i for i, b in enumerate(bits) if b)
            zeros = sum(1 for i in range(last_one) if not bits[i])
            if zeros >= j:
                count += 1
        return count

    @pytest.mark.parametrize("k,n", [(2, 7), (3, 9), (4, 10)])
    def test_matches_enumeration(self, k, n):
        spec = IntervalChainSpec.canonical(n, k)
        for m in range(k, n - k + 1):
            for j in range(k):
                assert count_trailing_zero_profile(spec, m, j) == self._enumerated(
                    spec, m, j
                )

    def test_named_values(self):
        spec = IntervalChainSpec.canonical(10, 3)
        assert count_trailing_zero_profile(spec, 5, 0) == 4
        assert count_trailing_zero_profile(spec, 5, 1) == 3
        spec4 = IntervalChainSpec.canonical(12, 4)
        assert count_trailing_zero_profile(spec4, 6, 2) == 4

    def test_window_enforced(self):
        spec = IntervalChainSpec.canonical(10, 3)
        with pytest.raises(OutOfRange):
            count_trailing_zero_profile(spec, 2, 0)
        with pytest.raises(OutOfRange):
            count_trailing_zero_profile(spec, 5, 3)


class TestUnrelatedBelow:
    def test_smallest_case(self):
        spec = IntervalChainSpec.canonical(4, 2)
        fam = unrelated_below(spec, 3)
        assert fam == SetFamily(4, subsets_of(4, [1, 3]))

    @pytest.mark.parametrize("k,expected", [(2, 1), (3, 8), (4, 28)])
    def test_cardinality_formula(self, k, expected):
        assert unrelated_below_count(k) == expected
        n = 4 * k - 2
        spec = IntervalChainSpec.canonical(n, k)
        for m in range(3 * k - 3, n - k + 2):
            assert len(unrelated_below(spec, m)) == expected

    def test_members_are_genuinely_unrelated(self):
        spec = IntervalChainSpec.canonical(9, 3)
        m = 6
        fam = unrelated_below(spec, m)
        big = [s for s in interval_chain(spec) if s.weight >= m]
        for s in fam:
            assert s.weight <= m - 1
            assert any(not s.related(b) for b in big)

    def test_window_enforced(self):
        spec = IntervalChainSpec.canonical(10, 3)
        with pytest.raises(OutOfRange):
            unrelated_below(spec, 5)  # below 3k-3
        with pytest.raises(OutOfRange):
            unrelated_below(spec, 9)  # above n-k+1

    def test_proof_identity(self):
        # (k-2) 2^(k-1) + (k-1) 2^(k-2) == (3k-5) 2^(k-2), checked exactly
        for k in range(2, 65):
            lhs = (k - 2) * 2 ** (k - 1) + (k - 1) * 2 ** (k - 2)
            assert lhs == (3 * k - 5) * 2 ** (k - 2)
            # second form: the double sum over binomials collapses the same way
            double = sum(
                comb(k - 1, h) for i in range(k - 1, 2 * k - 2) for h in range(i - k + 2, k)
            )
            assert (k - 2) * 2 ** (k - 1) + double == (3 * k - 5) * 2 ** (k - 2)


class TestWorstSet:
    def test_indicator_layout(self):
        spec = IntervalChainSpec.canonical(4, 2)
        assert worst_set(spec, 3) == Subset.from_elements(4, [1, 2, 4])

    def test_k1_returns_base_member(self):
        spec = IntervalChainSpec.canonical(6, 1)
        for m in range(1, 6):
            assert worst_set(spec, m).mask == (1 << m) - 1

    def test_weight_and_membership(self):
        spec = IntervalChainSpec.canonical(10, 3)
        s = worst_set(spec, 5)
        assert s == Subset.from_elements(10, [1, 2, 3, 5, 6])
        assert s.weight == 5
        assert spec.contains(s)

    def test_uniqueness_of_partner(self):
        # qualifying sets: unrelated to something at level m, related to all
        # of level m+1; their only level-m non-relative is the worst set
        for k, n in [(2, 8), (3, 9)]:
            spec = IntervalChainSpec.canonical(n, k)
            fam = interval_chain(spec)
            for m in range(k, n - k + 2):
                blocker = worst_set(spec, m)
                level_m = [s for s in fam if s.weight == m]
                level_up = [s for s in fam if s.weight == m + 1]
                for a in fam:
                    if a.weight >= m:
                        continue
                    partners = [s for s in level_m if not a.related(s)]
                    if not partners or any(not a.related(s) for s in level_up):
                        continue
                    assert partners == [blocker]

    def test_window_enforced(self):
        spec = IntervalChainSpec.canonical(6, 2)
        with pytest.raises(OutOfRange):
            worst_set(spec, 1)
        with pytest.raises(OutOfRange):
            worst_set(spec, 6)


class TestPermutationHitCount:
    def test_chain_host(self):
        fam = SetFamily(3, [Subset(3, (1 << i) - 1) for i in range(4)])
        a = Subset.from_elements(3, [2])
        assert permutation_hit_count(fam, a) == 2
        assert permutation_hit_count_exhaustive(fam, a) == 2

    def test_no_sets_of_that_size(self):
        fam = SetFamily(4, subsets_of(4, [1, 2]))
        assert permutation_hit_count(fam, Subset.from_elements(4, [3])) == 0

    def test_power_set_hits_everything(self):
        from math import factorial

        fam = SetFamily.power_set(4)
        for mask in (0, 3, 9, 15):
            assert permutation_hit_count(fam, Subset(4, mask)) == factorial(4)

    @pytest.mark.parametrize("seed", range(6))
    def test_closed_form_matches_enumeration(self, seed):
        rng = random.Random(seed)
        n = rng.randint(3, 5)
        fam = SetFamily.from_masks(n, rng.sample(range(1 << n), rng.randint(3, 8)))
        a = Subset(n, rng.randrange(1 << n))
        assert permutation_hit_count(fam, a) == permutation_hit_count_exhaustive(fam, a)
