# tests/test_rng.py
from hypothesis import HealthCheck, given, settings, strategies as st

from app.rng import MASK64, SplitMix64, derive_seed

SETTINGS = settings(max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow])


class TestSplitMix64:
    def test_matches_golden_file(self, data_dir):
        expected = [
            int(line, 16)
            for line in (data_dir / "prng_golden.txt").read_text().splitlines()
            if line and not line.startswith("#")
        ]
        rng = SplitMix64(0, 0)
        assert [rng.next_u64() for _ in expected] == expected

    @SETTINGS
    @given(st.integers(0, MASK64), st.integers(0, 1000))
    def test_same_seed_same_stream(self, seed, stream):
        a, b = SplitMix64(seed, stream), SplitMix64(seed, stream)
        assert [a.next_u64() for _ in range(8)] == [b.next_u64() for _ in range(8)]

    def test_streams_differ(self):
        for seed in range(100):
            for stream in range(10):
                a, b = SplitMix64(seed, stream), SplitMix64(seed, stream + 1)
                assert [a.next_u64() for _ in range(4)] != [b.next_u64() for _ in range(4)]

    @SETTINGS
    @given(st.integers(0, 2**32), st.integers(1, 10**6))
    def test_below_in_range(self, seed, bound):
        rng = SplitMix64(seed)
        assert all(0 <= rng.below(bound) < bound for _ in range(20))

    @SETTINGS
    @given(st.integers(0, 2**32), st.integers(0, 30), st.data())
    def test_sample_is_distinct_and_in_input_order(self, seed, size, data):
        k = data.draw(st.integers(0, size))
        items = list(range(100, 100 + size))
        picked = SplitMix64(seed).sample(items, k)
        assert len(picked) == k
        assert picked == sorted(set(picked))

    def test_shuffled_is_permutation(self):
        items = list(range(50))
        assert sorted(SplitMix64(7).shuffled(items)) == items


class TestDeriveSeed:
    def test_labels_are_ordered(self):
        assert derive_seed(1, 2, 3) != derive_seed(1, 3, 2)

    def test_no_labels_keeps_seed(self):
        assert derive_seed(12345) == 12345
