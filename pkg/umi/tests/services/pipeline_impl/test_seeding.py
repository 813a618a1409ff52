import numpy as np

from umi.services.pipeline_impl.seeding import stage_rng, stream_key


class TestStageStreams:
    def test_same_seed_and_stage_give_same_draws(self):
        first = stage_rng(7, "simulate").standard_normal(16)
        second = stage_rng(7, "simulate").standard_normal(16)
        np.testing.assert_array_equal(first, second)

    def test_stages_get_independent_streams(self):
        assert stream_key(7, "simulate") != stream_key(7, "screen")
        assert not np.allclose(stage_rng(7, "simulate").standard_normal(8), stage_rng(7, "screen").standard_normal(8))

    def test_seed_changes_the_stream(self):
        assert stream_key(7, "simulate") != stream_key(8, "simulate")

    def test_key_fits_philox(self):
        assert 0 <= stream_key(123456789, "background") < 2**128
