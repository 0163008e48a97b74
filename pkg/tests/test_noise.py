import logging

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sketch2photo.data.images import SketchImage
from sketch2photo.data.noise import (NoiseMaskPool, TAG_CLEAN, TAG_COMPLEX,
                                     TAG_DISTRACTIVE, build_noise_mask_pool,
                                     compose_complex, compose_distractive,
                                     sample_noise_sketch)
from sketch2photo.errors import DataError, UnsupportedVersionError


def dense_sketch(size: int = 64, seed: int = 0) -> SketchImage:
    rng = np.random.default_rng(seed)
    pixels = np.ones((size, size), dtype=np.float32)
    pixels[rng.random((size, size)) < 0.3] = 0.0
    return SketchImage(pixels)


def sparse_sketch(size: int = 64) -> SketchImage:
    pixels = np.ones((size, size), dtype=np.float32)
    pixels[0, 0] = 0.0
    return SketchImage(pixels)


class TestPoolBuilding:
    def test_collects_dense_crops(self):
        pool = build_noise_mask_pool([dense_sketch()], crop_size=16,
                                     density_threshold=0.15, pool_size=8, seed=1)
        assert len(pool) == 8
        assert pool.complete
        for mask in pool.masks:
            assert (mask.pixels < 0.5).mean() >= 0.15

    def test_no_qualifying_crops_raises(self):
        with pytest.raises(DataError, match="no crops"):
            build_noise_mask_pool([sparse_sketch()], crop_size=16,
                                  density_threshold=0.15, pool_size=8)

    def test_short_pool_is_marked_incomplete(self, caplog):
        # One sketch with a single dense corner yields few qualifying crops.
        pixels = np.ones((64, 64), dtype=np.float32)
        pixels[:16, :16] = 0.0
        with caplog.at_level(logging.WARNING):
            pool = build_noise_mask_pool([SketchImage(pixels)], crop_size=16,
                                         density_threshold=0.9, pool_size=50)
        assert 0 < len(pool) < 50
        assert not pool.complete
        assert any("smaller than requested" in r.message for r in caplog.records)

    def test_same_seed_same_pool(self):
        kw = dict(crop_size=16, density_threshold=0.15, pool_size=4)
        a = build_noise_mask_pool([dense_sketch()], seed=9, **kw)
        b = build_noise_mask_pool([dense_sketch()], seed=9, **kw)
        assert a.provenance == b.provenance
        for ma, mb in zip(a.masks, b.masks):
            np.testing.assert_array_equal(ma.pixels, mb.pixels)

    def test_provenance_points_back_at_source(self):
        sketch = dense_sketch()
        pool = build_noise_mask_pool([sketch], crop_size=16,
                                     density_threshold=0.15, pool_size=4, seed=2)
        for mask, tag in zip(pool.masks, pool.provenance):
            idx, y, x = (int(v) for v in tag.split(":"))
            assert idx == 0
            np.testing.assert_array_equal(
                mask.pixels, sketch.pixels[y:y + 16, x:x + 16])


class TestPoolPersistence:
    def test_round_trip(self, tmp_path):
        pool = build_noise_mask_pool([dense_sketch()], crop_size=16,
                                     density_threshold=0.15, pool_size=4, seed=3)
        path = tmp_path / "pool.npz"
        pool.save(path)
        loaded = NoiseMaskPool.load(path)
        assert loaded.provenance == pool.provenance
        assert loaded.seed == pool.seed
        assert loaded.crop_size == pool.crop_size
        assert loaded.complete == pool.complete
        for ma, mb in zip(loaded.masks, pool.masks):
            np.testing.assert_array_equal(ma.pixels, mb.pixels)

    def test_empty_pool_round_trip(self, tmp_path):
        path = tmp_path / "pool.npz"
        NoiseMaskPool.empty(crop_size=16).save(path)
        loaded = NoiseMaskPool.load(path)
        assert len(loaded) == 0 and not loaded.complete

    def test_unknown_format_version_rejected(self, tmp_path, monkeypatch):
        import sketch2photo.data.noise as noise_module
        pool = NoiseMaskPool.empty(crop_size=16)
        path = tmp_path / "pool.npz"
        monkeypatch.setattr(noise_module, "POOL_FORMAT_VERSION", 99)
        pool.save(path)
        monkeypatch.undo()
        with pytest.raises(UnsupportedVersionError, match="99"):
            NoiseMaskPool.load(path)


class TestComposition:
    def test_complex_min_blends(self):
        base = SketchImage(np.full((8, 8), 0.8, dtype=np.float32))
        mask = SketchImage(np.full((4, 4), 0.2, dtype=np.float32))
        out = compose_complex(base, mask, (2, 2))
        assert out.pixels[2:6, 2:6].max() == np.float32(0.2)
        assert out.pixels[0, 0] == np.float32(0.8)

    def test_complex_out_of_bounds_raises(self):
        base = SketchImage(np.ones((8, 8), dtype=np.float32))
        mask = SketchImage(np.zeros((4, 4), dtype=np.float32))
        with pytest.raises(ValueError, match="placement"):
            compose_complex(base, mask, (6, 6))

    def test_distractive_copies_donor_patch(self):
        base = SketchImage(np.ones((16, 16), dtype=np.float32))
        donor_pixels = np.ones((16, 16), dtype=np.float32)
        donor_pixels[4:8, 4:8] = 0.0
        donor = SketchImage(donor_pixels)
        out = compose_distractive(base, donor, src=(4, 4), dst=(10, 10),
                                  patch_size=4)
        assert out.pixels[10:14, 10:14].max() == 0.0
        assert out.pixels[:10, :].min() == 1.0

    @given(st.integers(0, 2**32 - 1))
    def test_composition_never_lightens(self, seed):
        """Stamping ink onto a sketch can only darken pixels, everywhere."""
        rng = np.random.default_rng(seed)
        base = SketchImage(rng.random((12, 12), dtype=np.float32))
        mask = SketchImage(rng.random((5, 5), dtype=np.float32))
        y, x = int(rng.integers(0, 8)), int(rng.integers(0, 8))
        out = compose_complex(base, mask, (y, x))
        assert (out.pixels <= base.pixels + 1e-7).all()
        region = out.pixels[y:y + 5, x:x + 5]
        np.testing.assert_array_equal(
            region, np.minimum(base.pixels[y:y + 5, x:x + 5], mask.pixels))
        untouched = out.pixels.copy()
        untouched[y:y + 5, x:x + 5] = base.pixels[y:y + 5, x:x + 5]
        np.testing.assert_array_equal(untouched, base.pixels)


class TestSampling:
    def setup_method(self):
        self.sketch = dense_sketch(seed=1)
        self.pool = build_noise_mask_pool([dense_sketch(seed=2)], crop_size=16,
                                          density_threshold=0.15, pool_size=8,
                                          seed=0)
        self.donors = [dense_sketch(seed=3)]

    def test_tag_frequencies_roughly_match_probabilities(self):
        rng = np.random.default_rng(42)
        tags = [sample_noise_sketch(self.sketch, self.pool, self.donors,
                                    p_complex=0.2, p_distractive=0.3,
                                    patch_size=24, rng=rng)[1]
                for _ in range(2000)]
        freq = {tag: tags.count(tag) / len(tags)
                for tag in (TAG_COMPLEX, TAG_DISTRACTIVE, TAG_CLEAN)}
        assert abs(freq[TAG_COMPLEX] - 0.2) < 0.04
        assert abs(freq[TAG_DISTRACTIVE] - 0.3) < 0.04
        assert abs(freq[TAG_CLEAN] - 0.5) < 0.04

    def test_same_seed_gives_identical_bytes(self):
        results = []
        for _ in range(2):
            rng = np.random.default_rng(123)
            composed, tag = sample_noise_sketch(self.sketch, self.pool,
                                                self.donors, patch_size=24,
                                                rng=rng)
            results.append((composed.pixels.tobytes(), tag))
        assert results[0] == results[1]

    def test_clean_tag_returns_original_object_untouched(self):
        rng = np.random.default_rng(0)
        composed, tag = sample_noise_sketch(self.sketch, self.pool, self.donors,
                                            p_complex=0.0, p_distractive=0.0,
                                            rng=rng)
        assert tag == TAG_CLEAN
        np.testing.assert_array_equal(composed.pixels, self.sketch.pixels)

    def test_empty_pool_falls_back_to_clean(self, caplog):
        empty = NoiseMaskPool.empty(crop_size=16)
        rng = np.random.default_rng(0)
        with caplog.at_level(logging.WARNING):
            _, tag = sample_noise_sketch(self.sketch, empty, self.donors,
                                         p_complex=1.0, p_distractive=0.0,
                                         rng=rng)
        assert tag == TAG_CLEAN
        assert any("pool is empty" in r.message for r in caplog.records)

    def test_no_donors_falls_back_to_clean(self, caplog):
        rng = np.random.default_rng(0)
        with caplog.at_level(logging.WARNING):
            _, tag = sample_noise_sketch(self.sketch, self.pool, [],
                                         p_complex=0.0, p_distractive=1.0,
                                         rng=rng)
        assert tag == TAG_CLEAN
        assert any("donor list is empty" in r.message for r in caplog.records)

    def test_bad_probabilities_raise(self):
        with pytest.raises(ValueError):
            sample_noise_sketch(self.sketch, self.pool, self.donors,
                                p_complex=0.7, p_distractive=0.7)
