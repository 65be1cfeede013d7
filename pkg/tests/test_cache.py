import numpy as np
import pytest

from stablesim.errors import CacheError
from stablesim.grids import SpatialGrid, TimeGrid
from stablesim.models import CacheEntry
from stablesim.runner.cache import MAGIC, EnsembleCache, descriptor_hash, read_envelope, write_envelope
from stablesim.sampling import SeededRng, sample_noise_field
from stablesim.subordinators import SubordinatorSpec, generate_ensemble


class TestEnvelope:
    def test_write_then_read(self, tmp_path):
        path = str(tmp_path / 'a.ssim')
        array = np.arange(12.0).reshape(3, 4)
        size = write_envelope(path, array, {'method': 'cholesky'})
        loaded, metadata = read_envelope(path)
        np.testing.assert_array_equal(loaded, array)
        assert metadata == {'method': 'cholesky'}
        assert size > array.nbytes
        with open(path, 'rb') as handle:
            assert handle.read(len(MAGIC)) == MAGIC

    def test_no_temporary_file_left(self, tmp_path):
        write_envelope(str(tmp_path / 'a.ssim'), np.zeros(3))
        assert [p.name for p in tmp_path.iterdir()] == ['a.ssim']

    def test_bad_magic(self, tmp_path):
        path = tmp_path / 'bad.ssim'
        path.write_bytes(b'NOTANENV' + b'\x00' * 32)
        with pytest.raises(CacheError, match='not a cache envelope'):
            read_envelope(str(path))

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / 'a.ssim'
        write_envelope(str(path), np.ones((4, 4)))
        blob = path.read_bytes()
        path.write_bytes(blob[:-8])
        with pytest.raises(CacheError, match='payload'):
            read_envelope(str(path))

    def test_truncated_header(self, tmp_path):
        path = tmp_path / 'a.ssim'
        write_envelope(str(path), np.ones(2))
        path.write_bytes(path.read_bytes()[:len(MAGIC) + 4])
        with pytest.raises(CacheError, match='truncated'):
            read_envelope(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(CacheError):
            read_envelope(str(tmp_path / 'missing.ssim'))

    def test_descriptor_hash_ignores_key_order(self):
        assert descriptor_hash({'a': 1, 'b': [2, 3]}) == descriptor_hash({'b': [2, 3], 'a': 1})


class TestEnsembleCache:
    spec = SubordinatorSpec.fbm(0.4)
    grid = TimeGrid(2.0, 32)

    def test_second_request_is_a_hit(self, app, tmp_path):
        cache = EnsembleCache(app.config['CACHE_DIR'])
        rng = SeededRng(5).stream(0)
        first = cache.ensemble(self.spec, self.grid, 20, rng)
        second = cache.ensemble(self.spec, self.grid, 20, rng)
        assert (cache.misses, cache.hits) == (1, 1)
        np.testing.assert_array_equal(first.paths, second.paths)
        assert second.method == first.method == 'cholesky'

        entry = CacheEntry.query.one()
        assert entry.kind == 'ensemble'
        assert entry.hit_count == 1
        assert entry.seed == '5'

    def test_cached_ensemble_equals_generated(self, app):
        cache = EnsembleCache(app.config['CACHE_DIR'])
        rng = SeededRng(6).stream(0)
        cached = cache.ensemble(self.spec, self.grid, 10, rng)
        direct = generate_ensemble(self.spec, self.grid, 10, rng)
        np.testing.assert_array_equal(cached.paths, direct.paths)

    def test_different_streams_are_different_entries(self, app):
        cache = EnsembleCache(app.config['CACHE_DIR'])
        cache.ensemble(self.spec, self.grid, 10, SeededRng(6).stream(0))
        cache.ensemble(self.spec, self.grid, 10, SeededRng(6).stream(1))
        assert cache.misses == 2
        assert CacheEntry.query.count() == 2

    def test_synthesis_threshold_is_part_of_the_key(self, app):
        cache = EnsembleCache(app.config['CACHE_DIR'])
        rng = SeededRng(9).stream(0)
        dense = cache.ensemble(self.spec, self.grid, 10, rng, dense_threshold=64)
        embedded = cache.ensemble(self.spec, self.grid, 10, rng, dense_threshold=16)
        assert cache.misses == 2
        assert (dense.method, embedded.method) == ('cholesky', 'circulant')
        direct = generate_ensemble(self.spec, self.grid, 10, rng, dense_threshold=16)
        np.testing.assert_array_equal(embedded.paths, direct.paths)

    def test_block_size_is_part_of_the_field_key(self, app, spec):
        cache = EnsembleCache(app.config['CACHE_DIR'])
        grid = SpatialGrid.from_half_width(2.0, 8)
        rng = SeededRng(10).stream(4)
        cache.field_source(grid, 12, spec, rng, block_rows=4)(0)
        served = cache.field_source(grid, 12, spec, rng, block_rows=6)(0)
        assert cache.misses == 2
        direct = sample_noise_field(grid, 12, spec, rng.substream(0), block_rows=6)
        np.testing.assert_array_equal(served.values, direct.values)

    def test_corrupt_file_is_rebuilt(self, app):
        cache = EnsembleCache(app.config['CACHE_DIR'])
        rng = SeededRng(7).stream(0)
        original = cache.ensemble(self.spec, self.grid, 10, rng)
        entry = CacheEntry.query.one()
        with open(entry.file_path, 'wb') as handle:
            handle.write(b'garbage')
        rebuilt = cache.ensemble(self.spec, self.grid, 10, rng)
        assert cache.misses == 2
        np.testing.assert_array_equal(original.paths, rebuilt.paths)
        assert CacheEntry.query.count() == 1

    def test_field_source_serves_the_replicate_fields(self, app, spec):
        cache = EnsembleCache(app.config['CACHE_DIR'])
        grid = SpatialGrid.from_half_width(2.0, 8)
        rng = SeededRng(8).stream(4)
        source = cache.field_source(grid, 12, spec, rng)
        served = source(3)
        again = source(3)
        direct = sample_noise_field(grid, 12, spec, rng.substream(3))
        np.testing.assert_array_equal(served.values, direct.values)
        np.testing.assert_array_equal(again.values, direct.values)
        assert (cache.misses, cache.hits) == (1, 1)
        assert served.key == direct.key
