"""
Binary cache of subordinator ensembles and noise fields.

Each array lives in an envelope file:

    b'SSIMENV1' | u64 LE header length | ujson header (sorted keys) | float64 LE payload

and is indexed by a CacheEntry row keyed on the hash of its descriptor
(kind, seed, stream key, spec, grid, n_paths, plus the synthesis method for
ensembles and the block size for noise fields). Entries are never modified
after they are written.
"""

import os
import struct
import hashlib
import logging

import numpy as np
import ujson

from stablesim.errors import CacheError
from stablesim.runner.guards import safe_commit
from stablesim.sampling.stable import DEFAULT_BLOCK_ROWS

logger = logging.getLogger(__name__)

MAGIC = b'SSIMENV1'
_LENGTH = struct.Struct('<Q')


def write_envelope(path, array, metadata=None):
    array = np.ascontiguousarray(array, dtype='<f8')
    header = ujson.dumps({'shape': list(array.shape), 'dtype': '<f8', 'metadata': metadata or {}},
                         sort_keys=True).encode('utf-8')
    tmp_path = f"{path}.tmp"
    with open(tmp_path, 'wb') as handle:
        handle.write(MAGIC)
        handle.write(_LENGTH.pack(len(header)))
        handle.write(header)
        handle.write(array.tobytes(order='C'))
    os.replace(tmp_path, path)
    return os.path.getsize(path)


def read_envelope(path):
    """(array, metadata) from an envelope file"""
    try:
        with open(path, 'rb') as handle:
            blob = handle.read()
    except OSError as e:
        raise CacheError(f"cannot read cache file {path}: {e}") from e

    if blob[:len(MAGIC)] != MAGIC:
        raise CacheError(f"{path} is not a cache envelope")
    offset = len(MAGIC)
    if len(blob) < offset + _LENGTH.size:
        raise CacheError(f"{path} is truncated")
    (header_length,) = _LENGTH.unpack_from(blob, offset)
    offset += _LENGTH.size
    try:
        header = ujson.loads(blob[offset:offset + header_length].decode('utf-8'))
    except (ValueError, UnicodeDecodeError) as e:
        raise CacheError(f"{path} has an unreadable header: {e}") from e
    offset += header_length

    if header.get('dtype') != '<f8':
        raise CacheError(f"{path} holds dtype {header.get('dtype')}, expected <f8")
    shape = tuple(header['shape'])
    expected = int(np.prod(shape)) * 8
    payload = blob[offset:]
    if len(payload) != expected:
        raise CacheError(f"{path} payload has {len(payload)} bytes, expected {expected}")
    array = np.frombuffer(payload, dtype='<f8').reshape(shape).astype(float)
    return array, header.get('metadata', {})


def descriptor_hash(descriptor):
    return hashlib.sha256(ujson.dumps(descriptor, sort_keys=True).encode('utf-8')).hexdigest()


class EnsembleCache:
    """Envelope files under cache_dir, indexed by CacheEntry rows.

    Needs an application context; hits and misses are counted per instance.
    """

    def __init__(self, cache_dir):
        self.cache_dir = cache_dir
        self.hits = 0
        self.misses = 0
        os.makedirs(cache_dir, exist_ok=True)

    def _path(self, key_hash):
        return os.path.join(self.cache_dir, f"{key_hash}.ssim")

    def get_or_create(self, kind, descriptor, builder):
        """Array for `descriptor`, loaded from the cache or built and stored.

        builder() returns (array, metadata).
        """
        from stablesim import db
        from stablesim.models import CacheEntry

        key_hash = descriptor_hash({'kind': kind, **descriptor})
        entry = CacheEntry.query.filter_by(key_hash=key_hash).first()
        if entry is not None and os.path.exists(entry.file_path):
            try:
                array, metadata = read_envelope(entry.file_path)
            except CacheError as e:
                logger.warning(f"cache entry {key_hash[:12]} unreadable, rebuilding: {e}")
            else:
                entry.record_hit()
                safe_commit()
                self.hits += 1
                logger.info(f"cache hit: {kind} {key_hash[:12]} ({entry.hit_count} hits)")
                return array, metadata

        self.misses += 1
        logger.info(f"cache miss: {kind} {key_hash[:12]}, generating")
        array, metadata = builder()
        file_path = self._path(key_hash)
        n_bytes = write_envelope(file_path, array, metadata)

        if entry is None:
            entry = CacheEntry(key_hash=key_hash, kind=kind)
            db.session.add(entry)
        entry.seed = str(descriptor.get('seed', ''))
        entry.alpha = descriptor.get('alpha')
        entry.n_paths = int(descriptor.get('n_paths', array.shape[0]))
        entry.grid = ujson.dumps(descriptor.get('grid', {}), sort_keys=True)
        entry.file_path = file_path
        entry.n_bytes = n_bytes
        safe_commit()
        return array, metadata

    def ensemble(self, spec, grid, n_paths, rng, dense_threshold=64):
        from stablesim.subordinators.ensemble import SubordinatorEnsemble, generate_ensemble, synthesis_method

        descriptor = {
            'seed': str(rng.seed),
            'stream': [rng.stream_id, *rng.key],
            'spec': spec.describe(),
            'grid': grid.describe(),
            'n_paths': int(n_paths),
            'method': synthesis_method(spec, grid, dense_threshold),
            'dense_threshold': int(dense_threshold),
        }

        def build():
            ensemble = generate_ensemble(spec, grid, n_paths, rng, dense_threshold=dense_threshold)
            return ensemble.paths, {'method': ensemble.method}

        paths, metadata = self.get_or_create('ensemble', descriptor, build)
        return SubordinatorEnsemble(spec, grid, paths, rng.seed, metadata.get('method', ''))

    def field_source(self, grid, n_paths, spec, rng, **kwargs):
        """Callable r -> StableNoiseField serving replicate fields through the cache"""
        from stablesim.sampling.stable import StableNoiseField, sample_noise_field

        def source(r):
            stream = rng.substream(r)
            descriptor = {
                'seed': str(stream.seed),
                'stream': [stream.stream_id, *stream.key],
                'alpha': float(spec.alpha),
                'grid': grid.describe(),
                'n_paths': int(n_paths),
                'block_rows': int(kwargs.get('block_rows', DEFAULT_BLOCK_ROWS)),
            }

            def build():
                field = sample_noise_field(grid, n_paths, spec, stream, **kwargs)
                return field.values, field.header()

            values, _ = self.get_or_create('noise_field', descriptor, build)
            values.setflags(write=False)
            return StableNoiseField(values, spec.alpha, stream.seed,
                                    (stream.stream_id,) + stream.key, grid, int(n_paths))
        return source
