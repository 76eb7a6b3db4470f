import random
import struct

import pytest
from hypothesis import given
from hypothesis import strategies as st

from modyangian import cache
from modyangian.rtt import close_ideal

from conftest import basis


def test_pack_round_trip():
    for g in [(1, 1, 1), (3, 2, 7), (12, 11, 300)]:
        assert cache.unpack_gen(cache.pack_gen(*g)) == g


def test_round_trip_gives_identical_normal_forms(qb335):
    qb2 = cache.loads(cache.dumps(qb335))
    assert qb2.rules == qb335.rules
    assert qb2.dimensions() == qb335.dimensions()
    assert qb2.complete_degree == qb335.complete_degree
    rng = random.Random(0)
    t = qb335.table
    for _ in range(100):
        x = {}
        for _ in range(3):
            rs = [rng.randint(1, 2) for _ in range(rng.randint(1, 3))]
            if sum(rs) > qb335.D:
                rs = rs[:2]
            w = tuple(t.code(rng.randint(1, 3), rng.randint(1, 3), r) for r in rs)
            x[w] = rng.randrange(1, 3)
        assert qb2.normal_form(x) == qb335.normal_form(x)


def test_output_is_deterministic():
    a = close_ideal(None, 3, 5, 3)
    b = close_ideal(None, 3, 5, 3)
    assert cache.dumps(a) == cache.dumps(b)


def test_header_fields(qb335, tmp_path):
    path = cache.cache_path(str(tmp_path), 3, 3, 5)
    cache.save(qb335, path)
    h = cache.peek_header(path)
    assert (h.version, h.N, h.p, h.D, h.order_id) == (1, 3, 3, 5, "loop-filt-lex/v1")
    assert h.rows == len(qb335.rules)
    assert path.endswith("basis-N3-p3-D5.bin")
    assert not (tmp_path / "basis-N3-p3-D5.bin.part").exists()


def test_corruption_is_detected(qb335):
    data = bytearray(cache.dumps(qb335))
    flipped = bytearray(data)
    flipped[-3] ^= 0x01
    with pytest.raises(cache.CacheError, match="checksum"):
        cache.loads(bytes(flipped))
    with pytest.raises(cache.CacheError, match="magic"):
        cache.loads(b"XXXX" + bytes(data[4:]))
    with pytest.raises(cache.CacheError):
        cache.loads(bytes(data[:20]))
    bad_version = bytearray(data)
    struct.pack_into("<H", bad_version, 4, 99)
    with pytest.raises(cache.CacheError, match="version"):
        cache.loads(bytes(bad_version))


@given(st.binary(max_size=64))
def test_garbage_never_loads(blob):
    with pytest.raises(cache.CacheError):
        cache.loads(blob)


def test_larger_basis_round_trip():
    qb = basis(4, 3, 5)
    assert cache.dumps(cache.loads(cache.dumps(qb))) == cache.dumps(qb)
