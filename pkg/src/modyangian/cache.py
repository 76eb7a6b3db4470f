"""Binary persistence for QuotientBasis rewriting systems.

Layout (little endian), documented in docs/cache-format.md:

    magic     4 bytes  b"MYQB"
    version   u16
    N         u16
    p         u32
    D         u16
    lookahead u16
    order id  u16 length + ASCII bytes
    rows      u32
    checksum  32 bytes, SHA-256 of the row payload
    payload   rows, each: u32 term count, then per term
              u16 word length, word length * u32 packed (i, j, r), u32 scalar

Each row stores one rule as lead - tail; the first term is the lead with
coefficient 1.  Rows are sorted by the word order of their leads and tail
terms are sorted in decreasing word order, so equal inputs give equal bytes.
"""

from __future__ import annotations

import hashlib
import io
import os
import struct
from dataclasses import dataclass
from typing import BinaryIO, List, Tuple

from .rtt import ORDER_ID, AlgElem, QuotientBasis, Word

MAGIC = b"MYQB"
VERSION = 1


class CacheError(ValueError):
    pass


@dataclass
class CacheHeader:
    version: int
    N: int
    p: int
    D: int
    lookahead: int
    order_id: str
    rows: int
    checksum: bytes


def pack_gen(i: int, j: int, r: int) -> int:
    return (i << 24) | (j << 16) | r


def unpack_gen(x: int) -> Tuple[int, int, int]:
    return x >> 24, (x >> 16) & 0xFF, x & 0xFFFF


def _rows(qb: QuotientBasis) -> List[List[Tuple[Word, int]]]:
    key = qb.table.key
    p = qb.p
    rows = []
    for lead in sorted(qb.rules, key=key):
        tail = qb.rules[lead]
        terms = [(lead, 1)] + [(w, (-c) % p) for w, c in sorted(tail.items(), key=lambda t: key(t[0]),
                                                                 reverse=True)]
        rows.append(terms)
    return rows


def encode_payload(qb: QuotientBasis) -> Tuple[bytes, int]:
    t = qb.table
    out = bytearray()
    rows = _rows(qb)
    for terms in rows:
        out += struct.pack("<I", len(terms))
        for w, c in terms:
            out += struct.pack("<H", len(w))
            for g in w:
                out += struct.pack("<I", pack_gen(*t.decode(g)))
            out += struct.pack("<I", c)
    return bytes(out), len(rows)


def dumps(qb: QuotientBasis) -> bytes:
    payload, nrows = encode_payload(qb)
    oid = ORDER_ID.encode("ascii")
    head = MAGIC + struct.pack("<HHIHH", VERSION, qb.N, qb.p, qb.D, qb.lookahead)
    head += struct.pack("<H", len(oid)) + oid
    head += struct.pack("<I", nrows) + hashlib.sha256(payload).digest()
    return head + payload


def _read(f: BinaryIO, n: int) -> bytes:
    b = f.read(n)
    if len(b) != n:
        raise CacheError("truncated cache file")
    return b


def read_header(f: BinaryIO) -> CacheHeader:
    if _read(f, 4) != MAGIC:
        raise CacheError("not a basis cache (bad magic)")
    version, N, p, D, look = struct.unpack("<HHIHH", _read(f, 12))
    (olen,) = struct.unpack("<H", _read(f, 2))
    oid = _read(f, olen).decode("ascii", errors="replace")
    (rows,) = struct.unpack("<I", _read(f, 4))
    checksum = _read(f, 32)
    return CacheHeader(version, N, p, D, look, oid, rows, checksum)


def loads(data: bytes) -> QuotientBasis:
    f = io.BytesIO(data)
    h = read_header(f)
    if h.version != VERSION:
        raise CacheError(f"unsupported cache version {h.version}")
    if h.order_id != ORDER_ID:
        raise CacheError(f"cache word order {h.order_id!r} differs from {ORDER_ID!r}")
    payload = f.read()
    if hashlib.sha256(payload).digest() != h.checksum:
        raise CacheError("checksum mismatch: cache file is corrupted")
    qb = QuotientBasis(h.N, h.p, h.D, h.lookahead)
    t = qb.table
    pos = 0

    def take(fmt):
        nonlocal pos
        size = struct.calcsize(fmt)
        if pos + size > len(payload):
            raise CacheError("truncated row payload")
        vals = struct.unpack_from(fmt, payload, pos)
        pos += size
        return vals

    for _ in range(h.rows):
        (nterms,) = take("<I")
        terms: List[Tuple[Word, int]] = []
        for _ in range(nterms):
            (L,) = take("<H")
            codes = take(f"<{L}I") if L else ()
            w = tuple(t.code(*unpack_gen(x)) for x in codes)
            (c,) = take("<I")
            terms.append((w, c))
        (lead, one), rest = terms[0], terms[1:]
        if one != 1:
            raise CacheError("row lead is not monic")
        tail: AlgElem = {w: (-c) % h.p for w, c in rest}
        qb._install(lead, tail)
    if pos != len(payload):
        raise CacheError("trailing bytes after the last row")
    dims, expected = qb.dimensions(), qb.expected_dimensions()
    complete = 0
    for d in range(1, qb.D + 1):
        if dims[d] != expected[d]:
            break
        complete = d
    qb.complete_degree = complete
    qb.stats = {"dimensions": dims, "expected_dimensions": expected, "loaded": True}
    return qb


def cache_path(cache_dir: str, N: int, p: int, D: int) -> str:
    return os.path.join(cache_dir, f"basis-N{N}-p{p}-D{D}.bin")


def save(qb: QuotientBasis, path: str) -> None:
    """Write atomically: a partial file never survives a failure."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    tmp = path + ".part"
    try:
        with open(tmp, "wb") as f:
            f.write(dumps(qb))
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def load(path: str) -> QuotientBasis:
    with open(path, "rb") as f:
        return loads(f.read())


def peek_header(path: str) -> CacheHeader:
    with open(path, "rb") as f:
        return read_header(f)
