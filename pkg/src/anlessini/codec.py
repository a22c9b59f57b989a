"""Postings codec: delta-gapped doc ordinals interleaved with term
frequencies, each written as an unsigned LEB128 varint.

The encoded block is self-delimiting only at pair granularity, so the
reader either knows the posting count up front (``decode_postings``) or
consumes the block to exhaustion (``decode_postings_block``).
"""

from .errors import CorruptSegmentError

Posting = tuple[int, int]  # (doc_ordinal, term_frequency)


def encode_varint(value: int) -> bytes:
    """Encode a nonnegative integer as an unsigned LEB128 varint."""
    if value < 0:
        raise ValueError(f"varint value must be nonnegative, got {value}")
    out = bytearray()
    while value >= 0x80:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    out.append(value)
    return bytes(out)


def decode_varint(data: bytes, pos: int) -> tuple[int, int]:
    """Decode one varint starting at ``pos``; returns (value, next_pos)."""
    result = 0
    shift = 0
    while True:
        if pos >= len(data):
            raise CorruptSegmentError("truncated varint in postings block")
        byte = data[pos]
        pos += 1
        result |= (byte & 0x7F) << shift
        if byte < 0x80:
            return result, pos
        shift += 7


def encode_postings(postings: list[Posting]) -> bytes:
    """Encode a strictly doc-ordinal-sorted postings list.

    The first pair stores the ordinal itself; subsequent pairs store the
    gap to the previous ordinal (>= 1 because ordinals strictly increase).
    """
    out = bytearray()
    prev: int | None = None
    for ordinal, tf in postings:
        if ordinal < 0:
            raise ValueError(f"doc_ordinal must be nonnegative, got {ordinal}")
        if prev is not None and ordinal <= prev:
            raise ValueError(f"postings not strictly increasing at ordinal {ordinal}")
        if tf < 1:
            raise ValueError(f"term_frequency must be >= 1, got {tf}")
        out += encode_varint(ordinal if prev is None else ordinal - prev)
        out += encode_varint(tf)
        prev = ordinal
    return bytes(out)


def decode_postings(data: bytes, document_frequency: int) -> list[Posting]:
    """Decode exactly ``document_frequency`` postings; reject trailing bytes."""
    postings, pos = _decode_pairs(data, limit=document_frequency)
    if pos != len(data):
        raise CorruptSegmentError(
            f"postings block has {len(data) - pos} trailing bytes after "
            f"{document_frequency} postings"
        )
    return postings


def decode_postings_block(data: bytes) -> list[Posting]:
    """Decode a postings block to exhaustion.

    Used by the reader when the dictionary's document_frequency is a
    global (cross-partition) count and therefore not the local posting
    count.
    """
    postings, _ = _decode_pairs(data, limit=None)
    return postings


def _decode_pairs(data: bytes, limit: int | None) -> tuple[list[Posting], int]:
    postings: list[Posting] = []
    pos = 0
    prev: int | None = None
    while (pos < len(data)) if limit is None else (len(postings) < limit):
        gap, pos = decode_varint(data, pos)
        tf, pos = decode_varint(data, pos)
        if prev is None:
            ordinal = gap
        else:
            if gap == 0:
                raise CorruptSegmentError("zero gap between postings (non-increasing ordinals)")
            ordinal = prev + gap
        postings.append((ordinal, tf))
        prev = ordinal
    return postings, pos
