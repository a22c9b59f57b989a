"""Immutable single-segment inverted index: on-disk format, writer, reader.

A segment is five files in one directory:

- ``manifest.json``  generation id, collection statistics, file checksums
- ``terms.bin``      sorted term dictionary with postings block locations
- ``postings.bin``   varint-encoded postings blocks
- ``doclens.bin``    token count per doc ordinal
- ``docmap.bin``     doc ordinal -> external document id

All fixed-width integers are little-endian. Statistics are either
PARTITION-scoped (computed from the docs in this segment) or GLOBAL
(baked in at build time from the full pre-partition corpus so that
partitioned scoring is bit-compatible with unpartitioned scoring; this
includes per-term document/collection frequencies in terms.bin).
"""

from __future__ import annotations

import heapq
import json
import struct
import zlib
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .analysis import analyze
from .codec import Posting, decode_postings_block, encode_postings
from .directory import Directory
from .errors import CorruptSegmentError, DirectoryError, SegmentFormatError
from .scoring import ScoredDoc, bm25_score

TERMS_MAGIC = b"ANL1TERM"
POSTINGS_MAGIC = b"ANL1POST"
DOCLENS_MAGIC = b"ANL1DLEN"
DOCMAP_MAGIC = b"ANL1DMAP"

MANIFEST_NAME = "manifest.json"
SEGMENT_FILES = ("doclens.bin", "docmap.bin", "postings.bin", "terms.bin")

SCOPE_PARTITION = "PARTITION"
SCOPE_GLOBAL = "GLOBAL"

_TERM_ENTRY_TAIL = struct.Struct("<IQQI")  # df, cf, postings_offset, postings_length
_U16 = struct.Struct("<H")
_U32 = struct.Struct("<I")


@dataclass(frozen=True)
class TermEntry:
    term: str
    document_frequency: int
    collection_frequency: int
    postings_offset: int
    postings_length: int


@dataclass(frozen=True)
class FileEntry:
    name: str
    size: int
    crc32: int


@dataclass(frozen=True)
class GlobalStats:
    """Full-corpus statistics baked into every partition of a generation."""

    doc_count: int
    total_term_count: int
    avg_doc_length: float
    term_stats: dict[str, tuple[int, int]]  # term -> (df, cf)


@dataclass(frozen=True)
class SegmentManifest:
    generation_id: str
    doc_count: int
    total_term_count: int
    avg_doc_length: float
    stats_scope: str
    files: tuple[FileEntry, ...]

    @property
    def total_size(self) -> int:
        return sum(f.size for f in self.files)

    def to_json_bytes(self) -> bytes:
        doc = {
            "generation_id": self.generation_id,
            "doc_count": self.doc_count,
            "total_term_count": self.total_term_count,
            "avg_doc_length": self.avg_doc_length,
            "stats_scope": self.stats_scope,
            "files": [
                {"name": f.name, "size": f.size, "crc32": f.crc32} for f in self.files
            ],
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")

    @classmethod
    def from_json_bytes(cls, data: bytes) -> SegmentManifest:
        try:
            doc = json.loads(data)
            files = tuple(
                FileEntry(f["name"], int(f["size"]), int(f["crc32"]))
                for f in doc["files"]
            )
            return cls(
                generation_id=doc["generation_id"],
                doc_count=int(doc["doc_count"]),
                total_term_count=int(doc["total_term_count"]),
                avg_doc_length=float(doc["avg_doc_length"]),
                stats_scope=doc["stats_scope"],
                files=files,
            )
        except (KeyError, TypeError, ValueError) as e:
            raise CorruptSegmentError(f"malformed {MANIFEST_NAME}: {e}") from e


def compute_global_stats(corpus: Iterable[tuple[str, str]]) -> GlobalStats:
    """One full pass over the corpus: scalar statistics plus per-term df/cf."""
    doc_count = 0
    total_terms = 0
    term_stats: dict[str, list[int]] = {}
    for _, text in corpus:
        doc_count += 1
        counts = Counter(analyze(text))
        total_terms += sum(counts.values())
        for term, tf in counts.items():
            entry = term_stats.setdefault(term, [0, 0])
            entry[0] += 1
            entry[1] += tf
    avg = total_terms / doc_count if doc_count else 0.0
    return GlobalStats(
        doc_count=doc_count,
        total_term_count=total_terms,
        avg_doc_length=avg,
        term_stats={t: (df, cf) for t, (df, cf) in term_stats.items()},
    )


def write_segment(
    corpus: Iterable[tuple[str, str]],
    out_dir: str | Path,
    generation_id: str,
    stats_override: GlobalStats | None = None,
) -> SegmentManifest:
    """Build one segment from ``corpus`` (external_doc_id, text) pairs.

    Doc ordinals are assigned in corpus order starting at 0. With
    ``stats_override`` the manifest statistics and the dictionary's
    df/cf come from the override (stats_scope=GLOBAL); otherwise they
    are computed from this corpus (stats_scope=PARTITION). Identical
    input produces byte-identical files.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    doc_ids: list[str] = []
    doc_lens: list[int] = []
    seen: set[str] = set()
    postings: dict[str, list[Posting]] = {}
    local_cf: dict[str, int] = {}

    for external_id, text in corpus:
        if external_id in seen:
            raise SegmentFormatError(f"duplicate external_doc_id: {external_id!r}")
        if len(external_id.encode("utf-8")) > 0xFFFF:
            raise SegmentFormatError(f"external_doc_id too long: {external_id[:50]!r}...")
        seen.add(external_id)
        ordinal = len(doc_ids)
        doc_ids.append(external_id)
        counts = Counter(analyze(text))
        doc_lens.append(sum(counts.values()))
        for term, tf in counts.items():
            postings.setdefault(term, []).append((ordinal, tf))
            local_cf[term] = local_cf.get(term, 0) + tf

    if not doc_ids:
        raise SegmentFormatError("empty corpus: a segment needs at least one document")

    # postings.bin + terms.bin; terms sorted by UTF-8 byte string
    postings_buf = bytearray(POSTINGS_MAGIC)
    terms_buf = bytearray(TERMS_MAGIC)
    for term in sorted(postings, key=lambda t: t.encode("utf-8")):
        term_bytes = term.encode("utf-8")
        if len(term_bytes) > 0xFFFF:
            raise SegmentFormatError(f"term too long: {term[:50]!r}...")
        plist = postings[term]
        if stats_override is not None:
            try:
                df, cf = stats_override.term_stats[term]
            except KeyError:
                raise SegmentFormatError(
                    f"term {term!r} missing from global statistics override"
                ) from None
        else:
            df, cf = len(plist), local_cf[term]
        offset = len(postings_buf)
        block = encode_postings(plist)
        postings_buf += block
        terms_buf += _U16.pack(len(term_bytes))
        terms_buf += term_bytes
        terms_buf += _TERM_ENTRY_TAIL.pack(df, cf, offset, len(block))

    doclens_buf = bytearray(DOCLENS_MAGIC)
    for n in doc_lens:
        doclens_buf += _U32.pack(n)

    docmap_buf = bytearray(DOCMAP_MAGIC)
    for external_id in doc_ids:
        id_bytes = external_id.encode("utf-8")
        docmap_buf += _U16.pack(len(id_bytes))
        docmap_buf += id_bytes

    contents = {
        "terms.bin": bytes(terms_buf),
        "postings.bin": bytes(postings_buf),
        "doclens.bin": bytes(doclens_buf),
        "docmap.bin": bytes(docmap_buf),
    }
    file_entries = tuple(
        FileEntry(name, len(contents[name]), zlib.crc32(contents[name]))
        for name in SEGMENT_FILES
    )

    if stats_override is not None:
        manifest = SegmentManifest(
            generation_id=generation_id,
            doc_count=stats_override.doc_count,
            total_term_count=stats_override.total_term_count,
            avg_doc_length=stats_override.avg_doc_length,
            stats_scope=SCOPE_GLOBAL,
            files=file_entries,
        )
    else:
        total = sum(doc_lens)
        manifest = SegmentManifest(
            generation_id=generation_id,
            doc_count=len(doc_ids),
            total_term_count=total,
            avg_doc_length=total / len(doc_ids),
            stats_scope=SCOPE_PARTITION,
            files=file_entries,
        )

    for name, data in contents.items():
        (out / name).write_bytes(data)
    (out / MANIFEST_NAME).write_bytes(manifest.to_json_bytes())
    return manifest


class SegmentReader:
    """Read-only view of one segment, bound to one generation.

    Verifies manifest checksums against file contents at open time, then
    answers term lookups and top-k searches. Immutable after construction;
    safe for unlimited concurrent readers.
    """

    def __init__(self, directory: Directory):
        self._directory = directory
        try:
            manifest_bytes = directory.read_file(MANIFEST_NAME)
        except DirectoryError as e:
            raise CorruptSegmentError(f"cannot open segment: {e}") from e
        self.manifest = SegmentManifest.from_json_bytes(manifest_bytes)

        file_bytes: dict[str, bytes] = {}
        for entry in self.manifest.files:
            try:
                length = directory.file_length(entry.name)
            except DirectoryError as e:
                raise CorruptSegmentError(f"missing segment file {entry.name}: {e}") from e
            if length != entry.size:
                raise CorruptSegmentError(
                    f"size mismatch for {entry.name}: manifest says {entry.size}, found {length}"
                )
            data = directory.read_file(entry.name)
            if zlib.crc32(data) != entry.crc32:
                raise CorruptSegmentError(f"CRC mismatch for {entry.name}")
            file_bytes[entry.name] = data

        self._terms = _parse_terms(file_bytes["terms.bin"])
        self._doc_lens = _parse_doclens(file_bytes["doclens.bin"])
        self._doc_ids = _parse_docmap(file_bytes["docmap.bin"])
        if file_bytes["postings.bin"][:8] != POSTINGS_MAGIC:
            raise CorruptSegmentError("bad magic in postings.bin")

        if len(self._doc_lens) != len(self._doc_ids):
            raise CorruptSegmentError(
                f"doclens/docmap disagree: {len(self._doc_lens)} vs {len(self._doc_ids)}"
            )
        local = len(self._doc_ids)
        if self.manifest.stats_scope == SCOPE_PARTITION and local != self.manifest.doc_count:
            raise CorruptSegmentError(
                f"manifest doc_count {self.manifest.doc_count} != {local} docs on disk"
            )

    @property
    def generation_id(self) -> str:
        return self.manifest.generation_id

    @property
    def doc_count(self) -> int:
        """Scoring-scope document count (global when stats_scope=GLOBAL)."""
        return self.manifest.doc_count

    @property
    def local_doc_count(self) -> int:
        return len(self._doc_ids)

    def external_id(self, ordinal: int) -> str:
        return self._doc_ids[ordinal]

    def term_entry(self, term: str) -> TermEntry | None:
        return self._terms.get(term)

    def postings(self, entry: TermEntry) -> list[Posting]:
        inp = self._directory.open_input("postings.bin")
        try:
            inp.seek(entry.postings_offset)
            block = inp.read(entry.postings_length)
        finally:
            inp.close()
        return decode_postings_block(block)

    def search(self, query: str, k: int) -> list[ScoredDoc]:
        """Top-k by (score desc, external_doc_id asc); unknown terms contribute nothing."""
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        tokens = analyze(query)
        scores: dict[int, float] = {}
        if tokens:
            inp = self._directory.open_input("postings.bin")
            try:
                for token in tokens:
                    entry = self._terms.get(token)
                    if entry is None:
                        continue
                    inp.seek(entry.postings_offset)
                    block = inp.read(entry.postings_length)
                    for ordinal, tf in decode_postings_block(block):
                        scores[ordinal] = scores.get(ordinal, 0.0) + bm25_score(
                            tf,
                            entry.document_frequency,
                            self._doc_lens[ordinal],
                            self.manifest.doc_count,
                            self.manifest.avg_doc_length,
                        )
            finally:
                inp.close()
        if not scores:
            return []
        top = heapq.nsmallest(
            k, scores.items(), key=lambda item: (-item[1], self._doc_ids[item[0]])
        )
        return [ScoredDoc(self._doc_ids[ordinal], score) for ordinal, score in top]


def open_reader(directory: Directory) -> SegmentReader:
    return SegmentReader(directory)


def _parse_terms(data: bytes) -> dict[str, TermEntry]:
    if data[:8] != TERMS_MAGIC:
        raise CorruptSegmentError("bad magic in terms.bin")
    terms: dict[str, TermEntry] = {}
    pos = 8
    prev_bytes = b""
    while pos < len(data):
        if pos + 2 > len(data):
            raise CorruptSegmentError("truncated term entry in terms.bin")
        (term_len,) = _U16.unpack_from(data, pos)
        pos += 2
        end = pos + term_len + _TERM_ENTRY_TAIL.size
        if end > len(data):
            raise CorruptSegmentError("truncated term entry in terms.bin")
        term_bytes = data[pos : pos + term_len]
        pos += term_len
        df, cf, offset, length = _TERM_ENTRY_TAIL.unpack_from(data, pos)
        pos += _TERM_ENTRY_TAIL.size
        if term_bytes <= prev_bytes:
            raise CorruptSegmentError("terms.bin entries not strictly ascending")
        prev_bytes = term_bytes
        term = term_bytes.decode("utf-8")
        terms[term] = TermEntry(term, df, cf, offset, length)
    return terms


def _parse_doclens(data: bytes) -> list[int]:
    if data[:8] != DOCLENS_MAGIC:
        raise CorruptSegmentError("bad magic in doclens.bin")
    body = data[8:]
    if len(body) % 4:
        raise CorruptSegmentError("doclens.bin body not a multiple of 4 bytes")
    return [v[0] for v in _U32.iter_unpack(body)]


def _parse_docmap(data: bytes) -> list[str]:
    if data[:8] != DOCMAP_MAGIC:
        raise CorruptSegmentError("bad magic in docmap.bin")
    ids: list[str] = []
    pos = 8
    while pos < len(data):
        if pos + 2 > len(data):
            raise CorruptSegmentError("truncated id entry in docmap.bin")
        (id_len,) = _U16.unpack_from(data, pos)
        pos += 2
        if pos + id_len > len(data):
            raise CorruptSegmentError("truncated id entry in docmap.bin")
        ids.append(data[pos : pos + id_len].decode("utf-8"))
        pos += id_len
    return ids
