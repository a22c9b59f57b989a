"""BM25 ranking.

Parameters k1=0.9, b=0.4. The idf variant is ln(1 + (N - df + 0.5) /
(df + 0.5)), which is strictly positive even at df = N, so scores never
go negative and tie-breaking stays meaningful.
"""

import math
from dataclasses import dataclass

K1 = 0.9
B = 0.4


@dataclass(frozen=True, order=True)
class ScoredDoc:
    external_doc_id: str
    score: float


def bm25_score(
    tf: int,
    df: int,
    doc_len: int,
    doc_count: int,
    avg_doc_length: float,
    k1: float = K1,
    b: float = B,
) -> float:
    """Score one (term, document) pair."""
    idf = math.log(1.0 + (doc_count - df + 0.5) / (df + 0.5))
    norm = tf + k1 * (1.0 - b + b * doc_len / avg_doc_length)
    return idf * tf * (k1 + 1.0) / norm
