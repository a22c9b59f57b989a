"""Shared test utilities: oracles and corpus generators.

The BM25 oracle here is deliberately independent of the package's index
machinery: it scans raw documents and evaluates the scoring formula
written out a second time, so agreement with the indexed search path is
evidence, not tautology.
"""

from __future__ import annotations

import json
import math
import random
from pathlib import Path

from anlessini.analysis import analyze

K1 = 0.9
B = 0.4


def oracle_scores(
    corpus: list[tuple[str, str]],
    query: str,
    k1: float = K1,
    b: float = B,
) -> dict[str, float]:
    """Linear-scan BM25 over raw text. No index structures involved."""
    docs = {doc_id: analyze(text) for doc_id, text in corpus}
    n = len(docs)
    total_tokens = sum(len(t) for t in docs.values())
    avgdl = total_tokens / n
    df: dict[str, int] = {}
    for tokens in docs.values():
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1

    scores: dict[str, float] = {}
    query_tokens = analyze(query)
    for doc_id, tokens in docs.items():
        s = 0.0
        matched = False
        for q in query_tokens:
            if q not in df:
                continue
            tf = tokens.count(q)
            if tf == 0:
                continue
            matched = True
            idf = math.log(1.0 + (n - df[q] + 0.5) / (df[q] + 0.5))
            s += idf * (tf * (k1 + 1.0)) / (
                tf + k1 * (1.0 - b + b * len(tokens) / avgdl)
            )
        if matched:
            scores[doc_id] = s
    return scores


def oracle_topk(corpus: list[tuple[str, str]], query: str, k: int) -> list[tuple[str, float]]:
    scores = oracle_scores(corpus, query)
    ranked = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:k]


_WORDS = None


def _vocabulary() -> list[str]:
    global _WORDS
    if _WORDS is None:
        rng = random.Random(0xC0FFEE)
        syllables = ["ra", "to", "mi", "ka", "ne", "lu", "so", "ve", "da", "pi"]
        _WORDS = [
            "".join(rng.choice(syllables) for _ in range(rng.randint(2, 4)))
            for _ in range(600)
        ]
    return _WORDS


def synth_corpus(n: int, seed: int = 7, min_len: int = 8, max_len: int = 40) -> list[tuple[str, str]]:
    """Deterministic synthetic passages with a skewed term distribution."""
    rng = random.Random(seed)
    words = _vocabulary()
    corpus = []
    for i in range(n):
        length = rng.randint(min_len, max_len)
        # zipf-flavored skew: low indexes picked far more often
        tokens = [words[min(int(rng.paretovariate(1.3)) % len(words), len(words) - 1)]
                  for _ in range(length)]
        # sprinkle an identifying rare token into some docs
        if i % 17 == 0:
            tokens.append(f"rare{i}")
        corpus.append((f"doc-{i:05d}", " ".join(tokens)))
    return corpus


def random_queries(corpus: list[tuple[str, str]], count: int, seed: int = 11) -> list[str]:
    """Queries drawn from corpus vocabulary (mostly) plus some misses."""
    rng = random.Random(seed)
    vocab = sorted({t for _, text in corpus for t in analyze(text)})
    queries = []
    for i in range(count):
        n_terms = rng.randint(1, 4)
        terms = [rng.choice(vocab) for _ in range(n_terms)]
        if i % 10 == 9:
            terms.append("zzzunseen")
        queries.append(" ".join(terms))
    return queries


def write_jsonl(path: Path, corpus: list[tuple[str, str]]) -> Path:
    with open(path, "w", encoding="utf-8") as f:
        for doc_id, text in corpus:
            f.write(json.dumps({"id": doc_id, "contents": text}, ensure_ascii=False) + "\n")
    return path


def write_tsv(path: Path, corpus: list[tuple[str, str]]) -> Path:
    with open(path, "w", encoding="utf-8") as f:
        for doc_id, text in corpus:
            f.write(f"{doc_id}\t{text}\n")
    return path
