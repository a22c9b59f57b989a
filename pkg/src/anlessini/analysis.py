"""Query/document analysis: the bag-of-words tokenizer.

Deliberately minimal so that an independent reimplementation is trivial:
lowercase, then split on maximal runs of non-alphanumeric characters.
No stemming, no stopword removal.
"""

import re

# \w minus underscore = alphanumerics (unicode-aware)
_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


def analyze(text: str) -> list[str]:
    """Tokenize ``text`` into lowercase alphanumeric tokens, in order."""
    return _TOKEN.findall(text.lower())
