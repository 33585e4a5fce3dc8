"""Turn raw recipe dumps into CoNLL-U and labeled-sentence JSONL."""

__version__ = "0.1.0"
