"""Run a dependency-parsing pipeline over recipe text and emit CoNLL-U.

The heavy lifting is done by a spaCy German model; this module only
normalizes the text (URL sentinel), maps the parsed tokens onto the
ten-column CoNLL-U layout the extraction toolkit reads, and keeps
sentence ids stable (``<recipe-id>:<sentence-index>``).

The model is an optional dependency.  Everything except
:func:`load_pipeline` also works with any object that quacks like a
spaCy pipeline, which is how the format logic is tested without the
model installed.
"""

from __future__ import annotations

import logging
import re
from typing import Iterable, Optional

log = logging.getLogger(__name__)

DEFAULT_MODEL = "de_core_news_sm"

URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
URL_TOKEN = "$URL"


class ModelMissing(RuntimeError):
    """The parsing model is not installed."""


def load_pipeline(model: str = DEFAULT_MODEL):
    """Load the spaCy pipeline, with install hints when unavailable."""
    try:
        import spacy
    except ImportError as exc:
        raise ModelMissing(
            "spaCy is not installed; run: pip install 'textflow-adapter[parse]'"
            f" && python -m spacy download {model}"
        ) from exc
    try:
        return spacy.load(model)
    except OSError as exc:
        raise ModelMissing(
            f"model {model!r} is not installed; "
            f"run: python -m spacy download {model}"
        ) from exc


def replace_urls(text: str) -> str:
    """Collapse URLs to the sentinel token before parsing."""
    return URL_RE.sub(URL_TOKEN, text)


def _clean(cell: str) -> str:
    cell = (cell or "").replace("\t", " ").replace("\n", " ").strip()
    return cell if cell else "_"


def sentence_to_lines(sent, sent_id: str) -> Optional[str]:
    """One parsed sentence as a CoNLL-U block, or None if it is empty."""
    tokens = [t for t in sent if not t.is_space]
    if not tokens:
        return None
    ids = {tok.i: k for k, tok in enumerate(tokens, start=1)}
    text = " ".join(tok.text for tok in tokens)
    lines = [f"# sent_id = {sent_id}", f"# text = {_clean(text)}"]
    for tok in tokens:
        dep = (tok.dep_ or "dep").strip()
        if tok.head.i == tok.i or tok.head.i not in ids or dep.upper() == "ROOT":
            head, dep = 0, "root"
        else:
            head = ids[tok.head.i]
        lines.append(
            "\t".join(
                (
                    str(ids[tok.i]),
                    _clean(tok.text),
                    _clean(tok.lemma_ or tok.text),
                    _clean(tok.pos_),
                    _clean(tok.tag_),
                    "_",
                    str(head),
                    dep,
                    "_",
                    "_",
                )
            )
        )
    return "\n".join(lines)


def text_to_conllu(nlp, recipe_id: str, text: str) -> Optional[str]:
    """Parse one recipe into a CoNLL-U document string.

    Empty recipes yield None (callers log and skip); URLs are replaced
    by the sentinel before the parser sees them.
    """
    if not text or not text.strip():
        return None
    doc = nlp(replace_urls(text))
    blocks = []
    for k, sent in enumerate(doc.sents):
        block = sentence_to_lines(sent, f"{recipe_id}:{k}")
        if block is not None:
            blocks.append(block)
    if not blocks:
        return None
    return "\n\n".join(blocks) + "\n"


def recipes_to_conllu(
    nlp, recipes: Iterable[tuple[str, str]]
) -> dict[str, str]:
    """CoNLL-U documents per recipe id; empty recipes are skipped."""
    out: dict[str, str] = {}
    for recipe_id, text in recipes:
        document = text_to_conllu(nlp, recipe_id, text)
        if document is None:
            log.warning("recipe %s is empty, skipping", recipe_id)
            continue
        out[recipe_id] = document
    return out
