"""CoNLL-U ingestion and dependency-tree primitives.

Only the columns ID, FORM, LEMMA, UPOS, XPOS, HEAD and DEPREL are
consumed; FEATS, DEPS and MISC are passed through as ``_`` on output.
Multiword-token ranges (``3-4``) and empty nodes (``3.1``) are skipped.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Optional, Union

from .errors import BadHead, CyclicTree, MalformedLine, UnknownToken

N_COLUMNS = 10

#: STTS tags of finite, non-imperative verb forms.
FINITE_TAGS = frozenset({"VVFIN", "VMFIN", "VAFIN"})


@dataclass(frozen=True)
class Token:
    """One syntactic word of a sentence.

    ``id`` is the 1-based position within the sentence, ``head`` the id of
    the governing token (0 for the root).  ``xpos`` carries the
    language-specific tag (STTS for German), ``deprel`` the dependency
    label.
    """

    id: int
    form: str
    lemma: str
    upos: str
    xpos: str
    head: int
    deprel: str


def is_verb(token: Token) -> bool:
    """Whether the token is verbal under either tag column."""
    return token.upos in ("VERB", "AUX") or token.xpos.startswith("V")


class DepTree:
    """One parsed sentence as a rooted dependency tree.

    Trees are immutable after construction and safe to share between
    threads.  Construction checks that every head resolves and that the
    head relation is acyclic.
    """

    def __init__(
        self,
        tokens: Iterable[Token],
        text: str = "",
        index: int = 0,
        sent_id: Optional[str] = None,
    ):
        self.tokens: tuple[Token, ...] = tuple(tokens)
        if not self.tokens:
            raise MalformedLine("a sentence needs at least one token")
        self.text = text or " ".join(t.form for t in self.tokens)
        self.index = index
        self.sent_id = sent_id

        self._by_id = {t.id: t for t in self.tokens}
        if len(self._by_id) != len(self.tokens):
            raise MalformedLine("duplicate token ids in sentence")
        self._children: dict[int, list[Token]] = {t.id: [] for t in self.tokens}
        roots = []
        for t in self.tokens:
            if t.head == 0:
                roots.append(t)
            elif t.head not in self._by_id:
                raise BadHead(f"token {t.id} points to missing head {t.head}")
            else:
                self._children[t.head].append(t)
        if not roots:
            raise CyclicTree("sentence has no root token")
        if len(roots) > 1:
            raise MalformedLine("sentence has more than one root token")
        self._root = roots[0]
        self._check_acyclic()

    def _check_acyclic(self) -> None:
        state: dict[int, int] = {}  # 0 in progress, 1 done
        for start in self._by_id:
            path = []
            cur: Optional[int] = start
            while cur is not None and cur != 0 and state.get(cur) is None:
                state[cur] = 0
                path.append(cur)
                cur = self._by_id[cur].head
            if cur is not None and cur != 0 and state.get(cur) == 0:
                raise CyclicTree(f"head relation cycles through token {cur}")
            for tid in path:
                state[tid] = 1

    # -- basic accessors ---------------------------------------------------

    @property
    def root(self) -> Token:
        return self._root

    def token(self, token_id: int) -> Token:
        try:
            return self._by_id[token_id]
        except KeyError:
            raise UnknownToken(f"no token with id {token_id}") from None

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DepTree):
            return NotImplemented
        return self.tokens == other.tokens and self.text == other.text

    def __repr__(self) -> str:
        return f"<DepTree #{self.index}: {self.text!r}>"

    # -- traversal ---------------------------------------------------------

    def children(
        self, parent: int, labels: Optional[Iterable[str]] = None
    ) -> list[Token]:
        """Direct dependents of ``parent`` in surface order.

        ``labels`` restricts the result to the given deprels.
        """
        self.token(parent)
        kids = self._children[parent]
        if labels is not None:
            wanted = set(labels)
            kids = [t for t in kids if t.deprel in wanted]
        return list(kids)

    def subtree_ids(self, head: int) -> list[int]:
        """Ids of ``head`` and all transitive dependents, in surface order."""
        self.token(head)
        seen = {head}
        stack = [head]
        while stack:
            for kid in self._children[stack.pop()]:
                if kid.id not in seen:
                    seen.add(kid.id)
                    stack.append(kid.id)
        return sorted(seen)

    def subtree_text(self, head: int) -> str:
        """Surface rendering of the phrase headed by ``head``."""
        return " ".join(self._by_id[i].form for i in self.subtree_ids(head))

    def verbs(self) -> list[Token]:
        return [t for t in self.tokens if is_verb(t)]


def _iter_lines(source: Union[str, IO[str], Iterable[str]]) -> Iterator[str]:
    if isinstance(source, str):
        return iter(io.StringIO(source))
    return iter(source)


def _parse_token_line(line: str, lineno: int) -> Optional[Token]:
    cols = line.split("\t")
    if len(cols) != N_COLUMNS:
        raise MalformedLine(
            f"line {lineno}: expected {N_COLUMNS} columns, got {len(cols)}"
        )
    tok_id = cols[0]
    if "-" in tok_id or "." in tok_id:
        return None  # multiword range or empty node
    try:
        idx = int(tok_id)
    except ValueError:
        raise MalformedLine(f"line {lineno}: bad token id {tok_id!r}") from None
    if idx < 1:
        raise MalformedLine(f"line {lineno}: token id must be >= 1")
    try:
        head = int(cols[6])
    except ValueError:
        raise MalformedLine(f"line {lineno}: bad head {cols[6]!r}") from None
    deprel = cols[7]
    if not deprel:
        raise MalformedLine(f"line {lineno}: empty deprel")
    return Token(
        id=idx,
        form=cols[1],
        lemma=cols[2],
        upos=cols[3],
        xpos=cols[4],
        head=head,
        deprel=deprel,
    )


def _build_tree(
    tokens: list[Token], meta: dict[str, str], index: int
) -> DepTree:
    roots = [t for t in tokens if t.head == 0]
    if len(roots) > 1:
        # Some parsers emit fragment roots; the first one is canonical and
        # later ones are re-headed to it so no token is lost.
        canon = roots[0]
        tokens = [
            t
            if t.head != 0 or t.id == canon.id
            else Token(t.id, t.form, t.lemma, t.upos, t.xpos, canon.id, "dep")
            for t in tokens
        ]
    return DepTree(
        tokens,
        text=meta.get("text", ""),
        index=index,
        sent_id=meta.get("sent_id"),
    )


def parse_conllu(source: Union[str, IO[str], Iterable[str]]) -> list[DepTree]:
    """Parse a CoNLL-U document into one DepTree per sentence block.

    Accepts a string, an open text file or any iterable of lines.
    Comment lines provide ``sent_id`` and ``text`` metadata; blocks
    without token lines are dropped.
    """
    trees: list[DepTree] = []
    tokens: list[Token] = []
    meta: dict[str, str] = {}

    def flush() -> None:
        nonlocal tokens, meta
        if tokens:
            trees.append(_build_tree(tokens, meta, len(trees)))
        tokens = []
        meta = {}

    for lineno, raw in enumerate(_iter_lines(source), start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if "=" in body:
                key, value = body.split("=", 1)
                meta[key.strip()] = value.strip()
            continue
        tok = _parse_token_line(line, lineno)
        if tok is not None:
            tokens.append(tok)
    flush()
    return trees


def to_conllu(trees: Iterable[DepTree]) -> str:
    """Serialize trees back to CoNLL-U text.

    Emits the seven consumed columns plus ``_`` placeholders, so
    ``parse -> serialize -> parse`` is stable on everything this toolkit
    reads.
    """
    blocks = []
    for tree in trees:
        lines = []
        if tree.sent_id is not None:
            lines.append(f"# sent_id = {tree.sent_id}")
        lines.append(f"# text = {tree.text}")
        for t in tree:
            lines.append(
                "\t".join(
                    (
                        str(t.id),
                        t.form,
                        t.lemma,
                        t.upos,
                        t.xpos,
                        "_",
                        str(t.head),
                        t.deprel,
                        "_",
                        "_",
                    )
                )
            )
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"
