"""Interactivity relations between extracted activities.

Within a sentence, coordinating conjunctions link activities into AND
or OR groups.  Temporal adverbs signal ordering: on a non-first
activity they relate it to its in-sentence predecessor (AND) or to the
previous sentence's activities (BEFORE); on the first activity they
mark the whole sentence as parallel to, or happening before, the
previous one.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

from .conllu import DepTree, Token
from .extract import Activity

log = logging.getLogger(__name__)

AND = "AND"
OR = "OR"
BEFORE = "BEFORE"

INTRA = "INTRA"
INTER = "INTER"

DEFAULT_BEFORE_ADVERBS = frozenset(
    {
        "zuvor",
        "davor",
        "vorab",
        "vordem",
        "vorher",
        "vorweg",
        "zuerst",
        "zunächst",
        "anfänglich",
        "anfangs",
        "eingangs",
        "erst",
        "vorerst",
    }
)
DEFAULT_AND_ADVERBS = frozenset(
    {
        "inzwischen",
        "dabei",
        "währenddessen",
        "dazwischen",
        "mittlerweile",
        "solange",
        "zwischenzeitlich",
        "derweil",
        "einstweilen",
    }
)


@dataclass(frozen=True)
class Relation:
    """Typed link between two activities."""

    kind: str  # AND | OR | BEFORE
    left: str
    right: str
    scope: str  # INTRA | INTER

    def __post_init__(self):
        if self.left == self.right:
            raise ValueError("a relation needs two distinct activities")

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "left": self.left,
            "right": self.right,
            "scope": self.scope,
        }


@dataclass(frozen=True)
class OrderingConfig:
    before_adverbs: frozenset[str] = DEFAULT_BEFORE_ADVERBS
    and_adverbs: frozenset[str] = DEFAULT_AND_ADVERBS
    and_conjunctions: frozenset[str] = frozenset({"und"})
    or_conjunctions: frozenset[str] = frozenset({"oder"})
    conjunction_deprel: str = "cd"
    conjunct_deprel: str = "cj"

    def __post_init__(self):
        if self.before_adverbs & self.and_adverbs:
            raise ValueError("adverb lexicons must be disjoint")


DEFAULT_CONFIG = OrderingConfig()


def _owner_map(activities: Sequence[Activity]) -> dict[int, Activity]:
    return {
        tid: act for act in activities for tid in act.verb_token_ids
    }


def _adverbs_on(
    tree: DepTree, activity: Activity, lexicon: frozenset[str]
) -> list[Token]:
    """Lexicon adverbs that depend directly on the activity's verb group."""
    group = set(activity.verb_token_ids)
    found = []
    for tok in tree:
        if tok.head in group and tok.lemma.lower() in lexicon:
            found.append(tok)
    return found


def intra_sentence_relations(
    tree: DepTree,
    activities: Sequence[Activity],
    config: OrderingConfig = DEFAULT_CONFIG,
    previous_activities: Sequence[Activity] = (),
) -> list[Relation]:
    """Relations triggered inside one sentence.

    ``previous_activities`` supplies the targets for BEFORE adverbs on
    non-first activities, which point back at the previous sentence.
    """
    if not activities:
        return []
    relations: set[Relation] = set()
    owner = _owner_map(activities)
    position = {act.id: i for i, act in enumerate(activities)}

    # coordination: first conjunct -> conjunction (cd) -> second conjunct (cj)
    for tok in tree:
        if tok.deprel != config.conjunction_deprel:
            continue
        lemma = tok.lemma.lower()
        if lemma in config.and_conjunctions:
            kind = AND
        elif lemma in config.or_conjunctions:
            kind = OR
        else:
            continue
        head_act = owner.get(tok.head)
        if head_act is None:
            continue
        for conjunct in tree.children(tok.id, {config.conjunct_deprel}):
            tail_act = owner.get(conjunct.id)
            if tail_act is None or tail_act.id == head_act.id:
                continue
            first, second = sorted(
                (head_act, tail_act), key=lambda a: position[a.id]
            )
            relations.add(Relation(kind, first.id, second.id, INTRA))

    # temporal adverbs on non-first activities
    for i, act in enumerate(activities):
        if i == 0:
            if len(activities) > 1 and _adverbs_on(
                tree, act, config.before_adverbs
            ):
                log.warning(
                    "sentence %d: BEFORE adverb on the first of several "
                    "activities has no defined target, ignoring",
                    tree.index,
                )
            continue
        if _adverbs_on(tree, act, config.and_adverbs):
            relations.add(Relation(AND, activities[i - 1].id, act.id, INTRA))
        if _adverbs_on(tree, act, config.before_adverbs):
            for prev in previous_activities:
                relations.add(Relation(BEFORE, act.id, prev.id, INTER))

    return sorted(relations, key=lambda r: (r.scope, r.kind, r.left, r.right))


def parallel_marker(
    tree: DepTree,
    activities: Sequence[Activity],
    config: OrderingConfig = DEFAULT_CONFIG,
) -> bool:
    """AND adverb on the first activity: sentence runs parallel to the last."""
    if not activities:
        return False
    return bool(_adverbs_on(tree, activities[0], config.and_adverbs))


def before_marker(
    tree: DepTree,
    activities: Sequence[Activity],
    config: OrderingConfig = DEFAULT_CONFIG,
) -> bool:
    """BEFORE adverb on a sentence's only activity: swap it in front."""
    if len(activities) != 1:
        return False
    return bool(_adverbs_on(tree, activities[0], config.before_adverbs))
