"""Activity extraction from dependency trees.

An activity is one verb group (a verb and the verbs chained to it
through clausal-object or particle links) together with the phrases of
its subject, object and modifier dependents.  Negation and
optional/mandatory quantification are detected per activity, and a tag
heuristic can drop activities that live in descriptive subordinate
clauses.

All grammar-specific material (dependency labels, marker lexicons) is
carried by :class:`ExtractionConfig`, so the rules can be retargeted to
another tagset without code changes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .conllu import DepTree, FINITE_TAGS, Token, is_verb

ALL = "ALL"
EXISTS = "EXISTS"

#: Optionality markers: modals and adverbs that signal an activity may be
#: skipped, versus ones that insist on it.  Mandatory is the default.
DEFAULT_EXISTS_MARKERS = frozenset(
    {
        "können",
        "dürfen",
        "mögen",
        "sollten",
        "kann",
        "vielleicht",
        "optional",
        "eventuell",
        "gegebenenfalls",
    }
)
DEFAULT_ALL_MARKERS = frozenset({"müssen"})


@dataclass(frozen=True)
class ExtractionConfig:
    subject_deprels: frozenset[str] = frozenset({"sb", "sbp"})
    object_deprels: frozenset[str] = frozenset({"oa", "og"})
    modifier_deprels: frozenset[str] = frozenset({"mo", "mnr"})
    verb_chain_deprels: frozenset[str] = frozenset({"oc"})
    particle_deprels: frozenset[str] = frozenset({"svp"})
    negation_deprels: frozenset[str] = frozenset({"ng"})
    exists_markers: frozenset[str] = DEFAULT_EXISTS_MARKERS
    all_markers: frozenset[str] = DEFAULT_ALL_MARKERS
    use_vvimp_heuristic: bool = True
    imperative_xpos: str = "VVIMP"
    # Passivized subjects name the thing acted upon; route them to the
    # object slot unless switched off.
    passive_subject_as_object: bool = True

    def __post_init__(self):
        if self.exists_markers & self.all_markers:
            raise ValueError("exists and all marker sets must be disjoint")


DEFAULT_CONFIG = ExtractionConfig()


@dataclass(frozen=True)
class Activity:
    """One extracted activity: verb group plus its argument phrases."""

    id: str
    sentence_index: int
    verbs: frozenset[str]
    subjects: frozenset[str]
    objects: frozenset[str]
    modifiers: frozenset[str]
    negated: bool = False
    quantifier: str = ALL
    verb_token_ids: tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "sentence_index": self.sentence_index,
            "verbs": sorted(self.verbs),
            "subjects": sorted(self.subjects),
            "objects": sorted(self.objects),
            "modifiers": sorted(self.modifiers),
            "negated": self.negated,
            "quantifier": self.quantifier,
        }


def _verb_groups(tree: DepTree, config: ExtractionConfig) -> list[list[Token]]:
    """Cluster verb tokens through chain links, particles included."""
    members: dict[int, list[Token]] = {}
    parent: dict[int, int] = {}

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    verb_ids = set()
    for tok in tree:
        if is_verb(tok):
            verb_ids.add(tok.id)
            parent[tok.id] = tok.id
    for tok in tree:
        if tok.id in verb_ids:
            for kid in tree.children(tok.id):
                if kid.id in verb_ids and kid.deprel in config.verb_chain_deprels:
                    union(tok.id, kid.id)
    # particles attach to their verb's group even though they are not verbs
    particles: dict[int, list[Token]] = {}
    for tok in tree:
        if tok.deprel in config.particle_deprels and tok.head in verb_ids:
            particles.setdefault(tok.head, []).append(tok)

    for vid in sorted(verb_ids):
        members.setdefault(find(vid), []).append(tree.token(vid))
    groups = []
    for root in sorted(members):
        group = members[root]
        for verb in list(group):
            group.extend(particles.get(verb.id, []))
        groups.append(sorted(group, key=lambda t: t.id))
    groups.sort(key=lambda g: g[0].id)
    return groups


def detect_negation(
    tree: DepTree, activity: Activity, config: ExtractionConfig = DEFAULT_CONFIG
) -> bool:
    """A negation dependency on the verb group or its direct dependents."""
    group = set(activity.verb_token_ids)
    for tid in group:
        tok = tree.token(tid)
        if tok.deprel in config.negation_deprels:
            return True
        for kid in tree.children(tid):
            if kid.deprel in config.negation_deprels:
                return True
    return False


def quantify(
    tree: DepTree, activity: Activity, config: ExtractionConfig = DEFAULT_CONFIG
) -> str:
    """Optionality of the activity, mandatory unless a marker says otherwise."""
    candidates = []
    for tid in activity.verb_token_ids:
        candidates.append(tree.token(tid))
        candidates.extend(tree.children(tid, config.modifier_deprels))
    for tok in candidates:
        if tok.lemma.lower() in config.exists_markers:
            return EXISTS
    return ALL


def extract_activities(
    tree: DepTree, config: ExtractionConfig = DEFAULT_CONFIG
) -> list[Activity]:
    """All activities of one sentence, ordered by first verb position.

    Verbs linked through chain deprels merge into a single activity;
    argument phrases are rendered as the full subtree text of the
    matching dependents.
    """
    activities = []
    for k, group in enumerate(_verb_groups(tree, config)):
        group_ids = {t.id for t in group}
        subjects, objects, modifiers = set(), set(), set()
        for tok in group:
            for kid in tree.children(tok.id):
                if kid.id in group_ids:
                    continue
                phrase = tree.subtree_text(kid.id)
                if kid.deprel in config.subject_deprels:
                    if kid.deprel == "sbp" and config.passive_subject_as_object:
                        objects.add(phrase)
                    else:
                        subjects.add(phrase)
                elif kid.deprel in config.object_deprels:
                    objects.add(phrase)
                elif kid.deprel in config.modifier_deprels:
                    modifiers.add(phrase)
        activity = Activity(
            id=f"s{tree.index}a{k}",
            sentence_index=tree.index,
            verbs=frozenset(t.form for t in group),
            subjects=frozenset(subjects),
            objects=frozenset(objects),
            modifiers=frozenset(modifiers),
            verb_token_ids=tuple(t.id for t in group),
        )
        activity = replace(
            activity,
            negated=detect_negation(tree, activity, config),
            quantifier=quantify(tree, activity, config),
        )
        activities.append(activity)
    return activities


def filter_subordinate(
    activities: Sequence[Activity],
    tree: DepTree,
    config: ExtractionConfig = DEFAULT_CONFIG,
) -> list[Activity]:
    """Drop non-imperative activities when the sentence mixes styles.

    Fires only when the sentence contains both an imperative-tagged verb
    and a finite non-imperative verb; then activities whose verb group
    carries no imperative tag are treated as descriptive asides.
    """
    if not config.use_vvimp_heuristic:
        return list(activities)
    tags = [t.xpos for t in tree if is_verb(t)]
    has_imp = any(x == config.imperative_xpos for x in tags)
    has_fin = any(x in FINITE_TAGS for x in tags)
    if not (has_imp and has_fin):
        return list(activities)
    kept = []
    for act in activities:
        group_tags = {tree.token(tid).xpos for tid in act.verb_token_ids}
        if config.imperative_xpos in group_tags:
            kept.append(act)
    return kept
