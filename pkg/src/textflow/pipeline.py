"""End-to-end wiring: classify sentences, extract, order, build the net.

Only sentences judged process-relevant contribute activities; negated
activities are kept in the report for inspection but never reach net
generation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import classify, extract, order, petri
from .classify import LogRegModel, TfidfModel
from .config import PipelineConfig
from .conllu import DepTree
from .errors import InputError
from .petri import SentenceBundle, WorkflowNet


def sentence_key(tree: DepTree) -> str:
    return tree.sent_id if tree.sent_id is not None else f"s{tree.index}"


@dataclass
class SentenceReport:
    index: int
    sent_id: str
    text: str
    relevant: bool
    activities: list[extract.Activity] = field(default_factory=list)
    relations: list[order.Relation] = field(default_factory=list)
    parallel: bool = False
    before: bool = False

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "id": self.sent_id,
            "text": self.text,
            "relevant": self.relevant,
            "parallel": self.parallel,
            "before": self.before,
            "activities": [a.to_json() for a in self.activities],
            "relations": [r.to_json() for r in self.relations],
        }


@dataclass
class DocumentReport:
    name: str
    sentences: list[SentenceReport]

    def activities(self) -> list[extract.Activity]:
        return [a for s in self.sentences for a in s.activities]

    def relations(self) -> list[order.Relation]:
        return [r for s in self.sentences for r in s.relations]

    def bundles(self) -> list[SentenceBundle]:
        return [
            SentenceBundle(
                activities=list(s.activities),
                relations=list(s.relations),
                parallel=s.parallel,
                before=s.before,
            )
            for s in self.sentences
        ]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "sentences": [s.to_json() for s in self.sentences],
        }


def relevance(
    tree: DepTree,
    config: PipelineConfig,
    tfidf: Optional[TfidfModel] = None,
    logreg: Optional[LogRegModel] = None,
    predictions: Optional[dict[str, bool]] = None,
) -> bool:
    """One sentence's relevance under the configured classifier."""
    if config.classifier == "rule":
        return classify.vvimp_relevant(
            tree,
            subject_deprels=config.extraction.subject_deprels,
            imperative_xpos=config.extraction.imperative_xpos,
        )
    if config.classifier == "logreg":
        if tfidf is None or logreg is None:
            raise InputError("logreg classifier selected but no model loaded")
        return classify.predict_relevance(logreg, tfidf, tree.text).relevant
    if config.classifier == "external":
        if predictions is None:
            raise InputError("external classifier selected but no predictions")
        key = sentence_key(tree)
        if key not in predictions:
            raise InputError(f"no external prediction for sentence {key!r}")
        return predictions[key]
    raise InputError(f"unknown classifier {config.classifier!r}")


def analyze_document(
    trees: Sequence[DepTree],
    config: PipelineConfig,
    name: str = "document",
    tfidf: Optional[TfidfModel] = None,
    logreg: Optional[LogRegModel] = None,
    predictions: Optional[dict[str, bool]] = None,
    gate: bool = True,
) -> DocumentReport:
    """Classify, extract and order every sentence of one document.

    With ``gate`` switched off every sentence is treated as relevant,
    which gives the ungated rule-only behavior for comparison runs.
    """
    sentences: list[SentenceReport] = []
    previous: list[extract.Activity] = []
    for tree in trees:
        relevant = True if not gate else relevance(
            tree, config, tfidf=tfidf, logreg=logreg, predictions=predictions
        )
        report = SentenceReport(
            index=tree.index,
            sent_id=sentence_key(tree),
            text=tree.text,
            relevant=relevant,
        )
        if relevant:
            acts = extract.extract_activities(tree, config.extraction)
            acts = extract.filter_subordinate(acts, tree, config.extraction)
            report.activities = acts
            report.relations = order.intra_sentence_relations(
                tree, acts, config.ordering, previous_activities=previous
            )
            report.parallel = order.parallel_marker(tree, acts, config.ordering)
            report.before = order.before_marker(tree, acts, config.ordering)
            previous = acts
        else:
            previous = []
        sentences.append(report)
    return DocumentReport(name=name, sentences=sentences)


def build_net(report: DocumentReport) -> WorkflowNet:
    """Workflow net for an analyzed document; raises EmptyDocument."""
    return petri.generate_workflow_net(report.bundles())
