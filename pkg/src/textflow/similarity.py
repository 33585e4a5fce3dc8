"""Behavioral comparison of workflow nets via causal footprints.

A footprint classifies every pair of activity labels as CAUSAL (one
always happens before the other when both happen), CONCURRENT (both
orders occur) or EXCLUSIVE (never in the same run).  Two footprints are
scored by cosine similarity over their relation atoms plus
label-presence atoms, which is 1.0 for behaviorally identical nets and
0.0 for nets with disjoint vocabularies.

Footprints are computed on the reachability graph of the net, which is
a DAG for the acyclic nets this toolkit builds; full trace enumeration
is available separately as the ground-truth oracle but can explode
combinatorially on wide parallel nets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import CyclicNet, EmptyCorpus, StateBudgetExceeded
from .petri import WorkflowNet, validate

CAUSAL = "CAUSAL"
CONCURRENT = "CONCURRENT"
EXCLUSIVE = "EXCLUSIVE"

DEFAULT_STATE_BUDGET = 100_000

Marking = tuple[tuple[str, int], ...]


def _check_enumerable(net: WorkflowNet) -> None:
    problems = validate(net)
    if any("cycle" in p for p in problems):
        raise CyclicNet("refusing to enumerate behavior of a cyclic net")


def _reachability(
    net: WorkflowNet, state_budget: int
) -> tuple[Marking, Marking, dict[Marking, list[tuple[str, Marking]]]]:
    """Explore all markings from one token on source.

    Returns the initial marking, the final marking (one token on sink)
    and the labeled edge relation of the reachability graph.
    """
    _check_enumerable(net)
    pre: dict[str, list[str]] = {t: [] for t in net.transitions}
    post: dict[str, list[str]] = {t: [] for t in net.transitions}
    for a, b in net.arcs:
        if a in net.transitions:
            post[a].append(b)
        else:
            pre[b].append(a)

    def freeze(m: dict[str, int]) -> Marking:
        return tuple(sorted((p, c) for p, c in m.items() if c > 0))

    init = freeze({net.source: 1})
    final = freeze({net.sink: 1})
    edges: dict[Marking, list[tuple[str, Marking]]] = {}
    seen = {init}
    stack = [init]
    while stack:
        marking = stack.pop()
        state = dict(marking)
        out = []
        for tid in net.transitions:
            if all(state.get(p, 0) >= 1 for p in pre[tid]) and pre[tid]:
                nxt = dict(state)
                for p in pre[tid]:
                    nxt[p] -= 1
                for p in post[tid]:
                    nxt[p] = nxt.get(p, 0) + 1
                frozen = freeze(nxt)
                out.append((tid, frozen))
                if frozen not in seen:
                    if len(seen) >= state_budget:
                        raise StateBudgetExceeded(
                            f"more than {state_budget} reachable markings"
                        )
                    seen.add(frozen)
                    stack.append(frozen)
        edges[marking] = out
    return init, final, edges


def traces(
    net: WorkflowNet, state_budget: int = DEFAULT_STATE_BUDGET
) -> set[tuple[str, ...]]:
    """All maximal firing sequences from source to sink, silent steps elided.

    Exact but exponential in the width of parallel sections; meant for
    desk-scale nets and as the oracle for the footprint computation.
    """
    init, final, edges = _reachability(net, state_budget)
    found: set[tuple[str, ...]] = set()

    def walk(marking: Marking, labels: tuple[str, ...]) -> None:
        if marking == final:
            found.add(labels)
        for tid, nxt in edges[marking]:
            label = net.transitions[tid]
            walk(nxt, labels + (label,) if label is not None else labels)

    walk(init, ())
    return found


@dataclass(frozen=True)
class CausalFootprint:
    """Relation classes over every pair of activity labels of one net."""

    labels: frozenset[str]
    relation: dict[tuple[str, str], str]

    def atoms(self) -> frozenset[tuple]:
        present = {(label, "PRESENT") for label in self.labels}
        rels = {(a, b, cls) for (a, b), cls in self.relation.items()}
        return frozenset(present | rels)

    def eventually_follows(self, a: str, b: str) -> Optional[str]:
        return self.relation.get((a, b))


def causal_footprint(
    net: WorkflowNet, state_budget: int = DEFAULT_STATE_BUDGET
) -> CausalFootprint:
    """Footprint of a net, computed on its reachability DAG.

    For each ordered label pair the DAG is asked whether some complete
    run fires ``a`` with ``b`` still to come; combining both directions
    yields the pair's class without enumerating interleavings.
    """
    init, final, edges = _reachability(net, state_budget)
    labels = sorted(net.labels())
    bit = {label: 1 << i for i, label in enumerate(labels)}

    # keep only markings that lie on a complete source-to-sink run
    reverse: dict[Marking, list[Marking]] = {}
    for m, outs in edges.items():
        for _, nxt in outs:
            reverse.setdefault(nxt, []).append(m)
    alive = set()
    if final in edges:
        alive = {final}
        stack = [final]
        while stack:
            for prev in reverse.get(stack.pop(), []):
                if prev not in alive:
                    alive.add(prev)
                    stack.append(prev)

    # topological order of the marking DAG restricted to live markings
    indeg = {m: 0 for m in alive}
    for m in alive:
        for _, nxt in edges[m]:
            if nxt in alive:
                indeg[nxt] += 1
    queue = [m for m in alive if indeg[m] == 0]
    topo = []
    while queue:
        m = queue.pop()
        topo.append(m)
        for _, nxt in edges[m]:
            if nxt in alive:
                indeg[nxt] -= 1
                if indeg[nxt] == 0:
                    queue.append(nxt)

    # after[m]: labels that can still occur on some run from m to final
    after = {m: 0 for m in alive}
    follows = {label: 0 for label in labels}  # a -> labels seen after a
    for m in reversed(topo):
        mask = 0
        for tid, nxt in edges[m]:
            if nxt not in alive:
                continue
            label = net.transitions[tid]
            step = after[nxt]
            if label is not None:
                follows[label] |= step
                step = step | bit[label]
            mask |= step
        after[m] = mask

    relation: dict[tuple[str, str], str] = {}
    for i, a in enumerate(labels):
        for b in labels[i + 1 :]:
            ab = bool(follows[a] & bit[b])
            ba = bool(follows[b] & bit[a])
            if ab and ba:
                relation[(a, b)] = CONCURRENT
                relation[(b, a)] = CONCURRENT
            elif ab:
                relation[(a, b)] = CAUSAL
            elif ba:
                relation[(b, a)] = CAUSAL
            else:
                relation[(a, b)] = EXCLUSIVE
                relation[(b, a)] = EXCLUSIVE
    return CausalFootprint(labels=frozenset(labels), relation=relation)


@dataclass(frozen=True)
class SimilarityReport:
    score: float
    shared_labels: frozenset[str]
    only_left: frozenset[str]
    only_right: frozenset[str]
    pair_agreements: int

    def to_json(self) -> dict:
        return {
            "score": self.score,
            "shared_labels": sorted(self.shared_labels),
            "only_left": sorted(self.only_left),
            "only_right": sorted(self.only_right),
            "pair_agreements": self.pair_agreements,
        }


def cfp_similarity(
    left: CausalFootprint, right: CausalFootprint
) -> SimilarityReport:
    """Cosine similarity of the two footprints' atom sets.

    Behaviorally identical nets score 1.0, disjoint vocabularies 0.0.
    Two empty footprints count as identical.
    """
    la, ra = left.atoms(), right.atoms()
    if not la and not ra:
        score = 1.0
    elif not la or not ra:
        score = 0.0
    else:
        score = len(la & ra) / math.sqrt(len(la) * len(ra))
    shared = left.labels & right.labels
    agreements = 0
    for i, a in enumerate(sorted(shared)):
        for b in sorted(shared)[i + 1 :]:
            if left.relation.get((a, b)) == right.relation.get(
                (a, b)
            ) and left.relation.get((b, a)) == right.relation.get((b, a)):
                agreements += 1
    return SimilarityReport(
        score=score,
        shared_labels=frozenset(shared),
        only_left=frozenset(left.labels - shared),
        only_right=frozenset(right.labels - shared),
        pair_agreements=agreements,
    )


@dataclass(frozen=True)
class CorpusReport:
    mean: float
    reports: tuple[SimilarityReport, ...]


def compare_corpus(
    pairs: Sequence[tuple[WorkflowNet, WorkflowNet]],
    state_budget: int = DEFAULT_STATE_BUDGET,
) -> CorpusReport:
    """Mean footprint similarity over aligned net pairs."""
    if not pairs:
        raise EmptyCorpus("no net pairs to compare")
    reports = []
    for generated, gold in pairs:
        reports.append(
            cfp_similarity(
                causal_footprint(generated, state_budget),
                causal_footprint(gold, state_budget),
            )
        )
    mean = sum(r.score for r in reports) / len(reports)
    return CorpusReport(mean=mean, reports=tuple(reports))
