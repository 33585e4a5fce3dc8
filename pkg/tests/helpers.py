"""Shared test utilities: activity factories and net isomorphism."""

import networkx as nx

from textflow.extract import ALL, Activity
from textflow.petri import WorkflowNet


def make_activity(
    ident,
    sentence_index=0,
    verbs=("rühren",),
    objects=(),
    subjects=(),
    modifiers=(),
    quantifier=ALL,
    negated=False,
):
    return Activity(
        id=ident,
        sentence_index=sentence_index,
        verbs=frozenset(verbs),
        subjects=frozenset(subjects),
        objects=frozenset(objects),
        modifiers=frozenset(modifiers),
        negated=negated,
        quantifier=quantifier,
        verb_token_ids=(1,),
    )


def _digraph(net: WorkflowNet) -> nx.DiGraph:
    g = nx.DiGraph()
    for p in net.places:
        role = "source" if p == net.source else "sink" if p == net.sink else ""
        g.add_node(p, kind="place", label=role)
    for t, lab in net.transitions.items():
        g.add_node(t, kind="transition", label=lab or "")
    g.add_edges_from(net.arcs)
    return g


def isomorphic(a: WorkflowNet, b: WorkflowNet) -> bool:
    """Structural equality up to node renaming, labels respected."""
    return nx.is_isomorphic(
        _digraph(a),
        _digraph(b),
        node_match=lambda x, y: (x["kind"], x["label"]) == (y["kind"], y["label"]),
    )


def sequence_net(labels, prefix="g") -> WorkflowNet:
    """Hand-rolled chain net, independent of the pattern builders."""
    net = WorkflowNet()
    places = [f"{prefix}_q{i}" for i in range(len(labels) + 1)]
    net.places = set(places)
    for i, label in enumerate(labels):
        tid = f"{prefix}_t{i}"
        net.transitions[tid] = label
        net.arcs.add((places[i], tid))
        net.arcs.add((tid, places[i + 1]))
    net.source = places[0]
    net.sink = places[-1]
    return net
