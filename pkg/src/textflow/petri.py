"""Workflow nets: construction patterns, composition, validation, I/O.

A workflow net is a bipartite place/transition graph with a unique
source place, a unique sink place, and every node on some path between
them.  Sentences become sub-nets (sequence, AND, OR patterns over their
activities); sub-nets are merged by appending, by parallelizing against
the previous sub-net, or by swapping in front of it.

Generated nets are acyclic by construction; silent transitions realize
the AND split/join and optional-skip patterns and carry no label.
"""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence
from xml.sax.saxutils import escape, quoteattr

from .errors import (
    EmptyDocument,
    InvalidNet,
    LastNotFound,
    MalformedPnml,
    NoActivities,
)
from .extract import EXISTS, Activity
from .order import AND, INTRA, OR, Relation

log = logging.getLogger(__name__)

PNML_NET_TYPE = "http://www.pnml.org/version-2009/grammar/ptnet"
PNML_XMLNS = "http://www.pnml.org/version-2009/grammar/pnml"
TOOL_NAME = "textflow"


def activity_label(activity: Activity) -> str:
    """Canonical transition label: verbs, plus objects when present."""
    verbs = "+".join(sorted(v.lower() for v in activity.verbs))
    objects = sorted(o.lower() for o in activity.objects)
    if objects:
        return f"{verbs}({','.join(objects)})"
    return verbs


@dataclass
class WorkflowNet:
    """Places, transitions (label ``None`` means silent) and flow arcs."""

    places: set[str] = field(default_factory=set)
    transitions: dict[str, Optional[str]] = field(default_factory=dict)
    arcs: set[tuple[str, str]] = field(default_factory=set)
    source: Optional[str] = None
    sink: Optional[str] = None

    @classmethod
    def empty(cls) -> "WorkflowNet":
        return cls()

    def is_empty(self) -> bool:
        return not self.places and not self.transitions

    def copy(self) -> "WorkflowNet":
        return WorkflowNet(
            places=set(self.places),
            transitions=dict(self.transitions),
            arcs=set(self.arcs),
            source=self.source,
            sink=self.sink,
        )

    def nodes(self) -> set[str]:
        return self.places | set(self.transitions)

    def labels(self) -> set[str]:
        return {lab for lab in self.transitions.values() if lab is not None}

    def preset(self, node: str) -> set[str]:
        return {a for a, b in self.arcs if b == node}

    def postset(self, node: str) -> set[str]:
        return {b for a, b in self.arcs if a == node}


@dataclass
class SubNet:
    """A workflow net with designated entry/exit places for composition."""

    net: WorkflowNet
    entry: str
    exit: str


# -- validation --------------------------------------------------------------

def validate(net: WorkflowNet) -> list[str]:
    """Structural violations of the workflow-net invariants, empty if sound."""
    violations = []
    if net.is_empty():
        return ["net is empty"]
    if net.places & set(net.transitions):
        violations.append("place and transition ids overlap")
    if net.source not in net.places:
        violations.append(f"declared source {net.source!r} is not a place")
    if net.sink not in net.places:
        violations.append(f"declared sink {net.sink!r} is not a place")

    nodes = net.nodes()
    incoming: dict[str, set[str]] = {n: set() for n in nodes}
    outgoing: dict[str, set[str]] = {n: set() for n in nodes}
    for a, b in net.arcs:
        if a not in nodes or b not in nodes:
            violations.append(f"arc ({a}, {b}) references an unknown node")
            continue
        a_is_place = a in net.places
        b_is_place = b in net.places
        if a_is_place == b_is_place:
            violations.append(f"arc ({a}, {b}) is not bipartite")
            continue
        outgoing[a].add(b)
        incoming[b].add(a)

    if violations:
        return violations

    sources = {n for n in nodes if not incoming[n]}
    sinks = {n for n in nodes if not outgoing[n]}
    if sources != {net.source}:
        extra = sorted(sources - {net.source})
        violations.append(
            f"expected the unique source {net.source!r}, "
            f"also found {extra}" if extra else "declared source has incoming arcs"
        )
    if sinks != {net.sink}:
        extra = sorted(sinks - {net.sink})
        violations.append(
            f"expected the unique sink {net.sink!r}, "
            f"also found {extra}" if extra else "declared sink has outgoing arcs"
        )

    # path coverage: forward from source meets backward from sink everywhere
    def reach(start: str, step: dict[str, set[str]]) -> set[str]:
        seen = {start}
        stack = [start]
        while stack:
            for nxt in step[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    if net.source in nodes and net.sink in nodes:
        forward = reach(net.source, outgoing)
        backward = reach(net.sink, incoming)
        for node in sorted(nodes - (forward & backward)):
            violations.append(f"node {node!r} is not on a source-sink path")

    # acyclicity (Kahn)
    indeg = {n: len(incoming[n]) for n in nodes}
    queue = [n for n in nodes if indeg[n] == 0]
    visited = 0
    while queue:
        node = queue.pop()
        visited += 1
        for nxt in outgoing[node]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                queue.append(nxt)
    if visited != len(nodes):
        violations.append("net contains a cycle")

    return violations


def _require_valid(net: WorkflowNet, role: str) -> None:
    problems = validate(net)
    if problems:
        raise InvalidNet(f"{role}: " + "; ".join(problems))


# -- sub-net construction ----------------------------------------------------

class _Builder:
    """Incremental net assembly with prefixed, deterministic node ids."""

    def __init__(self, prefix: str):
        self.net = WorkflowNet()
        self.prefix = prefix
        self._n_places = 0
        self._n_silent = 0

    def place(self) -> str:
        pid = f"{self.prefix}_p{self._n_places}"
        self._n_places += 1
        self.net.places.add(pid)
        return pid

    def silent(self) -> str:
        tid = f"{self.prefix}_tau{self._n_silent}"
        self._n_silent += 1
        self.net.transitions[tid] = None
        return tid

    def labeled(self, activity: Activity) -> str:
        self.net.transitions[activity.id] = activity_label(activity)
        return activity.id

    def arc(self, a: str, b: str) -> None:
        self.net.arcs.add((a, b))


def _relation_groups(
    activities: Sequence[Activity], relations: Iterable[Relation]
) -> list[tuple[Optional[str], list[Activity]]]:
    """Partition activities into pattern groups along intra relations.

    Returns (kind, members) entries in textual order; kind is None for
    ungrouped singletons, otherwise AND or OR.
    """
    position = {a.id: i for i, a in enumerate(activities)}
    parent = {a.id: a.id for a in activities}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    kinds: dict[str, set[str]] = {}
    for rel in relations:
        if rel.scope != INTRA or rel.kind not in (AND, OR):
            continue
        if rel.left not in parent or rel.right not in parent:
            continue
        ra, rb = find(rel.left), find(rel.right)
        if ra != rb:
            keep, drop = sorted((ra, rb), key=lambda r: position[r])
            parent[drop] = keep
            kinds[keep] = kinds.get(keep, set()) | kinds.get(drop, set())
            kinds.pop(drop, None)
        kinds[find(rel.left)] = kinds.get(find(rel.left), set()) | {rel.kind}

    groups: dict[str, list[Activity]] = {}
    for act in activities:
        groups.setdefault(find(act.id), []).append(act)

    out = []
    for root in sorted(groups, key=lambda r: position[r]):
        members = groups[root]
        if len(members) == 1:
            out.append((None, members))
            continue
        group_kinds = kinds.get(root, set())
        if group_kinds == {OR}:
            out.append((OR, members))
        else:
            if len(group_kinds) > 1:
                log.warning(
                    "activities %s mix AND and OR links, building AND pattern",
                    [a.id for a in members],
                )
            out.append((AND, members))
    return out


def _emit_single(b: _Builder, act: Activity, entry: str, exit_: str) -> None:
    tid = b.labeled(act)
    b.arc(entry, tid)
    b.arc(tid, exit_)
    if act.quantifier == EXISTS:
        skip = b.silent()
        b.arc(entry, skip)
        b.arc(skip, exit_)


def _emit_or(
    b: _Builder, members: Sequence[Activity], entry: str, exit_: str
) -> None:
    # free choice: one shared input place, one transition per alternative
    for act in members:
        tid = b.labeled(act)
        b.arc(entry, tid)
        b.arc(tid, exit_)
    if any(act.quantifier == EXISTS for act in members):
        skip = b.silent()
        b.arc(entry, skip)
        b.arc(skip, exit_)


def _emit_and(
    b: _Builder, members: Sequence[Activity], entry: str, exit_: str
) -> None:
    split = b.silent()
    join = b.silent()
    b.arc(entry, split)
    b.arc(join, exit_)
    for act in members:
        p_in = b.place()
        p_out = b.place()
        b.arc(split, p_in)
        b.arc(p_out, join)
        _emit_single(b, act, p_in, p_out)


def sub_net_for_sentence(
    activities: Sequence[Activity],
    relations: Iterable[Relation] = (),
    config=None,
) -> SubNet:
    """Sentence sub-net from its activities and intra-sentence relations.

    Relation groups become OR or AND patterns, everything else chains
    sequentially in textual order; optional activities get a silent
    skip alternative.  Negated activities never enter the net.
    """
    del config  # reserved for pattern options; patterns are currently fixed
    usable = [a for a in activities if not a.negated]
    if not usable:
        raise NoActivities("no non-negated activities for this sentence")

    b = _Builder(prefix=f"s{usable[0].sentence_index}")
    entry = b.place()
    current = entry
    for kind, members in _relation_groups(usable, relations):
        nxt = b.place()
        if kind is None:
            _emit_single(b, members[0], current, nxt)
        elif kind == OR:
            _emit_or(b, members, current, nxt)
        else:
            _emit_and(b, members, current, nxt)
        current = nxt
    b.net.source = entry
    b.net.sink = current
    return SubNet(net=b.net, entry=entry, exit=current)


# -- composition -------------------------------------------------------------

def _fresh(taken: set[str], base: str) -> str:
    if base not in taken:
        return base
    n = 2
    while f"{base}~{n}" in taken:
        n += 1
    return f"{base}~{n}"


def _disjoint_copy(sub: SubNet, taken: set[str]) -> SubNet:
    """Rename colliding node ids so the sub-net can join the target net."""
    mapping = {}
    for node in sorted(sub.net.nodes()):
        mapping[node] = _fresh(taken | set(mapping.values()), node)
    if all(k == v for k, v in mapping.items()):
        return SubNet(net=sub.net.copy(), entry=sub.entry, exit=sub.exit)
    net = WorkflowNet(
        places={mapping[p] for p in sub.net.places},
        transitions={mapping[t]: lab for t, lab in sub.net.transitions.items()},
        arcs={(mapping[a], mapping[b]) for a, b in sub.net.arcs},
        source=mapping[sub.net.source],
        sink=mapping[sub.net.sink],
    )
    return SubNet(net=net, entry=mapping[sub.entry], exit=mapping[sub.exit])


def append(net: WorkflowNet, sub: SubNet) -> WorkflowNet:
    """Fuse the sub-net's entry with the net's sink; sub's exit becomes sink.

    Appending to the empty net yields the sub-net itself.  The incoming
    sub-net keeps its node ids (renamed only on collision), so its entry
    and exit remain addressable for later parallelization.
    """
    _require_valid(sub.net, "sub-net")
    if net.is_empty():
        return sub.net.copy()
    _require_valid(net, "net")
    sub = _disjoint_copy(sub, net.nodes())
    out = net.copy()
    old_sink = out.sink
    out.places.discard(old_sink)
    out.places |= sub.net.places
    out.transitions.update(sub.net.transitions)
    out.arcs = {
        (a if a != old_sink else sub.entry, b if b != old_sink else sub.entry)
        for a, b in out.arcs
    } | sub.net.arcs
    out.sink = sub.exit
    return out


def add_parallel(net: WorkflowNet, last: SubNet, sub: SubNet) -> WorkflowNet:
    """Hang ``sub`` parallel to ``last`` between a silent split and join.

    ``last`` must be a sub-net previously added to ``net``; it is located
    by its entry and exit places.  On an empty net this degenerates to a
    plain append.
    """
    if net.is_empty():
        return append(net, sub)
    _require_valid(net, "net")
    _require_valid(sub.net, "sub-net")
    if last.entry not in net.places or last.exit not in net.places:
        raise LastNotFound(
            f"sub-net ({last.entry!r}, {last.exit!r}) is not part of the net"
        )
    sub = _disjoint_copy(sub, net.nodes())
    out = net.copy()
    entry, exit_ = last.entry, last.exit

    taken = out.nodes() | sub.net.nodes()
    split = _fresh(taken, f"{entry}_split")
    join = _fresh(taken | {split}, f"{exit_}_join")
    p_in = _fresh(taken | {split, join}, f"{entry}_branch")
    p_out = _fresh(taken | {split, join, p_in}, f"{exit_}_branch")

    redirected = set()
    for a, b in out.arcs:
        if a == entry:
            redirected.add((p_in, b))  # last's first transitions now feed off p_in
        elif b == exit_:
            redirected.add((a, p_out))  # last's final transitions now fill p_out
        else:
            redirected.add((a, b))
    out.arcs = redirected
    out.places |= {p_in, p_out} | sub.net.places
    out.transitions.update(sub.net.transitions)
    out.transitions[split] = None
    out.transitions[join] = None
    out.arcs |= sub.net.arcs
    out.arcs |= {
        (entry, split),
        (split, p_in),
        (split, sub.entry),
        (sub.exit, join),
        (p_out, join),
        (join, exit_),
    }
    return out


def insert_before(net: WorkflowNet, last: SubNet, sub: SubNet) -> WorkflowNet:
    """Splice ``sub`` into the sequence directly in front of ``last``."""
    if net.is_empty():
        return append(net, sub)
    _require_valid(net, "net")
    _require_valid(sub.net, "sub-net")
    if last.entry not in net.places or last.exit not in net.places:
        raise LastNotFound(
            f"sub-net ({last.entry!r}, {last.exit!r}) is not part of the net"
        )
    sub = _disjoint_copy(sub, net.nodes())
    out = net.copy()
    entry = last.entry
    # arcs out of last's entry now leave the inserted sub-net's exit instead
    out.arcs = {((sub.exit if a == entry else a), b) for a, b in out.arcs}
    # fuse sub's entry place into last's entry
    fused = {
        ((entry if a == sub.entry else a), (entry if b == sub.entry else b))
        for a, b in sub.net.arcs
    }
    out.places |= sub.net.places - {sub.entry}
    out.transitions.update(sub.net.transitions)
    out.arcs |= fused
    return out


# -- document-level generation ----------------------------------------------

@dataclass
class SentenceBundle:
    """Per-sentence input to net generation."""

    activities: list[Activity]
    relations: list[Relation] = field(default_factory=list)
    parallel: bool = False
    before: bool = False


def generate_workflow_net(
    sentences: Sequence[SentenceBundle], config=None
) -> WorkflowNet:
    """Merge per-sentence sub-nets into one validated workflow net.

    Sentences contribute in document order; a parallel-marked sentence
    is hung parallel to the previous sub-net, a before-marked one is
    spliced in front of it, anything else is appended.
    """
    net = WorkflowNet.empty()
    last: Optional[SubNet] = None
    for bundle in sentences:
        usable = [a for a in bundle.activities if not a.negated]
        if not usable:
            continue
        sn = sub_net_for_sentence(usable, bundle.relations, config)
        if bundle.parallel and last is not None:
            net = add_parallel(net, last, sn)
            embedded = SubNet(net=sn.net, entry=sn.entry, exit=sn.exit)
        elif bundle.before and last is not None:
            net = insert_before(net, last, sn)
            embedded = SubNet(net=sn.net, entry=last.entry, exit=sn.exit)
        else:
            net = append(net, sn)
            embedded = SubNet(net=sn.net, entry=sn.entry, exit=sn.exit)
        last = embedded
    if net.is_empty():
        raise EmptyDocument("no sentence contributed any usable activity")
    _require_valid(net, "generated net")
    return net


# -- PNML ---------------------------------------------------------------------

def to_pnml(net: WorkflowNet) -> str:
    """Serialize as a PNML place/transition net.

    Output ordering is bit-stable: places, then transitions, then arcs,
    each sorted by id.  Silent transitions carry an empty name and a
    tool-specific silent flag.
    """
    _require_valid(net, "net")
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<pnml xmlns="{PNML_XMLNS}">',
        f'  <net id="net1" type="{PNML_NET_TYPE}">',
        '    <page id="page1">',
    ]
    for pid in sorted(net.places):
        lines.append(f"      <place id={quoteattr(pid)}>")
        lines.append(f"        <name><text>{escape(pid)}</text></name>")
        if pid == net.source:
            lines.append(
                "        <initialMarking><text>1</text></initialMarking>"
            )
        lines.append("      </place>")
    for tid in sorted(net.transitions):
        label = net.transitions[tid]
        lines.append(f"      <transition id={quoteattr(tid)}>")
        lines.append(
            f"        <name><text>{escape(label or '')}</text></name>"
        )
        if label is None:
            lines.append(
                f'        <toolspecific tool="{TOOL_NAME}" version="1">'
                "<silent>true</silent></toolspecific>"
            )
        lines.append("      </transition>")
    for i, (a, b) in enumerate(sorted(net.arcs)):
        lines.append(
            f'      <arc id="arc{i}" source={quoteattr(a)} '
            f"target={quoteattr(b)}/>"
        )
    lines.extend(["    </page>", "  </net>", "</pnml>", ""])
    return "\n".join(lines)


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _iter_local(root: ET.Element, name: str) -> Iterable[ET.Element]:
    for elem in root.iter():
        if _local(elem.tag) == name:
            yield elem


def parse_pnml(document: str) -> WorkflowNet:
    """Read a PNML document back into a validated workflow net."""
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        raise MalformedPnml(f"not well-formed XML: {exc}") from exc
    if _local(root.tag) != "pnml":
        raise MalformedPnml(f"root element is {_local(root.tag)!r}, not pnml")

    net = WorkflowNet()
    for place in _iter_local(root, "place"):
        pid = place.get("id")
        if not pid:
            raise MalformedPnml("place without id")
        if pid in net.places:
            raise MalformedPnml(f"duplicate place id {pid!r}")
        net.places.add(pid)
    for trans in _iter_local(root, "transition"):
        tid = trans.get("id")
        if not tid:
            raise MalformedPnml("transition without id")
        if tid in net.transitions or tid in net.places:
            raise MalformedPnml(f"duplicate node id {tid!r}")
        label: Optional[str] = None
        for name in _iter_local(trans, "name"):
            for text in _iter_local(name, "text"):
                if text.text:
                    label = text.text
        for silent in _iter_local(trans, "silent"):
            if (silent.text or "").strip().lower() in ("true", "1"):
                label = None
        net.transitions[tid] = label
    nodes = net.nodes()
    for arc in _iter_local(root, "arc"):
        src, tgt = arc.get("source"), arc.get("target")
        if not src or not tgt:
            raise MalformedPnml("arc without source/target")
        if src not in nodes or tgt not in nodes:
            raise MalformedPnml(f"arc ({src}, {tgt}) references a missing node")
        net.arcs.add((src, tgt))

    incoming = {n: 0 for n in nodes}
    outgoing = {n: 0 for n in nodes}
    for a, b in net.arcs:
        outgoing[a] += 1
        incoming[b] += 1
    starts = [p for p in sorted(net.places) if incoming[p] == 0]
    ends = [p for p in sorted(net.places) if outgoing[p] == 0]
    net.source = starts[0] if len(starts) == 1 else None
    net.sink = ends[0] if len(ends) == 1 else None
    _require_valid(net, "parsed net")
    return net


# -- DOT ----------------------------------------------------------------------

def to_dot(net: WorkflowNet) -> str:
    """Graphviz rendering: circles for places, boxes for transitions."""
    _require_valid(net, "net")
    lines = ["digraph workflow {", "  rankdir=LR;"]
    for pid in sorted(net.places):
        peripheries = ' peripheries=2' if pid in (net.source, net.sink) else ""
        lines.append(
            f'  "{pid}" [shape=circle label=""{peripheries}];'
        )
    for tid in sorted(net.transitions):
        label = net.transitions[tid]
        if label is None:
            lines.append(
                f'  "{tid}" [shape=box style=filled fillcolor=black label=""];'
            )
        else:
            text = label.replace("\\", "\\\\").replace('"', '\\"')
            lines.append(f'  "{tid}" [shape=box label="{text}"];')
    for a, b in sorted(net.arcs):
        lines.append(f'  "{a}" -> "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
