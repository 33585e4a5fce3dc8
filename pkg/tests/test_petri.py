import pytest

from textflow import extract, order, petri
from textflow.errors import (
    EmptyDocument,
    InvalidNet,
    LastNotFound,
    MalformedPnml,
    NoActivities,
)
from textflow.extract import EXISTS
from textflow.order import AND, INTRA, OR, Relation
from textflow.petri import SentenceBundle, SubNet, WorkflowNet

from helpers import isomorphic, make_activity


def single_net(label="a1"):
    sub = petri.sub_net_for_sentence([make_activity(label, verbs=(label,))])
    return sub


class TestActivityLabel:
    def test_fig_example_label(self, fig_butter):
        act = extract.extract_activities(fig_butter)[0]
        assert petri.activity_label(act) == "aufschäumen+lassen(butter)"

    def test_verb_only_label(self):
        assert petri.activity_label(make_activity("x", verbs=("rühren",))) == "rühren"

    def test_label_is_deterministic(self):
        a = make_activity("x", verbs=("b", "a"), objects=("Z", "y"))
        b = make_activity("y", verbs=("a", "b"), objects=("y", "Z"))
        assert petri.activity_label(a) == petri.activity_label(b) == "a+b(y,z)"


class TestSubNet:
    def test_single_mandatory_activity(self):
        sub = single_net()
        assert len(sub.net.places) == 2
        assert len(sub.net.transitions) == 1
        assert petri.validate(sub.net) == []

    def test_and_pattern_counts(self):
        acts = [make_activity("a1", verbs=("a1",)), make_activity("a2", verbs=("a2",))]
        sub = petri.sub_net_for_sentence(acts, [Relation(AND, "a1", "a2", INTRA)])
        silent = [t for t, lab in sub.net.transitions.items() if lab is None]
        labeled = [t for t, lab in sub.net.transitions.items() if lab is not None]
        assert len(silent) == 2
        assert len(labeled) == 2
        assert len(sub.net.places) == 6
        assert petri.validate(sub.net) == []

    def test_or_pattern_counts(self):
        acts = [make_activity("a1", verbs=("a1",)), make_activity("a2", verbs=("a2",))]
        sub = petri.sub_net_for_sentence(acts, [Relation(OR, "a1", "a2", INTRA)])
        assert len(sub.net.places) == 2
        assert len(sub.net.transitions) == 2
        assert petri.validate(sub.net) == []

    def test_exists_activity_gets_skip(self):
        sub = petri.sub_net_for_sentence(
            [make_activity("a1", verbs=("a1",), quantifier=EXISTS)]
        )
        assert len(sub.net.places) == 2
        assert len(sub.net.transitions) == 2
        silent = [t for t, lab in sub.net.transitions.items() if lab is None]
        assert len(silent) == 1

    def test_ungrouped_activities_chain_sequentially(self):
        acts = [
            make_activity("a1", verbs=("a1",)),
            make_activity("a2", verbs=("a2",)),
        ]
        sub = petri.sub_net_for_sentence(acts)
        assert len(sub.net.places) == 3
        assert sub.net.postset(sub.entry) == {"a1"}
        assert sub.net.preset(sub.exit) == {"a2"}

    def test_negated_activities_never_enter(self):
        acts = [
            make_activity("a1", verbs=("a1",)),
            make_activity("a2", verbs=("a2",), negated=True),
        ]
        sub = petri.sub_net_for_sentence(acts)
        assert set(sub.net.transitions) == {"a1"}
        with pytest.raises(NoActivities):
            petri.sub_net_for_sentence([acts[1]])


class TestAppend:
    def test_append_to_empty_is_identity(self):
        sub = single_net()
        net = petri.append(WorkflowNet.empty(), sub)
        assert net == sub.net

    def test_two_singles_make_a_sequence(self):
        n = petri.append(WorkflowNet.empty(), single_net("a1"))
        n = petri.append(n, single_net("a2"))
        assert petri.validate(n) == []
        assert len(n.places) == 3
        assert list(n.transitions) == ["a1", "a2"] or set(n.transitions) == {
            "a1",
            "a2",
        }
        # a1 feeds the fused middle place which feeds a2
        middle = n.postset("a1")
        assert len(middle) == 1
        assert n.postset(middle.pop()) == {"a2"}

    def test_append_to_invalid_net_raises(self):
        bad = WorkflowNet(
            places={"p0", "p1", "p2"},
            transitions={"t": "x"},
            arcs={("p0", "t"), ("t", "p1")},
            source="p0",
            sink="p1",
        )  # p2 is a second, unconnected sink
        with pytest.raises(InvalidNet):
            petri.append(bad, single_net())

    def test_append_is_associative_up_to_isomorphism(self):
        s1, s2, s3 = single_net("a1"), single_net("a2"), single_net("a3")
        left = petri.append(petri.append(petri.append(WorkflowNet.empty(), s1), s2), s3)
        inner = petri.append(petri.append(WorkflowNet.empty(), s2), s3)
        right = petri.append(
            petri.append(WorkflowNet.empty(), s1),
            SubNet(net=inner, entry=inner.source, exit=inner.sink),
        )
        assert isomorphic(left, right)

    def test_colliding_ids_are_renamed(self):
        n = petri.append(WorkflowNet.empty(), single_net("a1"))
        n = petri.append(n, single_net("a1"))
        assert petri.validate(n) == []
        assert len(n.transitions) == 2


class TestAddParallel:
    def test_parallelize_two_singles(self):
        s1 = single_net("a1")
        net = petri.append(WorkflowNet.empty(), s1)
        net2 = petri.add_parallel(net, s1, single_net("a2"))
        assert petri.validate(net2) == []
        silent = [t for t, lab in net2.transitions.items() if lab is None]
        assert len(silent) == 2
        assert set(net2.labels()) == {"a1", "a2"}
        assert net2.source == net.source and net2.sink == net.sink

    def test_parallel_onto_empty_falls_back_to_append(self):
        sub = single_net("a1")
        net = petri.add_parallel(WorkflowNet.empty(), sub, sub)
        assert net == sub.net

    def test_unknown_last_raises(self):
        net = petri.append(WorkflowNet.empty(), single_net("a1"))
        ghost = petri.sub_net_for_sentence(
            [make_activity("zz", sentence_index=9, verbs=("zz",))]
        )
        with pytest.raises(LastNotFound):
            petri.add_parallel(net, ghost, single_net("a2"))


class TestInsertBefore:
    def test_inserted_subnet_runs_first(self):
        s1 = single_net("a1")
        net = petri.append(WorkflowNet.empty(), s1)
        net2 = petri.insert_before(net, s1, single_net("a2"))
        assert petri.validate(net2) == []
        assert net2.postset(net2.source) == {"a2"}
        assert net2.preset(net2.sink) == {"a1"}


class TestGenerate:
    def test_single_sentence_document(self, fig_butter):
        acts = extract.extract_activities(fig_butter)
        net = petri.generate_workflow_net([SentenceBundle(activities=acts)])
        assert len(net.places) == 2
        assert len(net.transitions) == 1
        assert net.source != net.sink
        assert petri.validate(net) == []

    def test_parallel_sentence_wraps_previous(self, doc_parallel):
        bundles = []
        for tree in doc_parallel:
            acts = extract.extract_activities(tree)
            bundles.append(
                SentenceBundle(
                    activities=acts,
                    relations=order.intra_sentence_relations(tree, acts),
                    parallel=order.parallel_marker(tree, acts),
                    before=order.before_marker(tree, acts),
                )
            )
        assert [b.parallel for b in bundles] == [False, True, False]
        net = petri.generate_workflow_net(bundles)
        assert petri.validate(net) == []
        labels = net.labels()
        assert labels == {
            "aufkochen(das wasser)",
            "kochen(die nudeln)",
            "abgießen(die nudeln)",
        }
        silent = [t for t, lab in net.transitions.items() if lab is None]
        assert len(silent) == 2
        # the third sentence is appended after the parallel join
        third = next(t for t, lab in net.transitions.items() if lab and "abgießen" in lab)
        assert net.postset(third) == {net.sink}

    def test_before_marked_sentence_swaps_in_front(self, markers, fig_butter):
        import dataclasses

        first = extract.extract_activities(fig_butter)
        tree = markers["marker-zuerst"]
        # re-index: in a real document this would be the second sentence
        second = [
            dataclasses.replace(a, id="s1a0", sentence_index=1)
            for a in extract.extract_activities(tree)
        ]
        net = petri.generate_workflow_net(
            [
                SentenceBundle(activities=first),
                SentenceBundle(
                    activities=second,
                    before=order.before_marker(tree, second),
                ),
            ]
        )
        assert petri.validate(net) == []
        assert net.postset(net.source) == {second[0].id}

    def test_document_without_activities_raises(self):
        with pytest.raises(EmptyDocument):
            petri.generate_workflow_net([SentenceBundle(activities=[])])

    def test_labeled_transition_count_matches_usable_activities(self, doc_parallel):
        bundles = [
            SentenceBundle(activities=extract.extract_activities(t))
            for t in doc_parallel
        ]
        net = petri.generate_workflow_net(bundles)
        usable = sum(
            1 for b in bundles for a in b.activities if not a.negated
        )
        assert len(net.labels()) == usable


class TestValidate:
    def test_generated_nets_are_ok(self, fig_butter):
        acts = extract.extract_activities(fig_butter)
        net = petri.generate_workflow_net([SentenceBundle(activities=acts)])
        assert petri.validate(net) == []

    def test_isolated_place_is_flagged(self):
        net = single_net().net.copy()
        net.places.add("orphan")
        problems = petri.validate(net)
        assert any("orphan" in p for p in problems)

    def test_second_sink_is_flagged(self):
        net = single_net().net.copy()
        net.places.add("extra")
        net.arcs.add((next(iter(net.transitions)), "extra"))
        problems = petri.validate(net)
        assert any("sink" in p for p in problems)

    def test_cycle_is_flagged(self):
        net = WorkflowNet(
            places={"p0", "p1"},
            transitions={"t0": "x", "t1": None},
            arcs={("p0", "t0"), ("t0", "p1"), ("p1", "t1"), ("t1", "p0")},
            source="p0",
            sink="p1",
        )
        problems = petri.validate(net)
        assert any("cycle" in p for p in problems)


class TestPnml:
    def test_single_activity_counts(self):
        text = petri.to_pnml(single_net().net)
        assert text.count("<place id=") == 2
        assert text.count("<transition id=") == 1
        assert text.count("<arc id=") == 2

    def test_round_trip_preserves_structure(self, fig_butter):
        acts = extract.extract_activities(fig_butter)
        net = petri.generate_workflow_net([SentenceBundle(activities=acts)])
        again = petri.parse_pnml(petri.to_pnml(net))
        assert again == net

    def test_silent_transitions_survive_round_trip(self):
        acts = [make_activity("a1", verbs=("a1",)), make_activity("a2", verbs=("a2",))]
        sub = petri.sub_net_for_sentence(acts, [Relation(AND, "a1", "a2", INTRA)])
        again = petri.parse_pnml(petri.to_pnml(sub.net))
        assert again == sub.net

    def test_output_is_bit_stable(self):
        net = single_net().net
        assert petri.to_pnml(net) == petri.to_pnml(net.copy())

    def test_arc_to_missing_node_raises(self):
        doc = """<?xml version="1.0"?>
        <pnml><net id="n" type="ptnet"><page id="pg">
          <place id="p0"/><place id="p1"/>
          <transition id="t0"><name><text>x</text></name></transition>
          <arc id="a0" source="p0" target="t0"/>
          <arc id="a1" source="t0" target="ghost"/>
        </page></net></pnml>"""
        with pytest.raises(MalformedPnml):
            petri.parse_pnml(doc)

    def test_not_xml_raises(self):
        with pytest.raises(MalformedPnml):
            petri.parse_pnml("this is not xml")

    def test_invalid_structure_raises_invalid_net(self):
        doc = """<pnml><net id="n" type="ptnet"><page id="pg">
          <place id="p0"/><place id="p1"/><place id="p2"/>
          <transition id="t0"><name><text>x</text></name></transition>
          <arc id="a0" source="p0" target="t0"/>
          <arc id="a1" source="t0" target="p1"/>
        </page></net></pnml>"""
        with pytest.raises(InvalidNet):
            petri.parse_pnml(doc)


class TestDot:
    def test_dot_shapes(self):
        acts = [make_activity("a1", verbs=("a1",), quantifier=EXISTS)]
        sub = petri.sub_net_for_sentence(acts)
        dot = petri.to_dot(sub.net)
        assert "shape=circle" in dot
        assert 'shape=box label="a1"' in dot
        assert 'style=filled fillcolor=black label=""' in dot
