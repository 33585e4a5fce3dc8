import pytest
from hypothesis import given, strategies as st

from textflow import conllu
from textflow.errors import BadHead, CyclicTree, MalformedLine, UnknownToken

from conftest import FIXTURES, load_fixture

STOPP = "1\tStopp\tStopp\tVERB\tVVIMP\t_\t0\troot\t_\t_"


def line(idx, form, head, deprel, upos="NOUN", xpos="NN", lemma=None):
    return "\t".join(
        [str(idx), form, lemma or form, upos, xpos, "_", str(head), deprel, "_", "_"]
    )


class TestParse:
    def test_minimal_single_token_sentence(self):
        trees = conllu.parse_conllu(STOPP)
        assert len(trees) == 1
        tree = trees[0]
        assert len(tree) == 1
        assert tree.root.form == "Stopp"
        assert tree.root.xpos == "VVIMP"
        assert tree.root.head == 0

    def test_fig_butter_structure(self, fig_butter):
        verbs = {t.form for t in fig_butter.verbs()}
        assert verbs == {"aufschäumen", "lassen"}
        aufschaeumen = fig_butter.token(6)
        assert aufschaeumen.deprel == "oc"
        objects = fig_butter.children(6, {"oa"})
        assert [t.form for t in objects] == ["Butter"]

    def test_bad_head_raises(self):
        text = "\n".join(
            [line(1, "a", 2, "nk"), line(2, "b", 0, "root"), line(3, "c", 9, "nk")]
        )
        with pytest.raises(BadHead):
            conllu.parse_conllu(text)

    def test_cycle_raises(self):
        text = "\n".join(
            [line(1, "a", 0, "root"), line(2, "b", 3, "nk"), line(3, "c", 2, "nk")]
        )
        with pytest.raises(CyclicTree):
            conllu.parse_conllu(text)

    def test_wrong_column_count_raises(self):
        with pytest.raises(MalformedLine):
            conllu.parse_conllu("1\tStopp\tStopp\tVERB\n")

    def test_non_integer_head_raises(self):
        bad = STOPP.replace("\t0\t", "\tx\t")
        with pytest.raises(MalformedLine):
            conllu.parse_conllu(bad)

    def test_multiword_ranges_and_empty_nodes_skipped(self):
        text = "\n".join(
            [
                "3-4\tzum\t_\t_\t_\t_\t_\t_\t_\t_",
                line(1, "Er", 2, "sb", upos="PRON", xpos="PPER"),
                line(2, "geht", 0, "root", upos="VERB", xpos="VVFIN"),
                "2.1\tnull\tnull\t_\t_\t_\t_\t_\t_\t_",
                line(3, "zu", 4, "nk", upos="ADP", xpos="APPR"),
                line(4, "dem", 5, "nk", upos="DET", xpos="ART"),
                line(5, "Markt", 2, "mo"),
            ]
        )
        tree = conllu.parse_conllu(text)[0]
        assert [t.id for t in tree] == [1, 2, 3, 4, 5]

    def test_multiple_roots_reheaded_to_first(self):
        text = "\n".join(
            [
                line(1, "kochen", 0, "root", upos="VERB", xpos="VVINF"),
                line(2, "salzen", 0, "root", upos="VERB", xpos="VVINF"),
            ]
        )
        tree = conllu.parse_conllu(text)[0]
        assert tree.root.id == 1
        second = tree.token(2)
        assert second.head == 1
        assert second.deprel == "dep"

    def test_comment_only_block_dropped(self):
        trees = conllu.parse_conllu("# text = leer\n\n" + STOPP)
        assert len(trees) == 1

    def test_sentence_indices_run_in_document_order(self, doc_parallel):
        assert [t.index for t in doc_parallel] == [0, 1, 2]
        assert doc_parallel[1].sent_id == "pasta-2"


class TestTraversal:
    def test_children_of_single_token_root(self):
        tree = conllu.parse_conllu(STOPP)[0]
        assert tree.children(1) == []

    def test_children_with_label_filter(self, fig_butter):
        kids = fig_butter.children(7, {"oc"})
        assert [t.form for t in kids] == ["aufschäumen"]

    def test_disjoint_filter_yields_nothing(self, fig_butter):
        assert fig_butter.children(7, {"zzz"}) == []

    def test_children_unknown_parent(self, fig_butter):
        with pytest.raises(UnknownToken):
            fig_butter.children(99)

    def test_subtree_text_leaf(self, fig_butter):
        assert fig_butter.subtree_text(1) == "Butter"

    def test_subtree_text_prepositional_phrase(self, fig_butter):
        assert fig_butter.subtree_text(2) == "in einer heißen Pfanne"

    def test_subtree_text_root_covers_sentence(self, fig_butter):
        assert (
            fig_butter.subtree_text(fig_butter.root.id)
            == "Butter in einer heißen Pfanne aufschäumen lassen ."
        )

    def test_subtree_unknown_head(self, fig_butter):
        with pytest.raises(UnknownToken):
            fig_butter.subtree_text(42)


ALL_FIXTURES = sorted(p.name for p in FIXTURES.glob("*.conllu"))


class TestInvariants:
    @pytest.mark.parametrize("name", ALL_FIXTURES)
    def test_round_trip_is_fixpoint(self, name):
        once = load_fixture(name)
        twice = conllu.parse_conllu(conllu.to_conllu(once))
        assert twice == once

    @pytest.mark.parametrize("name", ALL_FIXTURES)
    def test_children_sets_partition_tokens(self, name):
        for tree in load_fixture(name):
            seen = [tree.root.id]
            for tok in tree:
                seen.extend(kid.id for kid in tree.children(tok.id))
            assert sorted(seen) == [t.id for t in tree]

    @pytest.mark.parametrize("name", ALL_FIXTURES)
    def test_subtree_of_root_has_all_tokens(self, name):
        for tree in load_fixture(name):
            assert len(tree.subtree_ids(tree.root.id)) == len(tree)

    @given(st.lists(st.sampled_from(["ab", "Öl", "$URL", "."]), min_size=1, max_size=6))
    def test_random_chain_trees_parse_and_round_trip(self, forms):
        lines = [
            line(i + 1, f, i, "nk" if i else "root") for i, f in enumerate(forms)
        ]
        trees = conllu.parse_conllu("\n".join(lines))
        assert conllu.parse_conllu(conllu.to_conllu(trees)) == trees
