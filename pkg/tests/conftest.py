import pathlib

import pytest

from textflow import conllu

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def load_fixture(name):
    return conllu.parse_conllu(FIXTURES.joinpath(name).read_text(encoding="utf-8"))


@pytest.fixture
def fig_butter():
    return load_fixture("fig_butter.conllu")[0]


@pytest.fixture
def fig_butter_negated():
    return load_fixture("fig_butter_negated.conllu")[0]


@pytest.fixture
def two_clause():
    return load_fixture("two_clause.conllu")[0]


@pytest.fixture
def coord_und():
    return load_fixture("coord_und.conllu")[0]


@pytest.fixture
def coord_oder_nouns():
    return load_fixture("coord_oder_nouns.conllu")[0]


@pytest.fixture
def coord_oder_verbs():
    return load_fixture("coord_oder_verbs.conllu")[0]


@pytest.fixture
def doc_parallel():
    return load_fixture("doc_parallel.conllu")


@pytest.fixture
def markers():
    trees = load_fixture("markers.conllu")
    return {t.sent_id: t for t in trees}
