import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capakb.terms import FrozenStoreError, Term, TermDict, TermError, Triple, TripleStore

EX = "http://ex.org/"


def test_intern_is_idempotent():
    d = TermDict()
    assert d.iri(EX + "pepper") == d.iri(EX + "pepper")
    assert len(d) == 1


def test_iris_are_case_sensitive():
    d = TermDict()
    assert d.iri(EX + "pepper") != d.iri(EX + "Pepper")


def test_literal_round_trip():
    d = TermDict()
    lit = Term.literal("3.5")
    assert d.resolve(d.intern(lit)) == lit


def test_literal_and_iri_with_same_text_differ():
    d = TermDict()
    assert d.intern(Term.literal(EX + "x")) != d.iri(EX + "x")


def test_malformed_iri_names_lexical_form():
    d = TermDict()
    with pytest.raises(TermError, match="pepper_head"):
        d.iri("pepper_head")
    assert len(d) == 0


def test_lookup_does_not_intern():
    d = TermDict()
    assert d.lookup_iri(EX + "nope") is None
    assert len(d) == 0


def test_skolem_terms_are_recognised():
    assert Term.iri("urn:capakb:bnode:3").is_skolem
    assert not Term.iri(EX + "a").is_skolem


@pytest.fixture
def small():
    store = TripleStore()
    # 1 pepper, 2 hasComponent, 3 head, 4 camera, 5 type
    store.insert((1, 2, 3))
    store.insert((3, 2, 4), asserted=False)
    store.insert((1, 5, 6))
    return store


def test_insert_reports_novelty():
    store = TripleStore()
    assert store.insert((1, 2, 3)) is True
    assert store.insert((1, 2, 3)) is False
    assert len(store) == 1


def test_insert_visible_through_every_index(small):
    t = Triple(1, 2, 3)
    assert 3 in small.spo[1][2]
    assert 1 in small.pos[2][3]
    assert 2 in small.osp[3][1]
    assert t in small.match(s=1)
    assert t in small.match(p=2)
    assert t in small.match(o=3)


def test_derived_upgraded_to_asserted():
    store = TripleStore()
    store.insert((1, 2, 3), asserted=False)
    assert not store.is_asserted((1, 2, 3))
    store.insert((1, 2, 3), asserted=True)
    assert store.is_asserted((1, 2, 3))
    assert store.asserted_count == 1 and store.derived_count == 0


def test_asserted_not_downgraded_by_derived_insert():
    store = TripleStore()
    store.insert((1, 2, 3), asserted=True)
    store.insert((1, 2, 3), asserted=False)
    assert store.is_asserted((1, 2, 3))


def test_erase_absent_leaves_store_unchanged(small):
    before = set(small)
    assert small.erase((9, 9, 9)) is False
    assert set(small) == before


def test_erase_removes_and_keeps_siblings(small):
    assert small.erase((1, 2, 3)) is True
    assert (1, 2, 3) not in small
    assert (1, 5, 6) in small
    assert (3, 2, 4) in small
    assert list(small.match(s=1, p=2)) == []


def test_match_on_empty_store():
    assert list(TripleStore().match()) == []
    assert list(TripleStore().match(s=1, p=2, o=3)) == []


def test_match_all_yields_each_triple_once(small):
    got = list(small.match())
    assert len(got) == len(set(got)) == len(small)
    assert set(got) == set(small)


def test_match_order_is_ascending_by_index():
    store = TripleStore()
    for t in [(3, 1, 1), (1, 1, 2), (2, 1, 1), (1, 1, 1), (1, 2, 0)]:
        store.insert(t)
    assert list(store.match()) == sorted(store)
    assert list(store.match(p=1)) == [(1, 1, 1), (2, 1, 1), (3, 1, 1), (1, 1, 2)]
    assert list(store.match(o=1)) == [(1, 1, 1), (2, 1, 1), (3, 1, 1)]


def test_clear_derived_keeps_asserted(small):
    assert small.clear_derived() == 1
    assert set(small) == set(small.asserted())


def test_snapshot_is_frozen_and_detached(small):
    snap = small.snapshot()
    with pytest.raises(FrozenStoreError):
        snap.insert((7, 7, 7))
    small.insert((8, 8, 8))
    assert (8, 8, 8) not in snap


def test_copy_is_writable_and_detached(small):
    dup = small.copy()
    dup.insert((7, 7, 7))
    assert (7, 7, 7) not in small


ops = st.lists(
    st.tuples(
        st.sampled_from(["insert", "derive", "erase"]),
        st.tuples(st.integers(0, 4), st.integers(0, 2), st.integers(0, 4)),
    ),
    max_size=60,
)


@settings(max_examples=150, deadline=None)
@given(ops)
def test_store_behaves_like_a_flagged_set(sequence):
    store = TripleStore()
    model: dict[tuple, bool] = {}
    for op, t in sequence:
        if op == "erase":
            assert store.erase(t) == (t in model)
            model.pop(t, None)
        else:
            asserted = op == "insert"
            assert store.insert(t, asserted=asserted) == (t not in model)
            model[t] = model.get(t, False) or asserted
    assert set(store) == set(model)
    for name in ("spo", "pos", "osp"):
        assert store.index_triples(name) == set(model)
    assert set(store.asserted()) == {t for t, a in model.items() if a}
    assert store.derived_count == sum(1 for a in model.values() if not a)
    for s, p, o in model:
        assert set(store.match(s=s)) == {t for t in model if t[0] == s}
        assert set(store.match(p=p, o=o)) == {t for t in model if t[1] == p and t[2] == o}
        assert set(store.match(o=o)) == {t for t in model if t[2] == o}
