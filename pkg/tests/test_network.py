import pickle

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semevo.exceptions import InvalidRelationError, NoSuchConceptError
from semevo.network import (RELATION_TYPES, Relation, SemanticNetwork, add_relation, clusters,
                            normalize_concept, relation_type, remove_concept, size)

CONCEPTS = ["a", "b", "c", "d", "e", "f"]


def test_closed_label_set():
    assert len(RELATION_TYPES) == 24
    assert len(set(RELATION_TYPES)) == 24
    assert relation_type("isa") == "IsA"
    with pytest.raises(InvalidRelationError):
        relation_type("RelatedTo")


def test_concept_normalization():
    assert normalize_concept("  Solar \t System ") == "solar system"
    with pytest.raises(InvalidRelationError):
        normalize_concept("   ")


def test_relation_identity_ignores_score():
    assert Relation("IsA", "bird", "animal", 3) == Relation("IsA", "bird", "animal", 9)
    assert hash(Relation("IsA", "bird", "animal", 3)) == hash(Relation("IsA", "bird", "animal", 9))
    assert Relation("IsA", "bird", "animal") != Relation("IsA", "animal", "bird")


@pytest.mark.parametrize("args", [("IsA", "x", "x", 1), ("IsA", "x", "y", 11), ("IsA", "x", "y", -11)])
def test_relation_rejects_invalid(args):
    with pytest.raises(InvalidRelationError):
        Relation(*args)


def test_add_relation_to_empty():
    net = add_relation(SemanticNetwork(), Relation("IsA", "bird", "animal"))
    assert size(net) == (2, 1)


def test_add_relation_idempotent():
    r = Relation("IsA", "bird", "animal")
    once = SemanticNetwork().add_relation(r)
    assert once.add_relation(r) == once
    assert once.add_relation(r).n_relations == 1


def test_duplicate_triple_keeps_max_score():
    net = SemanticNetwork(relations=[Relation("IsA", "a", "b", 2), Relation("IsA", "a", "b", 7),
                                     Relation("IsA", "a", "b", 4)])
    assert net.get_relation(("IsA", "a", "b")).score == 7


def test_add_self_loop_rejected():
    with pytest.raises(InvalidRelationError):
        SemanticNetwork().add_relation(Relation.parse("IsA", "Bird", "bird"))


def test_figure1_counts_and_cluster(fig1_net):
    assert size(fig1_net) == (11, 11)
    cl = clusters(fig1_net)
    assert len(cl) == 1 and len(cl[0]) == 11


def test_remove_star_hub():
    star = SemanticNetwork(relations=[Relation("HasA", "hub", "x"), Relation("HasA", "hub", "y")])
    out = remove_concept(star, "hub")
    assert size(out) == (2, 0)


def test_remove_chain_leaf():
    chain = SemanticNetwork(relations=[Relation("IsA", "a", "b"), Relation("IsA", "b", "c")])
    out = chain.remove_concept("c")
    assert set(out.concepts) == {"a", "b"} and out.n_relations == 1


def test_remove_on_triangle():
    tri = SemanticNetwork(relations=[Relation("IsA", "a", "b"), Relation("IsA", "b", "c"),
                                     Relation("IsA", "c", "a")])
    out = tri.remove_concept("a")
    assert size(out) == (2, 1)
    assert len(out.clusters()) == 1


def test_remove_missing_concept():
    with pytest.raises(NoSuchConceptError):
        SemanticNetwork(["a"]).remove_concept("zzz")


def test_cluster_examples():
    assert clusters(SemanticNetwork()) == []
    two = SemanticNetwork(relations=[Relation("IsA", "a", "b"), Relation("IsA", "c", "d")])
    assert clusters(two) == [frozenset("ab"), frozenset("cd")]
    five = SemanticNetwork(list("vwxyz"))
    assert clusters(five) == [frozenset(c) for c in "vwxyz"]


def test_clusters_ignore_direction():
    net = SemanticNetwork(relations=[Relation("IsA", "a", "b"), Relation("IsA", "c", "b")])
    assert clusters(net) == [frozenset("abc")]


def test_size_of_empty_and_figures():
    from semevo.datasets import load_network
    assert size(SemanticNetwork()) == (0, 0)
    assert size(load_network("fig9_base")) == (10, 11)
    assert size(load_network("fig10_target")) == (9, 9)


def test_equality_is_order_free():
    r1, r2 = Relation("IsA", "a", "b"), Relation("HasA", "b", "c")
    assert SemanticNetwork(relations=[r1, r2]) == SemanticNetwork(relations=[r2, r1])
    assert SemanticNetwork(relations=[r1]) != SemanticNetwork(relations=[r1], concepts=["z"])


def test_pickle_roundtrip(fig1_net):
    back = pickle.loads(pickle.dumps(fig1_net))
    assert back == fig1_net and back.concepts == fig1_net.concepts


def test_incident_and_neighbors(fig1_net):
    assert len(fig1_net.incident("bird")) == 7
    assert fig1_net.neighbors("wing") == {"bird", "fly"}


# -- properties -------------------------------------------------------------------

relations = st.tuples(
    st.sampled_from(RELATION_TYPES[:5]), st.sampled_from(CONCEPTS), st.sampled_from(CONCEPTS),
    st.integers(-10, 10),
).filter(lambda t: t[1] != t[2]).map(lambda t: Relation(*t))

ops = st.lists(st.one_of(
    st.tuples(st.just("add"), relations),
    st.tuples(st.just("concept"), st.sampled_from(CONCEPTS)),
    st.tuples(st.just("remove"), st.sampled_from(CONCEPTS)),
    st.tuples(st.just("drop"), st.integers(0, 50)),
), max_size=40)


def _closed(net):
    return all(net.has_concept(r.source) and net.has_concept(r.target) for r in net)


@settings(max_examples=200, deadline=None)
@given(ops)
def test_closure_under_random_edits(seq):
    net = SemanticNetwork()
    for kind, arg in seq:
        if kind == "add":
            net = net.add_relation(arg)
        elif kind == "concept":
            net = net.add_concept(arg)
        elif kind == "remove" and net.has_concept(arg):
            net = net.remove_concept(arg)
        elif kind == "drop" and net.n_relations:
            net = net.remove_relation(net.relations[arg % net.n_relations])
        assert _closed(net)
        assert len({r.triple for r in net}) == net.n_relations


@settings(max_examples=200, deadline=None)
@given(st.lists(relations, max_size=15), st.lists(st.sampled_from(CONCEPTS), max_size=3))
def test_clusters_partition_concepts(rels, extra):
    net = SemanticNetwork(extra, rels)
    cl = net.clusters()
    union = set().union(*cl) if cl else set()
    assert union == set(net.concepts)
    assert sum(len(c) for c in cl) == net.n_concepts
    assert [min(c) for c in cl] == sorted(min(c) for c in cl)
    for r in net:
        assert any(r.source in c and r.target in c for c in cl)


@settings(max_examples=200, deadline=None)
@given(st.lists(relations, min_size=1, max_size=15), st.data())
def test_remove_then_restore(rels, data):
    net = SemanticNetwork(relations=rels)
    c = data.draw(st.sampled_from(net.concepts))
    removed = net.incident(c)
    back = net.remove_concept(c).add_concept(c).add_relations(removed)
    assert back == net
