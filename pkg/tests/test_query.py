import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from helpers import local, naive_set, twin

from capakb import (
    KnowledgeBase,
    QueryError,
    TransitiveProperty,
    affordances_of,
    capabilities_of,
    explain,
    export_dot,
    instances_of,
)
from capakb.fixtures import RandomKbSpec, random_kb
from capakb.query import DOT_HEADER, format_tree

THREE = {"ObjectLocalisationCapa", "HandPointingCapa", "ScrewingCapability"}


def add(kb, *triples):
    for t in triples:
        kb.store.insert(kb.triple(*t, create=True))
    kb.materialized = False


def test_pepper_capabilities(pepper):
    report = capabilities_of(pepper, pepper.id("ex:pepper"))
    assert local(pepper, report.capabilities) >= THREE
    assert local(pepper, report.defined) == THREE
    assert pepper.label(report.capability_individual) == "pepper_capa"


def test_capabilities_are_under_root(pepper):
    report = capabilities_of(pepper, pepper.id("ex:pepper"))
    assert "Capability" not in local(pepper, report.capabilities)
    assert "Pickable" not in local(pepper, report.capabilities)


def test_components_include_realsense(pepper):
    report = capabilities_of(pepper, pepper.id("ex:pepper"))
    assert "realsense" in local(pepper, report.components)


def test_agent_without_satisfied_definitions(pepper):
    add(pepper, ("ex:nao", "ex:hasCapability", "ex:nao_capa"), ("ex:nao", "ex:hasComponent", "ex:nao_head"), ("ex:nao_head", "a", "ex:Head"))
    report = capabilities_of(pepper, pepper.id("ex:nao"))
    assert report.capabilities == set()
    assert local(pepper, report.components) == {"nao_head"}


def test_agent_without_capability_individual(pepper):
    add(pepper, ("ex:nao", "ex:hasComponent", "ex:nao_head"))
    report = capabilities_of(pepper, pepper.id("ex:nao"))
    assert report.no_capability_individual
    assert report.capabilities == set()


def test_two_capability_individuals_is_an_error(pepper):
    add(pepper, ("ex:pepper", "ex:hasCapability", "ex:pepper_capa2"))
    with pytest.raises(QueryError, match="capability individuals"):
        capabilities_of(pepper, pepper.id("ex:pepper"))


def test_capabilities_stable_under_rematerialization(pepper):
    agent = pepper.id("ex:pepper")
    first = capabilities_of(pepper, agent)
    pepper.materialize()
    assert capabilities_of(pepper, agent) == first


def test_instances(pepper):
    assert local(pepper, instances_of(pepper, pepper.id("ex:Camera"))) == {"realsense"}
    fresh = pepper.terms.iri("http://ex.org/Unicorn")
    assert instances_of(pepper, fresh) == set()
    assert instances_of(pepper, None) == set()


def test_capability_root_instances_match_oracle(pepper):
    root = pepper.id("ex:Capability")
    got = instances_of(pepper, root)
    assert "pepper_capa" in local(pepper, got)
    oracle = {s for s, p, o in naive_set(pepper) if p == pepper.vocab.type and o == root}
    assert got == oracle


def test_affordances(pepper):
    pairs = affordances_of(pepper, pepper.id("ex:pepper"))
    assert {(pepper.label(p), pepper.label(o)) for p, o in pairs} == {("hasGraspingAffordance", "cube")}


def test_no_pickables_no_affordances(pepper_raw):
    kb = twin(pepper_raw)
    kb.store.erase(kb.triple("ex:cube", "a", "ex:Pickable"))
    kb.rebuild()
    assert affordances_of(kb, kb.id("ex:pepper")) == set()


def test_two_pickables(pepper):
    add(pepper, ("ex:ball", "a", "ex:Pickable"))
    pairs = affordances_of(pepper, pepper.id("ex:pepper"))
    assert {pepper.label(o) for _, o in pairs} == {"cube", "ball"}
    aff = pepper.id("ex:hasGraspingAffordance")
    assert {(s, o) for s, p, o in naive_set(pepper) if p == aff} == {(pepper.id("ex:pepper"), o) for _, o in pairs}


def test_explain_object_localisation(pepper):
    node = explain(pepper, pepper.triple("ex:pepper_capa", "a", "ex:ObjectLocalisationCapa"))
    assert node.kind == "derived" and node.rule.startswith("R7")
    leaves = {pepper.format_triple(n.fact) for n in node.leaves()}
    assert "ex:realsense a ex:Camera" in leaves
    chain = [c for c in node.children if pepper.format_triple(c.fact).startswith("ex:pepper_capa ex:hasAvailableComponent")]
    assert len(chain) == 2
    assert all(c.rule.startswith("R6") for c in chain)


def test_explain_asserted_fact(pepper):
    node = explain(pepper, pepper.triple("ex:pepper", "ex:hasComponent", "ex:artrack"))
    assert node.kind == "asserted" and node.children == [] and node.height() == 1
    assert "\n" not in format_tree(pepper, node)


def test_explain_absent_fact(pepper):
    with pytest.raises(QueryError, match="fact not in store"):
        explain(pepper, pepper.triple("ex:pepper", "ex:hasComponent", "ex:cube"))


def chain_kb(length):
    kb = KnowledgeBase()
    iri = kb.terms.iri
    p = iri("http://ex.org/p")
    kb.axioms = [TransitiveProperty(p)]
    nodes = [iri(f"http://ex.org/n{k}") for k in range(length)]
    for a, b in zip(nodes, nodes[1:]):
        kb.store.insert((a, p, b))
    kb.rebuild()
    return kb, p, nodes


def test_explain_four_node_chain():
    kb, p, nodes = chain_kb(4)
    node = explain(kb, (nodes[0], p, nodes[3]))
    assert node.height() == 3
    internal = [n for n in node.walk() if n.children]
    assert internal and all(n.rule.startswith("R3") for n in internal)
    assert {n.fact for n in node.leaves()} == {(a, p, b) for a, b in zip(nodes, nodes[1:])}


def test_explain_depth_cap():
    kb, p, nodes = chain_kb(12)
    node = explain(kb, (nodes[0], p, nodes[11]), max_depth=1)
    assert any(n.truncated for n in node.walk())


def test_explain_is_deterministic(pepper):
    fact = pepper.triple("ex:pepper_capa", "a", "ex:HandPointingCapa")
    assert explain(pepper, fact) == explain(pepper, fact)


def refire(kb, node):
    """Check that the node's rule, applied to its children's facts, yields its fact."""
    if node.kind == "asserted":
        return kb.store.is_asserted(node.fact)
    if node.truncated:
        return True
    rule = kb.program.by_name(node.rule)
    assert len(rule.body) == len(node.children)
    binding = {}
    for pattern, child in zip(rule.body, node.children):
        for x, v in zip(pattern, child.fact):
            if isinstance(x, str):
                if binding.setdefault(x, v) != v:
                    return False
            elif x != v:
                return False
    head = tuple(binding[x] if isinstance(x, str) else x for x in rule.head)
    return head == tuple(node.fact) and all(refire(kb, c) for c in node.children)


def acyclic(node, path=frozenset()):
    if node.fact in path:
        return False
    return all(acyclic(c, path | {node.fact}) for c in node.children)


def test_every_pepper_explanation_refires(pepper):
    for t in pepper.store.derived():
        node = explain(pepper, t)
        assert refire(pepper, node), pepper.format_triple(t)
        assert acyclic(node)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_random_explanations_refire(seed):
    kb = random_kb(RandomKbSpec.sample(seed))
    kb.rebuild()
    for t in sorted(kb.store.derived())[:60]:
        node = explain(kb, t)
        assert refire(kb, node)
        assert acyclic(node)


def test_dot_has_dashed_inferred_component_edge(pepper):
    text = export_dot(pepper)
    assert text.startswith(DOT_HEADER)
    assert '"http://ex.org/pepper" -> "http://ex.org/realsense" [label="hasComponent", style=dashed];' in text
    assert '"http://ex.org/pepper_head" -> "http://ex.org/realsense" [label="hasComponent", style=solid];' in text
    assert '"http://ex.org/realsense" -> "http://ex.org/Camera" [label="isA", style=solid];' in text
    assert '"http://ex.org/realsense" [label="realsense", shape=ellipse];' in text
    assert '"http://ex.org/Camera" [label="Camera", shape=box];' in text


def test_dot_asserted_only(pepper):
    text = export_dot(pepper, show_derived=False)
    assert "style=dashed" not in text


def test_dot_empty_kb():
    assert export_dot(KnowledgeBase()) == DOT_HEADER + "digraph capakb {}\n"


def test_dot_focus(pepper):
    text = export_dot(pepper, focus=pepper.id("ex:pepper_capa"), depth=1)
    assert 'label="hasAvailableComponent"' in text
    assert "http://ex.org/cube" not in text
    assert '"http://ex.org/pepper_capa" -> "http://ex.org/pepper" [label="isCapabilityOf"' in text


def test_dot_is_deterministic(pepper_raw):
    a, b = twin(pepper_raw), twin(pepper_raw)
    a.rebuild()
    b.rebuild()
    assert export_dot(a) == export_dot(b) == export_dot(a)
