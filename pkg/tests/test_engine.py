from __future__ import annotations

import pickle
from urllib.parse import quote
from xml.sax.saxutils import escape

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xmluplift.engine import (BindingContext, EngineConfig, InvalidMapping, MappingExecutionError,
                              execute_mapping, expand_template, generate_terms, iri_safe,
                              map_document)
from xmluplift.functions import (FN, ArityMismatch, FunctionRegistry, UnknownFunction,
                                 apply_function, register_function)
from xmluplift.legal import adhoc_parse, generate_corpus, serialize_document, vocab
from xmluplift.mapping import REFERENCE, TermMap, parse_mapping
from xmluplift.rdf import (BNODE, IRI, LITERAL, Graph, InvalidIri, RdfTerm, graph_equal, make_iri,
                           serialize_ntriples)
from xmluplift.xml import eval_xpath, parse_xml

from .test_mapping import PREFIXES


def run(mapping_body: str, *xml: str, **kw):
    doc = parse_mapping(PREFIXES + mapping_body)
    return execute_mapping(doc, [parse_xml(x) for x in xml], **kw)


# -- templates ---------------------------------------------------------------

def test_expand_template_examples():
    assert expand_template("http://ex.com/doc/{id}", {"id": "123"}) == "http://ex.com/doc/123"
    assert expand_template("http://ex.com/doc/{id}", {"id": "A 1/b"}) == "http://ex.com/doc/A%201%2Fb"
    assert expand_template("http://ex.com/doc/{id}", {}) is None
    assert expand_template("http://ex.com/\\{x\\}/{id}", {"id": "1"}) == "http://ex.com/{x}/1"


def test_iri_safe_multibyte():
    assert iri_safe("ü") == "%C3%BC"
    assert iri_safe("a-b.c_d~e") == "a-b.c_d~e"


@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",))))
def test_iri_safe_matches_stdlib_quote(s):
    assert iri_safe(s) == quote(s, safe="")


@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",))))
def test_expanded_template_is_valid_iri(value):
    out = expand_template("http://ex.com/{v}", {"v": value})
    assert make_iri(out).value == out


def test_unbalanced_template():
    with pytest.raises(ValueError):
        expand_template("http://x/{a", {"a": "1"})


# -- functions ---------------------------------------------------------------

def test_builtin_functions():
    reg = FunctionRegistry()
    assert apply_function(reg, FN + "normalizeSpace", ["  Kündigung \n  fristlos "]) == \
        "Kündigung fristlos"
    assert apply_function(reg, FN + "trim", ["x"]) == "x"
    assert apply_function(reg, FN + "trim", ["  x \t"]) == "x"
    assert apply_function(reg, FN + "concat", ["a", "b", "c"]) == "abc"
    assert apply_function(reg, FN + "lowercase", ["ÄB"]) == "äb"
    assert apply_function(reg, FN + "uppercase", ["äb"]) == "ÄB"
    assert apply_function(reg, FN + "substringAfter", ["a/b/c", "/"]) == "b/c"
    assert apply_function(reg, FN + "substringAfter", ["abc", "/"]) == ""


def test_registry_errors_and_replacement():
    reg = FunctionRegistry()
    with pytest.raises(UnknownFunction):
        apply_function(reg, "http://ex.com/none", [])
    with pytest.raises(ArityMismatch):
        apply_function(reg, FN + "trim", ["a", "b"])
    register_function(reg, "http://ex.com/rev", lambda s: s[::-1])
    assert apply_function(reg, "http://ex.com/rev", ["abc"]) == "cba"
    register_function(reg, "http://ex.com/rev", lambda s: "x")
    assert apply_function(reg, "http://ex.com/rev", ["abc"]) == "x"


@given(st.text(alphabet=" \t\r\nab "))
def test_normalize_space_properties(s):
    out = apply_function(FunctionRegistry(), FN + "normalizeSpace", [s])
    assert "  " not in out and out == out.strip(" ")
    assert not any(c in out for c in "\t\r\n")
    assert out.split(" ") == [w for w in out.split(" ") if w] or out == ""


# -- generate_terms ----------------------------------------------------------

def test_generate_terms_examples():
    node = parse_xml('<c uri="http://taxonomy.wolterskluwer.de/law/10046">'
                     '<keyword>a</keyword><keyword>b</keyword><keyword>c</keyword></c>')
    ctx = BindingContext(node, node)
    const = TermMap.of_constant(vocab.SUBJECT)
    assert generate_terms(const, ctx) == [vocab.SUBJECT]
    as_iri = TermMap(REFERENCE, IRI, reference="@uri")
    assert generate_terms(as_iri, ctx) == [make_iri("http://taxonomy.wolterskluwer.de/law/10046")]
    kws = TermMap(REFERENCE, LITERAL, reference="keyword/text()")
    assert generate_terms(kws, ctx) == [RdfTerm(LITERAL, v) for v in "abc"]
    lang = TermMap(REFERENCE, LITERAL, reference="keyword[2]/text()", language="de")
    assert generate_terms(lang, ctx) == [RdfTerm(LITERAL, "b", None, "de")]


def test_generate_terms_errors():
    node = parse_xml('<c uri="not an iri"/>')
    with pytest.raises(InvalidIri):
        generate_terms(TermMap(REFERENCE, IRI, reference="@uri"), BindingContext(node, node))


# -- execute_mapping ---------------------------------------------------------

KEYWORDS = '''
ex:M rml:logicalSource [ rml:iterator "/d" ] ;
  rr:subjectMap [ rr:template "http://ex.com/d/{@id}" ] ;
  rr:predicateObjectMap [ rr:predicate ex:kw ; rr:objectMap [ rml:reference "k/text()" ] ] .
'''


def test_empty_input(plan):
    g, warnings = execute_mapping(plan, [])
    assert len(g) == 0 and warnings == []


def test_three_keywords_three_triples():
    g, _ = run(KEYWORDS, '<d id="1"><k>a</k><k>b</k><k>c</k></d>')
    assert len(g) == 3
    assert len({t.subject for t in g}) == 1 and len({t.predicate for t in g}) == 1


def test_reference_mapping_one_document(plan):
    xml = ('<document id="9"><metadata/>'
           '<fragment id="f1" type="tenor"><content>x</content></fragment>'
           '<fragment id="f2" type="tenor"><content>y</content></fragment></document>')
    doc = parse_xml(xml)
    g, _ = execute_mapping(plan, [doc])
    manifestations = list(g.triples(None, vocab.TYPE, vocab.MANIFESTATION))
    fragments = list(g.triples(None, vocab.TYPE, vocab.FRAGMENT))
    assert len(manifestations) == 1 and len(fragments) == 2
    assert graph_equal(g, adhoc_parse(doc))


def test_cross_product_of_predicates_and_objects():
    g, _ = run('''
ex:M rml:logicalSource [ rml:iterator "/d" ] ; rr:subject ex:s ;
  rr:predicateObjectMap [ rr:predicate ex:p, ex:q ;
      rr:objectMap [ rml:reference "k/text()" ], [ rr:constant "z" ] ] .''',
               "<d><k>a</k><k>b</k></d>")
    assert len(g) == 2 * 3


def test_template_cross_product_and_missing_values():
    g, _ = run('''
ex:M rml:logicalSource [ rml:iterator "/d/e" ] ;
  rr:subjectMap [ rr:template "http://ex.com/{@a}/{x/text()}" ; rr:class ex:C ] .''',
               '<d><e a="1"><x>p</x><x>q r</x></e><e><x>s</x></e></d>')
    subjects = sorted(t.subject.value for t in g)
    assert subjects == ["http://ex.com/1/p", "http://ex.com/1/q%20r"]


def test_literal_template_not_encoded():
    g, _ = run('''
ex:M rml:logicalSource [ rml:iterator "/d" ] ; rr:subject ex:s ;
  rr:predicateObjectMap [ rr:predicate ex:p ;
      rr:objectMap [ rr:template "{@a} / {@b}" ; rr:termType rr:Literal ] ] .''',
               '<d a="x y" b="ü"/>')
    assert [t.object.value for t in g] == ["x y / ü"]


def test_function_map_cross_product():
    g, _ = run('''
ex:M rml:logicalSource [ rml:iterator "/d" ] ; rr:subject ex:s ;
  rr:predicateObjectMap [ rr:predicate ex:p ; rr:objectMap [ fnml:functionValue [
      fno:executes <http://uplift.example/fn/concat> ;
      fnml:parameter [ rml:reference "a/text()" ], [ rr:constant "-" ],
                     [ rml:reference "b/text()" ] ] ] ] .''',
               "<d><a>1</a><a>2</a><b>x</b></d>")
    assert sorted(t.object.value for t in g) == ["1-x", "2-x"]


def test_blank_node_subjects_labelled_in_order():
    body = '''
ex:M rml:logicalSource [ rml:iterator "/d/e" ] ;
  rr:subjectMap [ rml:reference "@k" ; rr:termType rr:BlankNode ] ;
  rr:predicateObjectMap [ rr:predicate ex:p ; rr:objectMap [ rml:reference "@v" ] ] .'''
    xml = '<d><e k="x" v="1"/><e k="y" v="2"/><e k="x" v="3"/></d>'
    g, _ = run(body, xml, xml)
    assert {t.subject.value for t in g} == {"b0", "b1", "b2", "b3"}
    assert all(t.subject.kind == BNODE for t in g)
    first = {t.object.value for t in g if t.subject.value == "b0"}
    assert first == {"1", "3"}


JOIN = '''
ex:Child rml:logicalSource [ rml:iterator "/d/c" ] ;
  rr:subjectMap [ rr:template "http://ex.com/c/{@id}" ] ;
  rr:predicateObjectMap [ rr:predicate ex:link ; rr:objectMap [ rr:parentTriplesMap ex:Parent ;
      rr:joinCondition [ rr:child "ref/text()" ; rr:parent "@key" ] ] ] .
ex:Parent rml:logicalSource [ rml:iterator "/d/p" ] ;
  rr:subjectMap [ rr:template "http://ex.com/p/{@id}" ] .
'''


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.sampled_from("abc"), max_size=3), max_size=4),
       st.lists(st.sampled_from("abcd"), max_size=5))
def test_join_matches_nested_loop(child_refs, parent_keys):
    xml = "<d>" + "".join(
        f'<c id="{i}">' + "".join(f"<ref>{r}</ref>" for r in refs) + "</c>"
        for i, refs in enumerate(child_refs)) + "".join(
        f'<p id="{j}" key="{k}"/>' for j, k in enumerate(parent_keys)) + "</d>"
    g, _ = run(JOIN, xml)
    links = {(t.subject.value, t.object.value) for t in g if t.predicate.value.endswith("link")}
    expected = {(f"http://ex.com/c/{i}", f"http://ex.com/p/{j}")
                for i, refs in enumerate(child_refs) for r in refs
                for j, k in enumerate(parent_keys) if k == r}
    assert links == expected


def test_join_without_condition_uses_same_context():
    g, _ = run('''
ex:A rml:logicalSource [ rml:iterator "/d/e" ] ; rr:subjectMap [ rr:template "http://ex.com/a/{@id}" ] ;
  rr:predicateObjectMap [ rr:predicate ex:same ; rr:objectMap [ rr:parentTriplesMap ex:B ] ] .
ex:B rml:logicalSource [ rml:iterator "/d/e" ] ; rr:subjectMap [ rr:template "http://ex.com/b/{@id}" ] .
''', '<d><e id="1"/><e id="2"/></d>')
    assert {(t.subject.value[-1], t.object.value[-1]) for t in g} == {("1", "1"), ("2", "2")}


def test_invalid_mapping_rejected():
    with pytest.raises(InvalidMapping):
        run('ex:M rml:logicalSource [ rml:iterator "/d//x" ] ; rr:subject ex:s .')


# -- error policy ------------------------------------------------------------

CONCEPTS = '''
ex:M rml:logicalSource [ rml:iterator "/d" ] ; rr:subject ex:s ;
  rr:predicateObjectMap [ rr:predicate ex:p ;
      rr:objectMap [ rml:reference "c/@uri" ; rr:termType rr:IRI ] ] .
'''
BAD = '<d><c uri="http://ex.com/ok"/><c uri="not an iri"/></d>'


def test_lenient_skips_and_warns():
    g, warnings = run(CONCEPTS, BAD)
    assert [t.object.value for t in g] == ["http://ex.com/ok"]
    assert len(warnings) == 1 and warnings[0].map_id == "http://ex.com/M"


def test_lenient_without_warnings():
    g, warnings = run(CONCEPTS, BAD, config=EngineConfig(emit_warnings=False))
    assert len(g) == 1 and warnings == []


def test_strict_aborts_with_context():
    with pytest.raises(MappingExecutionError) as exc:
        run(CONCEPTS, "<d/>", BAD, config=EngineConfig(strict=True))
    assert exc.value.document == 1 and "http://ex.com/M" in str(exc.value)
    clone = pickle.loads(pickle.dumps(exc.value))
    assert clone.reason == exc.value.reason


def test_unknown_function_is_term_error():
    body = '''
ex:M rml:logicalSource [ rml:iterator "/d" ] ; rr:subject ex:s ;
  rr:predicateObjectMap [ rr:predicate ex:p ; rr:objectMap [ fnml:functionValue [
      fno:executes <http://ex.com/missing> ; fnml:parameter [ rml:reference "@a" ] ] ] ] .'''
    g, warnings = run(body, '<d a="1"/>')
    assert len(g) == 0 and len(warnings) == 1
    with pytest.raises(MappingExecutionError):
        run(body, '<d a="1"/>', config=EngineConfig(strict=True))


# -- properties over generated corpora ---------------------------------------

@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6), st.integers(1, 5))
def test_workers_and_sharding(plan, seed, n, cut):
    docs = [parse_xml(serialize_document(d)) for d in generate_corpus(seed, n)]
    g1, _ = execute_mapping(plan, docs)
    g4, _ = execute_mapping(plan, docs, workers=4)
    assert serialize_ntriples(g1) == serialize_ntriples(g4)
    left, _ = execute_mapping(plan, docs[:cut])
    right, _ = execute_mapping(plan, docs[cut:])
    assert graph_equal(g1, left | right)
    for t in g1:
        for term in (t.subject, t.predicate, t.object):
            if term.kind == IRI:
                assert make_iri(term.value) == term


@settings(max_examples=60, deadline=None)
@given(st.lists(st.text(alphabet="abc äß&<", min_size=1, max_size=6), max_size=20, unique=True))
def test_reference_cardinality(values):
    xml = '<d id="1">' + "".join(f"<k>{escape(v)}</k>" for v in values) + "</d>"
    g, _ = run(KEYWORDS, xml)
    root = parse_xml(xml)
    assert len(g) == len(eval_xpath(root, "k/text()")) == len(values)
    assert sorted(t.object.value for t in g) == sorted(values)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.data())
def test_missing_data_monotonicity(plan, seed, data):
    d = generate_corpus(seed, 1)[0]
    full, _ = execute_mapping(plan, [parse_xml(serialize_document(d))])
    what = data.draw(st.sampled_from(["keyword", "concept", "fragment-keyword", "fragment-concept"]))
    if what == "keyword" and d.keywords:
        d.keywords.pop(data.draw(st.integers(0, len(d.keywords) - 1)))
    elif what == "concept" and d.concepts:
        d.concepts.pop()
    else:
        f = d.fragments[data.draw(st.integers(0, len(d.fragments) - 1))]
        items = f.keywords if what == "fragment-keyword" else f.concepts
        if items:
            items.pop()
    reduced, _ = execute_mapping(plan, [parse_xml(serialize_document(d))])
    assert set(reduced) <= set(full)


def test_map_document_local_labels(plan):
    g, warnings = map_document(plan, parse_xml('<document id="1"><metadata/></document>'))
    assert isinstance(g, Graph) and warnings == []
    assert len(g) == 1
