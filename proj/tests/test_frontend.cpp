#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "n3sc/n3_document.hpp"
#include "n3sc/ontology.hpp"
#include "test_util.hpp"

using namespace n3sc;
using testutil::error_code_of;
using testutil::read_data;

namespace {

const char* kCode1 = R"(
@prefix fhir: <http://hl7.org/fhir/> .
@prefix : <http://example.org/insurance#> .
@prefix cg: <http://n3sc.org/cg#> .

{ ?req a fhir:CoverageEligibilityRequest ; fhir:purpose 'validation' .
  ?req fhir:item ?med . ?med a fhir:MedicationRequest ; fhir:medication "DBCAT005063"
} => { ?req :immunoTherapyItem ?med } ; cg:functionParam ?req .
)";

}  // namespace

TEST_CASE("code 1 parses into one rule with five body triples") {
  ParsedDocument doc = parse_document(kCode1);
  REQUIRE(doc.rules.size() == 1);
  const AnnotatedRule& rule = doc.rules[0];
  CHECK(rule.body.triples.size() == 5);
  CHECK(rule.head.triples.size() == 1);
  REQUIRE(rule.function_params.size() == 1);
  CHECK(rule.function_params[0].text() == "req");
  CHECK(!rule.event_name);
  CHECK(rule.requests.empty());
  CHECK(doc.ground_triples.empty());
}

TEST_CASE("empty input yields an empty document") {
  ParsedDocument doc = parse_document("");
  CHECK(doc.rules.empty());
  CHECK(doc.ground_triples.empty());
  CHECK(doc.prefixes.empty());
}

TEST_CASE("code 3 has a blank head subject, an event name and a request") {
  ParsedDocument doc = parse_document(read_data("code3.n3"));
  REQUIRE(doc.rules.size() == 1);
  const AnnotatedRule& rule = doc.rules[0];
  CHECK(rule.event_name == "Response");
  REQUIRE(rule.requests.size() == 1);
  CHECK(rule.requests[0].location == "http://myfhir.ca/");
  bool blank_subject = false;
  for (const auto& t : rule.head.triples)
    blank_subject |= t.subject.is(TermKind::Blank);
  CHECK(blank_subject);
  // the request block is physically nested in the body
  const Triple& carrier = rule.body.triples[rule.requests[0].body_index];
  CHECK(carrier.subject.is(TermKind::Graph));
  CHECK(carrier.subject.graph_body().triples.size() == 3);
}

TEST_CASE("flattened body tags request triples with their location") {
  ParsedDocument doc = parse_document(read_data("insurance.n3"));
  REQUIRE(doc.rules.size() == 3);
  auto atoms = flattened_body(doc.rules[2]);
  int tagged = 0;
  for (const auto& a : atoms)
    if (a.request_location) {
      ++tagged;
      CHECK(*a.request_location == "http://myfhir.ca/");
    }
  CHECK(tagged == 3);
  CHECK(atoms.size() == 9);
}

TEST_CASE("extract_rules on ground-only documents returns nothing") {
  ParsedDocument doc = parse_document(
      "@prefix ex: <http://e/> .\nex:a ex:p ex:b .\nex:a ex:q 'x' .\n");
  CHECK(doc.rules.empty());
  CHECK(doc.ground_triples.size() == 2);
}

TEST_CASE("parse errors carry positions and stable codes") {
  CHECK(error_code_of([] { parse_document("foo:a foo:b foo:c ."); }) == errc::prefix);
  CHECK(error_code_of([] { parse_document("@prefix e: <http://e/> .\n{ e:a e:b e:c ."); }) ==
        errc::delim);
  CHECK(error_code_of([] { parse_document("@prefix e: <http://e/> .\ne:a e:b 'x'^^e:t ."); }) ==
        errc::lex);
  CHECK(error_code_of([] {
          parse_document("@prefix e: <http://e/> .\ne:a cg:functionParam e:b .");
        }) == errc::annotation);
  CHECK(error_code_of([] {
          parse_document("@prefix e: <http://e/> .\n{ e:a e:b e:c } => { e:d e:b e:c } ; "
                         "cg:foo e:x ; cg:functionParam ?r .");
        }) == errc::annotation);
  try {
    parse_document("@prefix e: <http://e/> .\ne:a e:b\n  'x'^^e:t .");
  } catch (const CompileError& e) {
    CHECK(e.pos().line == 3);
  }
}

TEST_CASE("cg:request must target an IRI") {
  std::string text =
      "@prefix e: <http://e/> .\n@prefix cg: <http://n3sc.org/cg#> .\n"
      "{ { ?x a e:T ; e:p ?y } ; cg:request 'nope' . ?r e:q ?y . } => { ?r e:z 'v' } ; "
      "cg:functionParam ?r .";
  CHECK(error_code_of([&] { parse_document(text); }) == errc::request_object);
}

TEST_CASE("annotation objects are validated") {
  CHECK(error_code_of([] {
          parse_document("@prefix e: <http://e/> .\n{ ?x e:p 1 } => { ?x e:q 2 } ; "
                         "cg:functionParam 'v' .");
        }) == errc::annotation);
  CHECK(error_code_of([] {
          parse_document("@prefix e: <http://e/> .\n{ ?x e:p 1 } => { ?x e:q 2 } ; "
                         "cg:functionParam ?x ; cg:event 7 .");
        }) == errc::annotation);
}

TEST_CASE("blank node ids are fresh per occurrence and deterministic") {
  const char* text =
      "@prefix e: <http://e/> .\n"
      "{ ?x e:p 1 } => { [] a e:T ; e:v ?x . [] a e:U } ; cg:functionParam ?x .";
  ParsedDocument a = parse_document(text);
  ParsedDocument b = parse_document(text);
  CHECK(documents_equal(a, b));
  const auto& head = a.rules[0].head.triples;
  // two [] occurrences never share an id
  CHECK(head[0].subject.text() == head[1].subject.text());  // same [] group
  CHECK(head[0].subject.text() != head[2].subject.text());
}

TEST_CASE("every term, triple and rule carries a source position") {
  ParsedDocument doc = parse_document(read_data("insurance.n3"));
  for (const auto& rule : doc.rules) {
    CHECK(rule.pos.known());
    for (const auto& t : rule.body.triples) {
      CHECK(t.pos.known());
      CHECK(t.subject.pos().known());
      CHECK(t.predicate.pos().known());
      CHECK(t.object.pos().known());
    }
  }
}

TEST_CASE("pretty-printed documents reparse to structurally equal documents") {
  for (const char* name : {"insurance.n3", "code3.n3", "code8.n3", "code10.n3",
                           "code10b.n3", "bmi.n3", "synth_visits.n3", "synth_accounts.n3"}) {
    ParsedDocument doc = parse_document(read_data(name));
    std::string printed = print_document(doc);
    ParsedDocument again = parse_document(printed);
    INFO(name, ":\n", printed);
    CHECK(documents_equal(doc, again));
    // printing is a fixpoint modulo the first round trip
    CHECK(print_document(again) == printed);
  }
}

// --- ontology ---------------------------------------------------------------

TEST_CASE("ontology loads classes, properties and inverse pairs") {
  std::string text =
      "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n"
      "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
      "@prefix fhir: <http://hl7.org/fhir/> .\n"
      "fhir:Patient a owl:Class .\n"
      "fhir:Coverage a owl:Class ; rdfs:label \"Coverage record\" .\n"
      "fhir:policyHolder a owl:ObjectProperty ; rdfs:domain fhir:Coverage ;"
      " rdfs:range fhir:Patient ; owl:inverseOf fhir:policyHolderOf .\n";
  Ontology ont = load_ontology(text);
  CHECK(ont.classes.size() == 2);
  CHECK(ont.class_labels.at("http://hl7.org/fhir/Coverage") == "Coverage record");
  const PropertyInfo* p = ont.property("http://hl7.org/fhir/policyHolder");
  REQUIRE(p);
  CHECK(p->domain == "http://hl7.org/fhir/Coverage");
  CHECK(p->range == "http://hl7.org/fhir/Patient");
  // declared inverses round-trip
  InverseRef inv = inverse_of(ont, "http://hl7.org/fhir/policyHolder");
  CHECK(inv.iri == "http://hl7.org/fhir/policyHolderOf");
  CHECK(!inv.synthetic);
  InverseRef back = inverse_of(ont, inv.iri);
  CHECK(back.iri == "http://hl7.org/fhir/policyHolder");
  CHECK(!back.synthetic);
}

TEST_CASE("empty ontology file loads") {
  Ontology ont = load_ontology("");
  CHECK(ont.classes.empty());
  CHECK(ont.properties.empty());
}

TEST_CASE("functional properties are effectively single-valued") {
  std::string text =
      "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n"
      "@prefix e: <http://e/> .\n"
      "e:p a owl:ObjectProperty, owl:FunctionalProperty .\n"
      "e:q a owl:ObjectProperty ; e:maxCardinality 1 .\n"
      "e:r a owl:ObjectProperty .\n";
  Ontology ont = load_ontology(text);
  CHECK(ont.property_single_valued("http://e/p"));
  CHECK(ont.property_single_valued("http://e/q"));
  CHECK(!ont.property_single_valued("http://e/r"));  // silent: unbounded
}

TEST_CASE("unknown constructs warn; undeclared domain errors") {
  Ontology ont = load_ontology(
      "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n@prefix e: <http://e/> .\n"
      "e:C a owl:Class .\ne:C e:mystery 4 .\n");
  CHECK(!ont.warnings.empty());
  CHECK(error_code_of([] {
          load_ontology(
              "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n"
              "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
              "@prefix e: <http://e/> .\n"
              "e:p a owl:ObjectProperty ; rdfs:domain e:Nowhere .\n");
        }) == errc::ont_undeclared);
}

TEST_CASE("type resolution priority: rule type, then range, then domain") {
  std::string text =
      "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n"
      "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
      "@prefix e: <http://e/> .\n"
      "e:Claim a owl:Class .\ne:Patient a owl:Class .\n"
      "e:patient a owl:ObjectProperty ; rdfs:range e:Patient .\n"
      "e:weight a owl:DatatypeProperty ; rdfs:domain e:Patient ;"
      " rdfs:range <http://www.w3.org/2001/XMLSchema#decimal> .\n";
  Ontology ont = load_ontology(text);

  NodeTypeContext via_range;
  via_range.incoming_property = "http://e/patient";
  CHECK(type_of_node(ont, via_range).iri == "http://e/Patient");

  NodeTypeContext via_type = via_range;
  via_type.explicit_types = {"http://e/Claim"};
  CHECK(type_of_node(ont, via_type).iri == "http://e/Claim");

  NodeTypeContext via_domain;
  via_domain.outgoing_properties = {"http://e/weight"};
  CHECK(type_of_node(ont, via_domain).iri == "http://e/Patient");

  NodeTypeContext nothing;
  CHECK(error_code_of([&] { type_of_node(ont, nothing); }) == errc::type_none);

  NodeTypeContext conflict;
  conflict.explicit_types = {"http://e/Claim", "http://e/Patient"};
  CHECK(error_code_of([&] { type_of_node(ont, conflict); }) == errc::type_conflict);
}

TEST_CASE("type_of_node is a pure function of its arguments") {
  Ontology ont = load_ontology(
      "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n"
      "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
      "@prefix e: <http://e/> .\n"
      "e:T a owl:Class .\ne:p a owl:ObjectProperty ; rdfs:range e:T .\n");
  NodeTypeContext ctx;
  ctx.incoming_property = "http://e/p";
  TypeRef first = type_of_node(ont, ctx);
  for (int i = 0; i < 20; ++i) CHECK(type_of_node(ont, ctx) == first);
}

TEST_CASE("undeclared inverses are synthesized in the property's namespace") {
  Ontology ont = load_ontology("");
  InverseRef inv = inverse_of(ont, "http://hl7.org/fhir/subject");
  CHECK(inv.iri == "http://hl7.org/fhir/subjectOf");
  CHECK(inv.synthetic);
}
