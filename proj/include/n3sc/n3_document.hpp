#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "n3sc/term.hpp"

namespace n3sc {

namespace builtins {
inline const std::string log_implies = "http://www.w3.org/2000/10/swap/log#implies";
inline const std::string math_ns = "http://www.w3.org/2000/10/swap/math#";
inline const std::string list_ns = "http://www.w3.org/2000/10/swap/list#";
inline const std::string cg_ns = "http://n3sc.org/cg#";
}  // namespace builtins

struct PrefixDecl {
  std::string label;
  std::string iri;
  SourcePos pos;

  bool operator==(const PrefixDecl& o) const {
    return label == o.label && iri == o.iri;
  }
};

/// One predicate-object pair of a statement. `surface` preserves the
/// written form of the predicate (e.g. "cg:request", "a", "=>").
struct PredObj {
  Term predicate;
  Term object;
  std::string surface;
  SourcePos pos;
};

struct N3Statement {
  Term subject;
  std::vector<PredObj> pairs;
  SourcePos pos;

  bool is_rule() const {
    for (const auto& p : pairs)
      if (p.surface == "=>" || (p.predicate.is(TermKind::Iri) &&
                                p.predicate.text() == builtins::log_implies))
        return true;
    return false;
  }
};

/// cg:request annotation re-attached to a graph term nested in a rule body.
struct RequestAnnotation {
  size_t body_index = 0;  // index of the carrying triple in body.triples
  std::string location;   // IRI of the remote information system
  SourcePos pos;
};

struct AnnotatedRule {
  GraphTerm body;
  GraphTerm head;
  std::vector<Term> function_params;  // Var terms, ordered
  std::optional<std::string> event_name;
  std::vector<RequestAnnotation> requests;
  SourcePos pos;
};

/// Body triple with its enclosing request location, if any.
struct BodyAtom {
  Triple triple;
  std::optional<std::string> request_location;
};

/// Flattens a rule body: request-block graph terms are expanded in place,
/// their triples tagged with the block's location.
std::vector<BodyAtom> flattened_body(const AnnotatedRule& rule);

struct ParsedDocument {
  std::vector<PrefixDecl> prefixes;
  std::vector<N3Statement> statements;   // source order, rules included
  std::vector<AnnotatedRule> rules;    // source order
  std::vector<Triple> ground_triples;  // source order

  std::optional<std::string> prefix_iri(const std::string& label) const;
};

/// Parses the restricted N3 dialect. Throws CompileError on the first
/// lexical or syntactic problem; the resulting document is fully extracted
/// (rules and ground triples populated).
ParsedDocument parse_document(const std::string& text);

/// Re-derives annotated rules from raw statements, validating annotation
/// placement. parse_document calls this internally.
std::vector<AnnotatedRule> extract_rules(const ParsedDocument& doc);

/// Canonical dialect rendering: two-space indent, one predicate-object pair
/// per line, qnames restored from the document's prefix table.
std::string print_document(const ParsedDocument& doc);

/// Structural document equality (prefixes, statement triples, rules).
bool documents_equal(const ParsedDocument& a, const ParsedDocument& b);

}  // namespace n3sc
