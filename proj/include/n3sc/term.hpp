#pragma once

#include <memory>
#include <string>
#include <vector>

#include "n3sc/diagnostics.hpp"

namespace n3sc {

class Term;

struct Triple;

/// An ordered group of triples, as written between "{" and "}".
struct GraphTerm {
  std::vector<Triple> triples;
};

enum class TermKind { Iri, Literal, Blank, Var, List, Graph };

enum class LiteralKind { String, Integer, Decimal };

/// Immutable parse-tree term. Cheap to copy (shared payload).
class Term {
 public:
  Term() = default;

  static Term iri(std::string value, SourcePos pos = {});
  static Term string_lit(std::string value, SourcePos pos = {});
  static Term number_lit(std::string lexical, bool decimal, SourcePos pos = {});
  static Term blank(std::string id, SourcePos pos = {});
  static Term var(std::string name, SourcePos pos = {});
  static Term list(std::vector<Term> items, SourcePos pos = {});
  static Term graph(GraphTerm g, SourcePos pos = {});

  TermKind kind() const;
  bool is(TermKind k) const { return kind() == k; }
  bool is_concrete() const {
    return is(TermKind::Iri) || is(TermKind::Literal);
  }

  /// Iri value, blank id, variable name, or literal lexical form.
  const std::string& text() const;
  LiteralKind literal_kind() const;
  const std::vector<Term>& items() const;
  const GraphTerm& graph_body() const;
  SourcePos pos() const;

  /// Structural equality; positions ignored, blank ids compared literally.
  bool operator==(const Term& o) const;
  bool operator!=(const Term& o) const { return !(*this == o); }

  /// Debug-oriented rendering (qnames not restored).
  std::string str() const;

 private:
  struct Data;
  static std::shared_ptr<Data> make_data(TermKind k, std::string text, SourcePos pos);
  std::shared_ptr<const Data> data_;
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;
  SourcePos pos;

  bool operator==(const Triple& o) const {
    return subject == o.subject && predicate == o.predicate && object == o.object;
  }
};

namespace rdfns {
inline const std::string rdf_type = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline const std::string xsd = "http://www.w3.org/2001/XMLSchema#";
inline const std::string xsd_string = xsd + "string";
inline const std::string xsd_integer = xsd + "integer";
inline const std::string xsd_decimal = xsd + "decimal";
inline const std::string xsd_boolean = xsd + "boolean";
}  // namespace rdfns

/// Local name of an IRI: the part after the last '#' or '/'.
std::string iri_local_name(const std::string& iri);
/// Namespace part of an IRI (complement of iri_local_name).
std::string iri_namespace(const std::string& iri);

}  // namespace n3sc
