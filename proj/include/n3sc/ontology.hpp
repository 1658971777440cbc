#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "n3sc/term.hpp"

namespace n3sc {

struct PropertyInfo {
  std::optional<std::string> domain;
  std::optional<std::string> range;
  bool functional = false;
  std::optional<int> max_cardinality;
  std::optional<std::string> inverse_of;
  std::optional<std::string> label;

  bool single_valued() const {
    return functional || (max_cardinality && *max_cardinality <= 1);
  }
};

/// Either an ontology class or an XSD datatype.
struct TypeRef {
  bool is_datatype = false;
  std::string iri;

  bool operator==(const TypeRef& o) const {
    return is_datatype == o.is_datatype && iri == o.iri;
  }
};

struct InverseRef {
  std::string iri;
  bool synthetic = false;  // true when derived by naming, not declared
};

struct Ontology {
  std::set<std::string> classes;
  std::set<std::string> datatypes;
  std::map<std::string, PropertyInfo> properties;
  std::map<std::string, std::string> class_labels;
  std::vector<Diagnostic> warnings;

  bool is_class(const std::string& iri) const { return classes.count(iri) > 0; }
  bool is_datatype(const std::string& iri) const;
  const PropertyInfo* property(const std::string& iri) const;
  /// Effective cardinality of a property: single or unbounded; unbounded
  /// when the ontology is silent.
  bool property_single_valued(const std::string& iri) const;
};

/// Loads the Turtle-style ontology subset: class declarations, property
/// domain/range, functional flags, max cardinality, inverses, labels.
/// Unknown constructs are collected as warnings.
Ontology load_ontology(const std::string& text);

/// Typing context for a rule-graph node.
struct NodeTypeContext {
  std::vector<std::string> explicit_types;      // declared-class rdf:type targets
  std::optional<std::string> incoming_property; // edge that reached the node
  bool incoming_inverted = false;               // property is an inverse edge
  std::optional<std::string> incoming_original; // original property when inverted
  std::vector<std::string> outgoing_properties;
  SourcePos pos;
};

/// Resolution priority: explicit rdf:type > range of the incoming property >
/// domain of an outgoing property. Throws type.none / type.conflict.
TypeRef type_of_node(const Ontology& ont, const NodeTypeContext& ctx);

/// Declared inverse when present, otherwise "<localname>Of" in the same
/// namespace, flagged synthetic.
InverseRef inverse_of(const Ontology& ont, const std::string& property);

}  // namespace n3sc
