#pragma once

#include "n3sc/bridge_ir.hpp"

namespace n3sc {

/// Generates the minimal ADT model by recursive traversal of each rule graph
/// from its function parameter, merging per-rule results. Only classes
/// reachable from a parameter (or a head existential) are materialized.
Model generate_adts(const std::vector<RuleGraph>& graphs, const Ontology& ont,
                    std::vector<Diagnostic>* notes = nullptr);

/// Unions `from` into `into`: ADTs matched by class IRI, fields by property
/// IRI, stricter cardinality wins on conflict (noted), conflicting value
/// types are an error.
void merge_models(Model& into, const Model& from, std::vector<Diagnostic>* notes = nullptr);

/// The single datatype-ranged property whose domain is the given class; used
/// to compare an entity-valued path against a literal. Empty when there is
/// no such property or more than one.
std::optional<std::string> unique_value_field(const Ontology& ont,
                                              const std::string& class_iri);

/// Deterministic IRI-to-identifier mangling shared by model and backends.
class Mangler {
 public:
  /// Local name; collisions disambiguated with a namespace-derived suffix.
  std::string name_for(const std::string& iri, std::map<std::string, std::string>& table);
};

}  // namespace n3sc
