#pragma once

#include <set>

#include "n3sc/runtime.hpp"

namespace n3sc {

/// Ground dataset for the declarative evaluator; terms are Iri or Literal.
struct Dataset {
  std::vector<Triple> triples;
};

struct EventRecord {
  std::string name;
  std::string payload;  // canonical JSON, comparable with transcript payloads
};

struct InferenceSet {
  std::vector<Triple> inferred;       // inferred triples, insertion order
  std::vector<EventRecord> events;    // one per newly minted existential
  size_t passes = 0;                  // fixpoint passes until closure
};

/// Flattens a fixture (request tree plus all remote results) into ground
/// triples. Entity ids resolve through the model's individual registry;
/// unregistered ids mint urn:fixture: nodes.
Dataset flatten_fixture(const Fixture& fixture, const Model& model);

/// Naive forward chaining to fixpoint with full backtracking over variable
/// bindings. Comparators and math operations are evaluated during matching;
/// an existential head mints one fresh node per distinct binding of its
/// universal variables, skipping instantiations already present.
InferenceSet naive_rule_eval(const std::vector<AnnotatedRule>& rules, Dataset dataset,
                             const Model& model);

struct EquivalenceReport {
  bool match = false;
  std::vector<std::string> discrepancies;
};

/// MATCH iff the multiset of events emitted by the transcript equals the
/// evaluator's event records (payloads compared structurally).
EquivalenceReport compare_outcomes(const ExecutionTranscript& transcript,
                                   const InferenceSet& inferences);

}  // namespace n3sc
