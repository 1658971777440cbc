#pragma once

#include "n3sc/adt_gen.hpp"
#include "n3sc/bridge_ir.hpp"

namespace n3sc {

struct LogicOptions {
  /// Render request blocks as locally navigable paths instead of remote
  /// requests (the illustrative pre-oracle form). Concrete-valued selector
  /// triples are retrieval filters and produce no conditions in this mode.
  bool inline_requests = false;
};

struct LogicResult {
  Function function;              // the single entry function
  std::vector<EventDecl> events;  // declared events in first-seen order
};

/// Compiles a chain-ordered rule set into one entry function: one IfThen per
/// rule over shared ADT state, with remote requests (callback boundaries),
/// multi-valued lowering (dictionary or iteration), operation preambles, and
/// head unification. Mutates the model for dictionary marks and synthesized
/// type-check fields.
LogicResult generate_logic(const std::vector<RuleGraph>& chain, Model& model,
                           const Ontology& ont, const LogicOptions& opts = {});

/// Symbolic GET URL for a remote request statement:
/// <location>/<type>/_search?p1=v1&... with "<id>" standing in for
/// entity-valued parameters.
std::string request_url_template(const Statement& remote);

}  // namespace n3sc
