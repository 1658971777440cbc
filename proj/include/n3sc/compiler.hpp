#pragma once

#include "n3sc/logic_gen.hpp"

namespace n3sc {

struct CompileOptions {
  bool inline_requests = false;
};

struct CompileResult {
  ParsedDocument document;
  Ontology ontology;
  std::vector<RuleGraph> graphs;  // chain order
  BridgeProgram program;
  std::vector<Diagnostic> notes;
};

/// Full pipeline: parse rules, load ontology, build and order rule graphs,
/// generate the ADT model and application logic, validate the result.
CompileResult compile_rules(const std::string& rules_text, const std::string& ontology_text,
                            const CompileOptions& opts = {});

}  // namespace n3sc
