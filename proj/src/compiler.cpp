#include "n3sc/compiler.hpp"

namespace n3sc {

CompileResult compile_rules(const std::string& rules_text,
                            const std::string& ontology_text,
                            const CompileOptions& opts) {
  CompileResult r;
  r.document = parse_document(rules_text);
  r.ontology = load_ontology(ontology_text);
  for (const auto& w : r.ontology.warnings) r.notes.push_back(w);

  if (r.document.rules.empty())
    throw CompileError(errc::chain_invalid, "no rules in input");

  std::vector<RuleGraph> graphs;
  for (const auto& rule : r.document.rules)
    graphs.push_back(build_rule_graph(rule, r.ontology));
  r.graphs = order_rule_chain(std::move(graphs));

  r.program.model = generate_adts(r.graphs, r.ontology, &r.notes);
  LogicOptions lopts;
  lopts.inline_requests = opts.inline_requests;
  LogicResult logic = generate_logic(r.graphs, r.program.model, r.ontology, lopts);
  r.program.functions.push_back(std::move(logic.function));
  r.program.events = std::move(logic.events);

  // the pipeline must emit well-formed programs; a diagnostic here is a bug
  auto diags = validate(r.program);
  if (!diags.empty())
    throw CompileError(diags[0].code, "internal: emitted invalid program: " + diags[0].message);
  return r;
}

}  // namespace n3sc
