#include <fstream>
#include <iostream>
#include <sstream>

#include "n3sc/compiler.hpp"
#include "n3sc/pseudocode.hpp"
#include "n3sc/solidity.hpp"
#include "n3sc/naive_eval.hpp"

static std::string slurp(const char* path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int main(int argc, char** argv) {
  if (argc < 3) return 2;
  try {
    n3sc::CompileOptions opts;
    opts.inline_requests = argc > 3 && std::string(argv[3]) == "--inline";
    auto r = n3sc::compile_rules(slurp(argv[1]), slurp(argv[2]), opts);
    std::cout << "=== ADTs ===\n";
    for (const auto& a : r.program.model.adts) {
      std::cout << a.name << " <" << a.term << ">\n";
      for (const auto& f : a.fields)
        std::cout << "  " << f.name << " [" << (f.unbounded ? "0..*" : "0..1") << "]: "
                  << f.type.str() << (f.use_dictionary ? " (dict)" : "") << "\n";
    }
    std::cout << "=== pseudocode ===\n" << n3sc::emit_pseudocode(r.program);
    auto sol = n3sc::emit_solidity(r.program);
    std::cout << "=== solidity ===\n" << sol.source;
    std::cout << "=== manifest ===\n" << sol.manifest;
    if (argc > 3 && std::string(argv[3]) == "--fixture") {
      auto fixture = n3sc::load_fixture(slurp(argv[4]), r.program);
      auto transcript = n3sc::execute_contract(r.program, fixture);
      std::cout << "=== transcript ===\n" << transcript.to_json_lines();
      auto dataset = n3sc::flatten_fixture(fixture, r.program.model);
      auto inf = n3sc::naive_rule_eval(r.document.rules, dataset, r.program.model);
      std::cout << "=== inferences (" << inf.passes << " passes) ===\n";
      for (const auto& e : inf.events)
        std::cout << "event " << e.name << " " << e.payload << "\n";
      auto report = n3sc::compare_outcomes(transcript, inf);
      std::cout << "=== compare: " << (report.match ? "MATCH" : "MISMATCH") << " ===\n";
      for (const auto& d : report.discrepancies) std::cout << d << "\n";
    }
    return 0;
  } catch (const n3sc::CompileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
