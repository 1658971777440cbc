#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "n3sc/compiler.hpp"
#include "n3sc/fixture_gen.hpp"
#include "n3sc/naive_eval.hpp"
#include "n3sc/pseudocode.hpp"
#include "n3sc/solidity.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw n3sc::CompileError("io.read", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw n3sc::CompileError("io.write", "cannot write " + path.string());
  out << text;
}

int run_compile(const std::string& rules, const std::string& ontology,
                const std::string& target, const std::string& out_dir,
                const std::string& name, bool inline_requests) {
  n3sc::CompileOptions opts;
  opts.inline_requests = inline_requests;
  auto result = n3sc::compile_rules(slurp(rules), slurp(ontology), opts);
  for (const auto& note : result.notes) std::cerr << "note: " << note.str() << "\n";

  fs::create_directories(out_dir);
  fs::path dir(out_dir);
  bool all = target == "all";
  if (all || target == "bridge-json")
    spill(dir / "bridge.json", n3sc::serialize(result.program));
  if (all || target == "pseudocode")
    spill(dir / (name + ".pseudo.txt"), n3sc::emit_pseudocode(result.program));
  if (all || target == "solidity") {
    n3sc::SolidityOptions sopts;
    sopts.contract_name = name;
    auto sol = n3sc::emit_solidity(result.program, sopts);
    for (const auto& w : sol.warnings) std::cerr << "warning: " << w.str() << "\n";
    spill(dir / (name + ".sol"), sol.source);
    spill(dir / "manifest.json", sol.manifest);
  }
  return 0;
}

int run_program(const std::string& program_path, const std::string& fixture_path,
                bool oracle_check, const std::string& rules, const std::string& ontology) {
  n3sc::BridgeProgram program = n3sc::deserialize(slurp(program_path));
  n3sc::Fixture fixture = n3sc::load_fixture(slurp(fixture_path), program);
  n3sc::ExecutionTranscript transcript = n3sc::execute_contract(program, fixture);
  std::cout << transcript.to_json_lines();
  if (!oracle_check) return 0;

  if (rules.empty() || ontology.empty()) {
    std::cerr << "error: --oracle-check requires --rules and --ontology\n";
    return 2;
  }
  auto doc = n3sc::parse_document(slurp(rules));
  auto dataset = n3sc::flatten_fixture(fixture, program.model);
  auto inferences = n3sc::naive_rule_eval(doc.rules, dataset, program.model);
  auto report = n3sc::compare_outcomes(transcript, inferences);
  if (report.match) {
    std::cerr << "oracle-check: MATCH\n";
    return 0;
  }
  std::cerr << "oracle-check: MISMATCH\n";
  for (const auto& d : report.discrepancies) std::cerr << "  " << d << "\n";
  return 1;
}

int run_graph(const std::string& rules, const std::string& ontology,
              const std::string& dot_path) {
  auto doc = n3sc::parse_document(slurp(rules));
  auto ont = n3sc::load_ontology(slurp(ontology));
  std::vector<n3sc::RuleGraph> graphs;
  for (const auto& rule : doc.rules)
    graphs.push_back(n3sc::build_rule_graph(rule, ont));
  graphs = n3sc::order_rule_chain(std::move(graphs));
  std::string dot;
  for (size_t i = 0; i < graphs.size(); ++i)
    dot += graphs[i].dot("rule" + std::to_string(i + 1));
  spill(dot_path, dot);
  return 0;
}

int run_check(const std::string& rules, const std::string& ontology) {
  auto result = n3sc::compile_rules(slurp(rules), slurp(ontology));
  for (const auto& note : result.notes) std::cerr << "note: " << note.str() << "\n";
  std::cerr << "ok: " << result.graphs.size() << " rule(s) within the supported fragment\n";
  return 0;
}

int run_fuzz(const std::string& rules, const std::string& ontology, int count,
             uint64_t seed) {
  auto result = n3sc::compile_rules(slurp(rules), slurp(ontology));
  int mismatches = 0;
  for (int i = 0; i < count; ++i) {
    n3sc::Fixture fixture = n3sc::generate_fixture(result.program, seed + static_cast<uint64_t>(i));
    auto transcript = n3sc::execute_contract(result.program, fixture);
    auto dataset = n3sc::flatten_fixture(fixture, result.program.model);
    auto inferences =
        n3sc::naive_rule_eval(result.document.rules, dataset, result.program.model);
    auto report = n3sc::compare_outcomes(transcript, inferences);
    if (!report.match) {
      ++mismatches;
      std::cerr << "MISMATCH at seed " << seed + static_cast<uint64_t>(i) << "\n";
      for (const auto& d : report.discrepancies) std::cerr << "  " << d << "\n";
    }
  }
  std::cerr << count - mismatches << "/" << count << " fixtures matched\n";
  return mismatches ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"n3sc: compiles restricted N3 decision rules into smart contracts"};
  app.require_subcommand(1);

  std::string rules, ontology, target = "all", out_dir = "out", name = "Contract1";
  bool inline_requests = false;
  auto* compile = app.add_subcommand("compile", "compile rules to contract artifacts");
  compile->add_option("--rules", rules, "N3 rule file")->required();
  compile->add_option("--ontology", ontology, "ontology file")->required();
  compile->add_option("--target", target, "solidity|bridge-json|pseudocode|all")
      ->check(CLI::IsMember({"solidity", "bridge-json", "pseudocode", "all"}));
  compile->add_option("--out", out_dir, "output directory");
  compile->add_option("--name", name, "contract name");
  compile->add_flag("--inline-requests", inline_requests,
                    "render remote data as locally navigable paths");

  std::string program_path, fixture_path;
  bool oracle_check = false;
  auto* run = app.add_subcommand("run", "execute a compiled program on a fixture");
  run->add_option("--program", program_path, "bridge.json")->required();
  run->add_option("--fixture", fixture_path, "fixture JSON")->required();
  run->add_flag("--oracle-check", oracle_check,
                "also run the declarative evaluator and compare outcomes");
  run->add_option("--rules", rules, "N3 rule file (for --oracle-check)");
  run->add_option("--ontology", ontology, "ontology file (for --oracle-check)");

  std::string dot_path = "rules.dot";
  auto* graph = app.add_subcommand("graph", "emit rule graphs as GraphViz DOT");
  graph->add_option("--rules", rules, "N3 rule file")->required();
  graph->add_option("--ontology", ontology, "ontology file")->required();
  graph->add_option("--dot", dot_path, "output DOT file");

  auto* check = app.add_subcommand("check", "restriction diagnostics only");
  check->add_option("--rules", rules, "N3 rule file")->required();
  check->add_option("--ontology", ontology, "ontology file")->required();

  int fuzz_count = 100;
  uint64_t seed = 1;
  auto* fuzz = app.add_subcommand("fuzz", "randomized differential testing");
  fuzz->add_option("--rules", rules, "N3 rule file")->required();
  fuzz->add_option("--ontology", ontology, "ontology file")->required();
  fuzz->add_option("--count", fuzz_count, "number of fixtures");
  fuzz->add_option("--seed", seed, "base seed");

  try {
    app.parse(argc, argv);
    if (compile->parsed())
      return run_compile(rules, ontology, target, out_dir, name, inline_requests);
    if (run->parsed())
      return run_program(program_path, fixture_path, oracle_check, rules, ontology);
    if (graph->parsed()) return run_graph(rules, ontology, dot_path);
    if (check->parsed()) return run_check(rules, ontology);
    if (fuzz->parsed()) return run_fuzz(rules, ontology, fuzz_count, seed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const n3sc::CompileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
