#pragma once

#include "n3sc/bridge_ir.hpp"

namespace n3sc {

/// Rewrites applied when dictionary-bearing ADTs are merged into their root:
/// at ADT `adt`, step `field` followed by `inner` becomes the flat `merged`.
struct FlattenRewrite {
  std::string adt;
  std::string field;
  std::string inner;
  std::string merged;
};

struct FlattenResult {
  Model model;
  std::vector<FlattenRewrite> rewrites;
};

/// Merges fields of nested dictionary-bearing ADTs into each root ADT
/// (function parameter and remote-resource types) and rewrites all property
/// paths in the program accordingly. Returns the rewrite table.
FlattenResult flatten_mapping_structs(BridgeProgram& program);

/// Replaces every QualifiedCondition with a call to a synthesized private
/// boolean function (check1, check2, ... in emission order).
void synthesize_check_functions(BridgeProgram& program);

/// One emitted contract function: the public entry or an oracle callback.
struct ContractSegment {
  std::string name;
  std::vector<StatementPtr> preamble;
  std::vector<StatementPtr> body;
  /// Name of the callback serving this segment's remote request, if any.
  std::optional<std::string> request_callback;
};

/// Splits the entry function at each remote-request boundary: segment 0 is
/// `process`; segment k resumes in `callback<k>` with the retrieved array.
std::vector<ContractSegment> split_callbacks(const Function& fn);

struct SolidityOptions {
  std::string contract_name = "Contract1";
};

struct SolidityResult {
  std::string source;
  std::string manifest;  // JSON: size, functions, events, structs, enums, mangling
  std::vector<Diagnostic> warnings;
};

/// Emits the full contract source. Applies flattening, enum synthesis, check
/// synthesis, and callback splitting; deterministic byte-for-byte.
SolidityResult emit_solidity(const BridgeProgram& program,
                             const SolidityOptions& opts = {});

/// Light well-formedness check on emitted source: comment/string-aware
/// token balance of (), {}, []. Returns diagnostics, empty when balanced.
std::vector<Diagnostic> check_solidity_wellformed(const std::string& source);

}  // namespace n3sc
