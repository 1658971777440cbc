#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace n3sc {

struct SourcePos {
  int line = 0;
  int col = 0;

  bool known() const { return line > 0; }
  std::string str() const {
    return known() ? std::to_string(line) + ":" + std::to_string(col) : "?";
  }
};

/// Stable diagnostic codes, asserted on by tests and printed to stderr.
namespace errc {
inline constexpr const char* lex = "n3.lex";
inline constexpr const char* prefix = "n3.prefix";
inline constexpr const char* delim = "n3.delim";
inline constexpr const char* syntax = "n3.syntax";
inline constexpr const char* annotation = "n3.annotation";
inline constexpr const char* request_object = "n3.request-object";

inline constexpr const char* ont_syntax = "ont.syntax";
inline constexpr const char* ont_undeclared = "ont.undeclared";

inline constexpr const char* type_none = "type.none";
inline constexpr const char* type_conflict = "type.conflict";
inline constexpr const char* type_datatype_object = "type.datatype-object";
inline constexpr const char* type_value_field = "type.value-field";

inline constexpr const char* graph_variable_predicate = "graph.variable-predicate";
inline constexpr const char* graph_disconnected = "graph.disconnected";
inline constexpr const char* graph_cycle = "graph.cycle";
inline constexpr const char* graph_request_shape = "graph.request-shape";
inline constexpr const char* chain_invalid = "chain.invalid";

inline constexpr const char* op_unknown = "op.unknown-operator";
inline constexpr const char* op_unresolvable = "op.unresolvable";

inline constexpr const char* logic_unbound_head = "logic.unbound-head-variable";
inline constexpr const char* logic_unknown_field = "logic.unknown-field";
inline constexpr const char* logic_request_untyped = "logic.request-untyped";
inline constexpr const char* logic_request_unbound = "logic.request-unbound";
inline constexpr const char* logic_request_in_loop = "logic.request-in-loop";
inline constexpr const char* logic_event_payload = "logic.event-payload";

inline constexpr const char* adt_field_conflict = "adt.field-conflict";

inline constexpr const char* ir_schema = "ir.schema";
inline constexpr const char* ir_path_type = "ir.path-type";
inline constexpr const char* ir_cardinality = "ir.cardinality";
inline constexpr const char* ir_condset_empty = "ir.condset-empty";
inline constexpr const char* ir_boundary = "ir.boundary";

inline constexpr const char* sol_size = "sol.size";
inline constexpr const char* sol_construct = "sol.construct";

inline constexpr const char* fixture_type = "fixture.type";
inline constexpr const char* run_duplicate_key = "run.duplicate-key";
inline constexpr const char* run_absent_field = "run.absent-field";
inline constexpr const char* run_fragment = "run.fragment";
}  // namespace errc

struct Diagnostic {
  std::string code;
  std::string message;
  SourcePos pos;

  std::string str() const {
    std::string s = code;
    if (pos.known()) s += " at " + pos.str();
    s += ": " + message;
    return s;
  }
};

/// Thrown by pipeline stages on the first unrecoverable error.
class CompileError : public std::runtime_error {
 public:
  CompileError(std::string code, std::string message, SourcePos pos = {})
      : std::runtime_error(Diagnostic{code, message, pos}.str()),
        code_(std::move(code)),
        message_(std::move(message)),
        pos_(pos) {}

  const std::string& code() const { return code_; }
  const std::string& message() const { return message_; }
  SourcePos pos() const { return pos_; }

 private:
  std::string code_;
  std::string message_;
  SourcePos pos_;
};

}  // namespace n3sc
