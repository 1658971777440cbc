#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "n3sc/diagnostics.hpp"
#include "n3sc/rule_graph.hpp"

namespace n3sc {

// ---------------------------------------------------------------------------
// Model (abstract data types)
// ---------------------------------------------------------------------------

/// Either an XSD datatype or a reference to a ModelAdt (by name).
struct ModelType {
  std::string datatype;  // XSD IRI, or
  std::string adt;       // ADT name; exactly one of the two is set

  bool is_datatype() const { return !datatype.empty(); }
  bool operator==(const ModelType& o) const {
    return datatype == o.datatype && adt == o.adt;
  }
  std::string str() const { return is_datatype() ? iri_local_name(datatype) : adt; }
};

struct ModelProperty {
  std::string term;  // property IRI
  std::string name;  // mangled identifier, unique within the ADT
  std::optional<std::string> label;
  bool unbounded = false;  // cardinality [0..*] vs [0..1]
  ModelType type;
  bool use_dictionary = false;
  std::optional<std::string> dictionary_key;  // key-type IRI

  /// True when the rule's head inferred this property rather than the data
  /// supplying it; informational.
  bool inferred = false;
};

struct ModelAdt {
  std::string term;  // class IRI
  std::string name;  // mangled identifier, unique within the model
  std::optional<std::string> label;
  std::vector<ModelProperty> fields;

  const ModelProperty* field(const std::string& name_) const {
    for (const auto& f : fields)
      if (f.name == name_) return &f;
    return nullptr;
  }
  const ModelProperty* field_by_term(const std::string& iri) const {
    for (const auto& f : fields)
      if (f.term == iri) return &f;
    return nullptr;
  }
};

struct Model {
  std::vector<ModelAdt> adts;                       // creation order
  std::map<std::string, std::string> mangling;      // IRI -> identifier
  std::map<std::string, std::string> individuals;   // local name -> IRI

  const ModelAdt* adt(const std::string& name) const {
    for (const auto& a : adts)
      if (a.name == name) return &a;
    return nullptr;
  }
  const ModelAdt* adt_by_term(const std::string& iri) const {
    for (const auto& a : adts)
      if (a.term == iri) return &a;
    return nullptr;
  }
  ModelAdt* adt_mut(const std::string& name) {
    for (auto& a : adts)
      if (a.name == name) return &a;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Operands
// ---------------------------------------------------------------------------

struct Operand;
using OperandPtr = std::shared_ptr<const Operand>;

enum class OperandKind { Literal, Variable, Path, Create, Operation, LiteralList };

/// Literal value kinds; Iri covers individual constants such as insurer names.
enum class ValueKind { String, Integer, Decimal, Iri };

struct PathStep {
  std::string property;            // ModelProperty name
  std::optional<std::string> key;  // dictionary access key (local name)
  /// Step inserted to compare an entity against a literal through the
  /// class's value field; dereference is null-propagating, like keyed steps.
  bool value_hop = false;

  bool operator==(const PathStep& o) const {
    return property == o.property && key == o.key && value_hop == o.value_hop;
  }
};

struct Operand {
  OperandKind kind = OperandKind::Literal;

  // Literal
  ValueKind value_kind = ValueKind::String;
  std::string value;  // lexical form; local name for Iri

  // Variable
  std::string var;

  // Path
  std::string root_var;
  std::vector<PathStep> steps;

  // Create
  std::string adt;
  std::vector<std::pair<std::string, OperandPtr>> args;  // field name -> value

  // Operation
  MathOp op = MathOp::Sum;
  std::vector<OperandPtr> operands;

  // LiteralList
  std::vector<OperandPtr> items;

  static OperandPtr literal(ValueKind k, std::string lexical);
  static OperandPtr variable(std::string name);
  static OperandPtr path(std::string root, std::vector<PathStep> steps);
  static OperandPtr create(std::string adt,
                           std::vector<std::pair<std::string, OperandPtr>> args);
  static OperandPtr operation(MathOp op, std::vector<OperandPtr> operands);
  static OperandPtr literal_list(std::vector<OperandPtr> items);

  /// Extends a path operand by one step.
  static OperandPtr extend(const OperandPtr& base, PathStep step);
};

// ---------------------------------------------------------------------------
// Conditions
// ---------------------------------------------------------------------------

struct Condition;
using ConditionPtr = std::shared_ptr<const Condition>;

enum class ConditionKind { Comparison, Set, Qualified, CheckCall };

enum class CmpOp { Eq, Exists, In, Lt, Gt, Le, Ge };

std::string cmp_name(CmpOp op);

struct Condition {
  ConditionKind kind = ConditionKind::Comparison;

  // Comparison; right is null for Exists
  CmpOp cmp = CmpOp::Eq;
  OperandPtr left;
  OperandPtr right;

  // Set
  bool disjunction = false;
  std::vector<ConditionPtr> members;

  // Qualified
  bool universal = false;
  OperandPtr start;
  std::string loop_var;
  ConditionPtr inner;

  // CheckCall (introduced by backend lowering only)
  std::string fn;
  std::vector<OperandPtr> args;

  static ConditionPtr comparison(OperandPtr left, CmpOp op, OperandPtr right);
  static ConditionPtr exists(OperandPtr left);
  static ConditionPtr set(bool disjunction, std::vector<ConditionPtr> members);
  static ConditionPtr qualified(bool universal, OperandPtr start, std::string loop_var,
                                ConditionPtr inner);
  static ConditionPtr check_call(std::string fn, std::vector<OperandPtr> args);
};

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

struct Statement;
using StatementPtr = std::shared_ptr<const Statement>;

enum class StatementKind { Block, IfThen, Assign, Iterate, Remote, Emit };

struct Statement {
  StatementKind kind = StatementKind::Block;

  // Block
  std::vector<StatementPtr> statements;

  // IfThen; null condition means unconditional
  ConditionPtr condition;
  StatementPtr then_block;

  // Assign
  OperandPtr target;
  OperandPtr value;

  // Iterate
  OperandPtr start;
  std::string loop_var;
  StatementPtr body;

  // Remote: a data request and the callback boundary; the statements that
  // follow it in the enclosing block run once per retrieved record, with
  // result_var bound to the record.
  std::string location;
  std::string resource_type;  // ADT name
  std::vector<std::pair<std::string, OperandPtr>> params;  // property -> value
  std::string result_var;

  // Emit
  std::string event;
  OperandPtr payload;

  static StatementPtr block(std::vector<StatementPtr> statements);
  static StatementPtr if_then(ConditionPtr condition, StatementPtr then_block);
  static StatementPtr assign(OperandPtr target, OperandPtr value);
  static StatementPtr iterate(OperandPtr start, std::string loop_var, StatementPtr body);
  static StatementPtr remote(std::string location, std::string resource_type,
                             std::vector<std::pair<std::string, OperandPtr>> params,
                             std::string result_var);
  static StatementPtr emit(std::string event, OperandPtr payload);
};

// ---------------------------------------------------------------------------
// Program
// ---------------------------------------------------------------------------

struct EventDecl {
  std::string name;
  ModelType payload;
};

struct Function {
  std::string name;
  std::vector<std::pair<std::string, ModelType>> params;
  std::vector<StatementPtr> preamble;  // operation assignments
  std::vector<StatementPtr> logic;     // one IfThen per rule

  /// Functions synthesized by the backend (qualified-condition checks).
  bool is_check = false;
  ConditionPtr check_condition;
};

struct BridgeProgram {
  Model model;
  std::vector<Function> functions;
  std::vector<EventDecl> events;
};

// ---------------------------------------------------------------------------
// Validation and serialization
// ---------------------------------------------------------------------------

/// Checks structural invariants: path well-typedness, iteration cardinality,
/// exists-comparison arity, nonempty condition sets, request boundariesical
/// placement, referenced ADTs present. Returns diagnostics, empty when valid.
std::vector<Diagnostic> validate(const BridgeProgram& program);

/// Canonical JSON rendering; stable key and element order.
std::string serialize(const BridgeProgram& program);

/// Parses serialized programs; throws ir.schema errors with a JSON-pointer
/// style path on malformed input.
BridgeProgram deserialize(const std::string& text);

/// Structural program equality (via canonical serialization).
bool programs_equal(const BridgeProgram& a, const BridgeProgram& b);

/// Resolved type of a path/operand within a variable scope; used by
/// validation, the interpreter, and backends.
struct TypeScope {
  std::map<std::string, ModelType> vars;
};

struct ResolvedType {
  ModelType type;
  bool multi = false;  // unbounded final step without key access
};

/// Throws ir.path-type when a step does not exist on the reached ADT.
ResolvedType resolve_operand_type(const Model& model, const TypeScope& scope,
                                  const Operand& op);

}  // namespace n3sc
