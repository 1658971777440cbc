#pragma once

#include <optional>
#include <string>
#include <vector>

#include "n3sc/n3_document.hpp"
#include "n3sc/ontology.hpp"

namespace n3sc {

enum class Clause { Body, Head };

enum class Comparator { Equal, NotLess, Less, Greater, NotGreater, InList };

enum class MathOp { Sum, Product, Quotient, Exponent };

std::string comparator_name(Comparator c);
std::string math_op_name(MathOp op);

struct GraphEdge {
  enum class Kind { Property, RdfType, Comparator };

  Kind kind = Kind::Property;
  std::string property;  // IRI; the inverse when inverted
  Clause clause = Clause::Body;
  std::optional<Comparator> comparator;
  std::optional<std::string> request_location;
  std::optional<std::string> original_property;  // set iff the edge was inverted
  bool synthetic_inverse = false;
  int target = -1;
  int order = 0;  // source position of the originating triple
  SourcePos pos;

  bool inverted() const { return original_property.has_value(); }
};

struct GraphNode {
  Term term;
  std::vector<GraphEdge> outgoing;  // deterministic order
  std::optional<TypeRef> resolved;  // class or datatype; empty for lists
  std::optional<std::string> key_type;  // rdf:type target that is not a class
  bool is_head_root = false;
};

/// Operation triple: list-of-operands subject, math operator predicate,
/// result variable object.
struct OperationEdge {
  std::vector<Term> operands;
  MathOp op = MathOp::Sum;
  Term result;  // Var
  int order = 0;
  SourcePos pos;
};

/// Comparator atom whose subject is bound by an operation, not a path.
struct DetachedComparison {
  Term subject;  // Var
  Comparator cmp = Comparator::Equal;
  Term rhs;
  int order = 0;
  SourcePos pos;
};

struct RuleGraph {
  AnnotatedRule rule;
  int root = -1;
  std::vector<int> extra_roots;  // further function parameters
  std::vector<int> head_roots;   // head existential (blank) roots
  std::vector<GraphNode> nodes;
  std::vector<OperationEdge> operations;
  std::vector<DetachedComparison> detached_comparisons;

  const GraphNode& node(int i) const { return nodes[static_cast<size_t>(i)]; }

  /// Property IRIs inferred by this rule's head (non-type head edges).
  std::vector<std::string> head_predicates() const;
  /// Property IRIs used by body edges (requests included).
  std::vector<std::string> body_predicates() const;

  /// GraphViz rendering with clause/request/comparator annotations.
  std::string dot(const std::string& name) const;
};

/// Builds the annotated star graph for one rule, enforcing the dialect
/// restrictions (concrete predicates, connectivity after inversion,
/// acyclicity, single ontology class per node).
RuleGraph build_rule_graph(const AnnotatedRule& rule, const Ontology& ont);

/// Orders rule graphs so every body predicate inferred by another rule comes
/// after that rule; requires exactly one valid linear order.
std::vector<RuleGraph> order_rule_chain(std::vector<RuleGraph> graphs);

}  // namespace n3sc
