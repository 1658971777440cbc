#include <algorithm>
#include <map>
#include <set>

#include "n3sc/rule_graph.hpp"

namespace n3sc {

namespace {

std::optional<Comparator> comparator_for(const std::string& iri) {
  if (iri == builtins::math_ns + "notLessThan") return Comparator::NotLess;
  if (iri == builtins::math_ns + "lessThan") return Comparator::Less;
  if (iri == builtins::math_ns + "greaterThan") return Comparator::Greater;
  if (iri == builtins::math_ns + "notGreaterThan") return Comparator::NotGreater;
  if (iri == builtins::math_ns + "equalTo") return Comparator::Equal;
  if (iri == builtins::list_ns + "in") return Comparator::InList;
  return std::nullopt;
}

std::optional<MathOp> math_op_for(const std::string& iri) {
  if (iri == builtins::math_ns + "sum") return MathOp::Sum;
  if (iri == builtins::math_ns + "product") return MathOp::Product;
  if (iri == builtins::math_ns + "quotient") return MathOp::Quotient;
  if (iri == builtins::math_ns + "exponentiation") return MathOp::Exponent;
  if (iri == builtins::math_ns + "exponent") return MathOp::Exponent;
  return std::nullopt;
}

// identity key for graph nodes: variables and blanks are shared, concrete
// terms get one leaf node per occurrence
std::optional<std::string> shared_key(const Term& t) {
  if (t.is(TermKind::Var)) return "?" + t.text();
  if (t.is(TermKind::Blank)) return "_:" + t.text();
  return std::nullopt;
}

struct Atom {
  Triple triple;
  std::optional<std::string> request_location;
  Clause clause = Clause::Body;
  int order = 0;
};

class GraphBuilder {
 public:
  GraphBuilder(const AnnotatedRule& rule, const Ontology& ont) : ont_(ont) {
    g_.rule = rule;
  }

  RuleGraph build() {
    collect_atoms();
    make_roots();
    connect();
    check_cycles();
    sort_edges();
    resolve_types();
    return std::move(g_);
  }

 private:
  int node_for(const Term& t, bool create = true) {
    auto key = shared_key(t);
    if (key) {
      auto it = index_.find(*key);
      if (it != index_.end()) return it->second;
    }
    if (!create) return -1;
    g_.nodes.push_back(GraphNode{t, {}, std::nullopt, std::nullopt, false});
    int id = static_cast<int>(g_.nodes.size()) - 1;
    if (key) index_[*key] = id;
    return id;
  }

  bool connected(const Term& t) const {
    auto key = shared_key(t);
    if (!key) return false;
    auto it = index_.find(*key);
    return it != index_.end() && connected_.count(it->second) > 0;
  }

  void collect_atoms() {
    const AnnotatedRule& rule = g_.rule;
    int order = 0;
    for (const auto& a : flattened_body(rule)) {
      Atom atom{a.triple, a.request_location, Clause::Body, order++};
      classify(atom);
    }
    for (const auto& t : rule.head.triples) {
      Atom atom{t, std::nullopt, Clause::Head, order++};
      classify(atom);
    }
  }

  void classify(const Atom& atom) {
    const Triple& t = atom.triple;
    if (t.predicate.is(TermKind::Var))
      throw CompileError(errc::graph_variable_predicate,
                         "all predicates should be concrete (non-variable)", t.pos);
    if (!t.predicate.is(TermKind::Iri))
      throw CompileError(errc::syntax, "predicate must be an IRI", t.pos);

    if (t.subject.is(TermKind::List)) {
      auto op = math_op_for(t.predicate.text());
      if (!op)
        throw CompileError(
            errc::op_unknown,
            "operator <" + t.predicate.text() + "> is not one of sum, product, "
            "quotient, exponent", t.pos);
      if (!t.object.is(TermKind::Var))
        throw CompileError(errc::op_unknown, "operation result must be a variable",
                           t.pos);
      if (atom.clause == Clause::Head)
        throw CompileError(errc::op_unknown, "operations are body-only", t.pos);
      g_.operations.push_back({t.subject.items(), *op, t.object, atom.order, t.pos});
      for (const auto& item : t.subject.items())
        if (item.is(TermKind::Var)) op_operand_vars_.insert(item.text());
      op_result_vars_.insert(t.object.text());
      return;
    }
    if (comparator_for(t.predicate.text()) && atom.clause == Clause::Head)
      throw CompileError(errc::syntax, "comparator builtins are body-only", t.pos);
    if ((t.subject.is(TermKind::Blank) || t.object.is(TermKind::Blank)) &&
        atom.clause == Clause::Body)
      throw CompileError(errc::syntax, "blank nodes are only supported in rule heads",
                         t.pos);
    if (t.subject.is_concrete())
      throw CompileError(errc::graph_disconnected,
                         "concrete subjects are not supported in rules", t.pos);
    pending_.push_back(atom);
  }

  void make_roots() {
    const AnnotatedRule& rule = g_.rule;
    if (rule.function_params.empty())
      throw CompileError(errc::syntax, "rule has no cg:functionParam", rule.pos);
    for (size_t i = 0; i < rule.function_params.size(); ++i) {
      int id = node_for(rule.function_params[i]);
      connected_.insert(id);
      if (i == 0)
        g_.root = id;
      else
        g_.extra_roots.push_back(id);
    }
    // head existentials are secondary roots: the generated logic constructs
    // them rather than navigating to them
    for (const auto& t : rule.head.triples) {
      if (t.subject.is(TermKind::Blank)) {
        int id = node_for(t.subject);
        if (!g_.nodes[static_cast<size_t>(id)].is_head_root) {
          g_.nodes[static_cast<size_t>(id)].is_head_root = true;
          g_.head_roots.push_back(id);
          connected_.insert(id);
        }
      }
      if (t.object.is(TermKind::Blank))
        throw CompileError(errc::syntax, "blank nodes as head objects are not supported",
                           t.pos);
    }
  }

  void add_edge(int from, GraphEdge e) {
    g_.nodes[static_cast<size_t>(from)].outgoing.push_back(std::move(e));
  }

  bool place(const Atom& atom) {
    const Triple& t = atom.triple;
    const std::string& pred = t.predicate.text();
    auto cmp = comparator_for(pred);

    if (cmp) {
      // comparator edges run from the value node to a concrete/list leaf
      if (connected(t.subject)) {
        int src = node_for(t.subject);
        int dst = node_for(t.object);
        if (shared_key(t.object)) connected_.insert(dst);
        GraphEdge e;
        e.kind = GraphEdge::Kind::Comparator;
        e.property = pred;
        e.clause = atom.clause;
        e.comparator = cmp;
        e.request_location = atom.request_location;
        e.target = dst;
        e.order = atom.order;
        e.pos = t.pos;
        add_edge(src, e);
        return true;
      }
      if (t.subject.is(TermKind::Var) && op_result_vars_.count(t.subject.text())) {
        g_.detached_comparisons.push_back({t.subject, *cmp, t.object, atom.order, t.pos});
        return true;
      }
      return false;
    }

    if (pred == rdfns::rdf_type) {
      if (!connected(t.subject)) return false;
      int src = node_for(t.subject);
      int dst = node_for(t.object);
      GraphEdge e;
      e.kind = GraphEdge::Kind::RdfType;
      e.property = pred;
      e.clause = atom.clause;
      e.request_location = atom.request_location;
      e.target = dst;
      e.order = atom.order;
      e.pos = t.pos;
      add_edge(src, e);
      return true;
    }

    if (connected(t.subject)) {
      int src = node_for(t.subject);
      int dst = node_for(t.object);
      if (shared_key(t.object)) connected_.insert(dst);
      GraphEdge e;
      e.property = pred;
      e.clause = atom.clause;
      e.request_location = atom.request_location;
      e.target = dst;
      e.order = atom.order;
      e.pos = t.pos;
      add_edge(src, e);
      return true;
    }
    if (connected(t.object)) {
      // point the edge toward the unconnected subject via the inverse property
      InverseRef inv = inverse_of(ont_, pred);
      int src = node_for(t.object);
      int dst = node_for(t.subject);
      connected_.insert(dst);
      GraphEdge e;
      e.property = inv.iri;
      e.clause = atom.clause;
      e.request_location = atom.request_location;
      e.original_property = pred;
      e.synthetic_inverse = inv.synthetic;
      e.target = dst;
      e.order = atom.order;
      e.pos = t.pos;
      add_edge(src, e);
      return true;
    }
    return false;
  }

  void connect() {
    while (!pending_.empty()) {
      // BFS rounds keep attachment paths shortest; within a round atoms are
      // tried in source order
      std::set<int> frontier = connected_;
      std::vector<Atom> next;
      bool progress = false;
      for (const auto& atom : pending_) {
        bool was_connected_s = frontier_has(frontier, atom.triple.subject);
        bool was_connected_o = frontier_has(frontier, atom.triple.object);
        bool detachable = comparator_for(atom.triple.predicate.text()) &&
                          atom.triple.subject.is(TermKind::Var) &&
                          op_result_vars_.count(atom.triple.subject.text()) > 0;
        if ((was_connected_s || was_connected_o || detachable) && place(atom)) {
          progress = true;
        } else {
          next.push_back(atom);
        }
      }
      pending_ = std::move(next);
      if (!progress) break;
    }
    if (!pending_.empty()) {
      const Triple& t = pending_.front().triple;
      throw CompileError(errc::graph_disconnected,
                         "triple cannot be connected to the function parameter, "
                         "even using an inverse property",
                         t.pos);
    }
  }

  bool frontier_has(const std::set<int>& frontier, const Term& t) const {
    auto key = shared_key(t);
    if (!key) return false;
    auto it = index_.find(*key);
    return it != index_.end() && frontier.count(it->second) > 0;
  }

  void check_cycles() {
    std::vector<int> state(g_.nodes.size(), 0);
    for (int r : all_roots()) dfs_cycle(r, state);
  }

  std::vector<int> all_roots() const {
    std::vector<int> roots{g_.root};
    roots.insert(roots.end(), g_.extra_roots.begin(), g_.extra_roots.end());
    roots.insert(roots.end(), g_.head_roots.begin(), g_.head_roots.end());
    return roots;
  }

  void dfs_cycle(int n, std::vector<int>& state) {
    auto& s = state[static_cast<size_t>(n)];
    if (s == 1)
      throw CompileError(errc::graph_cycle, "rule graph contains a cycle",
                         g_.nodes[static_cast<size_t>(n)].term.pos());
    if (s == 2) return;
    s = 1;
    for (const auto& e : g_.nodes[static_cast<size_t>(n)].outgoing) dfs_cycle(e.target, state);
    s = 2;
  }

  void sort_edges() {
    for (auto& n : g_.nodes)
      std::stable_sort(n.outgoing.begin(), n.outgoing.end(),
                       [](const GraphEdge& a, const GraphEdge& b) {
                         if (a.order != b.order) return a.order < b.order;
                         return a.property < b.property;
                       });
  }

  void resolve_types() {
    // incoming edges indexed by target
    std::vector<const GraphEdge*> incoming(g_.nodes.size(), nullptr);
    for (const auto& n : g_.nodes)
      for (const auto& e : n.outgoing) {
        auto& slot = incoming[static_cast<size_t>(e.target)];
        // the body attachment edge wins over extra head edges
        if (!slot || (slot->clause == Clause::Head && e.clause == Clause::Body))
          slot = &e;
      }

    for (size_t i = 0; i < g_.nodes.size(); ++i) {
      GraphNode& n = g_.nodes[i];
      if (n.term.is(TermKind::List)) continue;
      if (n.term.is(TermKind::Literal)) {
        switch (n.term.literal_kind()) {
          case LiteralKind::String: n.resolved = TypeRef{true, rdfns::xsd_string}; break;
          case LiteralKind::Integer: n.resolved = TypeRef{true, rdfns::xsd_integer}; break;
          case LiteralKind::Decimal: n.resolved = TypeRef{true, rdfns::xsd_decimal}; break;
        }
        continue;
      }
      if (n.term.is(TermKind::Iri)) {
        // concrete leaf: an individual; typed by its incoming property below
        // only if needed, represented as an opaque IRI value
        const GraphEdge* in = incoming[i];
        if (in && in->kind == GraphEdge::Kind::RdfType) continue;  // class target
        if (in && in->kind == GraphEdge::Kind::Comparator) continue;
        n.resolved = std::nullopt;  // IRI leaves are value constants
        continue;
      }

      NodeTypeContext ctx;
      ctx.pos = n.term.pos();
      for (const auto& e : n.outgoing) {
        if (e.kind == GraphEdge::Kind::RdfType) {
          const Term& target = g_.nodes[static_cast<size_t>(e.target)].term;
          if (!target.is(TermKind::Iri))
            throw CompileError(errc::syntax, "rdf:type object must be an IRI", e.pos);
          if (ont_.is_class(target.text())) {
            ctx.explicit_types.push_back(target.text());
          } else {
            if (n.key_type && *n.key_type != target.text())
              throw CompileError(errc::type_conflict,
                                 "node has multiple non-class type values", e.pos);
            n.key_type = target.text();
          }
        } else if (e.kind == GraphEdge::Kind::Property) {
          ctx.outgoing_properties.push_back(e.inverted() ? *e.original_property
                                                         : e.property);
        }
      }
      const GraphEdge* in = incoming[i];
      if (in && in->kind == GraphEdge::Kind::Property) {
        ctx.incoming_property = in->property;
        ctx.incoming_inverted = in->inverted();
        ctx.incoming_original = in->original_property;
      }
      if (in && in->kind == GraphEdge::Kind::Comparator) {
        // comparator targets that are variables inherit no class; leave untyped
        continue;
      }
      n.resolved = type_of_node(ont_, ctx);
    }
  }

  const Ontology& ont_;
  RuleGraph g_;
  std::map<std::string, int> index_;
  std::set<int> connected_;
  std::vector<Atom> pending_;
  std::set<std::string> op_result_vars_;
  std::set<std::string> op_operand_vars_;
};

}  // namespace

std::string comparator_name(Comparator c) {
  switch (c) {
    case Comparator::Equal: return "==";
    case Comparator::NotLess: return ">=";
    case Comparator::Less: return "<";
    case Comparator::Greater: return ">";
    case Comparator::NotGreater: return "<=";
    case Comparator::InList: return "in";
  }
  return "?";
}

std::string math_op_name(MathOp op) {
  switch (op) {
    case MathOp::Sum: return "+";
    case MathOp::Product: return "*";
    case MathOp::Quotient: return "/";
    case MathOp::Exponent: return "^";
  }
  return "?";
}

std::vector<std::string> RuleGraph::head_predicates() const {
  std::vector<std::string> out;
  for (const auto& n : nodes)
    for (const auto& e : n.outgoing)
      if (e.clause == Clause::Head && e.kind == GraphEdge::Kind::Property)
        out.push_back(e.inverted() ? *e.original_property : e.property);
  return out;
}

std::vector<std::string> RuleGraph::body_predicates() const {
  std::vector<std::string> out;
  for (const auto& n : nodes)
    for (const auto& e : n.outgoing)
      if (e.clause == Clause::Body && e.kind == GraphEdge::Kind::Property)
        out.push_back(e.inverted() ? *e.original_property : e.property);
  return out;
}

std::string RuleGraph::dot(const std::string& name) const {
  std::string s = "digraph \"" + name + "\" {\n";
  s += "  rankdir=LR;\n";
  for (size_t i = 0; i < nodes.size(); ++i) {
    std::string label = nodes[i].term.str();
    std::string shape = (static_cast<int>(i) == root) ? "doubleoctagon"
                        : nodes[i].is_head_root       ? "octagon"
                                                      : "ellipse";
    s += "  n" + std::to_string(i) + " [label=\"" + label + "\", shape=" + shape + "];\n";
  }
  for (size_t i = 0; i < nodes.size(); ++i) {
    for (const auto& e : nodes[i].outgoing) {
      std::string label;
      if (e.kind == GraphEdge::Kind::RdfType)
        label = "a";
      else if (e.kind == GraphEdge::Kind::Comparator)
        label = comparator_name(*e.comparator);
      else
        label = iri_local_name(e.property);
      label += e.clause == Clause::Head ? " [head]" : " [body]";
      if (e.request_location) label += " [request " + *e.request_location + "]";
      if (e.inverted()) label += " [inverse of " + iri_local_name(*e.original_property) + "]";
      s += "  n" + std::to_string(i) + " -> n" + std::to_string(e.target) + " [label=\"" +
           label + "\"];\n";
    }
  }
  s += "}\n";
  return s;
}

RuleGraph build_rule_graph(const AnnotatedRule& rule, const Ontology& ont) {
  return GraphBuilder(rule, ont).build();
}

std::vector<RuleGraph> order_rule_chain(std::vector<RuleGraph> graphs) {
  const size_t n = graphs.size();
  if (n == 0)
    throw CompileError(errc::chain_invalid, "no rules to order");
  if (n == 1) return graphs;

  std::vector<std::set<std::string>> heads(n), bodies(n);
  for (size_t i = 0; i < n; ++i) {
    for (const auto& p : graphs[i].head_predicates()) heads[i].insert(p);
    for (const auto& p : graphs[i].body_predicates()) bodies[i].insert(p);
  }

  // i -> j when rule j consumes a predicate inferred by rule i
  std::vector<std::set<size_t>> succ(n);
  std::vector<size_t> indegree(n, 0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      bool dep = false;
      for (const auto& p : heads[i])
        if (bodies[j].count(p)) dep = true;
      if (dep && succ[i].insert(j).second) indegree[j]++;
    }

  std::vector<RuleGraph> ordered;
  std::vector<bool> done(n, false);
  for (size_t step = 0; step < n; ++step) {
    std::vector<size_t> ready;
    for (size_t i = 0; i < n; ++i)
      if (!done[i] && indegree[i] == 0) ready.push_back(i);
    if (ready.empty())
      throw CompileError(errc::chain_invalid,
                         "rules have cyclic inference dependencies; no linear chain");
    if (ready.size() > 1)
      throw CompileError(errc::chain_invalid,
                         "rule order is ambiguous; rules must form a single "
                         "sequential chain");
    size_t pick = ready[0];
    done[pick] = true;
    for (size_t j : succ[pick]) indegree[j]--;
    ordered.push_back(std::move(graphs[pick]));
  }
  return ordered;
}

}  // namespace n3sc
