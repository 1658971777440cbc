#include <algorithm>
#include <set>

#include "n3sc/logic_gen.hpp"

namespace n3sc {

namespace {

bool operand_equal(const Operand& a, const Operand& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case OperandKind::Literal:
      return a.value_kind == b.value_kind && a.value == b.value;
    case OperandKind::Variable:
      return a.var == b.var;
    case OperandKind::Path:
      return a.root_var == b.root_var && a.steps == b.steps;
    default:
      return false;
  }
}

CmpOp cmp_for(Comparator c) {
  switch (c) {
    case Comparator::Equal: return CmpOp::Eq;
    case Comparator::NotLess: return CmpOp::Ge;
    case Comparator::Less: return CmpOp::Lt;
    case Comparator::Greater: return CmpOp::Gt;
    case Comparator::NotGreater: return CmpOp::Le;
    case Comparator::InList: return CmpOp::In;
  }
  return CmpOp::Eq;
}

class LogicGenerator {
 public:
  LogicGenerator(const std::vector<RuleGraph>& chain, Model& model, const Ontology& ont,
                 const LogicOptions& opts)
      : chain_(chain), model_(model), ont_(ont), opts_(opts) {}

  LogicResult run() {
    if (chain_.empty()) throw CompileError(errc::chain_invalid, "no rules to compile");

    const RuleGraph& first = chain_.front();
    std::string param = first.node(first.root).term.text();
    ModelType entry = node_model_type(first, first.root);
    for (const auto& g : chain_) {
      if (g.node(g.root).term.text() != param || !(node_model_type(g, g.root) == entry))
        throw CompileError(errc::chain_invalid,
                           "chained rules must share the same function parameter");
    }

    fn_.name = "process";
    fn_.params.emplace_back(param, entry);
    used_names_.insert(param);
    for (const auto& g : chain_)
      for (int r : g.extra_roots) {
        std::string extra = g.node(r).term.text();
        if (!used_names_.count(extra)) {
          fn_.params.emplace_back(extra, node_model_type(g, r));
          used_names_.insert(extra);
        }
      }

    for (const auto& g : chain_) compile_rule(g);

    LogicResult out;
    out.function = std::move(fn_);
    out.events = std::move(events_);
    return out;
  }

 private:
  // ---- naming -------------------------------------------------------------

  std::string fresh(const std::string& base) {
    if (!used_names_.count(base)) {
      used_names_.insert(base);
      return base;
    }
    int n = 2;
    while (used_names_.count(base + std::to_string(n))) ++n;
    std::string name = base + std::to_string(n);
    used_names_.insert(name);
    return name;
  }

  // ---- model helpers ------------------------------------------------------

  ModelType node_model_type(const RuleGraph& g, int id) const {
    const GraphNode& n = g.node(id);
    if (!n.resolved)
      throw CompileError(errc::type_none, "untyped node", n.term.pos());
    if (n.resolved->is_datatype) return ModelType{n.resolved->iri, ""};
    const ModelAdt* adt = model_.adt_by_term(n.resolved->iri);
    if (!adt)
      throw CompileError(errc::logic_unknown_field,
                         "class <" + n.resolved->iri + "> missing from model",
                         n.term.pos());
    return ModelType{"", adt->name};
  }

  const ModelAdt* adt_of(const GraphNode& n) const {
    if (!n.resolved || n.resolved->is_datatype) return nullptr;
    return model_.adt_by_term(n.resolved->iri);
  }

  // returned by value: model mutations (type fields, dictionary marks)
  // can reallocate the field storage
  ModelProperty field_for(const GraphNode& src, const GraphEdge& e) const {
    const ModelAdt* adt = adt_of(src);
    if (!adt)
      throw CompileError(errc::logic_unknown_field, "path through a datatype value",
                         e.pos);
    for (const auto& f : adt->fields)
      if (f.term == e.property) return f;
    throw CompileError(errc::logic_unknown_field,
                       "field <" + e.property + "> absent from " + adt->name, e.pos);
  }

  void mark_dictionary(const GraphNode& src, const std::string& field_term,
                       const std::string& key_iri) {
    ModelAdt* adt = model_.adt_mut(adt_of(src)->name);
    for (auto& f : adt->fields)
      if (f.term == field_term) {
        f.use_dictionary = true;
        f.dictionary_key = key_iri;
        return;
      }
  }

  // synthesized string field for runtime type checks (heterogeneous arrays)
  std::string ensure_type_field(const std::string& adt_name) {
    ModelAdt* adt = model_.adt_mut(adt_name);
    if (const ModelProperty* f = adt->field_by_term(rdfns::rdf_type)) return f->name;
    ModelProperty f;
    f.term = rdfns::rdf_type;
    f.name = mangler_.name_for(rdfns::rdf_type, model_.mangling);
    f.type = ModelType{rdfns::xsd_string, ""};
    adt->fields.push_back(f);
    return adt->fields.back().name;
  }

  // value field used when an entity-typed path is compared against a literal
  OperandPtr value_hop(const OperandPtr& path, const ModelProperty& field, SourcePos pos) {
    if (field.type.is_datatype()) return path;
    const ModelAdt* adt = model_.adt(field.type.adt);
    auto vf = unique_value_field(ont_, adt->term);
    if (!vf)
      throw CompileError(errc::type_value_field,
                         "literal compared against " + adt->name +
                             " which has no unique datatype property",
                         pos);
    const ModelProperty* f = adt->field_by_term(*vf);
    if (!f)
      throw CompileError(errc::type_value_field,
                         "value field missing from " + adt->name, pos);
    PathStep step;
    step.property = f->name;
    step.value_hop = true;
    return Operand::extend(path, step);
  }

  // ---- per-rule state -----------------------------------------------------

  struct Frame {
    std::vector<ConditionPtr> conds;
    std::vector<StatementPtr> stmts;
  };

  struct ItCtx {
    OperandPtr start;
    std::string loop_var;
    Frame collected;
    int parent_ctx = -1;    // nested contexts
    size_t parent_frame = 0;
    size_t cond_pos = 0;  // insertion points into the parent containers
    size_t stmt_pos = 0;
    SourcePos pos;
  };

  std::vector<ConditionPtr>& cur_conds() {
    if (!ctx_stack_.empty()) return ctxs_[static_cast<size_t>(ctx_stack_.back())].collected.conds;
    return frames_.back().conds;
  }
  std::vector<StatementPtr>& cur_stmts() {
    if (!ctx_stack_.empty()) return ctxs_[static_cast<size_t>(ctx_stack_.back())].collected.stmts;
    return frames_.back().stmts;
  }

  void add_cond(ConditionPtr c) { cur_conds().push_back(std::move(c)); }

  // ---- rule compilation ---------------------------------------------------

  void compile_rule(const RuleGraph& g) {
    g_ = &g;
    frames_.clear();
    frames_.emplace_back();
    ctxs_.clear();
    ctx_stack_.clear();
    var_map_.clear();
    op_vars_.clear();
    visited_.assign(g.nodes.size(), false);

    visit_body(g.root, Operand::variable(fn_.params[0].first), false);
    for (int r : g.extra_roots) {
      const std::string& name = g.node(r).term.text();
      visit_body(r, Operand::variable(name), false);
    }

    generate_operations();
    emit_detached_comparisons();
    head_phase();
    close_contexts();

    // frames collapse innermost-first into nested IfThens
    for (size_t i = frames_.size(); i-- > 1;) {
      Frame& inner = frames_[i];
      StatementPtr nested = Statement::if_then(conjunction(inner.conds),
                                               Statement::block(std::move(inner.stmts)));
      frames_[i - 1].stmts.push_back(std::move(nested));
    }
    Frame& base = frames_.front();
    fn_.logic.push_back(Statement::if_then(conjunction(base.conds),
                                           Statement::block(std::move(base.stmts))));
  }

  static ConditionPtr conjunction(std::vector<ConditionPtr>& conds) {
    if (conds.empty()) return nullptr;
    if (conds.size() == 1) return conds[0];
    return Condition::set(false, std::move(conds));
  }

  // ---- body traversal -----------------------------------------------------

  bool has_body_comparator(const GraphNode& n) const {
    for (const auto& e : n.outgoing)
      if (e.kind == GraphEdge::Kind::Comparator) return true;
    return false;
  }

  // exists checks are skipped for bare variables and for null-propagating
  // accesses (keyed or value-hop final steps)
  static bool wants_exists(const OperandPtr& path) {
    if (path->kind != OperandKind::Path || path->steps.empty()) return false;
    const PathStep& last = path->steps.back();
    return !last.key.has_value() && !last.value_hop;
  }

  void visit_body(int id, OperandPtr path, bool skip_tagged) {
    const GraphNode& node = g_->node(id);
    if (node.term.is(TermKind::Var)) {
      const std::string& name = node.term.text();
      auto it = var_map_.find(name);
      if (it != var_map_.end()) {
        if (!operand_equal(*it->second, *path)) {
          // variable bound through two paths: unify by equality
          add_cond(Condition::comparison(path, CmpOp::Eq, it->second));
          return;
        }
      } else {
        var_map_[name] = path;
        if (wants_exists(path) && !has_body_comparator(node))
          add_cond(Condition::exists(path));
      }
    }
    if (visited_[static_cast<size_t>(id)]) return;
    visited_[static_cast<size_t>(id)] = true;

    for (const auto& e : node.outgoing) {
      if (e.clause == Clause::Head) continue;  // handled in the head phase
      switch (e.kind) {
        case GraphEdge::Kind::Comparator:
          emit_comparator(e, path);
          break;
        case GraphEdge::Kind::RdfType:
          break;  // consumed by typing, dictionaries, or iteration checks
        case GraphEdge::Kind::Property:
          handle_property_edge(node, e, path, skip_tagged);
          break;
      }
    }
  }

  void emit_comparator(const GraphEdge& e, const OperandPtr& left) {
    const Term& rhs = g_->node(e.target).term;
    add_cond(Condition::comparison(left, cmp_for(*e.comparator), term_operand(rhs, e.pos)));
  }

  OperandPtr term_operand(const Term& t, SourcePos pos) {
    switch (t.kind()) {
      case TermKind::Literal:
        switch (t.literal_kind()) {
          case LiteralKind::String: return Operand::literal(ValueKind::String, t.text());
          case LiteralKind::Integer: return Operand::literal(ValueKind::Integer, t.text());
          case LiteralKind::Decimal: return Operand::literal(ValueKind::Decimal, t.text());
        }
        break;
      case TermKind::Iri:
        return Operand::literal(ValueKind::Iri, iri_local_name(t.text()));
      case TermKind::List: {
        std::vector<OperandPtr> items;
        for (const auto& item : t.items()) items.push_back(term_operand(item, pos));
        return Operand::literal_list(std::move(items));
      }
      case TermKind::Var: {
        auto it = var_map_.find(t.text());
        if (it == var_map_.end())
          throw CompileError(errc::logic_unbound_head,
                             "variable ?" + t.text() + " is not bound by a path", pos);
        return it->second;
      }
      default:
        break;
    }
    throw CompileError(errc::syntax, "unsupported operand term", pos);
  }

  void handle_property_edge(const GraphNode& src, const GraphEdge& e, const OperandPtr& path,
                            bool skip_tagged) {
    const GraphNode& target = g_->node(e.target);

    if (e.request_location) {
      if (skip_tagged) return;  // selector edges are consumed by the request
      if (!opts_.inline_requests) {
        handle_request(src, e, path);
        return;
      }
      // inline mode: concrete-valued selectors are retrieval filters, they
      // hold by construction of the retrieved data and yield no conditions
      if (target.term.is_concrete()) return;
    }

    ModelProperty field = field_for(src, e);
    if (field.unbounded) {
      lower_multivalued(src, e, path, field);
      return;
    }
    PathStep step;
    step.property = field.name;
    dispatch_target(e, Operand::extend(path, step), field);
  }

  void dispatch_target(const GraphEdge& e, const OperandPtr& path2,
                       const ModelProperty& field) {
    const GraphNode& target = g_->node(e.target);
    const Term& t = target.term;
    if (t.is(TermKind::Var) || t.is(TermKind::Blank)) {
      visit_body(e.target, path2, /*skip_tagged=*/false);
      return;
    }
    if (t.is(TermKind::Literal)) {
      add_cond(Condition::comparison(value_hop(path2, field, e.pos), CmpOp::Eq,
                                     term_operand(t, e.pos)));
      return;
    }
    if (t.is(TermKind::Iri)) {
      add_cond(Condition::comparison(path2, CmpOp::Eq, term_operand(t, e.pos)));
      return;
    }
    throw CompileError(errc::syntax, "unsupported edge target", e.pos);
  }

  // ---- multi-valued lowering ----------------------------------------------

  std::string loop_name_for(const GraphNode& target, const GraphEdge& e) {
    if (target.term.is(TermKind::Var)) return fresh(target.term.text());
    return fresh(iri_local_name(e.property));
  }

  void lower_multivalued(const GraphNode& src, const GraphEdge& e, const OperandPtr& path,
                         const ModelProperty& field) {
    const GraphNode& target = g_->node(e.target);

    if (target.key_type) {
      // unique key available: dictionary indexing, keyed access stays single
      mark_dictionary(src, field.term, *target.key_type);
      PathStep step;
      step.property = field.name;
      step.key = iri_local_name(*target.key_type);
      dispatch_target(e, Operand::extend(path, step), field);
      return;
    }

    // iterate over the values
    PathStep step;
    step.property = field.name;
    OperandPtr array_path = Operand::extend(path, step);

    ItCtx ctx;
    ctx.start = array_path;
    ctx.loop_var = loop_name_for(target, e);
    ctx.parent_ctx = ctx_stack_.empty() ? -1 : ctx_stack_.back();
    ctx.parent_frame = frames_.size() - 1;
    ctx.cond_pos = cur_conds().size();
    ctx.stmt_pos = cur_stmts().size();
    ctx.pos = e.pos;
    ctxs_.push_back(std::move(ctx));
    int ctx_id = static_cast<int>(ctxs_.size()) - 1;
    ctx_stack_.push_back(ctx_id);

    OperandPtr elem = Operand::variable(ctxs_[static_cast<size_t>(ctx_id)].loop_var);

    // a declared-class rdf:type becomes a runtime discriminator on the element
    for (const auto& te : target.outgoing) {
      if (te.kind != GraphEdge::Kind::RdfType) continue;
      const Term& type_term = g_->node(te.target).term;
      if (type_term.is(TermKind::Iri) && ont_.is_class(type_term.text())) {
        if (field.type.is_datatype()) break;
        std::string type_field = ensure_type_field(field.type.adt);
        PathStep ts;
        ts.property = type_field;
        const ModelAdt* elem_adt = model_.adt(field.type.adt);
        add_cond(Condition::comparison(
            Operand::extend(elem, ts), CmpOp::Eq,
            Operand::literal(ValueKind::String, elem_adt->name)));
        break;
      }
    }

    dispatch_target(e, elem, field);
    ctx_stack_.pop_back();
  }

  void close_contexts() {
    for (size_t i = ctxs_.size(); i-- > 0;) {
      ItCtx& ctx = ctxs_[i];
      std::vector<ConditionPtr>* parent_conds;
      std::vector<StatementPtr>* parent_stmts;
      if (ctx.parent_ctx >= 0) {
        parent_conds = &ctxs_[static_cast<size_t>(ctx.parent_ctx)].collected.conds;
        parent_stmts = &ctxs_[static_cast<size_t>(ctx.parent_ctx)].collected.stmts;
      } else {
        parent_conds = &frames_[ctx.parent_frame].conds;
        parent_stmts = &frames_[ctx.parent_frame].stmts;
      }
      bool has_conds = !ctx.collected.conds.empty();
      bool has_stmts = !ctx.collected.stmts.empty();
      if (has_conds && has_stmts) {
        StatementPtr body = Statement::if_then(conjunction(ctx.collected.conds),
                                               Statement::block(std::move(ctx.collected.stmts)));
        parent_stmts->insert(parent_stmts->begin() + static_cast<long>(std::min(ctx.stmt_pos, parent_stmts->size())),
                             Statement::iterate(ctx.start, ctx.loop_var, std::move(body)));
      } else if (has_conds) {
        ConditionPtr inner = conjunction(ctx.collected.conds);
        parent_conds->insert(parent_conds->begin() + static_cast<long>(std::min(ctx.cond_pos, parent_conds->size())),
                             Condition::qualified(false, ctx.start, ctx.loop_var, inner));
      } else if (has_stmts) {
        parent_stmts->insert(parent_stmts->begin() + static_cast<long>(std::min(ctx.stmt_pos, parent_stmts->size())),
                             Statement::iterate(ctx.start, ctx.loop_var,
                                                Statement::block(std::move(ctx.collected.stmts))));
      } else {
        // nothing inside: the pattern only requires a value to exist
        parent_conds->insert(parent_conds->begin() + static_cast<long>(std::min(ctx.cond_pos, parent_conds->size())),
                             Condition::exists(ctx.start));
      }
    }
  }

  // ---- remote data requests -------------------------------------------------

  void handle_request(const GraphNode&, const GraphEdge& e, const OperandPtr& path) {
    if (!ctx_stack_.empty())
      throw CompileError(errc::logic_request_in_loop,
                         "remote request inside an iteration is not supported", e.pos);
    if (!e.inverted())
      throw CompileError(errc::graph_request_shape,
                         "request block must select the remote entity by a bound value",
                         e.pos);
    const GraphNode& entity = g_->node(e.target);
    if (!entity.term.is(TermKind::Var))
      throw CompileError(errc::graph_request_shape, "remote entity must be a variable",
                         e.pos);
    const std::string& entity_name = entity.term.text();
    if (var_map_.count(entity_name))
      throw CompileError(errc::graph_request_shape,
                         "remote entity variable is bound elsewhere in the rule", e.pos);
    for (const auto& n : g_->nodes)
      for (const auto& he : n.outgoing)
        if (he.clause == Clause::Head &&
            g_->node(he.target).term == entity.term)
          throw CompileError(errc::graph_request_shape,
                             "remote entity variable may not appear in the rule head",
                             he.pos);

    // resource type from the block's rdf:type
    std::string resource_adt;
    for (const auto& te : entity.outgoing) {
      if (te.kind == GraphEdge::Kind::RdfType && te.request_location) {
        const Term& t = g_->node(te.target).term;
        if (t.is(TermKind::Iri) && ont_.is_class(t.text())) {
          const ModelAdt* adt = model_.adt_by_term(t.text());
          if (adt) resource_adt = adt->name;
        }
      }
    }
    if (resource_adt.empty())
      throw CompileError(errc::logic_request_untyped,
                         "request entity lacks an rdf:type inside the block", e.pos);

    std::vector<std::pair<std::string, OperandPtr>> params;
    params.emplace_back(iri_local_name(*e.original_property), path);
    for (const auto& se : entity.outgoing) {
      if (!se.request_location || se.kind == GraphEdge::Kind::RdfType) continue;
      if (se.kind == GraphEdge::Kind::Comparator)
        throw CompileError(errc::graph_request_shape,
                           "comparators are not allowed inside request blocks", se.pos);
      const Term& value = g_->node(se.target).term;
      OperandPtr op;
      if (value.is_concrete()) {
        op = term_operand(value, se.pos);
      } else if (value.is(TermKind::Var)) {
        auto it = var_map_.find(value.text());
        if (it == var_map_.end())
          throw CompileError(errc::logic_request_unbound,
                             "request value ?" + value.text() +
                                 " is unbound elsewhere in the rule",
                             se.pos);
        op = it->second;
      } else {
        throw CompileError(errc::graph_request_shape, "unsupported request value", se.pos);
      }
      params.emplace_back(iri_local_name(se.property), std::move(op));
    }

    std::string result = fresh("r");
    frames_.back().stmts.push_back(
        Statement::remote(*e.request_location, resource_adt, std::move(params), result));
    frames_.emplace_back();

    var_map_[entity_name] = Operand::variable(result);
    visit_body(e.target, Operand::variable(result), /*skip_tagged=*/true);
  }

  // ---- operations (fixpoint) ------------------------------------------------

  void generate_operations() {
    std::vector<const OperationEdge*> pending;
    for (const auto& op : g_->operations) pending.push_back(&op);
    while (!pending.empty()) {
      size_t before = pending.size();
      std::vector<const OperationEdge*> next;
      for (const OperationEdge* op : pending)
        if (!generate_operation(*op)) next.push_back(op);
      pending = std::move(next);
      if (pending.empty()) return;
      if (pending.size() == before)
        throw CompileError(errc::op_unresolvable,
                           "no operations could be resolved; cyclic or unbound operands",
                           pending.front()->pos);
    }
  }

  bool generate_operation(const OperationEdge& edge) {
    std::vector<OperandPtr> resolved;
    for (const auto& term : edge.operands) {
      if (term.is(TermKind::Var)) {
        auto it = var_map_.find(term.text());
        if (it == var_map_.end()) return false;
        resolved.push_back(it->second);
      } else if (term.is(TermKind::Literal)) {
        resolved.push_back(term_operand(term, edge.pos));
      } else {
        throw CompileError(errc::op_unknown, "unsupported operation operand", edge.pos);
      }
    }
    std::string name = fresh(edge.result.text());
    fn_.preamble.push_back(Statement::assign(Operand::variable(name),
                                             Operand::operation(edge.op, std::move(resolved))));
    var_map_[edge.result.text()] = Operand::variable(name);
    op_vars_.insert(edge.result.text());
    return true;
  }

  void emit_detached_comparisons() {
    for (const auto& dc : g_->detached_comparisons) {
      auto it = var_map_.find(dc.subject.text());
      if (it == var_map_.end())
        throw CompileError(errc::logic_unbound_head,
                           "comparison on unresolved operation result ?" +
                               dc.subject.text(),
                           dc.pos);
      frames_.front().conds.push_back(
          Condition::comparison(it->second, cmp_for(dc.cmp), term_operand(dc.rhs, dc.pos)));
    }
  }

  // ---- head phase -------------------------------------------------------------

  struct HeadEdge {
    int source;
    const GraphEdge* edge;
  };

  void head_phase() {
    std::vector<HeadEdge> edges;
    for (size_t i = 0; i < g_->nodes.size(); ++i)
      for (const auto& e : g_->nodes[i].outgoing)
        if (e.clause == Clause::Head) edges.push_back({static_cast<int>(i), &e});
    std::sort(edges.begin(), edges.end(), [](const HeadEdge& a, const HeadEdge& b) {
      return a.edge->order < b.edge->order;
    });

    std::set<int> blank_done;
    for (const auto& he : edges) {
      const GraphNode& src = g_->node(he.source);
      if (src.is_head_root) {
        if (blank_done.insert(he.source).second) emit_create(he.source);
        continue;
      }
      if (he.edge->kind != GraphEdge::Kind::Property)
        throw CompileError(errc::syntax, "unsupported head construct", he.edge->pos);
      emit_head_assignment(src, *he.edge);
    }

    if (g_->rule.event_name && blank_done.empty())
      throw CompileError(errc::logic_event_payload,
                         "cg:event requires an existential head that creates the payload",
                         g_->rule.pos);
  }

  OperandPtr source_operand(const GraphNode& src, SourcePos pos) {
    if (!src.term.is(TermKind::Var))
      throw CompileError(errc::syntax, "head subject must be a variable or blank node",
                         pos);
    auto it = var_map_.find(src.term.text());
    if (it == var_map_.end())
      throw CompileError(errc::logic_unbound_head,
                         "head variable ?" + src.term.text() + " has no body binding",
                         pos);
    return it->second;
  }

  void emit_head_assignment(const GraphNode& src, const GraphEdge& e) {
    ModelProperty field = field_for(src, e);
    OperandPtr base = source_operand(src, e.pos);
    PathStep step;
    step.property = field.name;
    OperandPtr target_path = Operand::extend(base, step);

    const Term& t = g_->node(e.target).term;
    OperandPtr value;
    if (t.is_concrete()) {
      if (t.is(TermKind::Literal) && !field.type.is_datatype())
        target_path = value_hop(target_path, field, e.pos);
      value = term_operand(t, e.pos);
    } else if (t.is(TermKind::Var)) {
      auto it = var_map_.find(t.text());
      if (it == var_map_.end())
        throw CompileError(errc::logic_unbound_head,
                           "head variable ?" + t.text() + " has no body binding", e.pos);
      value = it->second;
    } else {
      throw CompileError(errc::syntax, "unsupported head object", e.pos);
    }
    place_statement(Statement::assign(target_path, value), {target_path, value});
  }

  void emit_create(int blank_id) {
    const GraphNode& blank = g_->node(blank_id);
    if (!blank.resolved || blank.resolved->is_datatype)
      throw CompileError(errc::type_none, "existential head node has no class",
                         blank.term.pos());
    const ModelAdt* adt = model_.adt_by_term(blank.resolved->iri);
    std::vector<std::pair<std::string, OperandPtr>> args;
    std::vector<OperandPtr> refs;
    for (const auto& e : blank.outgoing) {
      if (e.kind != GraphEdge::Kind::Property) continue;
      const ModelProperty* field = adt->field_by_term(e.property);
      if (!field)
        throw CompileError(errc::logic_unknown_field,
                           "constructor field <" + e.property + "> missing", e.pos);
      const Term& t = g_->node(e.target).term;
      OperandPtr value;
      if (t.is_concrete()) {
        if (t.is(TermKind::Literal) && !field->type.is_datatype())
          throw CompileError(errc::logic_event_payload,
                             "literal argument for entity-typed constructor field",
                             e.pos);
        value = term_operand(t, e.pos);
      } else if (t.is(TermKind::Var)) {
        auto it = var_map_.find(t.text());
        if (it == var_map_.end())
          throw CompileError(errc::logic_unbound_head,
                             "head variable ?" + t.text() + " has no body binding",
                             e.pos);
        value = it->second;
      } else {
        throw CompileError(errc::syntax, "unsupported constructor argument", e.pos);
      }
      refs.push_back(value);
      args.emplace_back(field->name, std::move(value));
    }

    std::string v = fresh("v");
    OperandPtr var = Operand::variable(v);
    place_statement(Statement::assign(var, Operand::create(adt->name, std::move(args))),
                    refs);

    if (g_->rule.event_name) {
      const std::string& event = *g_->rule.event_name;
      place_statement(Statement::emit(event, var), refs);
      ModelType payload{"", adt->name};
      for (const auto& ev : events_)
        if (ev.name == event && !(ev.payload == payload))
          throw CompileError(errc::logic_event_payload,
                             "event '" + event + "' declared with conflicting payloads");
      bool known = false;
      for (const auto& ev : events_) known |= ev.name == event;
      if (!known) events_.push_back({event, payload});
    }
  }

  // place a head statement into the deepest iteration context whose loop
  // variable it references, else the innermost request frame
  void place_statement(StatementPtr stmt, const std::vector<OperandPtr>& refs) {
    std::set<std::string> vars;
    for (const auto& r : refs) collect_vars(r, vars);
    int best = -1;
    for (size_t i = 0; i < ctxs_.size(); ++i)
      if (vars.count(ctxs_[i].loop_var)) best = static_cast<int>(i);
    if (best >= 0)
      ctxs_[static_cast<size_t>(best)].collected.stmts.push_back(std::move(stmt));
    else
      frames_.back().stmts.push_back(std::move(stmt));
  }

  void collect_vars(const OperandPtr& op, std::set<std::string>& out) {
    if (!op) return;
    switch (op->kind) {
      case OperandKind::Variable: out.insert(op->var); break;
      case OperandKind::Path: out.insert(op->root_var); break;
      case OperandKind::Create:
        for (const auto& [f, v] : op->args) collect_vars(v, out);
        break;
      case OperandKind::Operation:
        for (const auto& o : op->operands) collect_vars(o, out);
        break;
      default: break;
    }
  }

  const std::vector<RuleGraph>& chain_;
  Model& model_;
  const Ontology& ont_;
  LogicOptions opts_;
  Mangler mangler_;

  Function fn_;
  std::vector<EventDecl> events_;
  std::set<std::string> used_names_;

  const RuleGraph* g_ = nullptr;
  std::vector<Frame> frames_;
  std::vector<ItCtx> ctxs_;
  std::vector<int> ctx_stack_;
  std::map<std::string, OperandPtr> var_map_;
  std::set<std::string> op_vars_;
  std::vector<bool> visited_;
};

}  // namespace

LogicResult generate_logic(const std::vector<RuleGraph>& chain, Model& model,
                           const Ontology& ont, const LogicOptions& opts) {
  LogicGenerator gen(chain, model, ont, opts);
  return gen.run();
}

std::string request_url_template(const Statement& remote) {
  std::string url = remote.location;
  if (!url.empty() && url.back() != '/') url += '/';
  url += remote.resource_type + "/_search?";
  bool first = true;
  for (const auto& [name, value] : remote.params) {
    if (!first) url += '&';
    first = false;
    url += name + "=";
    if (value->kind == OperandKind::Literal)
      url += value->value;
    else
      url += "<id>";
  }
  return url;
}

}  // namespace n3sc
