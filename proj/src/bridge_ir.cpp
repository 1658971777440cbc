#include <functional>

#include "n3sc/bridge_ir.hpp"

namespace n3sc {

namespace {
std::shared_ptr<Statement> mk_st(StatementKind k) {
  auto s = std::make_shared<Statement>();
  s->kind = k;
  return s;
}
std::shared_ptr<Condition> mk_cn(ConditionKind k) {
  auto c = std::make_shared<Condition>();
  c->kind = k;
  return c;
}
std::shared_ptr<Operand> mk_operand(OperandKind k) {
  auto o = std::make_shared<Operand>();
  o->kind = k;
  return o;
}
}  // namespace

std::string cmp_name(CmpOp c) {
  switch (c) {
    case CmpOp::Eq: return "==";
    case CmpOp::Exists: return "exists";
    case CmpOp::In: return "in";
    case CmpOp::Lt: return "<";
    case CmpOp::Gt: return ">";
    case CmpOp::Le: return "<=";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

OperandPtr Operand::literal(ValueKind k, std::string lexical) {
  auto o = mk_operand(OperandKind::Literal);
  o->value_kind = k;
  o->value = std::move(lexical);
  return o;
}

OperandPtr Operand::variable(std::string name) {
  auto o = mk_operand(OperandKind::Variable);
  o->var = std::move(name);
  return o;
}

OperandPtr Operand::path(std::string root, std::vector<PathStep> steps) {
  auto o = mk_operand(OperandKind::Path);
  o->root_var = std::move(root);
  o->steps = std::move(steps);
  return o;
}

OperandPtr Operand::create(std::string adt,
                           std::vector<std::pair<std::string, OperandPtr>> args) {
  auto o = mk_operand(OperandKind::Create);
  o->adt = std::move(adt);
  o->args = std::move(args);
  return o;
}

OperandPtr Operand::operation(MathOp mop, std::vector<OperandPtr> operands) {
  auto o = mk_operand(OperandKind::Operation);
  o->op = mop;
  o->operands = std::move(operands);
  return o;
}

OperandPtr Operand::literal_list(std::vector<OperandPtr> items) {
  auto o = mk_operand(OperandKind::LiteralList);
  o->items = std::move(items);
  return o;
}

OperandPtr Operand::extend(const OperandPtr& base, PathStep step) {
  auto o = std::make_shared<Operand>();
  if (base->kind == OperandKind::Variable) {
    o->kind = OperandKind::Path;
    o->root_var = base->var;
  } else {
    *o = *base;
  }
  o->steps.push_back(std::move(step));
  return o;
}

ConditionPtr Condition::comparison(OperandPtr left, CmpOp cmp_, OperandPtr right) {
  auto c = mk_cn(ConditionKind::Comparison);
  c->cmp = cmp_;
  c->left = std::move(left);
  c->right = std::move(right);
  return c;
}

ConditionPtr Condition::exists(OperandPtr left) {
  auto c = mk_cn(ConditionKind::Comparison);
  c->cmp = CmpOp::Exists;
  c->left = std::move(left);
  return c;
}

ConditionPtr Condition::set(bool disjunction, std::vector<ConditionPtr> members) {
  auto c = mk_cn(ConditionKind::Set);
  c->disjunction = disjunction;
  c->members = std::move(members);
  return c;
}

ConditionPtr Condition::qualified(bool universal, OperandPtr start, std::string loop_var,
                                  ConditionPtr inner) {
  auto c = mk_cn(ConditionKind::Qualified);
  c->universal = universal;
  c->start = std::move(start);
  c->loop_var = std::move(loop_var);
  c->inner = std::move(inner);
  return c;
}

ConditionPtr Condition::check_call(std::string fn, std::vector<OperandPtr> args) {
  auto c = mk_cn(ConditionKind::CheckCall);
  c->fn = std::move(fn);
  c->args = std::move(args);
  return c;
}

StatementPtr Statement::block(std::vector<StatementPtr> statements) {
  auto s = mk_st(StatementKind::Block);
  s->statements = std::move(statements);
  return s;
}

StatementPtr Statement::if_then(ConditionPtr condition, StatementPtr then_block) {
  auto s = mk_st(StatementKind::IfThen);
  s->condition = std::move(condition);
  s->then_block = std::move(then_block);
  return s;
}

StatementPtr Statement::assign(OperandPtr target, OperandPtr value) {
  auto s = mk_st(StatementKind::Assign);
  s->target = std::move(target);
  s->value = std::move(value);
  return s;
}

StatementPtr Statement::iterate(OperandPtr start, std::string loop_var,
                                StatementPtr body) {
  auto s = mk_st(StatementKind::Iterate);
  s->start = std::move(start);
  s->loop_var = std::move(loop_var);
  s->body = std::move(body);
  return s;
}

StatementPtr Statement::remote(std::string location, std::string resource_type,
                               std::vector<std::pair<std::string, OperandPtr>> params,
                               std::string result_var) {
  auto s = mk_st(StatementKind::Remote);
  s->location = std::move(location);
  s->resource_type = std::move(resource_type);
  s->params = std::move(params);
  s->result_var = std::move(result_var);
  return s;
}

StatementPtr Statement::emit(std::string event, OperandPtr payload) {
  auto s = mk_st(StatementKind::Emit);
  s->event = std::move(event);
  s->payload = std::move(payload);
  return s;
}

// ---------------------------------------------------------------------------
// Type resolution
// ---------------------------------------------------------------------------

ResolvedType resolve_operand_type(const Model& model, const TypeScope& scope,
                                  const Operand& o) {
  switch (o.kind) {
    case OperandKind::Literal:
      switch (o.value_kind) {
        case ValueKind::String: return {{rdfns::xsd_string, ""}, false};
        case ValueKind::Integer: return {{rdfns::xsd_integer, ""}, false};
        case ValueKind::Decimal: return {{rdfns::xsd_decimal, ""}, false};
        case ValueKind::Iri: return {{rdfns::xsd_string, ""}, false};
      }
      break;
    case OperandKind::Variable: {
      auto it = scope.vars.find(o.var);
      if (it == scope.vars.end())
        throw CompileError(errc::ir_path_type, "unknown variable '" + o.var + "'");
      return {it->second, false};
    }
    case OperandKind::Path: {
      auto it = scope.vars.find(o.root_var);
      if (it == scope.vars.end())
        throw CompileError(errc::ir_path_type, "unknown path root '" + o.root_var + "'");
      ModelType cur = it->second;
      bool multi = false;
      for (const auto& step : o.steps) {
        if (cur.is_datatype())
          throw CompileError(errc::ir_path_type,
                             "path steps through datatype value via '" + step.property + "'");
        const ModelAdt* adt = model.adt(cur.adt);
        if (!adt)
          throw CompileError(errc::ir_path_type, "unknown ADT '" + cur.adt + "'");
        const ModelProperty* f = adt->field(step.property);
        if (!f)
          throw CompileError(errc::ir_path_type, "'" + step.property +
                                                     "' is not a field of " + adt->name);
        cur = f->type;
        multi = f->unbounded && !step.key.has_value();
      }
      return {cur, multi};
    }
    case OperandKind::Create: {
      if (!model.adt(o.adt))
        throw CompileError(errc::ir_path_type, "unknown ADT '" + o.adt + "'");
      return {{"", o.adt}, false};
    }
    case OperandKind::Operation:
      return {{rdfns::xsd_decimal, ""}, false};
    case OperandKind::LiteralList:
      return {{rdfns::xsd_string, ""}, true};
  }
  throw CompileError(errc::ir_path_type, "unresolvable operand");
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

class Validator {
 public:
  Validator(const BridgeProgram& p) : p_(p) {}

  std::vector<Diagnostic> run() {
    for (const auto& f : p_.functions) {
      scope_ = TypeScope{};
      for (const auto& [name, type] : f.params) scope_.vars[name] = type;
      if (f.is_check) continue;  // lowered form, backend-internal
      iteration_depth_ = 0;
      for (const auto& s : f.preamble) visit_statement(*s);
      for (const auto& s : f.logic) visit_statement(*s);
    }
    for (const auto& e : p_.events)
      if (!e.payload.is_datatype() && !p_.model.adt(e.payload.adt))
        report(errc::ir_path_type, "event '" + e.name + "' payload ADT missing");
    return std::move(diags_);
  }

 private:
  void report(const std::string& code, const std::string& msg) {
    diags_.push_back({code, msg, {}});
  }

  void check_operand(const Operand& o) {
    try {
      resolve_operand_type(p_.model, scope_, o);
    } catch (const CompileError& e) {
      report(e.code(), e.message());
    }
    if (o.kind == OperandKind::Create)
      for (const auto& [field, value] : o.args) {
        const ModelAdt* adt = p_.model.adt(o.adt);
        if (adt && !adt->field(field))
          report(errc::ir_path_type,
                 "constructor argument '" + field + "' is not a field of " + o.adt);
        check_operand(*value);
      }
    if (o.kind == OperandKind::Operation)
      for (const auto& sub : o.operands) check_operand(*sub);
  }

  void visit_condition(const Condition& c) {
    switch (c.kind) {
      case ConditionKind::Comparison:
        check_operand(*c.left);
        if (c.cmp == CmpOp::Exists) {
          if (c.right) report(errc::ir_schema, "exists comparison with a right operand");
        } else if (!c.right) {
          report(errc::ir_schema, "comparison missing right operand");
        } else {
          check_operand(*c.right);
        }
        break;
      case ConditionKind::Set:
        if (c.members.empty()) report(errc::ir_condset_empty, "empty condition set");
        for (const auto& m : c.members) visit_condition(*m);
        break;
      case ConditionKind::Qualified: {
        check_operand(*c.start);
        auto rt = resolve_quiet(*c.start);
        if (rt && !rt->multi)
          report(errc::ir_cardinality,
                 "qualified condition over a single-valued path");
        TypeScope saved = scope_;
        if (rt) scope_.vars[c.loop_var] = rt->type;
        visit_condition(*c.inner);
        scope_ = saved;
        break;
      }
      case ConditionKind::CheckCall:
        for (const auto& a : c.args) check_operand(*a);
        break;
    }
  }

  std::optional<ResolvedType> resolve_quiet(const Operand& o) {
    try {
      return resolve_operand_type(p_.model, scope_, o);
    } catch (const CompileError&) {
      return std::nullopt;
    }
  }

  void visit_statement(const Statement& s) {
    switch (s.kind) {
      case StatementKind::Block:
        for (const auto& sub : s.statements) visit_statement(*sub);
        break;
      case StatementKind::IfThen:
        if (s.condition) visit_condition(*s.condition);
        if (s.then_block) visit_statement(*s.then_block);
        break;
      case StatementKind::Assign:
        check_operand(*s.value);
        // assignment to a fresh variable introduces a local
        if (s.target->kind == OperandKind::Variable &&
            !scope_.vars.count(s.target->var)) {
          if (auto rt = resolve_quiet(*s.value)) scope_.vars[s.target->var] = rt->type;
        } else {
          check_operand(*s.target);
        }
        break;
      case StatementKind::Iterate: {
        check_operand(*s.start);
        auto rt = resolve_quiet(*s.start);
        if (rt && !rt->multi)
          report(errc::ir_cardinality, "iteration over a single-valued path");
        TypeScope saved = scope_;
        if (rt) scope_.vars[s.loop_var] = rt->type;
        ++iteration_depth_;
        visit_statement(*s.body);
        --iteration_depth_;
        scope_ = saved;
        break;
      }
      case StatementKind::Remote: {
        if (iteration_depth_ > 0)
          report(errc::ir_boundary, "callback boundary inside an iteration body");
        if (!p_.model.adt(s.resource_type))
          report(errc::ir_path_type, "remote resource ADT '" + s.resource_type + "' missing");
        for (const auto& [name, value] : s.params) check_operand(*value);
        scope_.vars[s.result_var] = ModelType{"", s.resource_type};
        break;
      }
      case StatementKind::Emit: {
        check_operand(*s.payload);
        bool declared = false;
        for (const auto& e : p_.events) declared |= e.name == s.event;
        if (!declared)
          report(errc::ir_schema, "emitted event '" + s.event + "' not declared");
        break;
      }
    }
  }

  const BridgeProgram& p_;
  TypeScope scope_;
  int iteration_depth_ = 0;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> validate(const BridgeProgram& program) {
  std::vector<Diagnostic> diags;
  // model-level invariants
  std::map<std::string, int> adt_names;
  for (const auto& a : program.model.adts) {
    if (++adt_names[a.name] > 1)
      diags.push_back({errc::ir_schema, "duplicate ADT name " + a.name, {}});
    std::map<std::string, int> field_names;
    for (const auto& f : a.fields) {
      if (++field_names[f.name] > 1)
        diags.push_back(
            {errc::ir_schema, "duplicate field " + a.name + "." + f.name, {}});
      if (f.use_dictionary && (!f.unbounded || !f.dictionary_key))
        diags.push_back({errc::ir_cardinality,
                         "dictionary field " + a.name + "." + f.name +
                             " must be unbounded and keyed",
                         {}});
      if (!f.type.is_datatype() && !program.model.adt(f.type.adt))
        diags.push_back({errc::ir_path_type,
                         "field " + a.name + "." + f.name + " references missing ADT",
                         {}});
    }
  }
  Validator v(program);
  auto more = v.run();
  diags.insert(diags.end(), more.begin(), more.end());
  return diags;
}

bool programs_equal(const BridgeProgram& a, const BridgeProgram& b) {
  return serialize(a) == serialize(b);
}

}  // namespace n3sc
