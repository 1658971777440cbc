#include <algorithm>
#include <functional>
#include <set>

#include "json.hpp"
#include "n3sc/solidity.hpp"

namespace n3sc {

namespace {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// shared helpers
// ---------------------------------------------------------------------------

bool contains_dictionary(const Model& model, const std::string& adt_name,
                         std::set<std::string>& seen) {
  if (!seen.insert(adt_name).second) return false;
  const ModelAdt* adt = model.adt(adt_name);
  if (!adt) return false;
  for (const auto& f : adt->fields) {
    if (f.use_dictionary) return true;
    if (!f.type.is_datatype()) {
      if (contains_dictionary(model, f.type.adt, seen)) return true;
    }
  }
  return false;
}

bool contains_dictionary(const Model& model, const std::string& adt_name) {
  std::set<std::string> seen;
  return contains_dictionary(model, adt_name, seen);
}

std::vector<std::string> root_adts(const BridgeProgram& p) {
  std::vector<std::string> roots;
  auto add = [&](const std::string& name) {
    if (!name.empty() && std::find(roots.begin(), roots.end(), name) == roots.end())
      roots.push_back(name);
  };
  std::function<void(const Statement&)> scan = [&](const Statement& s) {
    switch (s.kind) {
      case StatementKind::Block:
        for (const auto& x : s.statements) scan(*x);
        break;
      case StatementKind::IfThen:
        if (s.then_block) scan(*s.then_block);
        break;
      case StatementKind::Iterate:
        scan(*s.body);
        break;
      case StatementKind::Remote:
        add(s.resource_type);
        break;
      default:
        break;
    }
  };
  for (const auto& f : p.functions) {
    for (const auto& [name, type] : f.params)
      if (!type.is_datatype()) add(type.adt);
    for (const auto& st : f.logic) scan(*st);
  }
  return roots;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string pluralize(const std::string& s) {
  if (s.empty()) return s;
  char last = s.back();
  if (last == 's' || last == 'x' || last == 'z') return s + "es";
  if (s.size() >= 2) {
    std::string tail = s.substr(s.size() - 2);
    if (tail == "ch" || tail == "sh") return s + "es";
  }
  return s + "s";
}

// ---------------------------------------------------------------------------
// operand/statement rewriting plumbing
// ---------------------------------------------------------------------------

using OperandRewriter = std::function<OperandPtr(const OperandPtr&)>;
using ConditionRewriter = std::function<ConditionPtr(const ConditionPtr&)>;

OperandPtr rewrite_operand_tree(const OperandPtr& op, const OperandRewriter& fn) {
  OperandPtr base = fn(op);
  if (base->kind == OperandKind::Create) {
    auto copy = std::make_shared<Operand>(*base);
    for (auto& [f, v] : copy->args) v = rewrite_operand_tree(v, fn);
    return copy;
  }
  if (base->kind == OperandKind::Operation) {
    auto copy = std::make_shared<Operand>(*base);
    for (auto& o : copy->operands) o = rewrite_operand_tree(o, fn);
    return copy;
  }
  return base;
}

ConditionPtr rewrite_condition_tree(const ConditionPtr& c, const OperandRewriter& op_fn,
                                    const ConditionRewriter& cond_fn) {
  auto copy = std::make_shared<Condition>(*c);
  switch (copy->kind) {
    case ConditionKind::Comparison:
      copy->left = rewrite_operand_tree(copy->left, op_fn);
      if (copy->right) copy->right = rewrite_operand_tree(copy->right, op_fn);
      break;
    case ConditionKind::Set:
      for (auto& m : copy->members) m = rewrite_condition_tree(m, op_fn, cond_fn);
      break;
    case ConditionKind::Qualified:
      copy->start = rewrite_operand_tree(copy->start, op_fn);
      copy->inner = rewrite_condition_tree(copy->inner, op_fn, cond_fn);
      break;
    case ConditionKind::CheckCall:
      for (auto& a : copy->args) a = rewrite_operand_tree(a, op_fn);
      break;
  }
  return cond_fn(copy);
}

StatementPtr rewrite_statement_tree(const StatementPtr& s, const OperandRewriter& op_fn,
                                    const ConditionRewriter& cond_fn) {
  auto copy = std::make_shared<Statement>(*s);
  switch (copy->kind) {
    case StatementKind::Block:
      for (auto& x : copy->statements) x = rewrite_statement_tree(x, op_fn, cond_fn);
      break;
    case StatementKind::IfThen:
      if (copy->condition)
        copy->condition = rewrite_condition_tree(copy->condition, op_fn, cond_fn);
      if (copy->then_block)
        copy->then_block = rewrite_statement_tree(copy->then_block, op_fn, cond_fn);
      break;
    case StatementKind::Assign:
      copy->target = rewrite_operand_tree(copy->target, op_fn);
      copy->value = rewrite_operand_tree(copy->value, op_fn);
      break;
    case StatementKind::Iterate:
      copy->start = rewrite_operand_tree(copy->start, op_fn);
      copy->body = rewrite_statement_tree(copy->body, op_fn, cond_fn);
      break;
    case StatementKind::Remote:
      for (auto& [n, v] : copy->params) v = rewrite_operand_tree(v, op_fn);
      break;
    case StatementKind::Emit:
      copy->payload = rewrite_operand_tree(copy->payload, op_fn);
      break;
  }
  return copy;
}

}  // namespace

// ---------------------------------------------------------------------------
// flatten_mapping_structs
// ---------------------------------------------------------------------------

FlattenResult flatten_mapping_structs(BridgeProgram& program) {
  FlattenResult out;
  Model& model = program.model;

  for (const std::string& root : root_adts(program)) {
    bool changed = true;
    while (changed) {
      changed = false;
      ModelAdt* adt = model.adt_mut(root);
      if (!adt) break;
      for (size_t i = 0; i < adt->fields.size(); ++i) {
        const ModelProperty f = adt->fields[i];
        if (f.use_dictionary || f.type.is_datatype() || f.unbounded) continue;
        if (!contains_dictionary(model, f.type.adt)) continue;
        const ModelAdt* inner = model.adt(f.type.adt);
        std::set<std::string> taken;
        for (const auto& g : adt->fields) taken.insert(g.name);
        std::vector<ModelProperty> inlined;
        for (const auto& g : inner->fields) {
          ModelProperty copy = g;
          int n = 2;
          while (taken.count(copy.name)) copy.name = g.name + "_" + std::to_string(n++);
          taken.insert(copy.name);
          out.rewrites.push_back({root, f.name, g.name, copy.name});
          inlined.push_back(copy);
        }
        adt->fields.erase(adt->fields.begin() + static_cast<long>(i));
        adt->fields.insert(adt->fields.begin() + static_cast<long>(i), inlined.begin(),
                           inlined.end());
        changed = true;
        break;
      }
    }
  }

  if (out.rewrites.empty()) {
    out.model = model;
    return out;
  }

  // apply the rewrite table to every property path, tracking the ADT reached
  // at each step
  auto rewrite_path = [&](const OperandPtr& op, const TypeScope& scope) -> OperandPtr {
    if (op->kind != OperandKind::Path) return op;
    auto it = scope.vars.find(op->root_var);
    if (it == scope.vars.end()) return op;
    ModelType cur = it->second;
    std::vector<PathStep> steps;
    for (size_t i = 0; i < op->steps.size(); ++i) {
      const PathStep& step = op->steps[i];
      if (cur.is_datatype()) {
        steps.push_back(step);
        continue;
      }
      const FlattenRewrite* hit = nullptr;
      for (const auto& r : out.rewrites)
        if (r.adt == cur.adt && r.field == step.property && i + 1 < op->steps.size() &&
            r.inner == op->steps[i + 1].property)
          hit = &r;
      if (hit) {
        PathStep merged = op->steps[i + 1];
        merged.property = hit->merged;
        steps.push_back(merged);
        const ModelAdt* adt = model.adt(cur.adt);
        const ModelProperty* fld = adt ? adt->field(hit->merged) : nullptr;
        cur = fld ? fld->type : ModelType{rdfns::xsd_string, ""};
        ++i;
      } else {
        bool dangling = false;
        for (const auto& r : out.rewrites)
          if (r.adt == cur.adt && r.field == step.property) dangling = true;
        if (dangling && i + 1 == op->steps.size()) {
          // path ends at a merged holder: the holder no longer exists as a
          // field, its contents live on the root
          return OperandPtr();
        }
        const ModelAdt* adt = model.adt(cur.adt);
        const ModelProperty* fld = adt ? adt->field(step.property) : nullptr;
        cur = fld ? fld->type : ModelType{rdfns::xsd_string, ""};
        steps.push_back(step);
      }
    }
    auto copy = std::make_shared<Operand>(*op);
    copy->steps = std::move(steps);
    return copy;
  };

  for (auto& fn : program.functions) {
    TypeScope scope;
    for (const auto& [name, type] : fn.params) scope.vars[name] = type;

    // scope additions (loop vars, locals, results) are handled by nested
    // walkers; paths rooted at unknown vars pass through untouched
    std::function<StatementPtr(const StatementPtr&, TypeScope)> walk_stmt =
        [&](const StatementPtr& s, TypeScope sc) -> StatementPtr {
      OperandRewriter op_fn = [&](const OperandPtr& op) -> OperandPtr {
        OperandPtr r = rewrite_path(op, sc);
        return r ? r : op;  // dangling handled at condition level
      };
      ConditionRewriter cond_fn = [&](const ConditionPtr& c) -> ConditionPtr {
        if (c->kind == ConditionKind::Comparison && c->cmp == CmpOp::Exists &&
            c->left->kind == OperandKind::Path && !rewrite_path(c->left, sc)) {
          // existence of a merged holder is implied by the root
          return Condition::comparison(Operand::literal(ValueKind::Integer, "1"),
                                       CmpOp::Eq,
                                       Operand::literal(ValueKind::Integer, "1"));
        }
        return c;
      };
      auto copy = std::make_shared<Statement>(*s);
      switch (copy->kind) {
        case StatementKind::Block:
          for (auto& x : copy->statements) x = walk_stmt(x, sc);
          return copy;
        case StatementKind::IfThen:
          if (copy->condition)
            copy->condition = rewrite_condition_tree(copy->condition, op_fn, cond_fn);
          if (copy->then_block) copy->then_block = walk_stmt(copy->then_block, sc);
          return copy;
        case StatementKind::Iterate: {
          copy->start = rewrite_operand_tree(copy->start, op_fn);
          TypeScope inner = sc;
          try {
            inner.vars[copy->loop_var] =
                resolve_operand_type(program.model, sc, *copy->start).type;
          } catch (const CompileError&) {
          }
          copy->body = walk_stmt(copy->body, inner);
          return copy;
        }
        case StatementKind::Remote:
          for (auto& [n, v] : copy->params) v = rewrite_operand_tree(v, op_fn);
          return copy;
        case StatementKind::Assign:
          copy->target = rewrite_operand_tree(copy->target, op_fn);
          copy->value = rewrite_operand_tree(copy->value, op_fn);
          return copy;
        case StatementKind::Emit:
          copy->payload = rewrite_operand_tree(copy->payload, op_fn);
          return copy;
      }
      return copy;
    };

    // remote result scoping: collect result vars up front (names are unique)
    std::function<void(const StatementPtr&)> collect = [&](const StatementPtr& s) {
      switch (s->kind) {
        case StatementKind::Block:
          for (const auto& x : s->statements) collect(x);
          break;
        case StatementKind::IfThen:
          if (s->then_block) collect(s->then_block);
          break;
        case StatementKind::Iterate:
          collect(s->body);
          break;
        case StatementKind::Remote:
          scope.vars[s->result_var] = ModelType{"", s->resource_type};
          break;
        default:
          break;
      }
    };
    for (const auto& s : fn.logic) collect(s);

    for (auto& s : fn.logic) s = walk_stmt(s, scope);
    for (auto& s : fn.preamble) s = walk_stmt(s, scope);
  }

  out.model = program.model;
  return out;
}

// ---------------------------------------------------------------------------
// synthesize_check_functions
// ---------------------------------------------------------------------------

namespace {
// canonical rendering of one operand, for structural comparison
std::string serialize_operand(const OperandPtr& op) {
  BridgeProgram tmp;
  Function f;
  f.name = "x";
  f.preamble.push_back(Statement::assign(Operand::variable("t"), op));
  tmp.functions.push_back(f);
  return serialize(tmp);
}
}  // namespace

void synthesize_check_functions(BridgeProgram& program) {
  int counter = 1;
  std::vector<Function> checks;

  // conditions are rewritten bottom-up so nested qualified conditions become
  // nested check calls
  std::function<ConditionPtr(const ConditionPtr&, const TypeScope&)> lower_cond =
      [&](const ConditionPtr& c, const TypeScope& scope) -> ConditionPtr {
    auto copy = std::make_shared<Condition>(*c);
    switch (copy->kind) {
      case ConditionKind::Set:
        for (auto& m : copy->members) m = lower_cond(m, scope);
        return copy;
      case ConditionKind::Qualified: {
        ModelType elem{rdfns::xsd_string, ""};
        try {
          elem = resolve_operand_type(program.model, scope, *copy->start).type;
        } catch (const CompileError&) {
        }
        TypeScope inner_scope = scope;
        inner_scope.vars[copy->loop_var] = elem;
        ConditionPtr inner = lower_cond(copy->inner, inner_scope);

        // free operands (not reached through the loop variable) become
        // extra parameters of the check function
        std::vector<OperandPtr> extras;
        OperandRewriter capture = [&](const OperandPtr& op) -> OperandPtr {
          if ((op->kind == OperandKind::Path && op->root_var != copy->loop_var) ||
              (op->kind == OperandKind::Variable && op->var != copy->loop_var)) {
            size_t idx = extras.size();
            for (size_t i = 0; i < extras.size(); ++i)
              if (serialize_operand(extras[i]) == serialize_operand(op)) idx = i;
            if (idx == extras.size()) extras.push_back(op);
            return Operand::variable("a" + std::to_string(idx + 1));
          }
          return op;
        };
        ConditionRewriter keep = [](const ConditionPtr& x) { return x; };
        ConditionPtr rewritten = rewrite_condition_tree(inner, capture, keep);

        Function check;
        check.name = "check" + std::to_string(counter++);
        check.is_check = true;
        check.params.emplace_back(copy->loop_var, elem);
        for (size_t i = 0; i < extras.size(); ++i) {
          ModelType t{rdfns::xsd_string, ""};
          try {
            t = resolve_operand_type(program.model, scope, *extras[i]).type;
          } catch (const CompileError&) {
          }
          check.params.emplace_back("a" + std::to_string(i + 1), t);
        }
        check.check_condition =
            Condition::qualified(copy->universal, copy->start, copy->loop_var, rewritten);
        checks.push_back(check);

        std::vector<OperandPtr> args{copy->start};
        for (const auto& e : extras) args.push_back(e);
        return Condition::check_call(checks.back().name, std::move(args));
      }
      default:
        return copy;
    }
  };

  for (auto& fn : program.functions) {
    if (fn.is_check) continue;
    TypeScope scope;
    for (const auto& [name, type] : fn.params) scope.vars[name] = type;
    std::function<void(const StatementPtr&)> collect = [&](const StatementPtr& s) {
      if (s->kind == StatementKind::Remote)
        scope.vars[s->result_var] = ModelType{"", s->resource_type};
      if (s->kind == StatementKind::Block)
        for (const auto& x : s->statements) collect(x);
      if (s->kind == StatementKind::IfThen && s->then_block) collect(s->then_block);
      if (s->kind == StatementKind::Iterate) collect(s->body);
    };
    for (const auto& s : fn.logic) collect(s);

    std::function<StatementPtr(const StatementPtr&, TypeScope)> walk =
        [&](const StatementPtr& s, TypeScope sc) -> StatementPtr {
      auto copy = std::make_shared<Statement>(*s);
      switch (copy->kind) {
        case StatementKind::Block:
          for (auto& x : copy->statements) x = walk(x, sc);
          break;
        case StatementKind::IfThen:
          if (copy->condition) copy->condition = lower_cond(copy->condition, sc);
          if (copy->then_block) copy->then_block = walk(copy->then_block, sc);
          break;
        case StatementKind::Iterate: {
          TypeScope inner = sc;
          try {
            inner.vars[copy->loop_var] =
                resolve_operand_type(program.model, sc, *copy->start).type;
          } catch (const CompileError&) {
          }
          copy->body = walk(copy->body, inner);
          break;
        }
        default:
          break;
      }
      return copy;
    };
    for (auto& s : fn.logic) s = walk(s, scope);
  }

  for (auto& c : checks) program.functions.push_back(std::move(c));
}

// ---------------------------------------------------------------------------
// split_callbacks
// ---------------------------------------------------------------------------

namespace {

struct SplitBoundary {
  StatementPtr remote;
  std::vector<StatementPtr> per_record;  // statements after the request in its block
  std::vector<StatementPtr> after;       // statements after the enclosing chain
};

// splits a statement list at the first remote request; prefix keeps the
// request statement itself (the emitter renders it as the oracle event)
bool split_list(const std::vector<StatementPtr>& list, std::vector<StatementPtr>& prefix,
                SplitBoundary& boundary) {
  for (size_t i = 0; i < list.size(); ++i) {
    const StatementPtr& s = list[i];
    if (s->kind == StatementKind::Remote) {
      prefix.push_back(s);
      boundary.remote = s;
      boundary.per_record.assign(list.begin() + static_cast<long>(i) + 1, list.end());
      return true;
    }
    if (s->kind == StatementKind::IfThen && s->then_block) {
      std::vector<StatementPtr> inner_prefix;
      SplitBoundary inner;
      if (split_list(s->then_block->statements, inner_prefix, inner)) {
        prefix.push_back(
            Statement::if_then(s->condition, Statement::block(std::move(inner_prefix))));
        boundary = std::move(inner);
        boundary.after.insert(boundary.after.end(), list.begin() + static_cast<long>(i) + 1,
                              list.end());
        return true;
      }
    }
    prefix.push_back(s);
  }
  return false;
}

}  // namespace

std::vector<ContractSegment> split_callbacks(const Function& fn) {
  std::vector<ContractSegment> segments;
  std::vector<StatementPtr> pending = fn.logic;
  ContractSegment cur;
  cur.name = "process";
  cur.preamble = fn.preamble;
  int k = 0;
  while (true) {
    std::vector<StatementPtr> prefix;
    SplitBoundary boundary;
    bool found = split_list(pending, prefix, boundary);
    cur.body = std::move(prefix);
    if (!found) {
      segments.push_back(std::move(cur));
      return segments;
    }
    ++k;
    cur.request_callback = "callback" + std::to_string(k);
    segments.push_back(std::move(cur));

    cur = ContractSegment{};
    cur.name = "callback" + std::to_string(k);
    pending.clear();
    if (!boundary.per_record.empty())
      pending.push_back(Statement::iterate(Operand::variable("data"),
                                           boundary.remote->result_var,
                                           Statement::block(boundary.per_record)));
    pending.insert(pending.end(), boundary.after.begin(), boundary.after.end());
  }
}

// ---------------------------------------------------------------------------
// emission
// ---------------------------------------------------------------------------

namespace {

struct EnumInfo {
  std::string name;
  std::vector<std::string> members;
  bool eligible = true;
};

class SolidityEmitter {
 public:
  SolidityEmitter(const BridgeProgram& program, const SolidityOptions& opts)
      : p_(program), opts_(opts) {}

  SolidityResult run() {
    flat_ = flatten_mapping_structs(p_);
    detect_enums();
    synthesize_check_functions(p_);
    entry_segments_ = split_callbacks(p_.functions.front());
    compute_data_types();
    render();
    SolidityResult out;
    out.source = src_;
    out.warnings = warnings_;
    if (out.source.size() > 24576)
      out.warnings.push_back(
          {errc::sol_size,
           "emitted source is " + std::to_string(out.source.size()) +
               " bytes; EVM contracts are limited to 24576 bytes (24Kb)",
           {}});
    out.manifest = manifest(out);
    return out;
  }

 private:
  // ---- enum synthesis -----------------------------------------------------

  void mark_enum_use(const OperandPtr& left, const OperandPtr& right,
                     const TypeScope& scope) {
    ResolvedType rt;
    try {
      rt = resolve_operand_type(p_.model, scope, *left);
    } catch (const CompileError&) {
      return;
    }
    if (rt.type.is_datatype() || left->kind != OperandKind::Path || left->steps.empty())
      return;
    const ModelAdt* value_adt = p_.model.adt(rt.type.adt);
    if (!value_adt) return;

    // property term of the final step
    std::string term;
    {
      TypeScope sc = scope;
      ModelType cur = sc.vars[left->root_var];
      for (const auto& step : left->steps) {
        const ModelAdt* adt = p_.model.adt(cur.adt);
        const ModelProperty* f = adt ? adt->field(step.property) : nullptr;
        if (!f) return;
        term = f->term;
        cur = f->type;
      }
    }

    bool iri_only = true;
    std::vector<std::string> members;
    if (right->kind == OperandKind::Literal && right->value_kind == ValueKind::Iri) {
      members.push_back(right->value);
    } else if (right->kind == OperandKind::LiteralList) {
      for (const auto& item : right->items) {
        if (item->value_kind == ValueKind::Iri)
          members.push_back(item->value);
        else
          iri_only = false;
      }
    } else {
      iri_only = false;
    }

    auto& info = enums_[term];
    if (info.name.empty())
      info.name = pluralize(capitalize(iri_local_name(term)));
    if (!iri_only || !value_adt->fields.empty()) {
      info.eligible = false;
      return;
    }
    for (const auto& m : members)
      if (std::find(info.members.begin(), info.members.end(), m) == info.members.end())
        info.members.push_back(m);
  }

  void scan_conditions(const ConditionPtr& c, const TypeScope& scope) {
    switch (c->kind) {
      case ConditionKind::Comparison:
        if (c->right && (c->cmp == CmpOp::Eq || c->cmp == CmpOp::In))
          mark_enum_use(c->left, c->right, scope);
        break;
      case ConditionKind::Set:
        for (const auto& m : c->members) scan_conditions(m, scope);
        break;
      case ConditionKind::Qualified: {
        TypeScope inner = scope;
        try {
          inner.vars[c->loop_var] =
              resolve_operand_type(p_.model, scope, *c->start).type;
        } catch (const CompileError&) {
        }
        scan_conditions(c->inner, inner);
        break;
      }
      default:
        break;
    }
  }

  void detect_enums() {
    for (const auto& fn : p_.functions) {
      TypeScope scope;
      for (const auto& [name, type] : fn.params) scope.vars[name] = type;
      std::function<void(const StatementPtr&, TypeScope)> walk =
          [&](const StatementPtr& s, TypeScope sc) {
            switch (s->kind) {
              case StatementKind::Block:
                for (const auto& x : s->statements) walk(x, sc);
                break;
              case StatementKind::IfThen:
                if (s->condition) scan_conditions(s->condition, sc);
                if (s->then_block) walk(s->then_block, sc);
                break;
              case StatementKind::Iterate: {
                try {
                  sc.vars[s->loop_var] =
                      resolve_operand_type(p_.model, sc, *s->start).type;
                } catch (const CompileError&) {
                }
                walk(s->body, sc);
                break;
              }
              case StatementKind::Remote:
                sc.vars[s->result_var] = ModelType{"", s->resource_type};
                break;
              default:
                break;
            }
          };
      // remote result variables are function-unique; collect them up front
      std::function<void(const StatementPtr&)> collect = [&](const StatementPtr& x) {
        if (x->kind == StatementKind::Remote)
          scope.vars[x->result_var] = ModelType{"", x->resource_type};
        if (x->kind == StatementKind::Block)
          for (const auto& y : x->statements) collect(y);
        if (x->kind == StatementKind::IfThen && x->then_block) collect(x->then_block);
        if (x->kind == StatementKind::Iterate) collect(x->body);
      };
      for (const auto& s : fn.logic) collect(s);
      for (const auto& s : fn.logic) walk(s, scope);
    }
    for (auto it = enums_.begin(); it != enums_.end();) {
      if (!it->second.eligible || it->second.members.empty())
        it = enums_.erase(it);
      else
        ++it;
    }
  }

  // is this field rendered as an enum?
  const EnumInfo* enum_for_term(const std::string& term) const {
    auto it = enums_.find(term);
    return it == enums_.end() ? nullptr : &it->second;
  }

  // enum rendering for the adt reached by a path (field term needed)
  const EnumInfo* enum_for_path(const OperandPtr& path, const TypeScope& scope) const {
    if (path->kind != OperandKind::Path || path->steps.empty()) return nullptr;
    auto it = scope.vars.find(path->root_var);
    if (it == scope.vars.end()) return nullptr;
    ModelType cur = it->second;
    std::string term;
    for (const auto& step : path->steps) {
      if (cur.is_datatype()) return nullptr;
      const ModelAdt* adt = p_.model.adt(cur.adt);
      const ModelProperty* f = adt ? adt->field(step.property) : nullptr;
      if (!f) return nullptr;
      term = f->term;
      cur = f->type;
    }
    return enum_for_term(term);
  }

  // ---- types ---------------------------------------------------------------

  std::string sol_base_type(const ModelType& t) const {
    if (!t.is_datatype()) return t.adt;
    std::string local = iri_local_name(t.datatype);
    if (local == "string" || local == "anyURI") return "string";
    if (local == "boolean") return "bool";
    return "int256";
  }

  std::string field_type(const ModelProperty& f) const {
    std::string base;
    if (const EnumInfo* e = enum_for_term(f.term))
      base = e->name;
    else
      base = sol_base_type(f.type);
    if (f.use_dictionary) return "mapping(string => " + base + ")";
    if (f.unbounded) return base + "[]";
    return base;
  }

  bool is_enum_struct(const ModelAdt& adt) const {
    // fieldless ADTs referenced only through enum-ified properties vanish
    if (!adt.fields.empty()) return false;
    for (const auto& other : p_.model.adts)
      for (const auto& f : other.fields)
        if (!f.type.is_datatype() && f.type.adt == adt.name && !enum_for_term(f.term))
          return false;
    return true;
  }

  // ---- rendering -----------------------------------------------------------

  void line(int indent, const std::string& s) {
    src_ += std::string(static_cast<size_t>(indent) * 4, ' ') + s + "\n";
  }

  static std::string quote(const std::string& s) {
    std::string r = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') r += '\\';
      r += c;
    }
    return r + "\"";
  }

  std::string path_text(const Operand& o) const {
    std::string s = o.root_var;
    for (const auto& step : o.steps) {
      s += "." + step.property;
      if (step.key) s += "[" + quote(*step.key) + "]";
    }
    return s;
  }

  std::string expr(const OperandPtr& op, const TypeScope& scope) {
    switch (op->kind) {
      case OperandKind::Literal:
        switch (op->value_kind) {
          case ValueKind::Integer: return op->value;
          case ValueKind::Decimal: {
            auto dot = op->value.find('.');
            if (dot != std::string::npos) {
              warn(errc::sol_construct,
                   "fractional literal '" + op->value + "' truncated to integer");
              return op->value.substr(0, dot);
            }
            return op->value;
          }
          default: return quote(op->value);
        }
      case OperandKind::Variable:
        return op->var;
      case OperandKind::Path:
        return path_text(*op);
      case OperandKind::Operation: {
        std::string s;
        for (size_t i = 0; i < op->operands.size(); ++i) {
          if (i) s += op->op == MathOp::Exponent ? " ** " : " " + math_op_name(op->op) + " ";
          std::string sub = expr(op->operands[i], scope);
          s += op->operands[i]->kind == OperandKind::Operation ? "(" + sub + ")" : sub;
        }
        return s;
      }
      case OperandKind::Create:
        return create_expr(op, scope);
      case OperandKind::LiteralList:
        return "/* list */";
    }
    return "0";
  }

  std::string zero_value(const ModelProperty& f) {
    if (const EnumInfo* e = enum_for_term(f.term)) return e->name + "(0)";
    if (f.unbounded && !f.use_dictionary)
      return "new " + sol_base_type(f.type) + "[](0)";
    if (f.type.is_datatype()) {
      std::string t = sol_base_type(f.type);
      if (t == "string") return "\"\"";
      if (t == "bool") return "false";
      return "0";
    }
    const ModelAdt* adt = p_.model.adt(f.type.adt);
    std::string s = f.type.adt + "({id: \"\"";
    if (adt)
      for (const auto& g : adt->fields) {
        if (g.use_dictionary) {
          warn(errc::sol_construct,
               "cannot construct mapping-bearing struct " + f.type.adt);
          continue;
        }
        s += ", " + g.name + ": " + zero_value(g);
      }
    return s + "})";
  }

  std::string create_expr(const OperandPtr& op, const TypeScope& scope) {
    const ModelAdt* adt = p_.model.adt(op->adt);
    std::string s = op->adt + "({id: \"\"";
    for (const auto& f : adt->fields) {
      if (f.use_dictionary) {
        warn(errc::sol_construct,
             "cannot construct mapping-bearing struct " + op->adt);
        continue;
      }
      const OperandPtr* given = nullptr;
      for (const auto& [name, value] : op->args)
        if (name == f.name) given = &value;
      s += ", " + f.name + ": " + (given ? expr(*given, scope) : zero_value(f));
    }
    return s + "})";
  }

  // comparison rendering with type-directed equality
  std::string compare(const OperandPtr& left, CmpOp cmp, const OperandPtr& right,
                      const TypeScope& scope) {
    ResolvedType lt{{rdfns::xsd_string, ""}, false};
    bool typed = true;
    try {
      lt = resolve_operand_type(p_.model, scope, *left);
    } catch (const CompileError&) {
      typed = false;
    }
    std::string l = expr(left, scope);

    if (cmp == CmpOp::Exists) {
      if (lt.multi) return l + ".length != 0";
      if (!typed) return "true";
      if (!lt.type.is_datatype()) {
        if (enum_for_path(left, scope)) return "true";
        return "bytes(" + l + ".id).length != 0";
      }
      std::string t = sol_base_type(lt.type);
      if (t == "string") return "bytes(" + l + ").length != 0";
      return "true /* presence of " + l + " not representable */";
    }

    if (cmp == CmpOp::In) {
      std::string s;
      for (size_t i = 0; i < right->items.size(); ++i) {
        if (i) s += " || ";
        s += compare(left, CmpOp::Eq, right->items[i], scope);
      }
      return "(" + s + ")";
    }

    if (cmp == CmpOp::Eq) {
      if (const EnumInfo* e = enum_for_path(left, scope))
        return l + " == " + e->name + "." + right->value;
      if (!lt.type.is_datatype() && typed)
        return "keccak256(bytes(" + l + ".id)) == keccak256(bytes(" +
               quote(right->value) + "))";
      if (sol_base_type(lt.type) == "string")
        return "keccak256(bytes(" + l + ")) == keccak256(bytes(" + expr(right, scope) +
               "))";
      return l + " == " + expr(right, scope);
    }

    return l + " " + cmp_name(cmp) + " " + expr(right, scope);
  }

  std::string cond_expr(const ConditionPtr& c, const TypeScope& scope) {
    switch (c->kind) {
      case ConditionKind::Comparison:
        return compare(c->left, c->cmp, c->right, scope);
      case ConditionKind::Set: {
        std::string sep = c->disjunction ? " || " : " && ";
        std::string s;
        for (size_t i = 0; i < c->members.size(); ++i) {
          if (i) s += sep;
          std::string m = cond_expr(c->members[i], scope);
          s += c->members[i]->kind == ConditionKind::Set ? "(" + m + ")" : m;
        }
        return s;
      }
      case ConditionKind::CheckCall: {
        std::string s = c->fn + "(";
        for (size_t i = 0; i < c->args.size(); ++i) {
          if (i) s += ", ";
          s += expr(c->args[i], scope);
        }
        return s + ")";
      }
      case ConditionKind::Qualified:
        return "false /* unlowered qualified condition */";
    }
    return "false";
  }

  void statements(const std::vector<StatementPtr>& list, int indent, TypeScope scope,
                  const std::optional<std::string>& callback) {
    for (size_t i = 0; i < list.size(); ++i) {
      const StatementPtr& s = list[i];
      // inline the constructor into the emit when the temp is only emitted
      if (s->kind == StatementKind::Assign && s->target->kind == OperandKind::Variable &&
          s->value->kind == OperandKind::Create && i + 1 < list.size() &&
          list[i + 1]->kind == StatementKind::Emit &&
          list[i + 1]->payload->kind == OperandKind::Variable &&
          list[i + 1]->payload->var == s->target->var) {
        line(indent, "emit " + list[i + 1]->event + "(" + create_expr(s->value, scope) +
                         ");");
        ++i;
        continue;
      }
      statement(s, indent, scope, callback);
      if (s->kind == StatementKind::Remote)
        scope.vars[s->result_var] = ModelType{"", s->resource_type};
      if (s->kind == StatementKind::Assign &&
          s->target->kind == OperandKind::Variable &&
          !scope.vars.count(s->target->var)) {
        try {
          scope.vars[s->target->var] =
              resolve_operand_type(p_.model, scope, *s->value).type;
        } catch (const CompileError&) {
        }
      }
    }
  }

  void statement(const StatementPtr& s, int indent, TypeScope& scope,
                 const std::optional<std::string>& callback) {
    switch (s->kind) {
      case StatementKind::Block:
        statements(s->statements, indent, scope, callback);
        break;
      case StatementKind::IfThen: {
        std::string cond = s->condition ? cond_expr(s->condition, scope) : "true";
        line(indent, "if (" + cond + ") {");
        TypeScope inner = scope;
        if (s->then_block) statements(s->then_block->statements, indent + 1, inner, callback);
        line(indent, "}");
        break;
      }
      case StatementKind::Assign: {
        if (s->target->kind == OperandKind::Variable && !scope.vars.count(s->target->var)) {
          ModelType t{rdfns::xsd_string, ""};
          try {
            t = resolve_operand_type(p_.model, scope, *s->value).type;
          } catch (const CompileError&) {
          }
          scope.vars[s->target->var] = t;
          std::string st = sol_base_type(t);
          std::string mem = t.is_datatype() && st != "string" ? "" : " memory";
          line(indent, st + mem + " " + s->target->var + " = " + expr(s->value, scope) + ";");
        } else {
          line(indent, expr(s->target, scope) + " = " + expr(s->value, scope) + ";");
        }
        break;
      }
      case StatementKind::Iterate: {
        std::string idx = next_index();
        std::string arr = expr(s->start, scope);
        ModelType elem{rdfns::xsd_string, ""};
        try {
          elem = resolve_operand_type(p_.model, scope, *s->start).type;
        } catch (const CompileError&) {
        }
        line(indent, "for (uint " + idx + " = 0; " + idx + " < " + arr + ".length; " +
                         idx + "++) {");
        std::string et = sol_base_type(elem);
        std::string mem = elem.is_datatype() && et != "string" ? "" : " memory";
        line(indent + 1, et + mem + " " + s->loop_var + " = " + arr + "[" + idx + "];");
        TypeScope inner = scope;
        inner.vars[s->loop_var] = elem;
        statement(s->body, indent + 1, inner, callback);
        line(indent, "}");
        release_index();
        break;
      }
      case StatementKind::Remote: {
        std::string cb = callback.value_or("callback");
        line(indent, "Param[] memory params = new Param[](" +
                         std::to_string(s->params.size()) + ");");
        for (size_t i = 0; i < s->params.size(); ++i) {
          const auto& [name, value] = s->params[i];
          std::string v;
          ResolvedType rt{{rdfns::xsd_string, ""}, false};
          bool typed = true;
          try {
            rt = resolve_operand_type(p_.model, scope, *value);
          } catch (const CompileError&) {
            typed = false;
          }
          if (typed && !rt.type.is_datatype())
            v = expr(value, scope) + ".id";
          else if (value->kind == OperandKind::Literal &&
                   value->value_kind != ValueKind::String &&
                   value->value_kind != ValueKind::Iri)
            v = quote(value->value);
          else
            v = expr(value, scope);
          line(indent, "params[" + std::to_string(i) + "] = Param(" + quote(name) +
                           ", " + v + ");");
        }
        line(indent, "emit OracleRequest(RequestData(" + entry_param_name() + ", " +
                         quote(s->resource_type) + ", params, " + quote(cb) + "));");
        break;
      }
      case StatementKind::Emit:
        line(indent, "emit " + s->event + "(" + expr(s->payload, scope) + ");");
        break;
    }
  }

  std::string next_index() {
    ++loop_depth_;
    return loop_depth_ == 1 ? "i" : "i" + std::to_string(loop_depth_);
  }
  void release_index() { --loop_depth_; }

  std::string entry_param_name() const { return p_.functions.front().params[0].first; }

  bool has_remote() const {
    for (const auto& seg : entry_segments_)
      if (seg.request_callback) return true;
    return false;
  }

  void render() {
    src_ += "// SPDX-License-Identifier: UNLICENSED\n";
    src_ += "// Generated by n3sc; do not edit.\n";
    src_ += "pragma solidity 0.8.24;\n\n";
    src_ += "contract " + opts_.contract_name + " {\n";

    for (const auto& [term, info] : enums_) {
      std::string members;
      for (size_t i = 0; i < info.members.size(); ++i)
        members += (i ? ", " : "") + info.members[i];
      line(1, "enum " + info.name + " { " + members + " }");
    }
    if (!enums_.empty()) src_ += "\n";

    for (const auto& adt : p_.model.adts) {
      if (is_enum_struct(adt)) continue;
      line(1, "struct " + adt.name + " {");
      line(2, "string id;");
      for (const auto& f : adt.fields) line(2, field_type(f) + " " + f.name + ";");
      line(1, "}");
      structs_.push_back(adt.name);
    }
    if (has_remote()) {
      line(1, "struct Param {");
      line(2, "string name;");
      line(2, "string value;");
      line(1, "}");
      line(1, "struct RequestData {");
      const auto& entry = p_.functions.front().params[0];
      line(2, sol_base_type(entry.second) + " " + entry.first + ";");
      line(2, "string resource;");
      line(2, "Param[] parameters;");
      line(2, "string callback;");
      line(1, "}");
      structs_.push_back("Param");
      structs_.push_back("RequestData");
    }
    src_ += "\n";

    if (has_remote()) {
      line(1, "event OracleRequest(RequestData request);");
      emitted_events_.push_back("OracleRequest");
    }
    for (const auto& ev : p_.events) {
      line(1, "event " + ev.name + "(" + sol_base_type(ev.payload) + " payload);");
      emitted_events_.push_back(ev.name);
    }
    src_ += "\n";

    const Function& entry = p_.functions.front();
    for (const auto& seg : entry_segments_) {
      std::string sig = "function " + seg.name + "(";
      bool first = true;
      for (const auto& [name, type] : entry.params) {
        if (!first) sig += ", ";
        first = false;
        sig += sol_base_type(type) + (type.is_datatype() ? " " : " memory ") + name;
      }
      if (seg.name != "process") {
        // callbacks receive the retrieved records
        sig += ", " + data_types_[seg.name] + "[] memory data";
      }
      sig += ") public {";
      line(1, sig);
      TypeScope scope;
      for (const auto& [name, type] : entry.params) scope.vars[name] = type;
      if (seg.name != "process")
        scope.vars["data"] = ModelType{"", data_types_[seg.name]};
      for (const auto& s : seg.preamble) statement(s, 2, scope, seg.request_callback);
      statements(seg.body, 2, scope, seg.request_callback);
      line(1, "}");
      src_ += "\n";
      functions_.push_back(seg.name);
    }

    for (const auto& fn : p_.functions) {
      if (!fn.is_check) continue;
      const auto& [elem_name, elem_type] = fn.params[0];
      std::string sig = "function " + fn.name + "(" + sol_base_type(elem_type) +
                        "[] memory values";
      for (size_t i = 1; i < fn.params.size(); ++i) {
        const auto& [pn, pt] = fn.params[i];
        sig += ", " + sol_base_type(pt) + (pt.is_datatype() ? " " : " memory ") + pn;
      }
      sig += ") private pure returns (bool) {";
      line(1, sig);
      const Condition& q = *fn.check_condition;
      TypeScope scope;
      for (const auto& [pn, pt] : fn.params) scope.vars[pn] = pt;
      std::string idx = next_index();
      line(2, "for (uint " + idx + " = 0; " + idx + " < values.length; " + idx + "++) {");
      std::string et = sol_base_type(elem_type);
      std::string mem = elem_type.is_datatype() && et != "string" ? "" : " memory";
      line(3, et + mem + " " + elem_name + " = values[" + idx + "];");
      std::string inner = cond_expr(q.inner, scope);
      if (q.universal) {
        line(3, "if (!(" + inner + ")) { return false; }");
        line(2, "}");
        line(2, "return true;");
      } else {
        line(3, "if (" + inner + ") { return true; }");
        line(2, "}");
        line(2, "return false;");
      }
      release_index();
      line(1, "}");
      src_ += "\n";
      functions_.push_back(fn.name);
    }

    src_ += "}\n";
  }

  std::string manifest(const SolidityResult& out) {
    ordered_json j;
    j["contract"] = opts_.contract_name;
    j["bytes"] = out.source.size();
    j["functions"] = functions_;
    j["events"] = emitted_events_;
    j["structs"] = structs_;
    ordered_json enums = ordered_json::object();
    for (const auto& [term, info] : enums_) enums[info.name] = info.members;
    j["enums"] = enums;
    j["mangling"] = ordered_json(p_.model.mangling);
    ordered_json rewrites = ordered_json::array();
    for (const auto& r : flat_.rewrites)
      rewrites.push_back(ordered_json{{"adt", r.adt},
                                      {"field", r.field},
                                      {"inner", r.inner},
                                      {"merged", r.merged}});
    j["flatten_rewrites"] = rewrites;
    ordered_json warns = ordered_json::array();
    for (const auto& w : out.warnings) warns.push_back(w.str());
    j["warnings"] = warns;
    return j.dump(2) + "\n";
  }

  void warn(const std::string& code, const std::string& msg) {
    warnings_.push_back({code, msg, {}});
  }

 public:
  // resource types per callback, filled before rendering
  void compute_data_types() {
    std::string pending_type;
    for (auto& seg : entry_segments_) {
      if (!pending_type.empty()) data_types_[seg.name] = pending_type;
      pending_type.clear();
      std::function<void(const StatementPtr&)> find = [&](const StatementPtr& s) {
        if (s->kind == StatementKind::Remote) pending_type = s->resource_type;
        if (s->kind == StatementKind::Block)
          for (const auto& x : s->statements) find(x);
        if (s->kind == StatementKind::IfThen && s->then_block) find(s->then_block);
        if (s->kind == StatementKind::Iterate) find(s->body);
      };
      for (const auto& s : seg.body) find(s);
    }
  }

 private:
  BridgeProgram p_;
  SolidityOptions opts_;
  FlattenResult flat_;
  std::vector<ContractSegment> entry_segments_;
  std::map<std::string, EnumInfo> enums_;
  std::map<std::string, std::string> data_types_;
  std::vector<std::string> functions_;
  std::vector<std::string> emitted_events_;
  std::vector<std::string> structs_;
  std::vector<Diagnostic> warnings_;
  std::string src_;
  int loop_depth_ = 0;
};

}  // namespace

SolidityResult emit_solidity(const BridgeProgram& program, const SolidityOptions& opts) {
  SolidityEmitter emitter(program, opts);
  return emitter.run();
}

std::vector<Diagnostic> check_solidity_wellformed(const std::string& source) {
  std::vector<Diagnostic> diags;
  std::vector<char> stack;
  bool in_string = false;
  bool in_line_comment = false;
  bool in_block_comment = false;
  int line = 1, col = 0;
  for (size_t i = 0; i < source.size(); ++i) {
    char c = source[i];
    ++col;
    if (c == '\n') {
      ++line;
      col = 0;
      in_line_comment = false;
      continue;
    }
    if (in_line_comment) continue;
    if (in_block_comment) {
      if (c == '*' && i + 1 < source.size() && source[i + 1] == '/') {
        in_block_comment = false;
        ++i;
      }
      continue;
    }
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '/' && i + 1 < source.size() && source[i + 1] == '/') {
      in_line_comment = true;
      ++i;
    } else if (c == '/' && i + 1 < source.size() && source[i + 1] == '*') {
      in_block_comment = true;
      ++i;
    } else if (c == '(' || c == '{' || c == '[') {
      stack.push_back(c);
    } else if (c == ')' || c == '}' || c == ']') {
      char open = c == ')' ? '(' : c == '}' ? '{' : '[';
      if (stack.empty() || stack.back() != open) {
        diags.push_back({errc::delim, std::string("unbalanced '") + c + "'",
                         {line, col}});
        return diags;
      }
      stack.pop_back();
    }
  }
  if (!stack.empty())
    diags.push_back({errc::delim, std::string("unclosed '") + stack.back() + "'", {line, col}});
  if (in_string) diags.push_back({errc::delim, "unterminated string", {line, col}});
  return diags;
}

}  // namespace n3sc
