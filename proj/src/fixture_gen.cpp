#include <functional>
#include <random>
#include <set>

#include "n3sc/fixture_gen.hpp"

namespace n3sc {

namespace {

struct Pools {
  // constants per "adt.field", collected from program conditions
  std::map<std::string, std::vector<std::string>> strings;
  std::map<std::string, std::vector<long long>> ints;
  std::map<std::string, std::vector<double>> decs;
  std::set<std::string> dict_keys;
  std::set<std::string> remote_types;
};

class PoolCollector {
 public:
  PoolCollector(const BridgeProgram& p, Pools& pools) : p_(p), pools_(pools) {}

  void run() {
    for (const auto& fn : p_.functions) {
      TypeScope scope;
      for (const auto& [name, type] : fn.params) scope.vars[name] = type;
      std::function<void(const StatementPtr&)> collect_results =
          [&](const StatementPtr& s) {
            if (s->kind == StatementKind::Remote) {
              scope.vars[s->result_var] = ModelType{"", s->resource_type};
              pools_.remote_types.insert(s->resource_type);
            }
            if (s->kind == StatementKind::Block)
              for (const auto& x : s->statements) collect_results(x);
            if (s->kind == StatementKind::IfThen && s->then_block)
              collect_results(s->then_block);
            if (s->kind == StatementKind::Iterate) collect_results(s->body);
          };
      for (const auto& s : fn.logic) collect_results(s);
      for (const auto& s : fn.logic) walk(s, scope);
    }
  }

 private:
  std::string field_key(const OperandPtr& path, const TypeScope& scope) {
    if (path->kind != OperandKind::Path || path->steps.empty()) return "";
    auto it = scope.vars.find(path->root_var);
    if (it == scope.vars.end()) return "";
    ModelType cur = it->second;
    std::string key;
    for (const auto& step : path->steps) {
      if (step.key) pools_.dict_keys.insert(*step.key);
      if (cur.is_datatype()) return "";
      const ModelAdt* adt = p_.model.adt(cur.adt);
      const ModelProperty* f = adt ? adt->field(step.property) : nullptr;
      if (!f) return "";
      key = cur.adt + "." + f->name;
      cur = f->type;
    }
    return key;
  }

  void note_literal(const std::string& key, const OperandPtr& lit) {
    if (key.empty()) return;
    switch (lit->value_kind) {
      case ValueKind::String:
      case ValueKind::Iri: pools_.strings[key].push_back(lit->value); break;
      case ValueKind::Integer: pools_.ints[key].push_back(std::stoll(lit->value)); break;
      case ValueKind::Decimal: pools_.decs[key].push_back(std::stod(lit->value)); break;
    }
  }

  void scan(const ConditionPtr& c, const TypeScope& scope) {
    switch (c->kind) {
      case ConditionKind::Comparison: {
        if (!c->right) break;
        std::string key = field_key(c->left, scope);
        if (c->right->kind == OperandKind::Literal) {
          note_literal(key, c->right);
          // relational bounds: include a value on each side
          if (c->cmp != CmpOp::Eq && c->right->value_kind != ValueKind::String &&
              c->right->value_kind != ValueKind::Iri) {
            double v = std::stod(c->right->value);
            pools_.decs[key].push_back(v + 1);
            pools_.decs[key].push_back(v - 1);
          }
        } else if (c->right->kind == OperandKind::LiteralList) {
          for (const auto& item : c->right->items) note_literal(key, item);
        }
        break;
      }
      case ConditionKind::Set:
        for (const auto& m : c->members) scan(m, scope);
        break;
      case ConditionKind::Qualified: {
        TypeScope inner = scope;
        try {
          inner.vars[c->loop_var] = resolve_operand_type(p_.model, scope, *c->start).type;
        } catch (const CompileError&) {
        }
        field_key(c->start, scope);
        scan(c->inner, inner);
        break;
      }
      default:
        break;
    }
  }

  void walk(const StatementPtr& s, TypeScope scope) {
    switch (s->kind) {
      case StatementKind::Block:
        for (const auto& x : s->statements) walk(x, scope);
        break;
      case StatementKind::IfThen:
        if (s->condition) scan(s->condition, scope);
        if (s->then_block) walk(s->then_block, scope);
        break;
      case StatementKind::Iterate: {
        try {
          scope.vars[s->loop_var] = resolve_operand_type(p_.model, scope, *s->start).type;
        } catch (const CompileError&) {
        }
        field_key(s->start, scope);
        walk(s->body, scope);
        break;
      }
      default:
        break;
    }
  }

  const BridgeProgram& p_;
  Pools& pools_;
};

class Generator {
 public:
  Generator(const BridgeProgram& p, uint64_t seed) : p_(p), rng_(seed) {
    PoolCollector(p, pools_).run();
  }

  Fixture run() {
    Fixture f;
    const auto& entry = p_.functions.front().params[0];
    f.request = entity(entry.second.adt, 0, /*allow_inpool_arrays=*/true);
    // occasionally preset inferred fields instead of letting rules derive
    // them; arrays then stay out-of-pool to keep inferred bindings single
    if (chance(0.15)) {
      preset_inferred(f.request, entry.second.adt);
    }
    build_remote_entries(f);
    return f;
  }

 private:
  bool chance(double prob) {
    return std::uniform_real_distribution<double>(0, 1)(rng_) < prob;
  }
  size_t pick(size_t n) {
    return std::uniform_int_distribution<size_t>(0, n - 1)(rng_);
  }

  std::string fresh_id(const std::string& prefix) {
    return prefix + std::to_string(++id_counter_);
  }

  ValuePtr scalar(const std::string& key, const ModelType& type, bool in_pool) {
    std::string local = iri_local_name(type.datatype);
    if (local == "boolean") return Value::make_bool(chance(0.5));
    if (local == "integer") {
      const auto& pool = pools_.ints[key];
      if (in_pool && !pool.empty()) return Value::make_int(pool[pick(pool.size())]);
      const auto& dp = pools_.decs[key];
      if (in_pool && !dp.empty())
        return Value::make_int(static_cast<long long>(dp[pick(dp.size())]));
      return Value::make_int(static_cast<long long>(pick(30)));
    }
    if (local == "decimal" || local == "double" || local == "float") {
      const auto& pool = pools_.decs[key];
      if (in_pool && !pool.empty()) return Value::make_dec(pool[pick(pool.size())]);
      const auto& ip = pools_.ints[key];
      if (in_pool && !ip.empty())
        return Value::make_dec(static_cast<double>(ip[pick(ip.size())]));
      // spread defaults so operation results cross rule thresholds
      static const double kDefaults[] = {0.5, 1.7, 2, 10, 42, 75, 120};
      return Value::make_dec(kDefaults[pick(7)]);
    }
    const auto& pool = pools_.strings[key];
    if (in_pool && !pool.empty()) return Value::make_string(pool[pick(pool.size())]);
    return Value::make_string(fresh_id("zz"));
  }

  // a value tree for one ADT; in_pool controls whether scalars may match the
  // rules' constants
  ValuePtr entity(const std::string& adt_name, int depth, bool in_pool) {
    const ModelAdt* adt = p_.model.adt(adt_name);
    ValuePtr v = Value::make_entity(adt_name, fresh_id("x"));
    if (!adt || depth > 4) return v;
    // runtime type tag mirror, as the fixture loader materializes it
    if (const ModelProperty* tf = adt->field_by_term(rdfns::rdf_type)) {
      Value::Field slot;
      slot.single = Value::make_string(adt_name);
      v->fields[tf->name] = std::move(slot);
    }
    for (const auto& f : adt->fields) {
      if (f.term == rdfns::rdf_type) continue;  // tag mirror added by fixtures
      if (f.inferred) continue;                 // derived by the rules
      if (!f.type.is_datatype() && pools_.remote_types.count(f.type.adt))
        continue;  // remote-only data never rides along in the request
      if (!chance(0.85)) continue;
      std::string key = adt_name + "." + f.name;
      Value::Field slot;
      if (f.use_dictionary) {
        slot.card = Value::Field::Card::Dict;
        std::vector<std::string> keys(pools_.dict_keys.begin(), pools_.dict_keys.end());
        keys.push_back(fresh_id("k"));
        size_t n = pick(3);
        std::set<std::string> used;
        for (size_t i = 0; i < n && i < keys.size(); ++i) {
          std::string k = keys[pick(keys.size())];
          if (!used.insert(k).second) continue;
          slot.dict.emplace_back(k, value_for(adt_name, f, depth, in_pool && chance(0.8)));
        }
        if (slot.dict.empty()) continue;
      } else if (f.unbounded) {
        slot.card = Value::Field::Card::Array;
        size_t n = pick(4);  // 0..3 items
        bool pool_slot_used = false;
        for (size_t i = 0; i < n; ++i) {
          bool this_in_pool = in_pool && !pool_slot_used && chance(0.75);
          if (this_in_pool) pool_slot_used = true;
          slot.array.push_back(value_for(adt_name, f, depth, this_in_pool));
        }
        if (slot.array.empty()) continue;
      } else {
        slot.card = Value::Field::Card::Single;
        slot.single = f.type.is_datatype()
                          ? scalar(key, f.type, in_pool && chance(0.9))
                          : value_for(adt_name, f, depth, in_pool);
      }
      v->fields[f.name] = std::move(slot);
    }
    return v;
  }

  ValuePtr value_for(const std::string& owner, const ModelProperty& f, int depth,
                     bool in_pool) {
    if (f.type.is_datatype())
      return scalar(owner + "." + f.name, f.type, in_pool);
    // enum-like fieldless classes are referenced by id from the pool
    const ModelAdt* adt = p_.model.adt(f.type.adt);
    if (adt && adt->fields.empty()) {
      std::string key = owner + "." + f.name;
      if (pools_.strings[key].empty()) {
        // fall back to the same field name on another ADT
        for (const auto& [k, pool] : pools_.strings) {
          auto dot = k.find('.');
          if (dot != std::string::npos && k.substr(dot + 1) == f.name && !pool.empty()) {
            key = k;
            break;
          }
        }
      }
      const auto& pool = pools_.strings[key];
      if (in_pool && !pool.empty())
        return Value::make_entity(adt->name, pool[pick(pool.size())]);
      return Value::make_entity(adt->name, fresh_id("e"));
    }
    return entity(f.type.adt, depth + 1, in_pool);
  }

  void preset_inferred(const ValuePtr& root, const std::string& adt_name) {
    const ModelAdt* adt = p_.model.adt(adt_name);
    if (!adt) return;
    for (const auto& f : adt->fields) {
      if (!f.inferred || f.type.is_datatype()) continue;
      if (!chance(0.6)) continue;
      Value::Field slot;
      slot.single = entity(f.type.adt, 1, true);
      (void)0;
      root->fields[f.name] = std::move(slot);
      // presets must stay the only binding source: in-pool array elements
      // elsewhere could double-bind the inferred property
      strip_inpool_arrays(root, adt_name, 0);
    }
  }

  void strip_inpool_arrays(const ValuePtr& v, const std::string& adt_name, int depth) {
    const ModelAdt* adt = p_.model.adt(adt_name);
    if (!adt || depth > 4 || !v || v->kind != Value::Kind::Entity) return;
    for (const auto& f : adt->fields) {
      auto it = v->fields.find(f.name);
      if (it == v->fields.end()) continue;
      if (it->second.card == Value::Field::Card::Array) v->fields.erase(it);
    }
  }

  void build_remote_entries(Fixture& f) {
    const Function& entry = p_.functions.front();
    std::function<void(const StatementPtr&)> walk = [&](const StatementPtr& s) {
      switch (s->kind) {
        case StatementKind::Block:
          for (const auto& x : s->statements) walk(x);
          break;
        case StatementKind::IfThen:
          if (s->then_block) walk(s->then_block);
          break;
        case StatementKind::Iterate:
          walk(s->body);
          break;
        case StatementKind::Remote: {
          RemoteEntry rec;
          rec.type = s->resource_type;
          bool resolvable = true;
          for (const auto& [name, op] : s->params) {
            auto v = static_value(op, f.request);
            if (!v) {
              resolvable = false;
              break;
            }
            rec.params[name] = *v;
          }
          if (resolvable) {
            size_t n = pick(3);  // 0..2 results
            for (size_t i = 0; i < n; ++i)
              rec.results.push_back(entity(rec.type, 1, chance(0.85)));
            materialize(rec);
            f.remote.push_back(std::move(rec));
          }
          break;
        }
        default:
          break;
      }
    };
    for (const auto& s : entry.logic) walk(s);
  }

  // best-effort static evaluation of a request parameter against the
  // generated request tree
  std::optional<std::string> static_value(const OperandPtr& op, const ValuePtr& request) {
    if (op->kind == OperandKind::Literal) return op->value;
    if (op->kind != OperandKind::Path) return std::nullopt;
    if (op->root_var != p_.functions.front().params[0].first) return std::nullopt;
    ValuePtr cur = request;
    for (const auto& step : op->steps) {
      if (!cur || cur->kind != Value::Kind::Entity) return std::nullopt;
      auto it = cur->fields.find(step.property);
      if (it == cur->fields.end() || !it->second.single) {
        // materialize the missing link so the request becomes satisfiable
        const ModelAdt* adt = p_.model.adt(cur->type_tag);
        const ModelProperty* fld = adt ? adt->field(step.property) : nullptr;
        if (!fld || fld->type.is_datatype() || fld->unbounded) return std::nullopt;
        Value::Field slot;
        slot.single = Value::make_entity(fld->type.adt, fresh_id("x"));
        cur->fields[step.property] = std::move(slot);
        cur = cur->fields[step.property].single;
        continue;
      }
      cur = it->second.single;
    }
    if (!cur) return std::nullopt;
    switch (cur->kind) {
      case Value::Kind::Entity: return cur->id;
      case Value::Kind::Str: return cur->str;
      case Value::Kind::Int: return std::to_string(cur->integer);
      default: return std::nullopt;
    }
  }

  // mirror of the loader's selector materialization
  void materialize(RemoteEntry& entry) {
    const ModelAdt* adt = p_.model.adt(entry.type);
    if (!adt) return;
    for (const auto& [pname, pvalue] : entry.params) {
      const ModelProperty* field = nullptr;
      for (const auto& f : adt->fields)
        if (iri_local_name(f.term) == pname) field = &f;
      if (!field || field->unbounded) continue;
      for (auto& rec : entry.results) {
        rec->fields.erase(field->name);
        Value::Field slot;
        if (field->type.is_datatype()) {
          std::string local = iri_local_name(field->type.datatype);
          if (local == "integer")
            slot.single = Value::make_int(std::stoll(pvalue));
          else if (local == "decimal" || local == "double")
            slot.single = Value::make_dec(std::stod(pvalue));
          else
            slot.single = Value::make_string(pvalue);
        } else {
          slot.single = Value::make_entity(field->type.adt, pvalue);
        }
        rec->fields[field->name] = std::move(slot);
      }
    }
  }

  const BridgeProgram& p_;
  Pools pools_;
  std::mt19937_64 rng_;
  int id_counter_ = 0;
};

}  // namespace

Fixture generate_fixture(const BridgeProgram& program, uint64_t seed) {
  Generator gen(program, seed);
  return gen.run();
}

}  // namespace n3sc
