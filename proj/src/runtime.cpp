#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"
#include "n3sc/runtime.hpp"

namespace n3sc {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

ValuePtr Value::make_string(std::string s) {
  auto v = std::make_shared<Value>();
  v->kind = Kind::Str;
  v->str = std::move(s);
  return v;
}
ValuePtr Value::make_int(long long n) {
  auto v = std::make_shared<Value>();
  v->kind = Kind::Int;
  v->integer = n;
  return v;
}
ValuePtr Value::make_dec(double d) {
  auto v = std::make_shared<Value>();
  v->kind = Kind::Dec;
  v->decimal = d;
  return v;
}
ValuePtr Value::make_bool(bool b) {
  auto v = std::make_shared<Value>();
  v->kind = Kind::Bool;
  v->boolean = b;
  return v;
}
ValuePtr Value::make_entity(std::string type_tag, std::string id) {
  auto v = std::make_shared<Value>();
  v->kind = Kind::Entity;
  v->type_tag = std::move(type_tag);
  v->id = std::move(id);
  return v;
}

namespace {

std::string number_text(double d) {
  if (d == std::floor(d) && std::abs(d) < 1e15) {
    std::ostringstream ss;
    ss << static_cast<long long>(d);
    return ss.str();
  }
  std::ostringstream ss;
  ss << d;
  return ss.str();
}

std::string scalar_text(const ValuePtr& v) {
  switch (v->kind) {
    case Value::Kind::Str: return v->str;
    case Value::Kind::Int: return std::to_string(v->integer);
    case Value::Kind::Dec: return number_text(v->decimal);
    case Value::Kind::Bool: return v->boolean ? "true" : "false";
    case Value::Kind::Entity: return v->id;
  }
  return "";
}

// ---------------------------------------------------------------------------
// fixture loading
// ---------------------------------------------------------------------------

class FixtureLoader {
 public:
  explicit FixtureLoader(const BridgeProgram& p) : p_(p) {}

  Fixture load(const std::string& text) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw CompileError(errc::fixture_type, std::string("invalid JSON: ") + e.what());
    }
    Fixture f;
    if (!j.contains("request"))
      throw CompileError(errc::fixture_type, "fixture missing 'request'");
    const Function& entry = p_.functions.front();
    if (entry.params.empty())
      throw CompileError(errc::fixture_type, "program has no entry parameters");
    f.request = value_from(j.at("request"), entry.params[0].second, "/request");
    if (j.contains("remote")) {
      size_t i = 0;
      for (const auto& e : j.at("remote")) {
        std::string path = "/remote/" + std::to_string(i++);
        RemoteEntry entry_rec;
        entry_rec.type = str_at(e, "type", path);
        const ModelAdt* adt = p_.model.adt(entry_rec.type);
        if (!adt)
          throw CompileError(errc::fixture_type,
                             path + ": unknown resource type " + entry_rec.type);
        if (e.contains("params"))
          for (const auto& [k, v] : e.at("params").items())
            entry_rec.params[k] = v.is_string() ? v.get<std::string>() : v.dump();
        if (e.contains("results")) {
          size_t ri = 0;
          for (const auto& r : e.at("results"))
            entry_rec.results.push_back(value_from(
                r, ModelType{"", entry_rec.type}, path + "/results/" + std::to_string(ri++)));
        }
        materialize_selectors(entry_rec, *adt);
        f.remote.push_back(std::move(entry_rec));
      }
    }
    return f;
  }

 private:
  std::string str_at(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key) || !j.at(key).is_string())
      throw CompileError(errc::fixture_type, path + ": missing string '" + key + "'");
    return j.at(key).get<std::string>();
  }

  std::string fresh_id() { return "n" + std::to_string(++id_counter_); }

  ValuePtr value_from(const json& j, const ModelType& expected, const std::string& path) {
    if (expected.is_datatype()) return scalar_from(j, expected, path);

    const ModelAdt* adt = p_.model.adt(expected.adt);
    if (!adt)
      throw CompileError(errc::fixture_type, path + ": unknown ADT " + expected.adt);

    if (j.is_string()) {
      // shorthand: entity reference by id
      return Value::make_entity(adt->name, j.get<std::string>());
    }
    if (!j.is_object())
      throw CompileError(errc::fixture_type,
                         path + ": expected object or id string for " + adt->name);

    std::string tag = j.contains("type") ? j.at("type").get<std::string>() : adt->name;
    std::string id = j.contains("id") ? j.at("id").get<std::string>() : fresh_id();
    ValuePtr v = Value::make_entity(tag, id);

    const json empty = json::object();
    const json& fields = j.contains("fields") ? j.at("fields") : empty;
    for (const auto& [key, val] : fields.items()) {
      const ModelProperty* f = adt->field(key);
      if (!f)
        throw CompileError(errc::fixture_type,
                           path + ": '" + key + "' is not a field of " + adt->name);
      Value::Field slot;
      std::string fpath = path + "/" + key;
      if (f->use_dictionary) {
        if (!val.is_object())
          throw CompileError(errc::fixture_type, fpath + ": dictionary field expects an object");
        slot.card = Value::Field::Card::Dict;
        for (const auto& [k, item] : val.items()) {
          for (const auto& [seen, ignored] : slot.dict)
            if (seen == k)
              throw CompileError(errc::run_duplicate_key,
                                 fpath + ": duplicate dictionary key '" + k + "'");
          slot.dict.emplace_back(k, value_from(item, f->type, fpath + "/" + k));
        }
      } else if (f->unbounded) {
        if (!val.is_array())
          throw CompileError(errc::fixture_type, fpath + ": array expected");
        slot.card = Value::Field::Card::Array;
        size_t i = 0;
        for (const auto& item : val)
          slot.array.push_back(value_from(item, f->type, fpath + "/" + std::to_string(i++)));
      } else {
        slot.card = Value::Field::Card::Single;
        slot.single = value_from(val, f->type, fpath);
      }
      v->fields[f->name] = std::move(slot);
    }
    // the synthesized runtime type field mirrors the tag when not given
    if (const ModelProperty* tf = adt->field_by_term(rdfns::rdf_type))
      if (!v->fields.count(tf->name)) {
        Value::Field slot;
        slot.single = Value::make_string(tag);
        v->fields[tf->name] = std::move(slot);
      }
    return v;
  }

  ValuePtr scalar_from(const json& j, const ModelType& t, const std::string& path) {
    std::string local = iri_local_name(t.datatype);
    if (local == "string" || local == "anyURI") {
      if (!j.is_string())
        throw CompileError(errc::fixture_type, path + ": string expected");
      return Value::make_string(j.get<std::string>());
    }
    if (local == "boolean") {
      if (!j.is_boolean())
        throw CompileError(errc::fixture_type, path + ": boolean expected");
      return Value::make_bool(j.get<bool>());
    }
    if (local == "integer") {
      if (!j.is_number_integer())
        throw CompileError(errc::fixture_type, path + ": integer expected");
      return Value::make_int(j.get<long long>());
    }
    if (!j.is_number())
      throw CompileError(errc::fixture_type, path + ": number expected");
    return Value::make_dec(j.get<double>());
  }

  // records returned for a parameter set carry those selector values
  void materialize_selectors(RemoteEntry& entry, const ModelAdt& adt) {
    for (const auto& [pname, pvalue] : entry.params) {
      const ModelProperty* field = nullptr;
      for (const auto& f : adt.fields)
        if (iri_local_name(f.term) == pname) field = &f;
      if (!field || field->unbounded) continue;
      for (auto& rec : entry.results) {
        if (rec->fields.count(field->name)) continue;
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
  int id_counter_ = 0;
};

}  // namespace

Fixture load_fixture(const std::string& json_text, const BridgeProgram& program) {
  return FixtureLoader(program).load(json_text);
}

// ---------------------------------------------------------------------------
// canonical rendering
// ---------------------------------------------------------------------------

static ordered_json canonical_json(const ValuePtr& v, const Model& model) {
  switch (v->kind) {
    case Value::Kind::Str: return v->str;
    case Value::Kind::Int: return v->integer;
    case Value::Kind::Dec:
      return v->decimal == std::floor(v->decimal)
                 ? ordered_json(static_cast<long long>(v->decimal))
                 : ordered_json(v->decimal);
    case Value::Kind::Bool: return v->boolean;
    case Value::Kind::Entity: {
      ordered_json j;
      j["type"] = v->type_tag;
      const ModelAdt* adt = model.adt(v->type_tag);
      std::vector<std::string> order;
      if (adt)
        for (const auto& f : adt->fields) order.push_back(f.name);
      else
        for (const auto& [name, slot] : v->fields) order.push_back(name);
      for (const auto& name : order) {
        auto it = v->fields.find(name);
        if (it == v->fields.end()) continue;
        const Value::Field& slot = it->second;
        switch (slot.card) {
          case Value::Field::Card::Single:
            if (slot.single)
              j[name] = slot.single->kind == Value::Kind::Entity
                            ? ordered_json(slot.single->id)
                            : canonical_json(slot.single, model);
            break;
          case Value::Field::Card::Array: {
            ordered_json arr = ordered_json::array();
            for (const auto& item : slot.array)
              arr.push_back(item->kind == Value::Kind::Entity
                                ? ordered_json(item->id)
                                : canonical_json(item, model));
            j[name] = arr;
            break;
          }
          case Value::Field::Card::Dict: {
            ordered_json d;
            for (const auto& [k, item] : slot.dict)
              d[k] = item->kind == Value::Kind::Entity ? ordered_json(item->id)
                                                       : canonical_json(item, model);
            j[name] = d;
            break;
          }
        }
      }
      return j;
    }
  }
  return nullptr;
}

std::string canonical_value(const ValuePtr& v, const Model& model) {
  return canonical_json(v, model).dump();
}

// ---------------------------------------------------------------------------
// transcript
// ---------------------------------------------------------------------------

std::vector<TranscriptEntry> ExecutionTranscript::events() const {
  std::vector<TranscriptEntry> out;
  for (const auto& e : entries)
    if (e.kind == TranscriptEntry::Kind::EventEmitted) out.push_back(e);
  return out;
}

std::string ExecutionTranscript::to_json_lines() const {
  std::string out;
  for (const auto& e : entries) {
    ordered_json j;
    switch (e.kind) {
      case TranscriptEntry::Kind::FunctionEntered:
        j["entry"] = "function";
        j["name"] = e.name;
        break;
      case TranscriptEntry::Kind::RemoteRequested: {
        j["entry"] = "remote";
        j["type"] = e.name;
        ordered_json params;
        for (const auto& [k, v] : e.params) params[k] = v;
        j["params"] = params;
        break;
      }
      case TranscriptEntry::Kind::CallbackInvoked:
        j["entry"] = "callback";
        j["name"] = e.name;
        j["results"] = e.result_count;
        break;
      case TranscriptEntry::Kind::EventEmitted:
        j["entry"] = "event";
        j["name"] = e.name;
        j["payload"] = json::parse(e.payload);
        break;
    }
    out += j.dump() + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// interpreter
// ---------------------------------------------------------------------------

namespace {

struct Absent {};  // marker for missing optional values

// result of evaluating an operand: a value, a list (multi-valued path), or
// absent
struct EvalResult {
  enum class Kind { Single, List, Missing } kind = Kind::Missing;
  ValuePtr value;
  std::vector<ValuePtr> list;

  static EvalResult single(ValuePtr v) { return {Kind::Single, std::move(v), {}}; }
  static EvalResult list_of(std::vector<ValuePtr> xs) {
    return {Kind::List, nullptr, std::move(xs)};
  }
  static EvalResult missing() { return {}; }
  bool is_missing() const { return kind == Kind::Missing; }
};

class Interpreter {
 public:
  Interpreter(const BridgeProgram& p, const Fixture& f) : p_(p), fixture_(f) {
    for (const auto& entry : f.remote)
      remote_index_[remote_key(entry.type, entry.params)] = &entry;
  }

  ExecutionTranscript run() {
    const Function& entry = p_.functions.front();
    env_[entry.params[0].first] = fixture_.request;
    for (size_t i = 1; i < entry.params.size(); ++i) {
      if (i - 1 < fixture_.extra_params.size())
        env_[entry.params[i].first] = fixture_.extra_params[i - 1];
    }
    transcript_.entries.push_back(
        {TranscriptEntry::Kind::FunctionEntered, entry.name, {}, 0, ""});
    for (const auto& s : entry.preamble) exec_preamble(*s);
    run_block(entry.logic, 0);
    return std::move(transcript_);
  }

 private:
  static std::string remote_key(const std::string& type,
                                const std::map<std::string, std::string>& params) {
    std::string key = type;
    for (const auto& [k, v] : params) key += "|" + k + "=" + v;
    return key;
  }

  [[noreturn]] void fail(const std::string& code, const std::string& msg) {
    throw CompileError(code, msg);
  }

  // preamble assignments hold operation results; absent operands propagate
  void exec_preamble(const Statement& s) {
    if (s.kind != StatementKind::Assign || s.target->kind != OperandKind::Variable)
      fail(errc::run_fragment, "preamble must contain variable assignments");
    EvalResult r = eval(*s.value);
    env_[s.target->var] = r.kind == EvalResult::Kind::Single ? r.value : nullptr;
  }

  EvalResult eval(const Operand& o) {
    switch (o.kind) {
      case OperandKind::Literal:
        switch (o.value_kind) {
          case ValueKind::String: return EvalResult::single(Value::make_string(o.value));
          case ValueKind::Iri: return EvalResult::single(Value::make_string(o.value));
          case ValueKind::Integer:
            return EvalResult::single(Value::make_int(std::stoll(o.value)));
          case ValueKind::Decimal:
            return EvalResult::single(Value::make_dec(std::stod(o.value)));
        }
        break;
      case OperandKind::Variable: {
        auto it = env_.find(o.var);
        if (it == env_.end() || !it->second) return EvalResult::missing();
        return EvalResult::single(it->second);
      }
      case OperandKind::Path: return eval_path(o);
      case OperandKind::Operation: {
        double acc = 0;
        bool first = true;
        for (const auto& sub : o.operands) {
          EvalResult r = eval(*sub);
          if (r.is_missing() || !r.value || !r.value->is_numeric())
            return EvalResult::missing();
          double x = r.value->as_number();
          if (first) {
            acc = x;
            first = false;
            continue;
          }
          switch (o.op) {
            case MathOp::Sum: acc += x; break;
            case MathOp::Product: acc *= x; break;
            case MathOp::Quotient:
              if (x == 0) return EvalResult::missing();
              acc /= x;
              break;
            case MathOp::Exponent: acc = std::pow(acc, x); break;
          }
        }
        return EvalResult::single(Value::make_dec(acc));
      }
      case OperandKind::Create: {
        const ModelAdt* adt = p_.model.adt(o.adt);
        ValuePtr v = Value::make_entity(o.adt, "_new" + std::to_string(++mint_counter_));
        for (const auto& [field, arg] : o.args) {
          EvalResult r = eval(*arg);
          if (r.is_missing())
            fail(errc::run_absent_field, "constructor argument '" + field + "' is absent");
          Value::Field slot;
          slot.single = r.value;
          v->fields[field] = std::move(slot);
        }
        (void)adt;
        return EvalResult::single(v);
      }
      case OperandKind::LiteralList: {
        std::vector<ValuePtr> xs;
        for (const auto& item : o.items) xs.push_back(eval(*item).value);
        return EvalResult::list_of(std::move(xs));
      }
    }
    return EvalResult::missing();
  }

  EvalResult eval_path(const Operand& o) {
    auto it = env_.find(o.root_var);
    if (it == env_.end() || !it->second)
      fail(errc::run_absent_field, "unbound path root '" + o.root_var + "'");
    ValuePtr cur = it->second;
    bool absent = false;
    bool absent_is_soft = false;  // reached through a keyed or value-hop step
    for (size_t si = 0; si < o.steps.size(); ++si) {
      const PathStep& step = o.steps[si];
      // a step is null-propagating when it is itself keyed or a value hop,
      // or when the next step is a value hop (the hop belongs to the
      // comparison, so its base dereference carries no guard)
      bool soft = step.key.has_value() || step.value_hop ||
                  (si + 1 < o.steps.size() && o.steps[si + 1].value_hop);
      if (absent) {
        if (!absent_is_soft)
          fail(errc::run_absent_field,
               "dereference of absent field before '" + step.property +
                   "' (missing exists guard)");
        continue;  // soft-absent propagates
      }
      if (cur->kind != Value::Kind::Entity)
        fail(errc::run_absent_field, "path steps through a scalar at '" + step.property + "'");
      auto fit = cur->fields.find(step.property);
      if (fit == cur->fields.end()) {
        absent = true;
        absent_is_soft = soft;
        continue;
      }
      const Value::Field& slot = fit->second;
      if (step.key) {
        const ValuePtr* hit = nullptr;
        for (const auto& [k, v] : slot.dict)
          if (k == *step.key) hit = &v;
        if (!hit) {
          absent = true;
          absent_is_soft = true;
          continue;
        }
        cur = *hit;
        continue;
      }
      if (slot.card == Value::Field::Card::Array)
        return EvalResult::list_of(slot.array);
      if (slot.card == Value::Field::Card::Dict) {
        std::vector<ValuePtr> xs;
        for (const auto& [k, v] : slot.dict) xs.push_back(v);
        return EvalResult::list_of(std::move(xs));
      }
      if (!slot.single) {
        absent = true;
        absent_is_soft = soft;
        continue;
      }
      cur = slot.single;
    }
    if (absent) return EvalResult::missing();
    return EvalResult::single(cur);
  }

  static bool values_equal(const ValuePtr& a, const ValuePtr& b) {
    if (a->is_numeric() && b->is_numeric()) return a->as_number() == b->as_number();
    if (a->kind == Value::Kind::Entity && b->kind == Value::Kind::Entity)
      return a->id == b->id;
    // individuals compare against entity ids
    if (a->kind == Value::Kind::Entity && b->kind == Value::Kind::Str)
      return a->id == b->str;
    if (a->kind == Value::Kind::Str && b->kind == Value::Kind::Entity)
      return a->str == b->id;
    if (a->kind == Value::Kind::Str && b->kind == Value::Kind::Str) return a->str == b->str;
    if (a->kind == Value::Kind::Bool && b->kind == Value::Kind::Bool)
      return a->boolean == b->boolean;
    return false;
  }

  bool eval_condition(const Condition& c) {
    switch (c.kind) {
      case ConditionKind::Comparison: {
        if (c.cmp == CmpOp::Exists) {
          EvalResult r = eval(*c.left);
          if (r.kind == EvalResult::Kind::List) return !r.list.empty();
          return !r.is_missing();
        }
        EvalResult l = eval(*c.left);
        if (l.is_missing()) return false;  // soft-absent access
        if (l.kind == EvalResult::Kind::List)
          fail(errc::run_fragment, "comparison over a multi-valued path");
        EvalResult r = eval(*c.right);
        if (c.cmp == CmpOp::In) {
          for (const auto& item : r.list)
            if (values_equal(l.value, item)) return true;
          return false;
        }
        if (r.is_missing()) return false;
        switch (c.cmp) {
          case CmpOp::Eq: return values_equal(l.value, r.value);
          case CmpOp::Lt: return l.value->as_number() < r.value->as_number();
          case CmpOp::Gt: return l.value->as_number() > r.value->as_number();
          case CmpOp::Le: return l.value->as_number() <= r.value->as_number();
          case CmpOp::Ge: return l.value->as_number() >= r.value->as_number();
          default: return false;
        }
      }
      case ConditionKind::Set: {
        if (c.disjunction) {
          for (const auto& m : c.members)
            if (eval_condition(*m)) return true;
          return false;
        }
        for (const auto& m : c.members)
          if (!eval_condition(*m)) return false;
        return true;
      }
      case ConditionKind::Qualified: {
        EvalResult r = eval(*c.start);
        std::vector<ValuePtr> items =
            r.kind == EvalResult::Kind::List ? r.list : std::vector<ValuePtr>{};
        for (const auto& item : items) {
          auto saved = env_.find(c.loop_var) != env_.end()
                           ? std::optional<ValuePtr>(env_[c.loop_var])
                           : std::nullopt;
          env_[c.loop_var] = item;
          bool ok = eval_condition(*c.inner);
          if (saved)
            env_[c.loop_var] = *saved;
          else
            env_.erase(c.loop_var);
          if (c.universal && !ok) return false;
          if (!c.universal && ok) return true;
        }
        return c.universal;
      }
      case ConditionKind::CheckCall:
        fail(errc::run_fragment, "lowered check calls are not interpretable");
    }
    return false;
  }

  void assign(const Operand& target, const ValuePtr& value) {
    if (target.kind == OperandKind::Variable) {
      env_[target.var] = value;
      return;
    }
    if (target.kind != OperandKind::Path || target.steps.empty())
      fail(errc::run_fragment, "unsupported assignment target");
    auto it = env_.find(target.root_var);
    if (it == env_.end() || !it->second)
      fail(errc::run_absent_field, "unbound assignment root");
    ValuePtr cur = it->second;
    for (size_t i = 0; i + 1 < target.steps.size(); ++i) {
      const PathStep& step = target.steps[i];
      if (cur->kind != Value::Kind::Entity)
        fail(errc::run_absent_field, "assignment through a scalar");
      auto fit = cur->fields.find(step.property);
      if (fit == cur->fields.end() || !fit->second.single)
        fail(errc::run_absent_field,
             "assignment through absent field '" + step.property + "'");
      cur = fit->second.single;
    }
    if (cur->kind != Value::Kind::Entity)
      fail(errc::run_absent_field, "assignment target is not an entity");
    Value::Field slot;
    slot.single = value;
    cur->fields[target.steps.back().property] = std::move(slot);
  }

  // statements after a remote request run once per retrieved record
  void run_block(const std::vector<StatementPtr>& stmts, size_t from) {
    for (size_t i = from; i < stmts.size(); ++i) {
      const Statement& s = *stmts[i];
      switch (s.kind) {
        case StatementKind::Block:
          run_block(s.statements, 0);
          break;
        case StatementKind::IfThen:
          if (!s.condition || eval_condition(*s.condition))
            if (s.then_block) run_block(s.then_block->statements, 0);
          break;
        case StatementKind::Assign: {
          EvalResult r = eval(*s.value);
          if (s.value->kind == OperandKind::Operation) {
            env_[s.target->var] = r.is_missing() ? nullptr : r.value;
            break;
          }
          if (r.is_missing())
            fail(errc::run_absent_field, "assignment of an absent value");
          assign(*s.target, r.value);
          break;
        }
        case StatementKind::Iterate: {
          EvalResult r = eval(*s.start);
          std::vector<ValuePtr> items =
              r.kind == EvalResult::Kind::List ? r.list : std::vector<ValuePtr>{};
          for (const auto& item : items) {
            env_[s.loop_var] = item;
            run_block({s.body}, 0);
          }
          env_.erase(s.loop_var);
          break;
        }
        case StatementKind::Remote: {
          std::map<std::string, std::string> params;
          std::vector<std::pair<std::string, std::string>> ordered;
          for (const auto& [name, op] : s.params) {
            EvalResult r = eval(*op);
            if (r.is_missing())
              fail(errc::run_absent_field, "request parameter '" + name + "' is absent");
            params[name] = scalar_text(r.value);
            ordered.emplace_back(name, params[name]);
          }
          transcript_.entries.push_back({TranscriptEntry::Kind::RemoteRequested,
                                         s.resource_type, ordered, 0, ""});
          const RemoteEntry* entry = nullptr;
          auto rit = remote_index_.find(remote_key(s.resource_type, params));
          if (rit != remote_index_.end()) entry = rit->second;
          size_t count = entry ? entry->results.size() : 0;
          ++callback_counter_;
          std::string cb = "callback" + std::to_string(callback_counter_);
          transcript_.entries.push_back(
              {TranscriptEntry::Kind::CallbackInvoked, cb, {}, count, ""});
          if (entry) {
            for (const auto& record : entry->results) {
              check_dict_keys(record);
              env_[s.result_var] = record;
              run_block(stmts, i + 1);
            }
          }
          return;  // remainder consumed by the per-record loop
        }
        case StatementKind::Emit: {
          EvalResult r = eval(*s.payload);
          if (r.is_missing())
            fail(errc::run_absent_field, "event payload is absent");
          std::string payload = canonical_value(r.value, p_.model);
          if (emitted_.insert(s.event + "\n" + payload).second)
            transcript_.entries.push_back(
                {TranscriptEntry::Kind::EventEmitted, s.event, {}, 0, payload});
          break;
        }
      }
    }
  }

  void check_dict_keys(const ValuePtr& v) {
    if (v->kind != Value::Kind::Entity) return;
    for (const auto& [name, slot] : v->fields) {
      if (slot.card == Value::Field::Card::Dict) {
        std::set<std::string> seen;
        for (const auto& [k, item] : slot.dict) {
          if (!seen.insert(k).second)
            fail(errc::run_duplicate_key, "duplicate dictionary key '" + k + "'");
          check_dict_keys(item);
        }
      }
      if (slot.card == Value::Field::Card::Array)
        for (const auto& item : slot.array) check_dict_keys(item);
      if (slot.single) check_dict_keys(slot.single);
    }
  }

  const BridgeProgram& p_;
  const Fixture& fixture_;
  std::map<std::string, const RemoteEntry*> remote_index_;
  std::map<std::string, ValuePtr> env_;
  ExecutionTranscript transcript_;
  std::set<std::string> emitted_;
  int callback_counter_ = 0;
  int mint_counter_ = 0;
};

}  // namespace

ExecutionTranscript execute_contract(const BridgeProgram& program, const Fixture& fixture) {
  Interpreter interp(program, fixture);
  return interp.run();
}

}  // namespace n3sc
