#include "json.hpp"
#include "n3sc/bridge_ir.hpp"

namespace n3sc {

using json = nlohmann::ordered_json;

namespace {

// --- writers ---------------------------------------------------------------

json type_json(const ModelType& t) {
  json j;
  if (t.is_datatype())
    j["datatype"] = t.datatype;
  else
    j["adt"] = t.adt;
  return j;
}

const char* value_kind_name(ValueKind k) {
  switch (k) {
    case ValueKind::String: return "string";
    case ValueKind::Integer: return "integer";
    case ValueKind::Decimal: return "decimal";
    case ValueKind::Iri: return "iri";
  }
  return "string";
}

const char* math_op_tag(MathOp op) {
  switch (op) {
    case MathOp::Sum: return "sum";
    case MathOp::Product: return "product";
    case MathOp::Quotient: return "quotient";
    case MathOp::Exponent: return "exponent";
  }
  return "sum";
}

const char* cmp_tag(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "equal";
    case CmpOp::Exists: return "exists";
    case CmpOp::In: return "in";
    case CmpOp::Lt: return "lt";
    case CmpOp::Gt: return "gt";
    case CmpOp::Le: return "le";
    case CmpOp::Ge: return "ge";
  }
  return "equal";
}

json operand_json(const Operand& o);

json operand_args_json(const std::vector<std::pair<std::string, OperandPtr>>& args) {
  json a = json::array();
  for (const auto& [name, value] : args)
    a.push_back(json{{"field", name}, {"value", operand_json(*value)}});
  return a;
}

json operand_json(const Operand& o) {
  json j;
  switch (o.kind) {
    case OperandKind::Literal:
      j["kind"] = "literal";
      j["type"] = value_kind_name(o.value_kind);
      j["value"] = o.value;
      break;
    case OperandKind::Variable:
      j["kind"] = "variable";
      j["name"] = o.var;
      break;
    case OperandKind::Path: {
      j["kind"] = "path";
      j["root"] = o.root_var;
      json steps = json::array();
      for (const auto& s : o.steps) {
        json step{{"property", s.property}};
        if (s.key) step["key"] = *s.key;
        if (s.value_hop) step["value_hop"] = true;
        steps.push_back(step);
      }
      j["steps"] = steps;
      break;
    }
    case OperandKind::Create:
      j["kind"] = "create";
      j["adt"] = o.adt;
      j["args"] = operand_args_json(o.args);
      break;
    case OperandKind::Operation: {
      j["kind"] = "operation";
      j["op"] = math_op_tag(o.op);
      json ops = json::array();
      for (const auto& sub : o.operands) ops.push_back(operand_json(*sub));
      j["operands"] = ops;
      break;
    }
    case OperandKind::LiteralList: {
      j["kind"] = "list";
      json items = json::array();
      for (const auto& sub : o.items) items.push_back(operand_json(*sub));
      j["items"] = items;
      break;
    }
  }
  return j;
}

json condition_json(const Condition& c) {
  json j;
  switch (c.kind) {
    case ConditionKind::Comparison:
      j["kind"] = "comparison";
      j["cmp"] = cmp_tag(c.cmp);
      j["left"] = operand_json(*c.left);
      if (c.right) j["right"] = operand_json(*c.right);
      break;
    case ConditionKind::Set: {
      j["kind"] = c.disjunction ? "or" : "and";
      json members = json::array();
      for (const auto& m : c.members) members.push_back(condition_json(*m));
      j["members"] = members;
      break;
    }
    case ConditionKind::Qualified:
      j["kind"] = "qualified";
      j["qualifier"] = c.universal ? "universal" : "existential";
      j["start"] = operand_json(*c.start);
      j["loop_var"] = c.loop_var;
      j["inner"] = condition_json(*c.inner);
      break;
    case ConditionKind::CheckCall: {
      j["kind"] = "check";
      j["fn"] = c.fn;
      json args = json::array();
      for (const auto& a : c.args) args.push_back(operand_json(*a));
      j["args"] = args;
      break;
    }
  }
  return j;
}

json statement_json(const Statement& s) {
  json j;
  switch (s.kind) {
    case StatementKind::Block: {
      j["kind"] = "block";
      json sub = json::array();
      for (const auto& x : s.statements) sub.push_back(statement_json(*x));
      j["statements"] = sub;
      break;
    }
    case StatementKind::IfThen:
      j["kind"] = "if";
      if (s.condition) j["condition"] = condition_json(*s.condition);
      j["then"] = statement_json(*s.then_block);
      break;
    case StatementKind::Assign:
      j["kind"] = "assign";
      j["target"] = operand_json(*s.target);
      j["value"] = operand_json(*s.value);
      break;
    case StatementKind::Iterate:
      j["kind"] = "iterate";
      j["start"] = operand_json(*s.start);
      j["loop_var"] = s.loop_var;
      j["body"] = statement_json(*s.body);
      break;
    case StatementKind::Remote: {
      j["kind"] = "remote";
      j["location"] = s.location;
      j["resource_type"] = s.resource_type;
      json params = json::array();
      for (const auto& [name, value] : s.params)
        params.push_back(json{{"property", name}, {"value", operand_json(*value)}});
      j["params"] = params;
      j["result"] = s.result_var;
      break;
    }
    case StatementKind::Emit:
      j["kind"] = "emit";
      j["event"] = s.event;
      j["payload"] = operand_json(*s.payload);
      break;
  }
  return j;
}

// --- readers ---------------------------------------------------------------

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw CompileError(errc::ir_schema, path + ": " + what);
}

const json& need(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) bad(path, std::string("missing '") + key + "'");
  return j.at(key);
}

std::string need_str(const json& j, const char* key, const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_string()) bad(path + "/" + key, "expected string");
  return v.get<std::string>();
}

ModelType type_from(const json& j, const std::string& path) {
  ModelType t;
  if (j.contains("datatype"))
    t.datatype = j.at("datatype").get<std::string>();
  else if (j.contains("adt"))
    t.adt = j.at("adt").get<std::string>();
  else
    bad(path, "type needs 'datatype' or 'adt'");
  return t;
}

ValueKind value_kind_from(const std::string& s, const std::string& path) {
  if (s == "string") return ValueKind::String;
  if (s == "integer") return ValueKind::Integer;
  if (s == "decimal") return ValueKind::Decimal;
  if (s == "iri") return ValueKind::Iri;
  bad(path, "unknown literal type '" + s + "'");
}

MathOp math_op_from(const std::string& s, const std::string& path) {
  if (s == "sum") return MathOp::Sum;
  if (s == "product") return MathOp::Product;
  if (s == "quotient") return MathOp::Quotient;
  if (s == "exponent") return MathOp::Exponent;
  bad(path, "unknown operator '" + s + "'");
}

CmpOp cmp_from(const std::string& s, const std::string& path) {
  if (s == "equal") return CmpOp::Eq;
  if (s == "exists") return CmpOp::Exists;
  if (s == "in") return CmpOp::In;
  if (s == "lt") return CmpOp::Lt;
  if (s == "gt") return CmpOp::Gt;
  if (s == "le") return CmpOp::Le;
  if (s == "ge") return CmpOp::Ge;
  bad(path, "unknown comparator '" + s + "'");
}

OperandPtr operand_from(const json& j, const std::string& path);

std::vector<std::pair<std::string, OperandPtr>> args_from(const json& j,
                                                          const std::string& path) {
  std::vector<std::pair<std::string, OperandPtr>> out;
  size_t i = 0;
  for (const auto& a : j) {
    std::string p = path + "/" + std::to_string(i++);
    out.emplace_back(need_str(a, "field", p), operand_from(need(a, "value", p), p));
  }
  return out;
}

OperandPtr operand_from(const json& j, const std::string& path) {
  std::string kind = need_str(j, "kind", path);
  if (kind == "literal")
    return Operand::literal(value_kind_from(need_str(j, "type", path), path),
                            need_str(j, "value", path));
  if (kind == "variable") return Operand::variable(need_str(j, "name", path));
  if (kind == "path") {
    std::vector<PathStep> steps;
    size_t i = 0;
    for (const auto& s : need(j, "steps", path)) {
      std::string p = path + "/steps/" + std::to_string(i++);
      PathStep step;
      step.property = need_str(s, "property", p);
      if (s.contains("key")) step.key = s.at("key").get<std::string>();
      if (s.contains("value_hop")) step.value_hop = s.at("value_hop").get<bool>();
      steps.push_back(step);
    }
    return Operand::path(need_str(j, "root", path), std::move(steps));
  }
  if (kind == "create")
    return Operand::create(need_str(j, "adt", path),
                           args_from(need(j, "args", path), path + "/args"));
  if (kind == "operation") {
    std::vector<OperandPtr> ops;
    size_t i = 0;
    for (const auto& o : need(j, "operands", path))
      ops.push_back(operand_from(o, path + "/operands/" + std::to_string(i++)));
    return Operand::operation(math_op_from(need_str(j, "op", path), path),
                              std::move(ops));
  }
  if (kind == "list") {
    std::vector<OperandPtr> items;
    size_t i = 0;
    for (const auto& o : need(j, "items", path))
      items.push_back(operand_from(o, path + "/items/" + std::to_string(i++)));
    return Operand::literal_list(std::move(items));
  }
  bad(path, "unknown operand kind '" + kind + "'");
}

ConditionPtr condition_from(const json& j, const std::string& path) {
  std::string kind = need_str(j, "kind", path);
  if (kind == "comparison") {
    CmpOp cmp = cmp_from(need_str(j, "cmp", path), path);
    OperandPtr left = operand_from(need(j, "left", path), path + "/left");
    OperandPtr right;
    if (j.contains("right")) right = operand_from(j.at("right"), path + "/right");
    return Condition::comparison(std::move(left), cmp, std::move(right));
  }
  if (kind == "and" || kind == "or") {
    std::vector<ConditionPtr> members;
    size_t i = 0;
    for (const auto& m : need(j, "members", path))
      members.push_back(condition_from(m, path + "/members/" + std::to_string(i++)));
    return Condition::set(kind == "or", std::move(members));
  }
  if (kind == "qualified") {
    std::string q = need_str(j, "qualifier", path);
    if (q != "universal" && q != "existential") bad(path, "unknown qualifier " + q);
    return Condition::qualified(q == "universal",
                                operand_from(need(j, "start", path), path + "/start"),
                                need_str(j, "loop_var", path),
                                condition_from(need(j, "inner", path), path + "/inner"));
  }
  if (kind == "check") {
    std::vector<OperandPtr> args;
    size_t i = 0;
    for (const auto& a : need(j, "args", path))
      args.push_back(operand_from(a, path + "/args/" + std::to_string(i++)));
    return Condition::check_call(need_str(j, "fn", path), std::move(args));
  }
  bad(path, "unknown condition kind '" + kind + "'");
}

StatementPtr statement_from(const json& j, const std::string& path) {
  std::string kind = need_str(j, "kind", path);
  if (kind == "block") {
    std::vector<StatementPtr> sub;
    size_t i = 0;
    for (const auto& s : need(j, "statements", path))
      sub.push_back(statement_from(s, path + "/statements/" + std::to_string(i++)));
    return Statement::block(std::move(sub));
  }
  if (kind == "if") {
    ConditionPtr cond;
    if (j.contains("condition"))
      cond = condition_from(j.at("condition"), path + "/condition");
    return Statement::if_then(std::move(cond),
                              statement_from(need(j, "then", path), path + "/then"));
  }
  if (kind == "assign")
    return Statement::assign(operand_from(need(j, "target", path), path + "/target"),
                             operand_from(need(j, "value", path), path + "/value"));
  if (kind == "iterate")
    return Statement::iterate(operand_from(need(j, "start", path), path + "/start"),
                              need_str(j, "loop_var", path),
                              statement_from(need(j, "body", path), path + "/body"));
  if (kind == "remote") {
    std::vector<std::pair<std::string, OperandPtr>> params;
    size_t i = 0;
    for (const auto& p : need(j, "params", path)) {
      std::string pp = path + "/params/" + std::to_string(i++);
      params.emplace_back(need_str(p, "property", pp),
                          operand_from(need(p, "value", pp), pp));
    }
    return Statement::remote(need_str(j, "location", path),
                             need_str(j, "resource_type", path), std::move(params),
                             need_str(j, "result", path));
  }
  if (kind == "emit")
    return Statement::emit(need_str(j, "event", path),
                           operand_from(need(j, "payload", path), path + "/payload"));
  bad(path, "unknown statement kind '" + kind + "'");
}

}  // namespace

std::string serialize(const BridgeProgram& p) {
  json j;
  json model;
  json adts = json::array();
  for (const auto& a : p.model.adts) {
    json ja{{"term", a.term}, {"name", a.name}};
    if (a.label) ja["label"] = *a.label;
    json fields = json::array();
    for (const auto& f : a.fields) {
      json jf{{"term", f.term}, {"name", f.name}};
      if (f.label) jf["label"] = *f.label;
      jf["cardinality"] = f.unbounded ? "0..*" : "0..1";
      jf["type"] = type_json(f.type);
      if (f.use_dictionary) {
        jf["use_dictionary"] = true;
        jf["dictionary_key"] = *f.dictionary_key;
      }
      if (f.inferred) jf["inferred"] = true;
      fields.push_back(jf);
    }
    ja["fields"] = fields;
    adts.push_back(ja);
  }
  model["adts"] = adts;
  model["mangling"] = json(p.model.mangling);
  model["individuals"] = json(p.model.individuals);
  j["model"] = model;

  json functions = json::array();
  for (const auto& f : p.functions) {
    json jf{{"name", f.name}};
    json params = json::array();
    for (const auto& [name, type] : f.params)
      params.push_back(json{{"name", name}, {"type", type_json(type)}});
    jf["params"] = params;
    json preamble = json::array();
    for (const auto& s : f.preamble) preamble.push_back(statement_json(*s));
    jf["preamble"] = preamble;
    json logic = json::array();
    for (const auto& s : f.logic) logic.push_back(statement_json(*s));
    jf["logic"] = logic;
    if (f.is_check) {
      jf["is_check"] = true;
      jf["check_condition"] = condition_json(*f.check_condition);
    }
    functions.push_back(jf);
  }
  j["functions"] = functions;

  json events = json::array();
  for (const auto& e : p.events)
    events.push_back(json{{"name", e.name}, {"payload", type_json(e.payload)}});
  j["events"] = events;

  return j.dump(2) + "\n";
}

BridgeProgram deserialize(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CompileError(errc::ir_schema, std::string("invalid JSON: ") + e.what());
  }
  BridgeProgram p;
  const json& model = need(j, "model", "");
  size_t ai = 0;
  for (const auto& a : need(model, "adts", "/model")) {
    std::string path = "/model/adts/" + std::to_string(ai++);
    ModelAdt adt;
    adt.term = need_str(a, "term", path);
    adt.name = need_str(a, "name", path);
    if (a.contains("label")) adt.label = a.at("label").get<std::string>();
    size_t fi = 0;
    for (const auto& f : need(a, "fields", path)) {
      std::string fp = path + "/fields/" + std::to_string(fi++);
      ModelProperty prop;
      prop.term = need_str(f, "term", fp);
      prop.name = need_str(f, "name", fp);
      if (f.contains("label")) prop.label = f.at("label").get<std::string>();
      std::string card = need_str(f, "cardinality", fp);
      if (card != "0..1" && card != "0..*") bad(fp, "unknown cardinality " + card);
      prop.unbounded = card == "0..*";
      prop.type = type_from(need(f, "type", fp), fp);
      if (f.contains("use_dictionary") && f.at("use_dictionary").get<bool>()) {
        prop.use_dictionary = true;
        prop.dictionary_key = need_str(f, "dictionary_key", fp);
      }
      if (f.contains("inferred")) prop.inferred = f.at("inferred").get<bool>();
      adt.fields.push_back(prop);
    }
    p.model.adts.push_back(adt);
  }
  if (model.contains("mangling"))
    p.model.mangling = model.at("mangling").get<std::map<std::string, std::string>>();
  if (model.contains("individuals"))
    p.model.individuals =
        model.at("individuals").get<std::map<std::string, std::string>>();

  size_t func_i = 0;
  for (const auto& f : need(j, "functions", "")) {
    std::string path = "/functions/" + std::to_string(func_i++);
    Function fn;
    fn.name = need_str(f, "name", path);
    for (const auto& prm : need(f, "params", path))
      fn.params.emplace_back(need_str(prm, "name", path),
                             type_from(need(prm, "type", path), path));
    size_t si = 0;
    for (const auto& s : need(f, "preamble", path))
      fn.preamble.push_back(statement_from(s, path + "/preamble/" + std::to_string(si++)));
    si = 0;
    for (const auto& s : need(f, "logic", path))
      fn.logic.push_back(statement_from(s, path + "/logic/" + std::to_string(si++)));
    if (f.contains("is_check") && f.at("is_check").get<bool>()) {
      fn.is_check = true;
      fn.check_condition =
          condition_from(need(f, "check_condition", path), path + "/check_condition");
    }
    p.functions.push_back(fn);
  }

  size_t ei = 0;
  for (const auto& e : need(j, "events", "")) {
    std::string path = "/events/" + std::to_string(ei++);
    p.events.push_back({need_str(e, "name", path), type_from(need(e, "payload", path), path)});
  }
  return p;
}

}  // namespace n3sc
