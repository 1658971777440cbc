#include "n3sc/pseudocode.hpp"

namespace n3sc {

namespace {

std::string strip_scheme(const std::string& url) {
  std::string s = url;
  auto p = s.find("://");
  if (p != std::string::npos) s = s.substr(p + 3);
  while (!s.empty() && s.back() == '/') s.pop_back();
  return s;
}

class Renderer {
 public:
  explicit Renderer(const BridgeProgram& p) : p_(p) {}

  std::string render() {
    for (const auto& f : p_.functions) {
      if (f.is_check) continue;
      for (const auto& s : f.preamble) statement(*s, 0);
      for (const auto& s : f.logic) {
        statement(*s, 0);
        out_ += "\n";
      }
    }
    return out_;
  }

 private:
  void line(int indent, const std::string& text) {
    out_ += std::string(static_cast<size_t>(indent) * 2, ' ') + text + "\n";
  }

  std::string operand(const Operand& o) {
    switch (o.kind) {
      case OperandKind::Literal:
        switch (o.value_kind) {
          case ValueKind::Integer:
          case ValueKind::Decimal: return o.value;
          default: return "'" + o.value + "'";
        }
      case OperandKind::Variable:
        return o.var;
      case OperandKind::Path: {
        std::string s = o.root_var;
        for (const auto& step : o.steps) {
          s += "." + step.property;
          if (step.key) s += "['" + *step.key + "']";
        }
        return s;
      }
      case OperandKind::Create: {
        std::string s = o.adt + "(";
        for (size_t i = 0; i < o.args.size(); ++i) {
          if (i) s += ", ";
          s += o.args[i].first + ": " + operand(*o.args[i].second);
        }
        return s + ")";
      }
      case OperandKind::Operation: {
        std::string s;
        for (size_t i = 0; i < o.operands.size(); ++i) {
          if (i) s += " " + math_op_name(o.op) + " ";
          s += operand(*o.operands[i]);
        }
        return s;
      }
      case OperandKind::LiteralList: {
        std::string s = "(";
        for (size_t i = 0; i < o.items.size(); ++i) {
          if (i) s += ", ";
          s += operand(*o.items[i]);
        }
        return s + ")";
      }
    }
    return "?";
  }

  std::string condition(const Condition& c) {
    switch (c.kind) {
      case ConditionKind::Comparison:
        if (c.cmp == CmpOp::Exists) return operand(*c.left) + " exists";
        return operand(*c.left) + " " + cmp_name(c.cmp) + " " + operand(*c.right);
      case ConditionKind::Set: {
        std::string sep = c.disjunction ? " or " : " and ";
        std::string s;
        for (size_t i = 0; i < c.members.size(); ++i) {
          if (i) s += sep;
          s += condition(*c.members[i]);
        }
        return c.disjunction ? "(" + s + ")" : s;
      }
      case ConditionKind::Qualified:
        return std::string("for ") + (c.universal ? "all " : "some ") + c.loop_var +
               " in " + operand(*c.start) + " holds that " + condition(*c.inner);
      case ConditionKind::CheckCall: {
        std::string s = c.fn + "(";
        for (size_t i = 0; i < c.args.size(); ++i) {
          if (i) s += ", ";
          s += operand(*c.args[i]);
        }
        return s + ")";
      }
    }
    return "?";
  }

  void conditions(const Condition& c, int indent) {
    // top-level conjunctions go one member per line, 'and'-prefixed
    if (c.kind == ConditionKind::Set && !c.disjunction) {
      for (size_t i = 0; i < c.members.size(); ++i)
        line(indent + (i ? 1 : 0), (i ? "and " : "if ") + condition(*c.members[i]));
    } else {
      line(indent, "if " + condition(c));
    }
  }

  void statement(const Statement& s, int indent) {
    switch (s.kind) {
      case StatementKind::Block:
        for (const auto& sub : s.statements) statement(*sub, indent);
        break;
      case StatementKind::IfThen:
        if (s.condition)
          conditions(*s.condition, indent);
        else
          line(indent, "if true");
        line(indent, "then");
        statement(*s.then_block, indent + 1);
        break;
      case StatementKind::Assign:
        line(indent, operand(*s.target) + " = " + operand(*s.value));
        break;
      case StatementKind::Iterate:
        line(indent, "for each " + operand(*s.start) + " as " + s.loop_var + " do");
        statement(*s.body, indent + 1);
        break;
      case StatementKind::Remote: {
        std::string params;
        for (size_t i = 0; i < s.params.size(); ++i) {
          if (i) params += ", ";
          params += s.params[i].first + "=" + operand(*s.params[i].second);
        }
        line(indent, s.result_var + " = RemoteRequest(\"" + strip_scheme(s.location) +
                         "\", { " + params + " })");
        break;
      }
      case StatementKind::Emit:
        line(indent, "emit " + s.event + "(" + operand(*s.payload) + ")");
        break;
    }
  }

  const BridgeProgram& p_;
  std::string out_;
};

}  // namespace

std::string emit_pseudocode(const BridgeProgram& program) {
  return Renderer(program).render();
}

}  // namespace n3sc
