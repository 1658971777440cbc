#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"
#include "n3sc/naive_eval.hpp"

namespace n3sc {

using ordered_json = nlohmann::ordered_json;

namespace {

const std::string kFixtureNs = "urn:fixture:";
const std::string kMintNs = "urn:inferred:";

std::string entity_iri(const std::string& id, const Model& model) {
  auto it = model.individuals.find(id);
  return it != model.individuals.end() ? it->second : kFixtureNs + id;
}

std::string iri_to_id(const std::string& iri) {
  if (iri.rfind(kFixtureNs, 0) == 0) return iri.substr(kFixtureNs.size());
  return iri_local_name(iri);
}

std::string triple_key(const Triple& t) {
  auto term_key = [](const Term& x) {
    switch (x.kind()) {
      case TermKind::Iri: return "i:" + x.text();
      case TermKind::Literal:
        return std::string("l") + std::to_string(static_cast<int>(x.literal_kind())) +
               ":" + x.text();
      default: return "?" + x.text();
    }
  };
  return term_key(t.subject) + " | " + term_key(t.predicate) + " | " + term_key(t.object);
}

std::optional<double> numeric(const Term& t) {
  if (!t.is(TermKind::Literal)) return std::nullopt;
  if (t.literal_kind() == LiteralKind::String) return std::nullopt;
  try {
    return std::stod(t.text());
  } catch (...) {
    return std::nullopt;
  }
}

class Flattener {
 public:
  Flattener(const Model& model, Dataset& out) : model_(model), out_(out) {}

  void add(const ValuePtr& v, const std::string& declared_adt) {
    if (!v || v->kind != Value::Kind::Entity) return;
    std::string node = entity_iri(v->id, model_);
    if (!visited_.insert(node + "#" + v->type_tag).second) return;

    // type triple from the runtime tag
    std::string tag_iri = resolve_tag(v->type_tag);
    out_.triples.push_back({Term::iri(node), Term::iri(rdfns::rdf_type), Term::iri(tag_iri), {}});

    const ModelAdt* adt = model_.adt(declared_adt);
    if (!adt) adt = model_.adt(v->type_tag);
    for (const auto& [fname, slot] : v->fields) {
      const ModelProperty* f = adt ? adt->field(fname) : nullptr;
      if (!f) continue;
      if (f->term == rdfns::rdf_type) continue;  // runtime tag mirror, not data
      switch (slot.card) {
        case Value::Field::Card::Single:
          if (slot.single) emit(node, *f, slot.single);
          break;
        case Value::Field::Card::Array:
          for (const auto& item : slot.array) emit(node, *f, item);
          break;
        case Value::Field::Card::Dict:
          for (const auto& [key, item] : slot.dict) {
            emit(node, *f, item);
            if (item && item->kind == Value::Kind::Entity)
              out_.triples.push_back({Term::iri(entity_iri(item->id, model_)),
                                      Term::iri(rdfns::rdf_type),
                                      Term::iri(resolve_tag(key)),
                                      {}});
          }
          break;
      }
    }
  }

 private:
  std::string resolve_tag(const std::string& tag) {
    if (const ModelAdt* adt = model_.adt(tag)) return adt->term;
    auto it = model_.individuals.find(tag);
    if (it != model_.individuals.end()) return it->second;
    return kFixtureNs + tag;
  }

  void emit(const std::string& node, const ModelProperty& f, const ValuePtr& v) {
    Term object;
    if (v->kind == Value::Kind::Entity) {
      object = Term::iri(entity_iri(v->id, model_));
      std::string inner = f.type.is_datatype() ? v->type_tag : f.type.adt;
      add(v, inner);
    } else if (v->kind == Value::Kind::Str) {
      object = Term::string_lit(v->str);
    } else if (v->kind == Value::Kind::Int) {
      object = Term::number_lit(std::to_string(v->integer), false);
    } else if (v->kind == Value::Kind::Bool) {
      object = Term::string_lit(v->boolean ? "true" : "false");
    } else {
      std::ostringstream ss;
      if (v->decimal == std::floor(v->decimal) && std::abs(v->decimal) < 1e15)
        ss << static_cast<long long>(v->decimal);
      else
        ss << v->decimal;
      object = Term::number_lit(ss.str(), true);
    }
    out_.triples.push_back({Term::iri(node), Term::iri(f.term), object, {}});
  }

  const Model& model_;
  Dataset& out_;
  std::set<std::string> visited_;
};

// ---------------------------------------------------------------------------
// matching
// ---------------------------------------------------------------------------

using Binding = std::map<std::string, Term>;

std::optional<Comparator> comparator_of(const std::string& iri) {
  if (iri == builtins::math_ns + "notLessThan") return Comparator::NotLess;
  if (iri == builtins::math_ns + "lessThan") return Comparator::Less;
  if (iri == builtins::math_ns + "greaterThan") return Comparator::Greater;
  if (iri == builtins::math_ns + "notGreaterThan") return Comparator::NotGreater;
  if (iri == builtins::math_ns + "equalTo") return Comparator::Equal;
  if (iri == builtins::list_ns + "in") return Comparator::InList;
  return std::nullopt;
}

std::optional<MathOp> operator_of(const std::string& iri) {
  if (iri == builtins::math_ns + "sum") return MathOp::Sum;
  if (iri == builtins::math_ns + "product") return MathOp::Product;
  if (iri == builtins::math_ns + "quotient") return MathOp::Quotient;
  if (iri == builtins::math_ns + "exponentiation") return MathOp::Exponent;
  if (iri == builtins::math_ns + "exponent") return MathOp::Exponent;
  return std::nullopt;
}

class Evaluator {
 public:
  Evaluator(const std::vector<AnnotatedRule>& rules, Dataset dataset, const Model& model)
      : rules_(rules), model_(model) {
    for (const auto& t : dataset.triples) {
      if (!t.subject.is(TermKind::Iri))
        throw CompileError(errc::run_fragment,
                           "dataset outside fragment: literal or blank subject");
      insert(t);
    }
  }

  InferenceSet run() {
    InferenceSet out;
    bool changed = true;
    while (changed) {
      changed = false;
      ++out.passes;
      for (size_t ri = 0; ri < rules_.size(); ++ri) {
        for (const auto& binding : match_rule(rules_[ri]))
          if (fire(rules_[ri], ri, binding, out)) changed = true;
      }
    }
    return out;
  }

 private:
  void insert(const Triple& t) {
    if (keys_.insert(triple_key(t)).second) data_.push_back(t);
  }
  bool contains(const Triple& t) const { return keys_.count(triple_key(t)) > 0; }

  static bool is_var(const Term& t) { return t.is(TermKind::Var); }

  static std::optional<Term> lookup(const Binding& b, const Term& t) {
    if (!is_var(t)) return t;
    auto it = b.find(t.text());
    if (it == b.end()) return std::nullopt;
    return it->second;
  }

  bool unify(const Term& pattern, const Term& value, Binding& b) const {
    if (is_var(pattern)) {
      auto it = b.find(pattern.text());
      if (it == b.end()) {
        b[pattern.text()] = value;
        return true;
      }
      return it->second == value;
    }
    return pattern == value;
  }

  // pattern atoms first (source order), then operations, then comparators
  std::vector<Binding> match_rule(const AnnotatedRule& rule) const {
    std::vector<Triple> patterns;
    std::vector<Triple> comparators;
    std::vector<Triple> operations;
    for (const auto& atom : flattened_body(rule)) {
      const Triple& t = atom.triple;
      if (t.subject.is(TermKind::List)) {
        operations.push_back(t);
      } else if (t.predicate.is(TermKind::Iri) && comparator_of(t.predicate.text())) {
        comparators.push_back(t);
      } else {
        patterns.push_back(t);
      }
    }

    std::vector<Binding> results;
    Binding b;
    std::function<void(size_t)> step = [&](size_t i) {
      if (i == patterns.size()) {
        Binding full = b;
        if (!resolve_operations(operations, full)) return;
        for (const auto& c : comparators)
          if (!check_comparator(c, full)) return;
        results.push_back(full);
        return;
      }
      const Triple& pat = patterns[i];
      for (const auto& t : data_) {
        Binding saved = b;
        if (unify(pat.subject, t.subject, b) && unify(pat.predicate, t.predicate, b) &&
            unify(pat.object, t.object, b))
          step(i + 1);
        b = saved;
      }
    };
    step(0);
    return results;
  }

  bool resolve_operations(const std::vector<Triple>& ops, Binding& b) const {
    std::vector<const Triple*> pending;
    for (const auto& t : ops) pending.push_back(&t);
    while (!pending.empty()) {
      size_t before = pending.size();
      std::vector<const Triple*> next;
      for (const Triple* t : pending) {
        std::optional<MathOp> op = operator_of(t->predicate.text());
        if (!op) return false;
        std::vector<double> xs;
        bool ready = true;
        for (const auto& item : t->subject.items()) {
          auto val = lookup(b, item);
          if (!val) {
            ready = false;
            break;
          }
          auto n = numeric(*val);
          if (!n) {
            ready = false;
            break;
          }
          xs.push_back(*n);
        }
        if (!ready) {
          next.push_back(t);
          continue;
        }
        double acc = xs.empty() ? 0 : xs[0];
        for (size_t i = 1; i < xs.size(); ++i) {
          switch (*op) {
            case MathOp::Sum: acc += xs[i]; break;
            case MathOp::Product: acc *= xs[i]; break;
            case MathOp::Quotient:
              if (xs[i] == 0) return false;
              acc /= xs[i];
              break;
            case MathOp::Exponent: acc = std::pow(acc, xs[i]); break;
          }
        }
        std::ostringstream ss;
        if (acc == std::floor(acc) && std::abs(acc) < 1e15)
          ss << static_cast<long long>(acc);
        else
          ss << acc;
        Term result = Term::number_lit(ss.str(), true);
        if (is_var(t->object)) {
          auto it = b.find(t->object.text());
          if (it != b.end()) {
            auto existing = numeric(it->second);
            if (!existing || *existing != acc) return false;
          } else {
            b[t->object.text()] = result;
          }
        }
      }
      pending = std::move(next);
      if (pending.empty()) return true;
      if (pending.size() == before) return false;  // unresolved operations
    }
    return true;
  }

  bool check_comparator(const Triple& t, const Binding& b) const {
    auto cmp = comparator_of(t.predicate.text());
    auto left = lookup(b, t.subject);
    if (!left) return false;
    if (*cmp == Comparator::InList) {
      if (!t.object.is(TermKind::List)) return false;
      for (const auto& item : t.object.items())
        if (*left == item) return true;
      return false;
    }
    auto right = lookup(b, t.object);
    if (!right) return false;
    if (*cmp == Comparator::Equal) {
      auto ln = numeric(*left), rn = numeric(*right);
      if (ln && rn) return *ln == *rn;
      return *left == *right;
    }
    auto ln = numeric(*left), rn = numeric(*right);
    if (!ln || !rn) return false;
    switch (*cmp) {
      case Comparator::NotLess: return *ln >= *rn;
      case Comparator::Less: return *ln < *rn;
      case Comparator::Greater: return *ln > *rn;
      case Comparator::NotGreater: return *ln <= *rn;
      default: return false;
    }
  }

  // substitute universals; blank nodes handled by the caller
  Term substitute(const Term& t, const Binding& b) const {
    if (is_var(t)) {
      auto it = b.find(t.text());
      if (it != b.end()) return it->second;
    }
    return t;
  }

  bool fire(const AnnotatedRule& rule, size_t rule_index, const Binding& b,
            InferenceSet& out) {
    bool changed = false;

    // plain head triples
    for (const auto& t : rule.head.triples) {
      if (t.subject.is(TermKind::Blank)) continue;
      Triple g{substitute(t.subject, b), t.predicate, substitute(t.object, b), {}};
      if (is_var(g.subject) || is_var(g.object))
        throw CompileError(errc::logic_unbound_head,
                           "head variable unbound during evaluation", t.pos);
      if (!contains(g)) {
        insert(g);
        out.inferred.push_back(g);
        changed = true;
      }
    }

    // existential groups: one fresh node per distinct head-variable binding
    std::set<std::string> blanks;
    for (const auto& t : rule.head.triples)
      if (t.subject.is(TermKind::Blank)) blanks.insert(t.subject.text());
    for (const auto& blank : blanks) {
      std::string key = std::to_string(rule_index) + "#" + blank;
      for (const auto& t : rule.head.triples) {
        if (!t.subject.is(TermKind::Blank) || t.subject.text() != blank) continue;
        auto obj = lookup(b, t.object);
        key += "|" + (obj ? triple_key({t.subject, t.predicate, *obj, {}}) : "?");
      }
      if (!minted_.insert(key).second) continue;

      std::string node = kMintNs + std::to_string(++mint_counter_);
      std::vector<Triple> group;
      for (const auto& t : rule.head.triples) {
        if (!t.subject.is(TermKind::Blank) || t.subject.text() != blank) continue;
        Triple g{Term::iri(node), t.predicate, substitute(t.object, b), {}};
        if (is_var(g.object))
          throw CompileError(errc::logic_unbound_head,
                             "head variable unbound during evaluation", t.pos);
        insert(g);
        out.inferred.push_back(g);
        group.push_back(g);
      }
      changed = true;
      if (rule.event_name)
        out.events.push_back({*rule.event_name, payload_json(group)});
    }
    return changed;
  }

  // canonical payload of a minted node, mirroring the interpreter's rendering
  std::string payload_json(const std::vector<Triple>& group) const {
    std::string type_iri;
    for (const auto& t : group)
      if (t.predicate.text() == rdfns::rdf_type) type_iri = t.object.text();
    const ModelAdt* adt = model_.adt_by_term(type_iri);
    ordered_json j;
    j["type"] = adt ? adt->name : iri_to_id(type_iri);
    if (adt) {
      for (const auto& f : adt->fields) {
        for (const auto& t : group) {
          if (t.predicate.text() != f.term) continue;
          const Term& o = t.object;
          if (o.is(TermKind::Iri))
            j[f.name] = iri_to_id(o.text());
          else if (o.literal_kind() == LiteralKind::String)
            j[f.name] = o.text();
          else if (o.literal_kind() == LiteralKind::Integer)
            j[f.name] = std::stoll(o.text());
          else {
            double d = std::stod(o.text());
            if (d == std::floor(d) && std::abs(d) < 1e15)
              j[f.name] = static_cast<long long>(d);
            else
              j[f.name] = d;
          }
        }
      }
    }
    return j.dump();
  }

  const std::vector<AnnotatedRule>& rules_;
  const Model& model_;
  std::vector<Triple> data_;
  std::set<std::string> keys_;
  std::set<std::string> minted_;
  int mint_counter_ = 0;
};

}  // namespace

Dataset flatten_fixture(const Fixture& fixture, const Model& model) {
  Dataset out;
  Flattener fl(model, out);
  if (fixture.request) fl.add(fixture.request, fixture.request->type_tag);
  for (const auto& entry : fixture.remote)
    for (const auto& record : entry.results) fl.add(record, entry.type);
  return out;
}

InferenceSet naive_rule_eval(const std::vector<AnnotatedRule>& rules, Dataset dataset,
                             const Model& model) {
  Evaluator ev(rules, std::move(dataset), model);
  return ev.run();
}

EquivalenceReport compare_outcomes(const ExecutionTranscript& transcript,
                                   const InferenceSet& inferences) {
  EquivalenceReport report;
  std::multiset<std::string> left, right;
  for (const auto& e : transcript.events()) left.insert(e.name + " " + e.payload);
  for (const auto& e : inferences.events) right.insert(e.name + " " + e.payload);
  std::multiset<std::string> rest = right;
  for (const auto& e : left) {
    auto it = rest.find(e);
    if (it == rest.end())
      report.discrepancies.push_back("only in execution: " + e);
    else
      rest.erase(it);
  }
  for (const auto& e : rest)
    report.discrepancies.push_back("only in declarative evaluation: " + e);
  report.match = report.discrepancies.empty();
  return report;
}

}  // namespace n3sc
