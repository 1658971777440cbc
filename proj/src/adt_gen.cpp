#include <algorithm>
#include <set>

#include "n3sc/adt_gen.hpp"

namespace n3sc {

namespace {

// short tag derived from a namespace for mangling collisions,
// e.g. "http://hl7.org/fhir/" -> "fhir"
std::string namespace_tag(const std::string& iri) {
  std::string ns = iri_namespace(iri);
  while (!ns.empty() && (ns.back() == '/' || ns.back() == '#')) ns.pop_back();
  auto p = ns.find_last_of('/');
  std::string tag = p == std::string::npos ? ns : ns.substr(p + 1);
  std::string clean;
  for (char c : tag)
    if (std::isalnum(static_cast<unsigned char>(c))) clean += c;
  return clean.empty() ? "ns" : clean;
}

}  // namespace

std::string Mangler::name_for(const std::string& iri,
                              std::map<std::string, std::string>& table) {
  auto it = table.find(iri);
  if (it != table.end()) return it->second;
  std::set<std::string> taken;
  for (const auto& [k, v] : table) taken.insert(v);
  std::string base = iri_local_name(iri);
  std::string name = base;
  if (taken.count(name)) name = base + "_" + namespace_tag(iri);
  int n = 2;
  while (taken.count(name)) name = base + "_" + std::to_string(n++);
  table[iri] = name;
  return name;
}

std::optional<std::string> unique_value_field(const Ontology& ont,
                                              const std::string& class_iri) {
  std::optional<std::string> found;
  for (const auto& [iri, info] : ont.properties) {
    if (info.domain == class_iri && info.range && ont.is_datatype(*info.range)) {
      if (found) return std::nullopt;  // not unique
      found = iri;
    }
  }
  return found;
}

namespace {

class AdtGenerator {
 public:
  AdtGenerator(const Ontology& ont, Model& model, std::vector<Diagnostic>* notes)
      : ont_(ont), model_(model), notes_(notes) {}

  void run(const RuleGraph& g) {
    g_ = &g;
    collect_individuals(g);
    visit(g.root);
    for (int r : g.extra_roots) visit(r);
    for (int r : g.head_roots) visit(r);
  }

 private:
  void note(const std::string& code, const std::string& msg, SourcePos pos = {}) {
    if (notes_) notes_->push_back({code, msg, pos});
  }

  void collect_individuals(const RuleGraph& g) {
    for (const auto& n : g.nodes) {
      if (n.key_type) register_individual(*n.key_type);
      for (const auto& e : n.outgoing) {
        if (e.kind == GraphEdge::Kind::RdfType) continue;
        const Term& target = g.node(e.target).term;
        if (target.is(TermKind::Iri)) register_individual(target.text());
        if (target.is(TermKind::List))
          for (const auto& item : target.items())
            if (item.is(TermKind::Iri)) register_individual(item.text());
      }
    }
  }

  void register_individual(const std::string& iri) {
    std::string local = iri_local_name(iri);
    auto it = model_.individuals.find(local);
    if (it == model_.individuals.end())
      model_.individuals[local] = iri;
    else if (it->second != iri)
      note(errc::adt_field_conflict,
           "individuals <" + it->second + "> and <" + iri + "> share the name '" +
               local + "'; the first is used for data resolution");
  }

  ModelAdt& ensure_adt(const std::string& class_iri) {
    if (ModelAdt* existing = adt_by_term_mut(class_iri)) return *existing;
    ModelAdt adt;
    adt.term = class_iri;
    adt.name = mangler_.name_for(class_iri, model_.mangling);
    auto lbl = ont_.class_labels.find(class_iri);
    if (lbl != ont_.class_labels.end()) adt.label = lbl->second;
    model_.adts.push_back(std::move(adt));
    register_individual(class_iri);  // type tags resolve through the registry
    return model_.adts.back();
  }

  ModelAdt* adt_by_term_mut(const std::string& iri) {
    for (auto& a : model_.adts)
      if (a.term == iri) return &a;
    return nullptr;
  }

  bool edge_single_valued(const GraphEdge& e) const {
    const std::string& p = e.property;
    if (ont_.property(p)) return ont_.property_single_valued(p);
    // undeclared head-inferred properties are single-valued by construction;
    // undeclared body properties default to unbounded
    return e.clause == Clause::Head;
  }

  ModelProperty& add_field(ModelAdt& adt, const std::string& prop_iri, ModelType type,
                           bool single, bool inferred, SourcePos pos) {
    if (ModelProperty* f = field_by_term_mut(adt, prop_iri)) {
      if (!(f->type == type))
        throw CompileError(errc::adt_field_conflict,
                           "field <" + prop_iri + "> of " + adt.name +
                               " merged with conflicting value types (" +
                               f->type.str() + " vs " + type.str() + ")",
                           pos);
      if (f->unbounded && single) {
        f->unbounded = false;  // stricter cardinality wins
        note(errc::adt_field_conflict,
             "field " + adt.name + "." + f->name + ": conflicting cardinalities, "
             "keeping [0..1]", pos);
      }
      f->inferred = f->inferred || inferred;
      return *f;
    }
    ModelProperty f;
    f.term = prop_iri;
    f.name = mangler_.name_for(prop_iri, model_.mangling);
    if (const PropertyInfo* info = ont_.property(prop_iri))
      if (info->label) f.label = info->label;
    f.unbounded = !single;
    f.type = std::move(type);
    f.inferred = inferred;
    adt.fields.push_back(std::move(f));
    return adt.fields.back();
  }

  ModelProperty* field_by_term_mut(ModelAdt& adt, const std::string& iri) {
    for (auto& f : adt.fields)
      if (f.term == iri) return &f;
    return nullptr;
  }

  // ModelType of the value reached through `edge`; materializes ADTs on
  // demand (Algorithm 1 recursion)
  ModelType edge_value_type(const GraphEdge& edge) {
    const GraphNode& target = g_->node(edge.target);
    const Term& t = target.term;
    const PropertyInfo* info = ont_.property(edge.property);

    if (t.is(TermKind::Literal)) {
      // a class-ranged property compared against a literal resolves through
      // the class's unique value field
      if (info && info->range && ont_.is_class(*info->range)) {
        ModelAdt& adt = ensure_adt(*info->range);
        auto value_prop = unique_value_field(ont_, *info->range);
        if (!value_prop)
          throw CompileError(errc::type_value_field,
                             "literal compared against class <" + *info->range +
                                 "> which has no unique datatype property",
                             t.pos());
        const PropertyInfo* vp = ont_.property(*value_prop);
        add_field(adt, *value_prop, ModelType{*vp->range, ""}, vp->single_valued(),
                  false, t.pos());
        return ModelType{"", adt.name};
      }
      if (info && info->range && ont_.is_datatype(*info->range))
        return ModelType{*info->range, ""};
      if (target.resolved && target.resolved->is_datatype)
        return ModelType{target.resolved->iri, ""};
      return ModelType{rdfns::xsd_string, ""};
    }

    if (t.is(TermKind::Iri)) {
      // individual constant; keep the ontology's class when declared
      if (info && info->range && ont_.is_class(*info->range))
        return ModelType{"", ensure_adt(*info->range).name};
      if (info && info->range && ont_.is_datatype(*info->range))
        return ModelType{*info->range, ""};
      return ModelType{rdfns::xsd_string, ""};
    }

    // variable or blank node
    if (!target.resolved)
      throw CompileError(errc::type_none, "node has no resolved type", t.pos());
    if (target.resolved->is_datatype) return ModelType{target.resolved->iri, ""};
    visit(edge.target);
    return ModelType{"", ensure_adt(target.resolved->iri).name};
  }

  void visit(int node_id) {
    const GraphNode& node = g_->node(node_id);
    if (node.term.is_concrete() || node.term.is(TermKind::List)) return;
    if (!node.resolved)
      throw CompileError(errc::type_none, "node has no resolved type",
                         node.term.pos());
    if (node.resolved->is_datatype) return;

    ensure_adt(node.resolved->iri);
    for (const auto& e : node.outgoing) {
      if (e.kind != GraphEdge::Kind::Property) continue;

      if (e.inverted()) {
        // the original orientation also names a property of the target
        // class; it goes in ahead of the target's own fields
        const GraphNode& target = g_->node(e.target);
        if (target.resolved && !target.resolved->is_datatype) {
          std::string src_name = adt_by_term_mut(node.resolved->iri)->name;
          ModelAdt& target_adt = ensure_adt(target.resolved->iri);
          bool single = ont_.property_single_valued(*e.original_property) ||
                        (!ont_.property(*e.original_property) && e.clause == Clause::Head);
          add_field(target_adt, *e.original_property, ModelType{"", src_name}, single,
                    false, e.pos);
        }
      }

      ModelType vt = edge_value_type(e);
      // re-fetch: recursion may have reallocated the adts vector
      ModelAdt& owner = *adt_by_term_mut(node.resolved->iri);
      add_field(owner, e.property, vt, edge_single_valued(e), e.clause == Clause::Head,
                e.pos);
    }
  }

  const Ontology& ont_;
  Model& model_;
  std::vector<Diagnostic>* notes_;
  const RuleGraph* g_ = nullptr;
  Mangler mangler_;
};

}  // namespace

Model generate_adts(const std::vector<RuleGraph>& graphs, const Ontology& ont,
                    std::vector<Diagnostic>* notes) {
  Model model;
  AdtGenerator gen(ont, model, notes);
  for (const auto& g : graphs) gen.run(g);
  return model;
}

void merge_models(Model& into, const Model& from, std::vector<Diagnostic>* notes) {
  for (const auto& adt : from.adts) {
    ModelAdt* target = nullptr;
    for (auto& a : into.adts)
      if (a.term == adt.term) target = &a;
    if (!target) {
      // ensure the merged ADT name is unique in the destination
      ModelAdt copy = adt;
      std::set<std::string> taken;
      for (const auto& a : into.adts) taken.insert(a.name);
      int n = 2;
      while (taken.count(copy.name)) copy.name = adt.name + "_" + std::to_string(n++);
      into.mangling[copy.term] = copy.name;
      into.adts.push_back(copy);
      continue;
    }
    for (const auto& f : adt.fields) {
      ModelProperty* existing = nullptr;
      for (auto& g : target->fields)
        if (g.term == f.term) existing = &g;
      if (!existing) {
        target->fields.push_back(f);
        into.mangling[f.term] = f.name;
        continue;
      }
      if (!(existing->type == f.type))
        throw CompileError(errc::adt_field_conflict,
                           "field <" + f.term + "> merged with conflicting value types");
      if (existing->unbounded && !f.unbounded) {
        existing->unbounded = false;
        if (notes)
          notes->push_back({errc::adt_field_conflict,
                            "field " + target->name + "." + existing->name +
                                ": conflicting cardinalities, keeping [0..1]",
                            {}});
      }
      existing->use_dictionary |= f.use_dictionary;
      if (!existing->dictionary_key) existing->dictionary_key = f.dictionary_key;
    }
  }
  for (const auto& [k, v] : from.individuals)
    if (!into.individuals.count(k)) into.individuals[k] = v;
}

}  // namespace n3sc
