#include <algorithm>

#include "n3sc/n3_document.hpp"
#include "n3sc/ontology.hpp"

namespace n3sc {

namespace {
const std::string owl_ns = "http://www.w3.org/2002/07/owl#";
const std::string rdfs_ns = "http://www.w3.org/2000/01/rdf-schema#";

const std::set<std::string> kSeedDatatypes = {
    rdfns::xsd_string,   rdfns::xsd_integer,        rdfns::xsd_decimal,
    rdfns::xsd_boolean,  rdfns::xsd + "double",     rdfns::xsd + "float",
    rdfns::xsd + "date", rdfns::xsd + "dateTime",   rdfns::xsd + "anyURI",
};
}  // namespace

bool Ontology::is_datatype(const std::string& iri) const {
  return datatypes.count(iri) > 0 || iri.rfind(rdfns::xsd, 0) == 0;
}

const PropertyInfo* Ontology::property(const std::string& iri) const {
  auto it = properties.find(iri);
  return it == properties.end() ? nullptr : &it->second;
}

bool Ontology::property_single_valued(const std::string& iri) const {
  const PropertyInfo* p = property(iri);
  return p && p->single_valued();
}

Ontology load_ontology(const std::string& text) {
  ParsedDocument doc;
  try {
    doc = parse_document(text);
  } catch (const CompileError& e) {
    throw CompileError(errc::ont_syntax, e.message(), e.pos());
  }

  Ontology ont;
  ont.datatypes = kSeedDatatypes;
  if (!doc.rules.empty())
    ont.warnings.push_back(
        {errc::ont_syntax, "rules in ontology file ignored", doc.rules[0].pos});

  auto& props = ont.properties;
  auto prop = [&](const std::string& iri) -> PropertyInfo& { return props[iri]; };

  for (const auto& t : doc.ground_triples) {
    if (!t.subject.is(TermKind::Iri)) {
      ont.warnings.push_back({errc::ont_syntax, "ignored non-IRI subject", t.pos});
      continue;
    }
    const std::string& s = t.subject.text();
    const std::string& p = t.predicate.is(TermKind::Iri) ? t.predicate.text() : "";

    if (p == rdfns::rdf_type && t.object.is(TermKind::Iri)) {
      const std::string& o = t.object.text();
      if (o == owl_ns + "Class" || o == rdfs_ns + "Class") {
        ont.classes.insert(s);
      } else if (o == owl_ns + "ObjectProperty" || o == owl_ns + "DatatypeProperty") {
        prop(s);
      } else if (o == owl_ns + "FunctionalProperty") {
        prop(s).functional = true;
      } else {
        ont.warnings.push_back({errc::ont_syntax, "ignored declaration " + o, t.pos});
      }
    } else if (p == rdfs_ns + "domain" && t.object.is(TermKind::Iri)) {
      prop(s).domain = t.object.text();
    } else if (p == rdfs_ns + "range" && t.object.is(TermKind::Iri)) {
      prop(s).range = t.object.text();
    } else if (p == owl_ns + "inverseOf" && t.object.is(TermKind::Iri)) {
      prop(s).inverse_of = t.object.text();
      prop(t.object.text()).inverse_of = s;
    } else if (p == rdfs_ns + "label" && t.object.is(TermKind::Literal)) {
      if (props.count(s))
        prop(s).label = t.object.text();
      else
        ont.class_labels[s] = t.object.text();
    } else if (iri_local_name(p) == "maxCardinality" && t.object.is(TermKind::Literal) &&
               t.object.literal_kind() == LiteralKind::Integer) {
      prop(s).max_cardinality = std::stoi(t.object.text());
    } else {
      ont.warnings.push_back({errc::ont_syntax, "ignored construct " + p, t.pos});
    }
  }

  for (const auto& [iri, info] : props) {
    for (const auto& ref : {info.domain, info.range}) {
      if (ref && !ont.is_class(*ref) && !ont.is_datatype(*ref))
        throw CompileError(errc::ont_undeclared,
                           "domain/range <" + *ref + "> of <" + iri +
                               "> is not a declared class or datatype");
    }
  }
  return ont;
}

TypeRef type_of_node(const Ontology& ont, const NodeTypeContext& ctx) {
  // level 1: explicit rdf:type declarations from the rule
  std::vector<std::string> explicit_classes;
  for (const auto& c : ctx.explicit_types)
    if (ont.is_class(c)) explicit_classes.push_back(c);
  if (explicit_classes.size() > 1) {
    std::sort(explicit_classes.begin(), explicit_classes.end());
    explicit_classes.erase(
        std::unique(explicit_classes.begin(), explicit_classes.end()),
        explicit_classes.end());
    if (explicit_classes.size() > 1)
      throw CompileError(errc::type_conflict,
                         "node declares multiple ontology classes", ctx.pos);
  }
  if (!explicit_classes.empty()) return {false, explicit_classes[0]};

  // level 2: range of the incoming property (domain of the original when the
  // edge was inverted and the inverse itself is undeclared)
  if (ctx.incoming_property) {
    const PropertyInfo* p = ont.property(*ctx.incoming_property);
    if (p && p->range) {
      const std::string& r = *p->range;
      return {ont.is_datatype(r), r};
    }
    if (ctx.incoming_inverted && ctx.incoming_original) {
      const PropertyInfo* orig = ont.property(*ctx.incoming_original);
      if (orig && orig->domain) return {false, *orig->domain};
    }
  }

  // level 3: domain of an outgoing property
  std::vector<std::string> domains;
  for (const auto& op : ctx.outgoing_properties) {
    const PropertyInfo* p = ont.property(op);
    if (p && p->domain) domains.push_back(*p->domain);
  }
  std::sort(domains.begin(), domains.end());
  domains.erase(std::unique(domains.begin(), domains.end()), domains.end());
  if (domains.size() > 1)
    throw CompileError(errc::type_conflict,
                       "outgoing properties resolve to different classes", ctx.pos);
  if (domains.size() == 1) return {false, domains[0]};

  throw CompileError(errc::type_none, "no typing source for node", ctx.pos);
}

InverseRef inverse_of(const Ontology& ont, const std::string& property) {
  const PropertyInfo* p = ont.property(property);
  if (p && p->inverse_of) return {*p->inverse_of, false};
  return {iri_namespace(property) + iri_local_name(property) + "Of", true};
}

}  // namespace n3sc
