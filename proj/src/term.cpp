#include "n3sc/term.hpp"

namespace n3sc {

struct Term::Data {
  TermKind kind = TermKind::Iri;
  LiteralKind lit_kind = LiteralKind::String;
  std::string text;
  std::vector<Term> items;
  GraphTerm graph;
  SourcePos pos;
};

std::shared_ptr<Term::Data> Term::make_data(TermKind k, std::string text, SourcePos pos) {
  auto d = std::make_shared<Data>();
  d->kind = k;
  d->text = std::move(text);
  d->pos = pos;
  return d;
}

Term Term::iri(std::string value, SourcePos pos) {
  Term t;
  t.data_ = make_data(TermKind::Iri, std::move(value), pos);
  return t;
}

Term Term::string_lit(std::string value, SourcePos pos) {
  auto d = make_data(TermKind::Literal, std::move(value), pos);
  d->lit_kind = LiteralKind::String;
  Term t;
  t.data_ = std::move(d);
  return t;
}

Term Term::number_lit(std::string lexical, bool decimal, SourcePos pos) {
  auto d = make_data(TermKind::Literal, std::move(lexical), pos);
  d->lit_kind = decimal ? LiteralKind::Decimal : LiteralKind::Integer;
  Term t;
  t.data_ = std::move(d);
  return t;
}

Term Term::blank(std::string id, SourcePos pos) {
  Term t;
  t.data_ = make_data(TermKind::Blank, std::move(id), pos);
  return t;
}

Term Term::var(std::string name, SourcePos pos) {
  Term t;
  t.data_ = make_data(TermKind::Var, std::move(name), pos);
  return t;
}

Term Term::list(std::vector<Term> items, SourcePos pos) {
  auto d = make_data(TermKind::List, "", pos);
  d->items = std::move(items);
  Term t;
  t.data_ = std::move(d);
  return t;
}

Term Term::graph(GraphTerm g, SourcePos pos) {
  auto d = make_data(TermKind::Graph, "", pos);
  d->graph = std::move(g);
  Term t;
  t.data_ = std::move(d);
  return t;
}

TermKind Term::kind() const { return data_ ? data_->kind : TermKind::Iri; }

const std::string& Term::text() const {
  static const std::string empty;
  return data_ ? data_->text : empty;
}

LiteralKind Term::literal_kind() const {
  return data_ ? data_->lit_kind : LiteralKind::String;
}

const std::vector<Term>& Term::items() const {
  static const std::vector<Term> empty;
  return data_ ? data_->items : empty;
}

const GraphTerm& Term::graph_body() const {
  static const GraphTerm empty;
  return data_ ? data_->graph : empty;
}

SourcePos Term::pos() const { return data_ ? data_->pos : SourcePos{}; }

bool Term::operator==(const Term& o) const {
  if (data_ == o.data_) return true;
  if (!data_ || !o.data_) return false;
  if (kind() != o.kind()) return false;
  switch (kind()) {
    case TermKind::Literal:
      return literal_kind() == o.literal_kind() && text() == o.text();
    case TermKind::List:
      return items() == o.items();
    case TermKind::Graph:
      return graph_body().triples == o.graph_body().triples;
    default:
      return text() == o.text();
  }
}

std::string Term::str() const {
  switch (kind()) {
    case TermKind::Iri:
      return "<" + text() + ">";
    case TermKind::Literal:
      return literal_kind() == LiteralKind::String ? "'" + text() + "'" : text();
    case TermKind::Blank:
      return "_:" + text();
    case TermKind::Var:
      return "?" + text();
    case TermKind::List: {
      std::string s = "(";
      for (size_t i = 0; i < items().size(); ++i) {
        if (i) s += " ";
        s += items()[i].str();
      }
      return s + ")";
    }
    case TermKind::Graph: {
      std::string s = "{";
      for (const auto& t : graph_body().triples)
        s += " " + t.subject.str() + " " + t.predicate.str() + " " + t.object.str() + " .";
      return s + " }";
    }
  }
  return "";
}

std::string iri_local_name(const std::string& iri) {
  auto p = iri.find_last_of("#/");
  return p == std::string::npos ? iri : iri.substr(p + 1);
}

std::string iri_namespace(const std::string& iri) {
  auto p = iri.find_last_of("#/");
  return p == std::string::npos ? "" : iri.substr(0, p + 1);
}

}  // namespace n3sc
