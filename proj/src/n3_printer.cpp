#include <algorithm>

#include "n3sc/n3_document.hpp"

namespace n3sc {

namespace {

class Printer {
 public:
  explicit Printer(const ParsedDocument& doc) : doc_(doc) {
    for (const auto& p : doc.prefixes) table_.push_back({p.iri, p.label});
    // reserved prefixes as fallbacks, declared ones win via stable_sort below
    table_.push_back({"http://www.w3.org/1999/02/22-rdf-syntax-ns#", "rdf"});
    table_.push_back({rdfns::xsd, "xsd"});
    table_.push_back({builtins::math_ns, "math"});
    table_.push_back({builtins::list_ns, "list"});
    table_.push_back({builtins::cg_ns, "cg"});
    std::stable_sort(table_.begin(), table_.end(),
                     [](const auto& a, const auto& b) {
                       return a.first.size() > b.first.size();
                     });
  }

  std::string print() {
    for (const auto& p : doc_.prefixes)
      out_ += "@prefix " + p.label + ": <" + p.iri + "> .\n";
    if (!doc_.prefixes.empty() && !doc_.statements.empty()) out_ += "\n";
    for (const auto& st : doc_.statements) {
      print_statement(st, 0);
      out_ += "\n";
    }
    return out_;
  }

 private:
  static bool valid_local(const std::string& s) {
    for (char c : s)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
        return false;
    return true;
  }

  std::string iri_text(const std::string& iri) const {
    for (const auto& [ns, label] : table_) {
      if (iri.size() > ns.size() && iri.rfind(ns, 0) == 0) {
        std::string local = iri.substr(ns.size());
        if (valid_local(local)) return label + ":" + local;
      }
    }
    return "<" + iri + ">";
  }

  static std::string escape(const std::string& s) {
    std::string r;
    for (char c : s) {
      if (c == '\\' || c == '\'') r += '\\';
      if (c == '\n') {
        r += "\\n";
        continue;
      }
      r += c;
    }
    return r;
  }

  std::string term_text(const Term& t, int indent) const {
    switch (t.kind()) {
      case TermKind::Iri:
        return iri_text(t.text());
      case TermKind::Literal:
        if (t.literal_kind() == LiteralKind::String) return "'" + escape(t.text()) + "'";
        return t.text();
      case TermKind::Blank:
        return "[]";
      case TermKind::Var:
        return "?" + t.text();
      case TermKind::List: {
        std::string s = "(";
        for (size_t i = 0; i < t.items().size(); ++i) {
          if (i) s += " ";
          s += term_text(t.items()[i], indent);
        }
        return s + ")";
      }
      case TermKind::Graph:
        return graph_text(t.graph_body(), indent);
    }
    return "";
  }

  std::string pred_text(const Term& p) const {
    if (p.is(TermKind::Var)) return "?" + p.text();
    if (p.text() == rdfns::rdf_type) return "a";
    if (p.text() == builtins::log_implies) return "=>";
    return iri_text(p.text());
  }

  std::string graph_text(const GraphTerm& g, int indent) const {
    if (g.triples.empty()) return "{ }";
    std::string pad(static_cast<size_t>(indent) * 2, ' ');
    std::string s = "{\n";
    size_t i = 0;
    while (i < g.triples.size()) {
      size_t j = i;
      while (j + 1 < g.triples.size() && g.triples[j + 1].subject == g.triples[i].subject)
        ++j;
      s += pad + "  " + statement_text(g.triples, i, j, indent + 1) + "\n";
      i = j + 1;
    }
    s += pad + "}";
    return s;
  }

  std::string statement_text(const std::vector<Triple>& ts, size_t from, size_t to,
                             int indent) const {
    std::string pad(static_cast<size_t>(indent) * 2, ' ');
    std::string s = term_text(ts[from].subject, indent) + " ";
    for (size_t k = from; k <= to; ++k) {
      if (k > from) s += " ;\n" + pad + "  ";
      s += pred_text(ts[k].predicate) + " " + term_text(ts[k].object, indent + 1);
    }
    return s + " .";
  }

  void print_statement(const N3Statement& st, int indent) {
    std::string pad(static_cast<size_t>(indent) * 2, ' ');
    std::string s = pad + term_text(st.subject, indent) + " ";
    for (size_t k = 0; k < st.pairs.size(); ++k) {
      if (k > 0) s += " ;\n" + pad + "  ";
      s += pred_text(st.pairs[k].predicate) + " " +
           term_text(st.pairs[k].object, indent + 1);
    }
    out_ += s + " .\n";
  }

  const ParsedDocument& doc_;
  std::vector<std::pair<std::string, std::string>> table_;
  std::string out_;
};

}  // namespace

std::string print_document(const ParsedDocument& doc) { return Printer(doc).print(); }

}  // namespace n3sc
