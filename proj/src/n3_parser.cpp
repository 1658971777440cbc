#include <cctype>

#include "n3sc/n3_document.hpp"

namespace n3sc {

namespace {

enum class Tok {
  Eof,
  Dot,
  Semicolon,
  Comma,
  LBrace,
  RBrace,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Implies,
  PrefixKw,
  Iriref,
  Qname,
  Var,
  String,
  Integer,
  Decimal,
  A,
};

struct Token {
  Tok kind = Tok::Eof;
  std::string text;    // iri, raw qname "p:l", var name, literal lexical
  std::string prefix;  // qname prefix label
  std::string local;   // qname local part
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(const std::string& in) : in_(in) {}

  Token next() {
    skip_ws();
    Token t;
    t.pos = pos();
    if (i_ >= in_.size()) {
      t.kind = Tok::Eof;
      return t;
    }
    char c = in_[i_];
    switch (c) {
      case '.':
        // distinguish statement dot from a decimal written as ".5" (not
        // supported; decimals need a leading digit)
        advance();
        t.kind = Tok::Dot;
        return t;
      case ';': advance(); t.kind = Tok::Semicolon; return t;
      case ',': advance(); t.kind = Tok::Comma; return t;
      case '{': advance(); t.kind = Tok::LBrace; return t;
      case '}': advance(); t.kind = Tok::RBrace; return t;
      case '(': advance(); t.kind = Tok::LParen; return t;
      case ')': advance(); t.kind = Tok::RParen; return t;
      case '[': advance(); t.kind = Tok::LBracket; return t;
      case ']': advance(); t.kind = Tok::RBracket; return t;
      case '=':
        advance();
        if (i_ < in_.size() && in_[i_] == '>') {
          advance();
          t.kind = Tok::Implies;
          t.text = "=>";
          return t;
        }
        fail("expected '=>'", t.pos);
      case '@': {
        advance();
        std::string word = lex_name();
        if (word == "prefix") {
          t.kind = Tok::PrefixKw;
          return t;
        }
        fail("unknown directive '@" + word + "'", t.pos);
      }
      case '<': return lex_iriref(t);
      case '"':
      case '\'': return lex_string(t, c);
      case '?': {
        advance();
        t.kind = Tok::Var;
        t.text = lex_name();
        if (t.text.empty()) fail("empty variable name", t.pos);
        return t;
      }
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-')
      return lex_number(t);
    if (is_name_start(c) || c == ':') return lex_qname_or_a(t);
    fail(std::string("unexpected character '") + c + "'", t.pos);
    return t;  // unreachable
  }

 private:
  [[noreturn]] void fail(const std::string& msg, SourcePos p) {
    throw CompileError(errc::lex, msg, p);
  }

  SourcePos pos() const { return {line_, col_}; }

  void advance() {
    if (i_ < in_.size()) {
      if (in_[i_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++i_;
    }
  }

  void skip_ws() {
    while (i_ < in_.size()) {
      char c = in_[i_];
      if (c == '#') {
        while (i_ < in_.size() && in_[i_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  static bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  static bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string lex_name() {
    std::string s;
    while (i_ < in_.size() && is_name_char(in_[i_])) {
      s += in_[i_];
      advance();
    }
    return s;
  }

  Token lex_iriref(Token t) {
    advance();  // '<'
    std::string s;
    while (i_ < in_.size() && in_[i_] != '>') {
      if (in_[i_] == '\n') fail("unterminated IRI", t.pos);
      s += in_[i_];
      advance();
    }
    if (i_ >= in_.size()) fail("unterminated IRI", t.pos);
    advance();  // '>'
    t.kind = Tok::Iriref;
    t.text = s;
    return t;
  }

  Token lex_string(Token t, char quote) {
    advance();
    std::string s;
    while (true) {
      if (i_ >= in_.size() || in_[i_] == '\n') fail("unterminated string", t.pos);
      char c = in_[i_];
      if (c == quote) {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        if (i_ >= in_.size()) fail("unterminated string", t.pos);
        char e = in_[i_];
        switch (e) {
          case 'n': s += '\n'; break;
          case 't': s += '\t'; break;
          case '\\': s += '\\'; break;
          case '\'': s += '\''; break;
          case '"': s += '"'; break;
          default: fail(std::string("unknown escape '\\") + e + "'", pos());
        }
        advance();
      } else {
        s += c;
        advance();
      }
    }
    // datatype-suffixed and language-tagged literals are outside the dialect
    if (i_ + 1 < in_.size() && in_[i_] == '^' && in_[i_ + 1] == '^')
      fail("datatype-suffixed literals are not supported", pos());
    if (i_ < in_.size() && in_[i_] == '@')
      fail("language-tagged literals are not supported", pos());
    t.kind = Tok::String;
    t.text = s;
    return t;
  }

  Token lex_number(Token t) {
    std::string s;
    if (in_[i_] == '+' || in_[i_] == '-') {
      s += in_[i_];
      advance();
      if (i_ >= in_.size() || !std::isdigit(static_cast<unsigned char>(in_[i_])))
        fail("sign without digits", t.pos);
    }
    while (i_ < in_.size() && std::isdigit(static_cast<unsigned char>(in_[i_]))) {
      s += in_[i_];
      advance();
    }
    bool decimal = false;
    if (i_ + 1 < in_.size() && in_[i_] == '.' &&
        std::isdigit(static_cast<unsigned char>(in_[i_ + 1]))) {
      decimal = true;
      s += '.';
      advance();
      while (i_ < in_.size() && std::isdigit(static_cast<unsigned char>(in_[i_]))) {
        s += in_[i_];
        advance();
      }
    }
    t.kind = decimal ? Tok::Decimal : Tok::Integer;
    t.text = s;
    return t;
  }

  Token lex_qname_or_a(Token t) {
    std::string prefix;
    if (in_[i_] != ':') prefix = lex_name();
    if (i_ >= in_.size() || in_[i_] != ':') {
      if (prefix == "a") {
        t.kind = Tok::A;
        t.text = "a";
        return t;
      }
      fail("bare word '" + prefix + "' (expected qname or keyword)", t.pos);
    }
    advance();  // ':'
    std::string local;
    while (i_ < in_.size() && is_name_char(in_[i_])) {
      local += in_[i_];
      advance();
    }
    t.kind = Tok::Qname;
    t.prefix = prefix;
    t.local = local;
    t.text = prefix + ":" + local;
    return t;
  }

  const std::string& in_;
  size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lexer_(text) { consume(); }

  ParsedDocument parse() {
    ParsedDocument doc;
    while (cur_.kind != Tok::Eof) {
      if (cur_.kind == Tok::PrefixKw) {
        parse_prefix_decl(doc);
      } else {
        N3Statement st = parse_statement_body(/*in_graph=*/false);
        expect(Tok::Dot, "'.' after statement");
        doc.statements.push_back(std::move(st));
      }
    }
    doc.rules = extract_rules(doc);
    for (const auto& st : doc.statements) {
      if (st.is_rule()) continue;
      for (const auto& po : st.pairs)
        doc.ground_triples.push_back({st.subject, po.predicate, po.object, po.pos});
    }
    return doc;
  }

 private:
  void consume() { cur_ = lexer_.next(); }

  void expect(Tok k, const char* what) {
    if (cur_.kind != k)
      throw CompileError(errc::syntax, std::string("expected ") + what, cur_.pos);
    consume();
  }

  void parse_prefix_decl(ParsedDocument& doc) {
    SourcePos pos = cur_.pos;
    consume();  // @prefix
    if (cur_.kind != Tok::Qname || !cur_.local.empty())
      throw CompileError(errc::syntax, "expected prefix label", cur_.pos);
    std::string label = cur_.prefix;
    consume();
    if (cur_.kind != Tok::Iriref)
      throw CompileError(errc::syntax, "expected namespace IRI", cur_.pos);
    std::string iri = cur_.text;
    consume();
    expect(Tok::Dot, "'.'");
    prefixes_[label] = iri;
    doc.prefixes.push_back({label, iri, pos});
  }

  std::string resolve(const Token& q) {
    // cg: is reserved so annotation detection is independent of declarations
    if (q.prefix == "cg") return builtins::cg_ns + q.local;
    auto it = prefixes_.find(q.prefix);
    if (it != prefixes_.end()) return it->second + q.local;
    // well-known prefixes usable without declaration
    if (q.prefix == "rdf") return "http://www.w3.org/1999/02/22-rdf-syntax-ns#" + q.local;
    if (q.prefix == "xsd") return rdfns::xsd + q.local;
    if (q.prefix == "math") return builtins::math_ns + q.local;
    if (q.prefix == "list") return builtins::list_ns + q.local;
    if (q.prefix == "log") return "http://www.w3.org/2000/10/swap/log#" + q.local;
    throw CompileError(errc::prefix, "unresolved prefix '" + q.prefix + ":'", q.pos);
  }

  Term parse_term(bool in_graph) {
    Token t = cur_;
    switch (t.kind) {
      case Tok::Iriref:
        consume();
        return Term::iri(t.text, t.pos);
      case Tok::Qname: {
        consume();
        if (t.local.empty())
          throw CompileError(errc::syntax, "qname with empty local part", t.pos);
        return Term::iri(resolve(t), t.pos);
      }
      case Tok::Var:
        consume();
        return Term::var(t.text, t.pos);
      case Tok::String:
        consume();
        return Term::string_lit(t.text, t.pos);
      case Tok::Integer:
        consume();
        return Term::number_lit(t.text, false, t.pos);
      case Tok::Decimal:
        consume();
        return Term::number_lit(t.text, true, t.pos);
      case Tok::LBracket: {
        consume();
        if (cur_.kind != Tok::RBracket)
          throw CompileError(errc::syntax, "labeled/property blank nodes are not supported",
                             cur_.pos);
        consume();
        return Term::blank("b" + std::to_string(blank_counter_++), t.pos);
      }
      case Tok::LParen: {
        consume();
        std::vector<Term> items;
        while (cur_.kind != Tok::RParen) {
          if (cur_.kind == Tok::Eof)
            throw CompileError(errc::delim, "unbalanced '(': reached end of input", t.pos);
          items.push_back(parse_term(in_graph));
        }
        consume();
        return Term::list(std::move(items), t.pos);
      }
      case Tok::LBrace:
        return parse_graph_term();
      default:
        throw CompileError(errc::syntax, "expected a term", t.pos);
    }
  }

  Term parse_graph_term() {
    SourcePos pos = cur_.pos;
    consume();  // '{'
    GraphTerm g;
    while (cur_.kind != Tok::RBrace) {
      if (cur_.kind == Tok::Eof)
        throw CompileError(errc::delim, "unbalanced '{': reached end of input", pos);
      N3Statement st = parse_statement_body(/*in_graph=*/true);
      for (const auto& po : st.pairs)
        g.triples.push_back({st.subject, po.predicate, po.object, po.pos});
      if (cur_.kind == Tok::Dot) {
        consume();
      } else if (cur_.kind != Tok::RBrace) {
        // only the final statement before '}' may omit its dot
        throw CompileError(errc::syntax, "expected '.' or '}'", cur_.pos);
      }
    }
    consume();  // '}'
    return Term::graph(std::move(g), pos);
  }

  // subject + predicate-object list, without the terminating dot
  N3Statement parse_statement_body(bool in_graph) {
    N3Statement st;
    st.pos = cur_.pos;
    st.subject = parse_term(in_graph);
    bool first = true;
    while (true) {
      // tolerate empty ';' segments (the annotation style writes
      // "{...} ; cg:request <loc>")
      while (cur_.kind == Tok::Semicolon) consume();
      if (!first && !starts_verb(cur_.kind)) break;
      if (first && !starts_verb(cur_.kind))
        throw CompileError(errc::syntax, "expected a predicate", cur_.pos);
      PredObj po = parse_verb();
      st.pairs.push_back(po);
      while (cur_.kind == Tok::Comma) {
        consume();
        PredObj more = st.pairs.back();
        more.object = parse_term(in_graph);
        more.pos = more.object.pos();
        st.pairs.push_back(more);
      }
      first = false;
      if (cur_.kind != Tok::Semicolon) break;
    }
    return st;
  }

  static bool starts_verb(Tok k) {
    return k == Tok::A || k == Tok::Qname || k == Tok::Iriref || k == Tok::Implies ||
           k == Tok::Var;
  }

  PredObj parse_verb() {
    PredObj po;
    po.pos = cur_.pos;
    Token t = cur_;
    switch (t.kind) {
      case Tok::A:
        consume();
        po.predicate = Term::iri(rdfns::rdf_type, t.pos);
        po.surface = "a";
        break;
      case Tok::Implies:
        consume();
        po.predicate = Term::iri(builtins::log_implies, t.pos);
        po.surface = "=>";
        break;
      case Tok::Qname:
        consume();
        po.predicate = Term::iri(resolve(t), t.pos);
        po.surface = t.text;
        break;
      case Tok::Iriref:
        consume();
        po.predicate = Term::iri(t.text, t.pos);
        po.surface = "<" + t.text + ">";
        break;
      case Tok::Var:
        consume();
        po.predicate = Term::var(t.text, t.pos);
        po.surface = "?" + t.text;
        break;
      default:
        throw CompileError(errc::syntax, "expected a predicate", t.pos);
    }
    po.object = parse_term(/*in_graph=*/false);
    return po;
  }

  Lexer lexer_;
  Token cur_;
  std::map<std::string, std::string> prefixes_;
  int blank_counter_ = 0;
};

bool surface_is_cg(const std::string& surface, const char* name) {
  return surface == std::string("cg:") + name;
}

bool surface_is_cg_any(const std::string& surface) {
  return surface.rfind("cg:", 0) == 0;
}

}  // namespace

std::optional<std::string> ParsedDocument::prefix_iri(const std::string& label) const {
  for (const auto& p : prefixes)
    if (p.label == label) return p.iri;
  return std::nullopt;
}

ParsedDocument parse_document(const std::string& text) {
  Parser p(text);
  return p.parse();
}

std::vector<AnnotatedRule> extract_rules(const ParsedDocument& doc) {
  std::vector<AnnotatedRule> rules;
  for (const auto& st : doc.statements) {
    if (!st.is_rule()) {
      for (const auto& po : st.pairs)
        if (surface_is_cg_any(po.surface))
          throw CompileError(errc::annotation,
                             "annotation '" + po.surface + "' on a non-rule statement",
                             po.pos);
      if (st.subject.is(TermKind::Graph))
        throw CompileError(errc::annotation,
                           "graph-term statement outside a rule body", st.pos);
      continue;
    }

    AnnotatedRule rule;
    rule.pos = st.pos;
    if (!st.subject.is(TermKind::Graph))
      throw CompileError(errc::syntax, "rule body must be a graph term", st.pos);
    rule.body = st.subject.graph_body();

    bool saw_implies = false;
    for (const auto& po : st.pairs) {
      if (po.surface == "=>" || (po.predicate.is(TermKind::Iri) &&
                                 po.predicate.text() == builtins::log_implies)) {
        if (saw_implies)
          throw CompileError(errc::syntax, "multiple '=>' on one rule statement", po.pos);
        saw_implies = true;
        if (!po.object.is(TermKind::Graph))
          throw CompileError(errc::syntax, "rule head must be a graph term", po.pos);
        rule.head = po.object.graph_body();
      } else if (surface_is_cg(po.surface, "functionParam")) {
        if (!po.object.is(TermKind::Var))
          throw CompileError(errc::annotation, "cg:functionParam expects a variable", po.pos);
        rule.function_params.push_back(po.object);
      } else if (surface_is_cg(po.surface, "event")) {
        if (!po.object.is(TermKind::Literal) ||
            po.object.literal_kind() != LiteralKind::String)
          throw CompileError(errc::annotation, "cg:event expects a string literal", po.pos);
        rule.event_name = po.object.text();
      } else if (surface_is_cg_any(po.surface)) {
        throw CompileError(errc::annotation, "unknown annotation '" + po.surface + "'",
                           po.pos);
      } else {
        throw CompileError(errc::annotation,
                           "predicate '" + po.surface +
                               "' is not allowed on a rule statement",
                           po.pos);
      }
    }

    // re-attach cg:request annotations nested in the body
    for (size_t i = 0; i < rule.body.triples.size(); ++i) {
      const Triple& t = rule.body.triples[i];
      if (t.subject.is(TermKind::Graph)) {
        std::string psurf =
            t.predicate.is(TermKind::Iri) ? t.predicate.text() : std::string();
        bool is_request = psurf == builtins::cg_ns + "request";
        if (!is_request)
          throw CompileError(
              errc::annotation,
              "graph term in a rule body must carry cg:request", t.pos);
        if (!t.object.is(TermKind::Iri))
          throw CompileError(errc::request_object, "cg:request expects an IRI location",
                             t.pos);
        for (const auto& inner : t.subject.graph_body().triples) {
          if (inner.subject.is(TermKind::Graph) || inner.object.is(TermKind::Graph))
            throw CompileError(errc::syntax, "nested graph terms inside a request block",
                               inner.pos);
          if (inner.predicate.is(TermKind::Iri) &&
              inner.predicate.text() == builtins::log_implies)
            throw CompileError(errc::syntax, "nested rules are not supported", inner.pos);
        }
        rule.requests.push_back({i, t.object.text(), t.pos});
      } else if (t.object.is(TermKind::Graph)) {
        throw CompileError(errc::syntax, "graph terms may appear only as request blocks",
                           t.pos);
      } else if (t.predicate.is(TermKind::Iri) &&
                 t.predicate.text() == builtins::log_implies) {
        throw CompileError(errc::syntax, "nested rules are not supported", t.pos);
      }
    }
    for (const auto& t : rule.head.triples)
      if (t.subject.is(TermKind::Graph) || t.object.is(TermKind::Graph))
        throw CompileError(errc::syntax, "graph terms are not allowed in rule heads",
                           t.pos);

    rules.push_back(std::move(rule));
  }
  return rules;
}

std::vector<BodyAtom> flattened_body(const AnnotatedRule& rule) {
  std::vector<BodyAtom> atoms;
  for (size_t i = 0; i < rule.body.triples.size(); ++i) {
    const Triple& t = rule.body.triples[i];
    if (t.subject.is(TermKind::Graph)) {
      std::string loc;
      for (const auto& r : rule.requests)
        if (r.body_index == i) loc = r.location;
      for (const auto& inner : t.subject.graph_body().triples)
        atoms.push_back({inner, loc});
    } else {
      atoms.push_back({t, std::nullopt});
    }
  }
  return atoms;
}

namespace {
bool rules_equal(const AnnotatedRule& a, const AnnotatedRule& b) {
  if (!(a.body.triples == b.body.triples) || !(a.head.triples == b.head.triples))
    return false;
  if (a.function_params != b.function_params || a.event_name != b.event_name)
    return false;
  if (a.requests.size() != b.requests.size()) return false;
  for (size_t i = 0; i < a.requests.size(); ++i)
    if (a.requests[i].body_index != b.requests[i].body_index ||
        a.requests[i].location != b.requests[i].location)
      return false;
  return true;
}
}  // namespace

bool documents_equal(const ParsedDocument& a, const ParsedDocument& b) {
  if (a.prefixes != b.prefixes) return false;
  if (a.ground_triples != b.ground_triples) return false;
  if (a.rules.size() != b.rules.size()) return false;
  for (size_t i = 0; i < a.rules.size(); ++i)
    if (!rules_equal(a.rules[i], b.rules[i])) return false;
  return true;
}

}  // namespace n3sc
