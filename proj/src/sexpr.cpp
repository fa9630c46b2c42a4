#include "fvkit/sexpr.hpp"

#include <cctype>

namespace fvkit {

SExpr SExpr::make_atom(std::string a) {
  SExpr e;
  e.kind = Kind::Atom;
  e.atom = std::move(a);
  return e;
}

SExpr SExpr::make_list(std::vector<SExpr> xs) {
  SExpr e;
  e.kind = Kind::List;
  e.items = std::move(xs);
  return e;
}

const SExpr& SExpr::at(size_t i) const {
  if (kind != Kind::List || i >= items.size())
    throw ParseError("malformed form: expected at least " + std::to_string(i + 1) + " items", line, col);
  return items[i];
}

std::string SExpr::head() const {
  if (kind != Kind::List || items.empty() || !items[0].is_atom()) return "";
  return items[0].atom;
}

int SExpr::as_int() const {
  if (kind != Kind::Atom) throw ParseError("expected an integer, got a list", line, col);
  size_t pos = 0;
  int value = 0;
  try {
    value = std::stoi(atom, &pos);
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + atom + "'", line, col);
  }
  if (pos != atom.size()) throw ParseError("expected an integer, got '" + atom + "'", line, col);
  return value;
}

namespace {

struct Lexer {
  std::string_view text;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  void advance() {
    if (pos < text.size()) {
      if (text[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++pos;
    }
  }

  void skip_space() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == ';') {
        while (pos < text.size() && text[pos] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool done() {
    skip_space();
    return pos >= text.size();
  }

  static bool is_delim(char c) {
    return c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c));
  }

  SExpr next() {
    skip_space();
    if (pos >= text.size()) throw ParseError("unexpected end of input", line, col);
    int l = line, c = col;
    char ch = text[pos];
    if (ch == ')') throw ParseError("unbalanced ')'", l, c);
    if (ch == '(') {
      advance();
      SExpr list = SExpr::make_list({});
      list.line = l;
      list.col = c;
      for (;;) {
        skip_space();
        if (pos >= text.size()) throw ParseError("missing ')'", l, c);
        if (text[pos] == ')') {
          advance();
          return list;
        }
        list.items.push_back(next());
      }
    }
    std::string tok;
    while (pos < text.size() && !is_delim(text[pos])) {
      tok.push_back(text[pos]);
      advance();
    }
    SExpr a = SExpr::make_atom(std::move(tok));
    a.line = l;
    a.col = c;
    return a;
  }
};

}  // namespace

SExpr parse_sexpr(std::string_view text) {
  Lexer lx{text};
  SExpr e = lx.next();
  if (!lx.done()) throw ParseError("trailing content after s-expression", lx.line, lx.col);
  return e;
}

std::vector<SExpr> parse_sexpr_list(std::string_view text) {
  Lexer lx{text};
  std::vector<SExpr> out;
  while (!lx.done()) out.push_back(lx.next());
  return out;
}

std::string to_text(const SExpr& e) {
  if (e.is_atom()) return e.atom;
  std::string out = "(";
  for (size_t i = 0; i < e.items.size(); ++i) {
    if (i) out.push_back(' ');
    out += to_text(e.items[i]);
  }
  out.push_back(')');
  return out;
}

}  // namespace fvkit
