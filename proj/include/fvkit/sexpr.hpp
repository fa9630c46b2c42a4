#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fvkit {

// Base error type for everything the toolkit can reject.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Parse error carrying a 1-based source position.
class ParseError : public Error {
public:
  ParseError(const std::string& what, int line, int col)
      : Error(what + " (at " + std::to_string(line) + ":" + std::to_string(col) + ")"),
        line(line), col(col) {}
  int line;
  int col;
};

// S-expressions: atoms and lists.  `;` starts a comment running to end of line.
// Atom tokens are maximal runs of characters other than whitespace, parens and `;`.
struct SExpr {
  enum class Kind { Atom, List };
  Kind kind = Kind::Atom;
  std::string atom;
  std::vector<SExpr> items;
  int line = 0;
  int col = 0;

  static SExpr make_atom(std::string a);
  static SExpr make_list(std::vector<SExpr> xs);

  bool is_atom() const { return kind == Kind::Atom; }
  bool is_list() const { return kind == Kind::List; }

  // List accessors that throw ParseError with this node's position on misuse.
  const SExpr& at(size_t i) const;
  size_t size() const { return items.size(); }
  // Head atom of a list ("" when empty or when the head is itself a list).
  std::string head() const;

  // Atom content interpreted as a decimal integer.
  int as_int() const;
};

// Parses exactly one s-expression (trailing whitespace/comments allowed).
SExpr parse_sexpr(std::string_view text);

// Parses a sequence of top-level s-expressions.
std::vector<SExpr> parse_sexpr_list(std::string_view text);

// Canonical single-line rendering: "(a b (c d))".
std::string to_text(const SExpr& e);

}  // namespace fvkit
