#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fvkit/sexpr.hpp"

namespace fvkit {

// Terms.  Bound variables are de Bruijn indices (0 = innermost binder); the
// binder itself keeps a display name, so substitution never needs a global
// gensym and printing can reproduce source names.
class Term {
public:
  enum class Kind { Free, Bound, Const, App };

  Kind kind = Kind::Const;
  std::string name;        // Free: variable name; Const: constant symbol; App: function symbol
  int index = -1;          // Bound: de Bruijn index
  std::vector<Term> args;  // App

  static Term var(std::string n);
  static Term bound(int i);
  static Term cnst(std::string c);
  static Term app(std::string f, std::vector<Term> xs);

  bool operator==(const Term& o) const;
  bool operator!=(const Term& o) const { return !(*this == o); }
  bool operator<(const Term& o) const;  // structural order, for canonical sorting
};

// First-order formulas over a term language.  `and`/`or` are n-ary (an empty
// `and` is truth, an empty `or` falsity); `imp` is binary; quantifier nodes
// hold the bound variable's display name in `sym` and a single body in
// `subs[0]`, with occurrences as de Bruijn terms.  Structural equality
// ignores binder display names (it is alpha-equivalence).
class Formula {
public:
  enum class Kind { Eq, Rel, Not, And, Or, Imp, Exists, Forall };

  Kind kind = Kind::Eq;
  std::string sym;             // Rel: relation symbol; Exists/Forall: display name
  std::vector<Term> terms;     // Eq: {lhs, rhs}; Rel: arguments
  std::vector<Formula> subs;   // subformulas

  static Formula eq(Term a, Term b);
  static Formula rel(std::string r, std::vector<Term> xs);
  static Formula not_(Formula f);
  static Formula and_(std::vector<Formula> fs);
  static Formula or_(std::vector<Formula> fs);
  static Formula imp(Formula a, Formula b);
  // Binds every free occurrence of `v` in `body`.
  static Formula exists(const std::string& v, Formula body);
  static Formula forall(const std::string& v, Formula body);

  bool operator==(const Formula& o) const;
  bool operator!=(const Formula& o) const { return !(*this == o); }
  bool operator<(const Formula& o) const;

  bool is_quantifier() const { return kind == Kind::Exists || kind == Kind::Forall; }
  bool is_atom() const { return kind == Kind::Eq || kind == Kind::Rel; }
};

// A finite relational/functional vocabulary.  Dagger entries give, for a
// relation r, a quantifier-positive formula equivalent to ¬r; by convention
// the entry for an n-ary relation uses the reserved variables x1..xn.
struct Signature {
  std::string name;
  std::vector<std::pair<std::string, int>> functions;  // symbol, arity >= 1
  std::vector<std::string> constants;
  std::vector<std::pair<std::string, int>> relations;  // symbol, arity >= 1
  std::map<std::string, Formula> dagger;               // relation -> complement formula

  std::optional<int> function_arity(const std::string& s) const;
  std::optional<int> relation_arity(const std::string& s) const;
  bool has_constant(const std::string& s) const;
  bool declares(const std::string& s) const;

  // Throws on duplicate symbols, zero arities, or ill-formed dagger entries.
  void validate() const;

  Signature with_function(const std::string& s, int arity, const std::string& suffix) const;
  Signature with_relation(const std::string& s, int arity, const std::string& suffix) const;
  Signature with_constant(const std::string& s, const std::string& suffix) const;
};

// Builtin vocabularies.
Signature sig_ring();        // + - * (binary), constants 0 1
Signature sig_ring_p();      // ring plus the binary projector p
Signature sig_ring_pair();   // ring plus the unary predicate P
Signature sig_ring_delta();  // ring plus the unary operator delta
Signature sig_ba();          // meet join (binary), compl (unary), constants 0 1
std::optional<Signature> builtin_signature(const std::string& name);

// --- variables -------------------------------------------------------------

// Free variables in first-occurrence order.
std::vector<std::string> free_vars(const Formula& f);
std::vector<std::string> free_vars(const Term& t);
bool has_free_var(const Formula& f, const std::string& v);

// Replaces de Bruijn index 0 of a binder body with the free variable `v`
// (the inverse of binding).  `close_body` abstracts `v` back to index 0.
Formula open_body(const Formula& body, const std::string& v);
Formula close_body(const Formula& f, const std::string& v);

// Capture-safe substitution of a term for a free variable.
Term subst_free(const Term& t, const std::string& v, const Term& repl);
Formula subst_free(const Formula& f, const std::string& v, const Term& repl);

// A name based on `base` not contained in `used`; primes are appended.
std::string fresh_name(const std::string& base, const std::set<std::string>& used);

int quantifier_depth(const Formula& f);
int formula_weight(const Formula& f);  // node count, terms included

// --- parse / print ----------------------------------------------------------

// Grammar:
//   term    := var | const | (fsym term...)
//   formula := (= term term) | (rsym term...) | (not f) | (and f...) |
//              (or f...) | (imp f f) | (exists v f) | (forall v f)
// Variable tokens must not collide with declared symbols or keywords.
Term parse_term(const SExpr& e, const Signature& sig,
                const std::vector<std::string>& binders);
Formula parse_formula(const SExpr& e, const Signature& sig);
Formula parse_formula(std::string_view text, const Signature& sig);

SExpr formula_to_sexpr(const Formula& f);
std::string print_formula(const Formula& f);
std::string print_term(const Term& t);

SExpr signature_to_sexpr(const Signature& sig);
std::string print_signature(const Signature& sig);
Signature parse_signature(const SExpr& e);
Signature parse_signature(std::string_view text);

// --- transforms --------------------------------------------------------------

// Negation normal form: implications unfolded, negation pushed to atoms.
Formula to_nnf(const Formula& f);

// Prenex form.  Deterministic extraction: outside-in, left-to-right, with
// existentials pulled before universals whenever both are movable.
Formula to_prenex(const Formula& f);

// Relativization to a unary predicate P: quantifiers are bounded by P.
Formula relativize(const Formula& f, const Signature& sig, const std::string& p);

// Differential unfolding: rewrites a quantifier-free formula over a ring
// language with a unary `delta` into a plain ring formula over jet variables
// v_0, v_1, ... (v_k standing for the k-th derivative of v).
struct JetSpec {
  std::vector<std::string> vars;  // original variables, first-occurrence order
  std::vector<int> orders;        // highest derivative appearing, per variable
  std::vector<std::vector<std::string>> jet_names;  // jet_names[i][k] realizes delta^k(vars[i])
};
struct Unfolding {
  Formula formula;  // over the plain ring language
  JetSpec jets;
};
Unfolding unfold_differential_terms(const Formula& f, const Signature& sig_delta);

}  // namespace fvkit
