#include "fvkit/syntax.hpp"

#include <algorithm>
#include <cctype>

namespace fvkit {

// --- Term -------------------------------------------------------------------

Term Term::var(std::string n) {
  Term t;
  t.kind = Kind::Free;
  t.name = std::move(n);
  return t;
}

Term Term::bound(int i) {
  Term t;
  t.kind = Kind::Bound;
  t.index = i;
  return t;
}

Term Term::cnst(std::string c) {
  Term t;
  t.kind = Kind::Const;
  t.name = std::move(c);
  return t;
}

Term Term::app(std::string f, std::vector<Term> xs) {
  Term t;
  t.kind = Kind::App;
  t.name = std::move(f);
  t.args = std::move(xs);
  return t;
}

static int cmp_term(const Term& a, const Term& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  switch (a.kind) {
    case Term::Kind::Bound:
      return a.index == b.index ? 0 : (a.index < b.index ? -1 : 1);
    case Term::Kind::Free:
    case Term::Kind::Const:
      return a.name.compare(b.name) < 0 ? -1 : (a.name == b.name ? 0 : 1);
    case Term::Kind::App: {
      if (int c = a.name.compare(b.name); c != 0) return c < 0 ? -1 : 1;
      if (a.args.size() != b.args.size()) return a.args.size() < b.args.size() ? -1 : 1;
      for (size_t i = 0; i < a.args.size(); ++i)
        if (int c = cmp_term(a.args[i], b.args[i]); c != 0) return c;
      return 0;
    }
  }
  return 0;
}

bool Term::operator==(const Term& o) const { return cmp_term(*this, o) == 0; }
bool Term::operator<(const Term& o) const { return cmp_term(*this, o) < 0; }

// --- Formula ----------------------------------------------------------------

Formula Formula::eq(Term a, Term b) {
  Formula f;
  f.kind = Kind::Eq;
  f.terms = {std::move(a), std::move(b)};
  return f;
}

Formula Formula::rel(std::string r, std::vector<Term> xs) {
  Formula f;
  f.kind = Kind::Rel;
  f.sym = std::move(r);
  f.terms = std::move(xs);
  return f;
}

Formula Formula::not_(Formula g) {
  Formula f;
  f.kind = Kind::Not;
  f.subs = {std::move(g)};
  return f;
}

Formula Formula::and_(std::vector<Formula> fs) {
  Formula f;
  f.kind = Kind::And;
  f.subs = std::move(fs);
  return f;
}

Formula Formula::or_(std::vector<Formula> fs) {
  Formula f;
  f.kind = Kind::Or;
  f.subs = std::move(fs);
  return f;
}

Formula Formula::imp(Formula a, Formula b) {
  Formula f;
  f.kind = Kind::Imp;
  f.subs = {std::move(a), std::move(b)};
  return f;
}

static Formula make_quant(Formula::Kind k, std::string display, Formula raw_body) {
  Formula f;
  f.kind = k;
  f.sym = std::move(display);
  f.subs = {std::move(raw_body)};
  return f;
}

Formula Formula::exists(const std::string& v, Formula body) {
  return make_quant(Kind::Exists, v, close_body(body, v));
}

Formula Formula::forall(const std::string& v, Formula body) {
  return make_quant(Kind::Forall, v, close_body(body, v));
}

static int cmp_formula(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  // Binder display names do not take part in structural identity.
  if (a.kind == Formula::Kind::Rel)
    if (int c = a.sym.compare(b.sym); c != 0) return c < 0 ? -1 : 1;
  if (a.terms.size() != b.terms.size()) return a.terms.size() < b.terms.size() ? -1 : 1;
  for (size_t i = 0; i < a.terms.size(); ++i)
    if (int c = cmp_term(a.terms[i], b.terms[i]); c != 0) return c;
  if (a.subs.size() != b.subs.size()) return a.subs.size() < b.subs.size() ? -1 : 1;
  for (size_t i = 0; i < a.subs.size(); ++i)
    if (int c = cmp_formula(a.subs[i], b.subs[i]); c != 0) return c;
  return 0;
}

bool Formula::operator==(const Formula& o) const { return cmp_formula(*this, o) == 0; }
bool Formula::operator<(const Formula& o) const { return cmp_formula(*this, o) < 0; }

// --- Signature ----------------------------------------------------------------

std::optional<int> Signature::function_arity(const std::string& s) const {
  for (auto& [n, a] : functions)
    if (n == s) return a;
  return std::nullopt;
}

std::optional<int> Signature::relation_arity(const std::string& s) const {
  for (auto& [n, a] : relations)
    if (n == s) return a;
  return std::nullopt;
}

bool Signature::has_constant(const std::string& s) const {
  return std::find(constants.begin(), constants.end(), s) != constants.end();
}

bool Signature::declares(const std::string& s) const {
  return function_arity(s) || relation_arity(s) || has_constant(s);
}

static const std::set<std::string>& keywords() {
  static const std::set<std::string> kw = {"=", "not", "and", "or", "imp", "exists", "forall"};
  return kw;
}

static bool dagger_shape_ok(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Eq:
    case Formula::Kind::Rel:
      return true;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Exists: {
      for (auto& s : f.subs)
        if (!dagger_shape_ok(s)) return false;
      return true;
    }
    default:
      return false;  // not / imp / forall break positivity
  }
}

void Signature::validate() const {
  std::set<std::string> seen;
  auto claim = [&](const std::string& s, int arity, bool needs_arity) {
    if (s.empty()) throw Error("signature '" + name + "': empty symbol");
    if (keywords().count(s)) throw Error("signature '" + name + "': symbol '" + s + "' is a keyword");
    if (!seen.insert(s).second) throw Error("signature '" + name + "': duplicate symbol '" + s + "'");
    if (needs_arity && arity < 1)
      throw Error("signature '" + name + "': symbol '" + s + "' needs arity >= 1");
  };
  for (auto& [s, a] : functions) claim(s, a, true);
  for (auto& s : constants) claim(s, 0, false);
  for (auto& [s, a] : relations) claim(s, a, true);
  for (auto& [r, f] : dagger) {
    auto ar = relation_arity(r);
    if (!ar) throw Error("signature '" + name + "': dagger for undeclared relation '" + r + "'");
    if (!dagger_shape_ok(f))
      throw Error("signature '" + name + "': dagger for '" + r +
                  "' must avoid negation, implication and universal quantifiers");
    std::set<std::string> want;
    for (int i = 1; i <= *ar; ++i) want.insert("x" + std::to_string(i));
    auto fv = free_vars(f);
    std::set<std::string> got(fv.begin(), fv.end());
    if (got != want)
      throw Error("signature '" + name + "': dagger for '" + r + "' must use exactly x1..x" +
                  std::to_string(*ar));
  }
}

static Signature copy_with_name(const Signature& s, const std::string& suffix) {
  Signature out = s;
  out.name = s.name + suffix;
  return out;
}

Signature Signature::with_function(const std::string& s, int arity, const std::string& suffix) const {
  Signature out = copy_with_name(*this, suffix);
  out.functions.emplace_back(s, arity);
  out.validate();
  return out;
}

Signature Signature::with_relation(const std::string& s, int arity, const std::string& suffix) const {
  Signature out = copy_with_name(*this, suffix);
  out.relations.emplace_back(s, arity);
  out.validate();
  return out;
}

Signature Signature::with_constant(const std::string& s, const std::string& suffix) const {
  Signature out = copy_with_name(*this, suffix);
  out.constants.push_back(s);
  out.validate();
  return out;
}

Signature sig_ring() {
  Signature s;
  s.name = "ring";
  s.functions = {{"+", 2}, {"-", 2}, {"*", 2}};
  s.constants = {"0", "1"};
  return s;
}

Signature sig_ring_p() { return sig_ring().with_function("p", 2, "_p"); }

Signature sig_ring_pair() { return sig_ring().with_relation("P", 1, "_pair"); }

Signature sig_ring_delta() { return sig_ring().with_function("delta", 1, "_delta"); }

Signature sig_ba() {
  Signature s;
  s.name = "ba";
  s.functions = {{"meet", 2}, {"join", 2}, {"compl", 1}};
  s.constants = {"0", "1"};
  return s;
}

std::optional<Signature> builtin_signature(const std::string& name) {
  if (name == "ring") return sig_ring();
  if (name == "ring_p") return sig_ring_p();
  if (name == "ring_pair") return sig_ring_pair();
  if (name == "ring_delta") return sig_ring_delta();
  if (name == "ba") return sig_ba();
  return std::nullopt;
}

// --- variable plumbing --------------------------------------------------------

static void collect_free(const Term& t, std::vector<std::string>& out, std::set<std::string>& seen) {
  if (t.kind == Term::Kind::Free) {
    if (seen.insert(t.name).second) out.push_back(t.name);
  }
  for (auto& a : t.args) collect_free(a, out, seen);
}

static void collect_free(const Formula& f, std::vector<std::string>& out, std::set<std::string>& seen) {
  for (auto& t : f.terms) collect_free(t, out, seen);
  for (auto& s : f.subs) collect_free(s, out, seen);
}

std::vector<std::string> free_vars(const Formula& f) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  collect_free(f, out, seen);
  return out;
}

std::vector<std::string> free_vars(const Term& t) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  collect_free(t, out, seen);
  return out;
}

bool has_free_var(const Formula& f, const std::string& v) {
  for (auto& n : free_vars(f))
    if (n == v) return true;
  return false;
}

static Term open_term(const Term& t, const std::string& v, int depth) {
  switch (t.kind) {
    case Term::Kind::Bound:
      if (t.index == depth) return Term::var(v);
      if (t.index > depth) return Term::bound(t.index - 1);
      return t;
    case Term::Kind::App: {
      Term out = t;
      for (auto& a : out.args) a = open_term(a, v, depth);
      return out;
    }
    default:
      return t;
  }
}

static Formula open_rec(const Formula& f, const std::string& v, int depth) {
  Formula out = f;
  for (auto& t : out.terms) t = open_term(t, v, depth);
  int d = depth + (f.is_quantifier() ? 1 : 0);
  for (auto& s : out.subs) s = open_rec(s, v, d);
  return out;
}

Formula open_body(const Formula& body, const std::string& v) { return open_rec(body, v, 0); }

static Term close_term(const Term& t, const std::string& v, int depth) {
  switch (t.kind) {
    case Term::Kind::Free:
      if (t.name == v) return Term::bound(depth);
      return t;
    case Term::Kind::Bound:
      if (t.index >= depth) return Term::bound(t.index + 1);
      return t;
    case Term::Kind::App: {
      Term out = t;
      for (auto& a : out.args) a = close_term(a, v, depth);
      return out;
    }
    default:
      return t;
  }
}

static Formula close_rec(const Formula& f, const std::string& v, int depth) {
  Formula out = f;
  for (auto& t : out.terms) t = close_term(t, v, depth);
  int d = depth + (f.is_quantifier() ? 1 : 0);
  for (auto& s : out.subs) s = close_rec(s, v, d);
  return out;
}

Formula close_body(const Formula& f, const std::string& v) { return close_rec(f, v, 0); }

Term subst_free(const Term& t, const std::string& v, const Term& repl) {
  switch (t.kind) {
    case Term::Kind::Free:
      return t.name == v ? repl : t;
    case Term::Kind::App: {
      Term out = t;
      for (auto& a : out.args) a = subst_free(a, v, repl);
      return out;
    }
    default:
      return t;
  }
}

Formula subst_free(const Formula& f, const std::string& v, const Term& repl) {
  Formula out = f;
  for (auto& t : out.terms) t = subst_free(t, v, repl);
  for (auto& s : out.subs) s = subst_free(s, v, repl);
  return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& used) {
  std::string n = base.empty() ? "v" : base;
  while (used.count(n)) n += "'";
  return n;
}

int quantifier_depth(const Formula& f) {
  int d = 0;
  for (auto& s : f.subs) d = std::max(d, quantifier_depth(s));
  return d + (f.is_quantifier() ? 1 : 0);
}

static int term_weight(const Term& t) {
  int w = 1;
  for (auto& a : t.args) w += term_weight(a);
  return w;
}

int formula_weight(const Formula& f) {
  int w = 1;
  for (auto& t : f.terms) w += term_weight(t);
  for (auto& s : f.subs) w += formula_weight(s);
  return w;
}

// --- parsing -------------------------------------------------------------------

static bool valid_var_token(const std::string& s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '.'))
      return false;
  return true;
}

Term parse_term(const SExpr& e, const Signature& sig, const std::vector<std::string>& binders) {
  if (e.is_atom()) {
    const std::string& s = e.atom;
    for (size_t i = 0; i < binders.size(); ++i)
      if (binders[binders.size() - 1 - i] == s) return Term::bound(static_cast<int>(i));
    if (sig.has_constant(s)) return Term::cnst(s);
    if (sig.function_arity(s))
      throw ParseError("function symbol '" + s + "' used without arguments", e.line, e.col);
    if (sig.relation_arity(s))
      throw ParseError("relation symbol '" + s + "' used as a term", e.line, e.col);
    if (!valid_var_token(s))
      throw ParseError("'" + s + "' is not a constant of " + sig.name + " nor a valid variable",
                       e.line, e.col);
    return Term::var(s);
  }
  std::string h = e.head();
  if (h.empty()) throw ParseError("expected a term", e.line, e.col);
  auto ar = sig.function_arity(h);
  if (!ar) throw ParseError("unknown function symbol '" + h + "' in " + sig.name, e.line, e.col);
  if (static_cast<int>(e.size()) - 1 != *ar)
    throw ParseError("function '" + h + "' expects " + std::to_string(*ar) + " arguments", e.line,
                     e.col);
  std::vector<Term> args;
  for (size_t i = 1; i < e.size(); ++i) args.push_back(parse_term(e.at(i), sig, binders));
  return Term::app(h, std::move(args));
}

static Formula parse_formula_rec(const SExpr& e, const Signature& sig,
                                 std::vector<std::string>& binders) {
  if (!e.is_list()) throw ParseError("expected a formula", e.line, e.col);
  std::string h = e.head();
  if (h.empty()) throw ParseError("expected a formula", e.line, e.col);
  if (h == "=") {
    if (e.size() != 3) throw ParseError("'=' expects two terms", e.line, e.col);
    return Formula::eq(parse_term(e.at(1), sig, binders), parse_term(e.at(2), sig, binders));
  }
  if (h == "not") {
    if (e.size() != 2) throw ParseError("'not' expects one formula", e.line, e.col);
    return Formula::not_(parse_formula_rec(e.at(1), sig, binders));
  }
  if (h == "and" || h == "or") {
    std::vector<Formula> subs;
    for (size_t i = 1; i < e.size(); ++i) subs.push_back(parse_formula_rec(e.at(i), sig, binders));
    return h == "and" ? Formula::and_(std::move(subs)) : Formula::or_(std::move(subs));
  }
  if (h == "imp") {
    if (e.size() != 3) throw ParseError("'imp' expects two formulas", e.line, e.col);
    Formula a = parse_formula_rec(e.at(1), sig, binders);
    Formula b = parse_formula_rec(e.at(2), sig, binders);
    return Formula::imp(std::move(a), std::move(b));
  }
  if (h == "exists" || h == "forall") {
    if (e.size() != 3) throw ParseError("'" + h + "' expects a variable and a formula", e.line, e.col);
    const SExpr& v = e.at(1);
    if (!v.is_atom() || !valid_var_token(v.atom) || sig.declares(v.atom) || keywords().count(v.atom))
      throw ParseError("invalid bound variable", v.line, v.col);
    binders.push_back(v.atom);
    Formula body = parse_formula_rec(e.at(2), sig, binders);
    binders.pop_back();
    return make_quant(h == "exists" ? Formula::Kind::Exists : Formula::Kind::Forall, v.atom,
                      std::move(body));
  }
  auto ar = sig.relation_arity(h);
  if (!ar) throw ParseError("unknown connective or relation '" + h + "' in " + sig.name, e.line, e.col);
  if (static_cast<int>(e.size()) - 1 != *ar)
    throw ParseError("relation '" + h + "' expects " + std::to_string(*ar) + " arguments", e.line,
                     e.col);
  std::vector<Term> args;
  for (size_t i = 1; i < e.size(); ++i) args.push_back(parse_term(e.at(i), sig, binders));
  return Formula::rel(h, std::move(args));
}

Formula parse_formula(const SExpr& e, const Signature& sig) {
  std::vector<std::string> binders;
  return parse_formula_rec(e, sig, binders);
}

Formula parse_formula(std::string_view text, const Signature& sig) {
  return parse_formula(parse_sexpr(text), sig);
}

// --- printing -------------------------------------------------------------------

namespace {

// Names an occurrence must not collide with when choosing a binder display:
// free variables of the body, and enclosing binders that the body still
// references across this one.
void collect_body_refs(const Formula& f, int depth, std::set<int>& outer, std::set<std::string>& frees);

void collect_body_refs(const Term& t, int depth, std::set<int>& outer, std::set<std::string>& frees) {
  if (t.kind == Term::Kind::Free) frees.insert(t.name);
  if (t.kind == Term::Kind::Bound && t.index > depth) outer.insert(t.index - depth);
  for (auto& a : t.args) collect_body_refs(a, depth, outer, frees);
}

void collect_body_refs(const Formula& f, int depth, std::set<int>& outer, std::set<std::string>& frees) {
  for (auto& t : f.terms) collect_body_refs(t, depth, outer, frees);
  int d = depth + (f.is_quantifier() ? 1 : 0);
  for (auto& s : f.subs) collect_body_refs(s, d, outer, frees);
}

SExpr term_sexpr(const Term& t, const std::vector<std::string>& stack) {
  switch (t.kind) {
    case Term::Kind::Free:
    case Term::Kind::Const:
      return SExpr::make_atom(t.name);
    case Term::Kind::Bound: {
      if (t.index < 0 || t.index >= static_cast<int>(stack.size()))
        throw Error("dangling bound variable index " + std::to_string(t.index));
      return SExpr::make_atom(stack[stack.size() - 1 - t.index]);
    }
    case Term::Kind::App: {
      std::vector<SExpr> xs = {SExpr::make_atom(t.name)};
      for (auto& a : t.args) xs.push_back(term_sexpr(a, stack));
      return SExpr::make_list(std::move(xs));
    }
  }
  throw Error("unreachable term kind");
}

SExpr formula_sexpr(const Formula& f, std::vector<std::string>& stack) {
  switch (f.kind) {
    case Formula::Kind::Eq: {
      return SExpr::make_list(
          {SExpr::make_atom("="), term_sexpr(f.terms[0], stack), term_sexpr(f.terms[1], stack)});
    }
    case Formula::Kind::Rel: {
      std::vector<SExpr> xs = {SExpr::make_atom(f.sym)};
      for (auto& t : f.terms) xs.push_back(term_sexpr(t, stack));
      return SExpr::make_list(std::move(xs));
    }
    case Formula::Kind::Not:
      return SExpr::make_list({SExpr::make_atom("not"), formula_sexpr(f.subs[0], stack)});
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<SExpr> xs = {SExpr::make_atom(f.kind == Formula::Kind::And ? "and" : "or")};
      for (auto& s : f.subs) xs.push_back(formula_sexpr(s, stack));
      return SExpr::make_list(std::move(xs));
    }
    case Formula::Kind::Imp:
      return SExpr::make_list({SExpr::make_atom("imp"), formula_sexpr(f.subs[0], stack),
                               formula_sexpr(f.subs[1], stack)});
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      std::set<int> outer;
      std::set<std::string> forbidden;
      collect_body_refs(f.subs[0], 0, outer, forbidden);
      for (int off : outer) {
        // offset 1 = the binder enclosing this one
        int pos = static_cast<int>(stack.size()) - off;
        if (pos >= 0) forbidden.insert(stack[pos]);
      }
      std::string name = fresh_name(f.sym, forbidden);
      stack.push_back(name);
      SExpr body = formula_sexpr(f.subs[0], stack);
      stack.pop_back();
      return SExpr::make_list({SExpr::make_atom(f.kind == Formula::Kind::Exists ? "exists" : "forall"),
                               SExpr::make_atom(name), std::move(body)});
    }
  }
  throw Error("unreachable formula kind");
}

}  // namespace

SExpr formula_to_sexpr(const Formula& f) {
  std::vector<std::string> stack;
  return formula_sexpr(f, stack);
}

std::string print_formula(const Formula& f) { return to_text(formula_to_sexpr(f)); }

std::string print_term(const Term& t) {
  std::vector<std::string> stack;
  return to_text(term_sexpr(t, stack));
}

SExpr signature_to_sexpr(const Signature& sig) {
  std::vector<SExpr> xs = {SExpr::make_atom("signature"), SExpr::make_atom(sig.name)};
  if (!sig.functions.empty()) {
    std::vector<SExpr> fs = {SExpr::make_atom("functions")};
    for (auto& [n, a] : sig.functions)
      fs.push_back(SExpr::make_list({SExpr::make_atom(n), SExpr::make_atom(std::to_string(a))}));
    xs.push_back(SExpr::make_list(std::move(fs)));
  }
  if (!sig.constants.empty()) {
    std::vector<SExpr> cs = {SExpr::make_atom("constants")};
    for (auto& n : sig.constants) cs.push_back(SExpr::make_atom(n));
    xs.push_back(SExpr::make_list(std::move(cs)));
  }
  if (!sig.relations.empty()) {
    std::vector<SExpr> rs = {SExpr::make_atom("relations")};
    for (auto& [n, a] : sig.relations)
      rs.push_back(SExpr::make_list({SExpr::make_atom(n), SExpr::make_atom(std::to_string(a))}));
    xs.push_back(SExpr::make_list(std::move(rs)));
  }
  if (!sig.dagger.empty()) {
    std::vector<SExpr> ds = {SExpr::make_atom("dagger")};
    for (auto& [r, f] : sig.dagger)
      ds.push_back(SExpr::make_list({SExpr::make_atom(r), formula_to_sexpr(f)}));
    xs.push_back(SExpr::make_list(std::move(ds)));
  }
  return SExpr::make_list(std::move(xs));
}

std::string print_signature(const Signature& sig) { return to_text(signature_to_sexpr(sig)); }

Signature parse_signature(const SExpr& e) {
  if (e.head() != "signature" || e.size() < 2 || !e.at(1).is_atom())
    throw ParseError("expected (signature <name> ...)", e.line, e.col);
  Signature sig;
  sig.name = e.at(1).atom;
  std::vector<const SExpr*> dagger_entries;
  for (size_t i = 2; i < e.size(); ++i) {
    const SExpr& sec = e.at(i);
    std::string h = sec.head();
    if (h == "functions" || h == "relations") {
      for (size_t j = 1; j < sec.size(); ++j) {
        const SExpr& d = sec.at(j);
        if (!d.is_list() || d.size() != 2 || !d.at(0).is_atom())
          throw ParseError("expected (<symbol> <arity>)", d.line, d.col);
        auto& dst = h == "functions" ? sig.functions : sig.relations;
        dst.emplace_back(d.at(0).atom, d.at(1).as_int());
      }
    } else if (h == "constants") {
      for (size_t j = 1; j < sec.size(); ++j) {
        if (!sec.at(j).is_atom()) throw ParseError("constants must be atoms", sec.line, sec.col);
        sig.constants.push_back(sec.at(j).atom);
      }
    } else if (h == "dagger") {
      for (size_t j = 1; j < sec.size(); ++j) dagger_entries.push_back(&sec.at(j));
    } else {
      throw ParseError("unknown signature section '" + h + "'", sec.line, sec.col);
    }
  }
  for (const SExpr* d : dagger_entries) {
    if (!d->is_list() || d->size() != 2 || !d->at(0).is_atom())
      throw ParseError("expected (<relation> <formula>)", d->line, d->col);
    sig.dagger.emplace(d->at(0).atom, parse_formula(d->at(1), sig));
  }
  sig.validate();
  return sig;
}

Signature parse_signature(std::string_view text) { return parse_signature(parse_sexpr(text)); }

// --- negation normal form ---------------------------------------------------------

static Formula nnf_rec(const Formula& f, bool neg) {
  switch (f.kind) {
    case Formula::Kind::Eq:
    case Formula::Kind::Rel:
      return neg ? Formula::not_(f) : f;
    case Formula::Kind::Not:
      return nnf_rec(f.subs[0], !neg);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      bool flip = (f.kind == Formula::Kind::Or) != neg;  // true -> or
      std::vector<Formula> subs;
      for (auto& s : f.subs) subs.push_back(nnf_rec(s, neg));
      return flip ? Formula::or_(std::move(subs)) : Formula::and_(std::move(subs));
    }
    case Formula::Kind::Imp: {
      if (neg)
        return Formula::and_({nnf_rec(f.subs[0], false), nnf_rec(f.subs[1], true)});
      return Formula::or_({nnf_rec(f.subs[0], true), nnf_rec(f.subs[1], false)});
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      bool ex = (f.kind == Formula::Kind::Exists) != neg;
      return make_quant(ex ? Formula::Kind::Exists : Formula::Kind::Forall, f.sym,
                        nnf_rec(f.subs[0], neg));
    }
  }
  throw Error("unreachable formula kind");
}

Formula to_nnf(const Formula& f) { return nnf_rec(f, false); }

// --- prenex form ---------------------------------------------------------------

namespace {

struct PrefixItem {
  bool forall;
  std::string name;
};

struct PrenexPart {
  std::vector<PrefixItem> prefix;
  Formula matrix;
};

// Merges prefixes left-to-right; when several heads are available the
// leftmost existential wins, then the leftmost head.
std::vector<PrefixItem> merge_prefixes(std::vector<std::vector<PrefixItem>> parts) {
  std::vector<PrefixItem> out;
  std::vector<size_t> pos(parts.size(), 0);
  for (;;) {
    int pick = -1;
    for (size_t i = 0; i < parts.size(); ++i) {
      if (pos[i] >= parts[i].size()) continue;
      if (!parts[i][pos[i]].forall) {
        pick = static_cast<int>(i);
        break;
      }
      if (pick < 0) pick = static_cast<int>(i);
    }
    if (pick < 0) break;
    out.push_back(parts[pick][pos[pick]]);
    ++pos[pick];
  }
  return out;
}

// `pol` counts enclosing negations mod 2; quantifier kinds are decided at the
// quantifier with the outer polarity, which makes extraction outside-in.
PrenexPart prenex_rec(const Formula& f, bool pol, std::set<std::string>& used) {
  switch (f.kind) {
    case Formula::Kind::Eq:
    case Formula::Kind::Rel:
      return {{}, f};
    case Formula::Kind::Not: {
      PrenexPart p = prenex_rec(f.subs[0], !pol, used);
      return {std::move(p.prefix), Formula::not_(std::move(p.matrix))};
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<std::vector<PrefixItem>> prefixes;
      std::vector<Formula> matrices;
      for (auto& s : f.subs) {
        PrenexPart p = prenex_rec(s, pol, used);
        prefixes.push_back(std::move(p.prefix));
        matrices.push_back(std::move(p.matrix));
      }
      Formula m = f.kind == Formula::Kind::And ? Formula::and_(std::move(matrices))
                                               : Formula::or_(std::move(matrices));
      return {merge_prefixes(std::move(prefixes)), std::move(m)};
    }
    case Formula::Kind::Imp: {
      PrenexPart a = prenex_rec(f.subs[0], !pol, used);
      PrenexPart b = prenex_rec(f.subs[1], pol, used);
      std::vector<std::vector<PrefixItem>> prefixes;
      prefixes.push_back(std::move(a.prefix));
      prefixes.push_back(std::move(b.prefix));
      return {merge_prefixes(std::move(prefixes)),
              Formula::imp(std::move(a.matrix), std::move(b.matrix))};
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      bool eff_forall = (f.kind == Formula::Kind::Forall) != pol;
      std::string n = fresh_name(f.sym, used);
      used.insert(n);
      PrenexPart p = prenex_rec(open_body(f.subs[0], n), pol, used);
      std::vector<PrefixItem> prefix = {{eff_forall, n}};
      prefix.insert(prefix.end(), p.prefix.begin(), p.prefix.end());
      return {std::move(prefix), std::move(p.matrix)};
    }
  }
  throw Error("unreachable formula kind");
}

}  // namespace

Formula to_prenex(const Formula& f) {
  std::set<std::string> used;
  for (auto& v : free_vars(f)) used.insert(v);
  PrenexPart p = prenex_rec(f, false, used);
  Formula out = std::move(p.matrix);
  for (auto it = p.prefix.rbegin(); it != p.prefix.rend(); ++it)
    out = it->forall ? Formula::forall(it->name, std::move(out))
                     : Formula::exists(it->name, std::move(out));
  return out;
}

// --- relativization ---------------------------------------------------------------

namespace {

Formula relativize_rec(const Formula& f, const std::string& p) {
  switch (f.kind) {
    case Formula::Kind::Eq:
    case Formula::Kind::Rel:
      return f;
    case Formula::Kind::Not:
      return Formula::not_(relativize_rec(f.subs[0], p));
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Imp: {
      Formula out = f;
      for (auto& s : out.subs) s = relativize_rec(s, p);
      return out;
    }
    case Formula::Kind::Exists: {
      Formula guard = Formula::rel(p, {Term::bound(0)});
      Formula body = Formula::and_({std::move(guard), relativize_rec(f.subs[0], p)});
      return make_quant(Formula::Kind::Exists, f.sym, std::move(body));
    }
    case Formula::Kind::Forall: {
      Formula guard = Formula::rel(p, {Term::bound(0)});
      Formula body = Formula::imp(std::move(guard), relativize_rec(f.subs[0], p));
      return make_quant(Formula::Kind::Forall, f.sym, std::move(body));
    }
  }
  throw Error("unreachable formula kind");
}

}  // namespace

Formula relativize(const Formula& f, const Signature& sig, const std::string& p) {
  if (sig.relation_arity(p) != 1)
    throw Error("relativize: '" + p + "' is not a unary relation of " + sig.name);
  return relativize_rec(f, p);
}

// --- differential unfolding ----------------------------------------------------------

namespace {

struct JetState {
  std::vector<std::string> vars;
  std::map<std::string, int> order;

  void see(const std::string& v, int k) {
    auto it = order.find(v);
    if (it == order.end()) {
      vars.push_back(v);
      order[v] = k;
    } else {
      it->second = std::max(it->second, k);
    }
  }
};

std::string jet_name(const std::string& v, int k) { return v + "_" + std::to_string(k); }

Term strip_delta(const Term& t, JetState& st);

// delta^k applied to a term, unfolded by additivity and the Leibniz rule.
Term apply_delta(const Term& t, int k, JetState& st) {
  if (k == 0) return strip_delta(t, st);
  switch (t.kind) {
    case Term::Kind::Free:
      st.see(t.name, k);
      return Term::var(jet_name(t.name, k));
    case Term::Kind::Bound:
      throw Error("differential unfolding expects a quantifier-free formula");
    case Term::Kind::Const:
      if (t.name == "0" || t.name == "1") return Term::cnst("0");
      throw Error("cannot differentiate constant '" + t.name + "'");
    case Term::Kind::App: {
      if (t.name == "delta") return apply_delta(t.args[0], k + 1, st);
      if (t.name == "+" || t.name == "-")
        return Term::app(t.name, {apply_delta(t.args[0], k, st), apply_delta(t.args[1], k, st)});
      if (t.name == "*") {
        // one Leibniz step, then recurse with k-1
        Term once = Term::app(
            "+", {Term::app("*", {Term::app("delta", {t.args[0]}), t.args[1]}),
                  Term::app("*", {t.args[0], Term::app("delta", {t.args[1]})})});
        return apply_delta(once, k - 1, st);
      }
      throw Error("cannot differentiate through function '" + t.name + "'");
    }
  }
  throw Error("unreachable term kind");
}

Term strip_delta(const Term& t, JetState& st) {
  switch (t.kind) {
    case Term::Kind::Free:
      st.see(t.name, 0);
      return Term::var(jet_name(t.name, 0));
    case Term::Kind::Bound:
      throw Error("differential unfolding expects a quantifier-free formula");
    case Term::Kind::Const:
      return t;
    case Term::Kind::App: {
      if (t.name == "delta") return apply_delta(t.args[0], 1, st);
      Term out = t;
      for (auto& a : out.args) a = strip_delta(a, st);
      return out;
    }
  }
  throw Error("unreachable term kind");
}

Formula strip_delta(const Formula& f, JetState& st) {
  if (f.is_quantifier()) throw Error("differential unfolding expects a quantifier-free formula");
  Formula out = f;
  for (auto& t : out.terms) t = strip_delta(t, st);
  for (auto& s : out.subs) s = strip_delta(s, st);
  return out;
}

}  // namespace

Unfolding unfold_differential_terms(const Formula& f, const Signature& sig_delta) {
  if (!sig_delta.function_arity("delta"))
    throw Error("signature '" + sig_delta.name + "' has no 'delta' operator");
  JetState st;
  Unfolding out;
  out.formula = strip_delta(f, st);
  out.jets.vars = st.vars;
  for (auto& v : st.vars) {
    int m = st.order[v];
    out.jets.orders.push_back(m);
    std::vector<std::string> names;
    for (int k = 0; k <= m; ++k) names.push_back(jet_name(v, k));
    out.jets.jet_names.push_back(std::move(names));
  }
  return out;
}

}  // namespace fvkit
