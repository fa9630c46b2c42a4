#include "fvkit/fv.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace fvkit {

// --- BAFormula basics ---------------------------------------------------------------

BAFormula BAFormula::eq_one(int v) {
  BAFormula f;
  f.kind = Kind::EqOne;
  f.var = v;
  return f;
}

BAFormula BAFormula::eq_zero(int v) {
  BAFormula f;
  f.kind = Kind::EqZero;
  f.var = v;
  return f;
}

BAFormula BAFormula::not_(BAFormula g) {
  BAFormula f;
  f.kind = Kind::Not;
  f.subs.push_back(std::move(g));
  return f;
}

BAFormula BAFormula::and_(std::vector<BAFormula> fs) {
  BAFormula f;
  f.kind = Kind::And;
  f.subs = std::move(fs);
  return f;
}

BAFormula BAFormula::part(int m, std::vector<int> vars, BAFormula inner) {
  if (m < 0 || m > 20) throw Error("ba formula: part arity out of range");
  if (vars.size() != (size_t{1} << m))
    throw Error("ba formula: part needs one variable per subset mask");
  BAFormula f;
  f.kind = Kind::Part;
  f.part_arity = m;
  f.part_vars = std::move(vars);
  f.subs.push_back(std::move(inner));
  return f;
}

bool BAFormula::operator==(const BAFormula& o) const {
  return kind == o.kind && var == o.var && part_arity == o.part_arity &&
         part_vars == o.part_vars && subs == o.subs;
}

namespace {

// remaps outer-scope variable references; part inner formulas use local slots
// and are left alone
void remap_vars(BAFormula& f, const std::vector<int>& remap) {
  switch (f.kind) {
    case BAFormula::Kind::EqOne:
    case BAFormula::Kind::EqZero:
      f.var = remap.at(static_cast<size_t>(f.var));
      break;
    case BAFormula::Kind::Not:
    case BAFormula::Kind::And:
      for (auto& s : f.subs) remap_vars(s, remap);
      break;
    case BAFormula::Kind::Part:
      for (auto& v : f.part_vars) v = remap.at(static_cast<size_t>(v));
      break;
  }
}

void shift_vars(BAFormula& f, int off) {
  switch (f.kind) {
    case BAFormula::Kind::EqOne:
    case BAFormula::Kind::EqZero:
      f.var += off;
      break;
    case BAFormula::Kind::Not:
    case BAFormula::Kind::And:
      for (auto& s : f.subs) shift_vars(s, off);
      break;
    case BAFormula::Kind::Part:
      for (auto& v : f.part_vars) v += off;
      break;
  }
}

void check_scoped(const BAFormula& f, int scope) {
  switch (f.kind) {
    case BAFormula::Kind::EqOne:
    case BAFormula::Kind::EqZero:
      if (f.var < 0 || f.var >= scope)
        throw Error("determining sequence: designated-variable index out of range");
      break;
    case BAFormula::Kind::Not:
      if (f.subs.size() != 1) throw Error("ba formula: not takes one subformula");
      check_scoped(f.subs[0], scope);
      break;
    case BAFormula::Kind::And:
      for (const auto& s : f.subs) check_scoped(s, scope);
      break;
    case BAFormula::Kind::Part:
      if (f.subs.size() != 1) throw Error("ba formula: part takes one inner formula");
      if (f.part_vars.size() != (size_t{1} << f.part_arity))
        throw Error("ba formula: part needs one variable per subset mask");
      for (int v : f.part_vars)
        if (v < 0 || v >= scope)
          throw Error("determining sequence: designated-variable index out of range");
      check_scoped(f.subs[0], f.part_arity);
      break;
  }
}

}  // namespace

void DeterminingSequence::validate() const {
  check_scoped(phi_star, static_cast<int>(psis.size()));
  std::set<std::string> declared(vars.begin(), vars.end());
  for (const auto& psi : psis)
    for (const auto& v : free_vars(psi))
      if (!declared.count(v))
        throw Error("determining sequence: psi mentions undeclared variable " + v);
}

// --- compilation --------------------------------------------------------------------

namespace {

std::string open_quantifier(const Formula& q, Formula& body_out) {
  auto fv = free_vars(q);
  std::set<std::string> used(fv.begin(), fv.end());
  std::string v = fresh_name(q.sym.empty() ? "u" : q.sym, used);
  body_out = open_body(q.subs[0], v);
  return v;
}

}  // namespace

Formula normalize_basis(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::Eq:
    case K::Rel:
      return f;
    case K::Not:
      return Formula::not_(normalize_basis(f.subs[0]));
    case K::And: {
      std::vector<Formula> subs;
      for (const auto& s : f.subs) subs.push_back(normalize_basis(s));
      return Formula::and_(std::move(subs));
    }
    case K::Or: {
      std::vector<Formula> subs;
      for (const auto& s : f.subs) subs.push_back(Formula::not_(normalize_basis(s)));
      return Formula::not_(Formula::and_(std::move(subs)));
    }
    case K::Imp: {
      std::vector<Formula> subs;
      subs.push_back(normalize_basis(f.subs[0]));
      subs.push_back(Formula::not_(normalize_basis(f.subs[1])));
      return Formula::not_(Formula::and_(std::move(subs)));
    }
    case K::Exists: {
      Formula body;
      std::string v = open_quantifier(f, body);
      return Formula::exists(v, normalize_basis(body));
    }
    case K::Forall: {
      Formula body;
      std::string v = open_quantifier(f, body);
      return Formula::not_(Formula::exists(v, Formula::not_(normalize_basis(body))));
    }
  }
  throw Error("normalize_basis: unknown formula kind");
}

namespace {

struct RawDet {
  BAFormula phi;
  std::vector<Formula> psis;
};

void dedup_psis(RawDet& d) {
  std::map<std::string, int> seen;
  std::vector<int> remap(d.psis.size(), -1);
  std::vector<Formula> out;
  for (size_t i = 0; i < d.psis.size(); ++i) {
    std::string key = print_formula(d.psis[i]);
    auto it = seen.find(key);
    if (it != seen.end()) {
      remap[i] = it->second;
    } else {
      remap[i] = static_cast<int>(out.size());
      seen[key] = remap[i];
      out.push_back(d.psis[i]);
    }
  }
  remap_vars(d.phi, remap);
  d.psis = std::move(out);
}

RawDet compile_rec(const Formula& f, const FvOptions& opt) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::Eq:
    case K::Rel:
      return {BAFormula::eq_one(0), {f}};
    case K::Not: {
      RawDet r = compile_rec(f.subs[0], opt);
      r.phi = BAFormula::not_(std::move(r.phi));
      return r;
    }
    case K::And: {
      RawDet acc;
      std::vector<BAFormula> parts;
      for (const auto& s : f.subs) {
        RawDet r = compile_rec(s, opt);
        shift_vars(r.phi, static_cast<int>(acc.psis.size()));
        parts.push_back(std::move(r.phi));
        for (auto& psi : r.psis) acc.psis.push_back(std::move(psi));
      }
      acc.phi = BAFormula::and_(std::move(parts));
      return acc;
    }
    case K::Exists: {
      Formula body;
      std::string u = open_quantifier(f, body);
      RawDet r = compile_rec(body, opt);
      if (opt.dedup) dedup_psis(r);
      int l = static_cast<int>(r.psis.size());
      if (l > opt.max_psis)
        throw Error("fv_compile: psi list length " + std::to_string(l) +
                    " exceeds the cap " + std::to_string(opt.max_psis) +
                    " at an exists-step");
      std::vector<Formula> chis;
      std::vector<int> idx;
      for (int s = 0; s < (1 << l); ++s) {
        std::vector<Formula> lits;
        for (int i = 0; i < l; ++i)
          lits.push_back((s >> i & 1) ? r.psis[i] : Formula::not_(r.psis[i]));
        chis.push_back(Formula::exists(u, Formula::and_(std::move(lits))));
        idx.push_back(s);
      }
      return {BAFormula::part(l, std::move(idx), std::move(r.phi)), std::move(chis)};
    }
    default:
      throw Error("fv_compile: formula not in the not/and/exists basis");
  }
}

}  // namespace

DeterminingSequence fv_compile(const Formula& f, const FvOptions& opt) {
  if (opt.max_psis < 1 || opt.max_psis > 20)
    throw Error("fv_compile: psi cap must lie in 1..20");
  DeterminingSequence ds;
  ds.vars = free_vars(f);
  RawDet r = compile_rec(normalize_basis(f), opt);
  ds.phi_star = std::move(r.phi);
  ds.psis = std::move(r.psis);
  ds.validate();
  return ds;
}

// --- evaluation ---------------------------------------------------------------------

bool ba_eval(const BAFormula& phi, const std::vector<unsigned>& sets, int x_count) {
  if (x_count < 0 || x_count > 30) throw Error("ba_eval: index-set size out of range");
  const unsigned full = (x_count == 30) ? 0x3fffffffu : (1u << x_count) - 1u;
  using K = BAFormula::Kind;
  switch (phi.kind) {
    case K::EqOne:
      if (phi.var < 0 || static_cast<size_t>(phi.var) >= sets.size())
        throw Error("ba_eval: variable index out of range");
      return (sets[static_cast<size_t>(phi.var)] & full) == full;
    case K::EqZero:
      if (phi.var < 0 || static_cast<size_t>(phi.var) >= sets.size())
        throw Error("ba_eval: variable index out of range");
      return (sets[static_cast<size_t>(phi.var)] & full) == 0;
    case K::Not:
      return !ba_eval(phi.subs[0], sets, x_count);
    case K::And:
      for (const auto& s : phi.subs)
        if (!ba_eval(s, sets, x_count)) return false;
      return true;
    case K::Part: {
      const int m = phi.part_arity;
      const int n_subsets = 1 << m;
      // labels available per coordinate: S is usable at x iff x lies in the
      // outer set bounding the piece b_S
      std::vector<std::vector<int>> avail(static_cast<size_t>(x_count));
      for (int x = 0; x < x_count; ++x) {
        for (int s = 0; s < n_subsets; ++s) {
          int v = phi.part_vars[static_cast<size_t>(s)];
          if (v < 0 || static_cast<size_t>(v) >= sets.size())
            throw Error("ba_eval: variable index out of range");
          if (sets[static_cast<size_t>(v)] >> x & 1) avail[static_cast<size_t>(x)].push_back(s);
        }
        if (avail[static_cast<size_t>(x)].empty()) return false;
      }
      std::vector<unsigned> w(static_cast<size_t>(m), 0);
      std::function<bool(int)> dfs = [&](int x) -> bool {
        if (x == x_count) return ba_eval(phi.subs[0], w, x_count);
        for (int s : avail[static_cast<size_t>(x)]) {
          for (int i = 0; i < m; ++i)
            if (s >> i & 1) w[static_cast<size_t>(i)] |= 1u << x;
          bool ok = dfs(x + 1);
          for (int i = 0; i < m; ++i)
            if (s >> i & 1) w[static_cast<size_t>(i)] &= ~(1u << x);
          if (ok) return true;
        }
        return false;
      };
      return dfs(0);
    }
  }
  throw Error("ba_eval: unknown node kind");
}

bool fv_eval(const BooleanProduct& A, const DeterminingSequence& ds,
             const std::vector<std::vector<int>>& args) {
  ds.validate();
  if (args.size() != ds.vars.size())
    throw Error("fv_eval: expected " + std::to_string(ds.vars.size()) +
                " designated arguments, got " + std::to_string(args.size()));
  std::map<std::string, const std::vector<int>*> by_name;
  for (size_t i = 0; i < ds.vars.size(); ++i) by_name[ds.vars[i]] = &args[i];
  std::vector<unsigned> masks;
  for (const auto& psi : ds.psis) {
    std::vector<std::vector<int>> psi_args;
    for (const auto& v : free_vars(psi)) psi_args.push_back(*by_name.at(v));
    masks.push_back(truth_mask(A, psi, psi_args));
  }
  return ba_eval(ds.phi_star, masks, A.index_count());
}

FvVerifyReport fv_verify(const BooleanProduct& A, const Formula& f, const FvOptions& opt) {
  DeterminingSequence ds = fv_compile(f, opt);
  const int var_count = static_cast<int>(ds.vars.size());
  const int k = A.index_count();
  const int m = static_cast<int>(A.carrier.size());

  FvVerifyReport rep;
  rep.psi_count = ds.psis.size();

  FiniteStructure S = A.to_structure();
  ValuationTable direct = satisfying_table(S, f, ds.vars);

  // per-factor psi tables over the full designated-variable tuple
  std::vector<std::vector<std::vector<char>>> tab(static_cast<size_t>(k));
  for (int x = 0; x < k; ++x)
    for (const auto& psi : ds.psis)
      tab[static_cast<size_t>(x)].push_back(
          satisfying_table(A.factors[static_cast<size_t>(x)], psi, ds.vars).bits);

  long long total = 1;
  for (int j = 0; j < var_count; ++j) total *= m;

  std::vector<int> v(static_cast<size_t>(var_count), 0);
  std::vector<unsigned> masks(ds.psis.size());
  for (long long lin = 0; lin < total; ++lin) {
    std::fill(masks.begin(), masks.end(), 0u);
    for (int x = 0; x < k; ++x) {
      const int n = A.factors[static_cast<size_t>(x)].size;
      long long idx = 0;
      for (int j = 0; j < var_count; ++j)
        idx = idx * n + A.carrier[static_cast<size_t>(v[static_cast<size_t>(j)])]
                                 [static_cast<size_t>(x)];
      const auto& rows = tab[static_cast<size_t>(x)];
      for (size_t i = 0; i < masks.size(); ++i)
        masks[i] |= static_cast<unsigned>(rows[i][static_cast<size_t>(idx)] != 0) << x;
    }
    bool transfer = ba_eval(ds.phi_star, masks, k);
    bool direct_v = direct.bits[static_cast<size_t>(lin)] != 0;
    ++rep.assignments;
    if (transfer != direct_v) {
      ++rep.disagreements;
      if (rep.items.size() < 16) rep.items.push_back({v, direct_v, transfer});
    }
    for (int j = var_count - 1; j >= 0; --j) {
      if (++v[static_cast<size_t>(j)] < m) break;
      v[static_cast<size_t>(j)] = 0;
    }
  }
  return rep;
}

// --- quantified form of the partition construct ---------------------------------------

namespace {

int ba_top_arity(const BAFormula& f) {
  switch (f.kind) {
    case BAFormula::Kind::EqOne:
    case BAFormula::Kind::EqZero:
      return f.var + 1;
    case BAFormula::Kind::Not:
    case BAFormula::Kind::And: {
      int n = 0;
      for (const auto& s : f.subs) n = std::max(n, ba_top_arity(s));
      return n;
    }
    case BAFormula::Kind::Part: {
      int n = 0;
      for (int v : f.part_vars) n = std::max(n, v + 1);
      return n;
    }
  }
  return 0;
}

Formula quantified_rec(const BAFormula& phi, const std::vector<Term>& env,
                       std::set<std::string>& used) {
  using K = BAFormula::Kind;
  switch (phi.kind) {
    case K::EqOne:
      return Formula::eq(env.at(static_cast<size_t>(phi.var)), Term::cnst("1"));
    case K::EqZero:
      return Formula::eq(env.at(static_cast<size_t>(phi.var)), Term::cnst("0"));
    case K::Not:
      return Formula::not_(quantified_rec(phi.subs[0], env, used));
    case K::And: {
      std::vector<Formula> subs;
      for (const auto& s : phi.subs) subs.push_back(quantified_rec(s, env, used));
      return Formula::and_(std::move(subs));
    }
    case K::Part: {
      const int m = phi.part_arity;
      const int n_subsets = 1 << m;
      std::vector<std::string> names;
      std::vector<Term> b;
      for (int s = 0; s < n_subsets; ++s) {
        std::string nm = fresh_name("b" + std::to_string(s), used);
        used.insert(nm);
        names.push_back(nm);
        b.push_back(Term::var(nm));
      }
      std::vector<Term> w;
      for (int i = 0; i < m; ++i) {
        Term t = Term::cnst("0");
        bool first = true;
        for (int s = 0; s < n_subsets; ++s) {
          if (!(s >> i & 1)) continue;
          t = first ? b[static_cast<size_t>(s)]
                    : Term::app("join", {t, b[static_cast<size_t>(s)]});
          first = false;
        }
        w.push_back(t);
      }
      std::vector<Formula> conj;
      Term cover = b[0];
      for (int s = 1; s < n_subsets; ++s) cover = Term::app("join", {cover, b[static_cast<size_t>(s)]});
      conj.push_back(Formula::eq(cover, Term::cnst("1")));
      for (int s = 0; s < n_subsets; ++s)
        for (int t = s + 1; t < n_subsets; ++t)
          conj.push_back(Formula::eq(
              Term::app("meet", {b[static_cast<size_t>(s)], b[static_cast<size_t>(t)]}),
              Term::cnst("0")));
      for (int s = 0; s < n_subsets; ++s)
        conj.push_back(Formula::eq(
            Term::app("meet", {b[static_cast<size_t>(s)],
                               env.at(static_cast<size_t>(phi.part_vars[static_cast<size_t>(s)]))}),
            b[static_cast<size_t>(s)]));
      conj.push_back(quantified_rec(phi.subs[0], w, used));
      Formula body = Formula::and_(std::move(conj));
      for (int s = n_subsets - 1; s >= 0; --s)
        body = Formula::exists(names[static_cast<size_t>(s)], body);
      return body;
    }
  }
  throw Error("ba formula: unknown node kind");
}

}  // namespace

Formula ba_to_quantified(const BAFormula& phi) {
  int l = ba_top_arity(phi);
  std::vector<Term> env;
  std::set<std::string> used;
  for (int i = 0; i < l; ++i) {
    std::string nm = "z" + std::to_string(i);
    used.insert(nm);
    env.push_back(Term::var(nm));
  }
  return quantified_rec(phi, env, used);
}

// --- parse / print --------------------------------------------------------------------

SExpr ba_to_sexpr(const BAFormula& phi) {
  using K = BAFormula::Kind;
  switch (phi.kind) {
    case K::EqOne:
    case K::EqZero:
      return SExpr::make_list({SExpr::make_atom("="),
                               SExpr::make_atom("z" + std::to_string(phi.var)),
                               SExpr::make_atom(phi.kind == K::EqOne ? "1" : "0")});
    case K::Not:
      return SExpr::make_list({SExpr::make_atom("not"), ba_to_sexpr(phi.subs[0])});
    case K::And: {
      std::vector<SExpr> xs{SExpr::make_atom("and")};
      for (const auto& s : phi.subs) xs.push_back(ba_to_sexpr(s));
      return SExpr::make_list(std::move(xs));
    }
    case K::Part: {
      std::vector<SExpr> idx;
      for (int v : phi.part_vars) idx.push_back(SExpr::make_atom(std::to_string(v)));
      return SExpr::make_list({SExpr::make_atom("part"),
                               SExpr::make_atom(std::to_string(phi.part_arity)),
                               SExpr::make_list(std::move(idx)), ba_to_sexpr(phi.subs[0])});
    }
  }
  throw Error("ba formula: unknown node kind");
}

namespace {

int parse_z_index(const SExpr& e) {
  if (!e.is_atom() || e.atom.size() < 2 || e.atom.size() > 8 || e.atom[0] != 'z')
    throw ParseError("ba formula: expected a designated variable zK", e.line, e.col);
  for (size_t i = 1; i < e.atom.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(e.atom[i])))
      throw ParseError("ba formula: expected a designated variable zK", e.line, e.col);
  return std::stoi(e.atom.substr(1));
}

}  // namespace

BAFormula parse_ba_formula(const SExpr& e) {
  if (!e.is_list())
    throw ParseError("ba formula: expected a list", e.line, e.col);
  std::string h = e.head();
  if (h == "=") {
    if (e.size() != 3) throw ParseError("ba formula: = takes zK and 0 or 1", e.line, e.col);
    int v = parse_z_index(e.at(1));
    const SExpr& rhs = e.at(2);
    if (rhs.is_atom() && rhs.atom == "1") return BAFormula::eq_one(v);
    if (rhs.is_atom() && rhs.atom == "0") return BAFormula::eq_zero(v);
    throw ParseError("ba formula: = compares against 0 or 1", rhs.line, rhs.col);
  }
  if (h == "not") {
    if (e.size() != 2) throw ParseError("ba formula: not takes one subformula", e.line, e.col);
    return BAFormula::not_(parse_ba_formula(e.at(1)));
  }
  if (h == "and") {
    std::vector<BAFormula> subs;
    for (size_t i = 1; i < e.size(); ++i) subs.push_back(parse_ba_formula(e.at(i)));
    return BAFormula::and_(std::move(subs));
  }
  if (h == "part") {
    if (e.size() != 4)
      throw ParseError("ba formula: part takes arity, variable list, inner formula",
                       e.line, e.col);
    int m = e.at(1).as_int();
    if (m < 0 || m > 20) throw ParseError("ba formula: part arity out of range",
                                          e.at(1).line, e.at(1).col);
    const SExpr& lst = e.at(2);
    if (!lst.is_list() || lst.size() != (size_t{1} << m))
      throw ParseError("ba formula: part needs one variable per subset mask",
                       lst.line, lst.col);
    std::vector<int> idx;
    for (size_t i = 0; i < lst.size(); ++i) idx.push_back(lst.at(i).as_int());
    return BAFormula::part(m, std::move(idx), parse_ba_formula(e.at(3)));
  }
  throw ParseError("ba formula: unknown form " + h, e.line, e.col);
}

BAFormula parse_ba_formula(std::string_view text) {
  return parse_ba_formula(parse_sexpr(text));
}

std::string print_ba_formula(const BAFormula& phi) { return to_text(ba_to_sexpr(phi)); }

SExpr ds_to_sexpr(const DeterminingSequence& ds) {
  std::vector<SExpr> vars{SExpr::make_atom("vars")};
  for (const auto& v : ds.vars) vars.push_back(SExpr::make_atom(v));
  std::vector<SExpr> psis{SExpr::make_atom("psis")};
  for (const auto& psi : ds.psis) psis.push_back(formula_to_sexpr(psi));
  return SExpr::make_list(
      {SExpr::make_atom("ds"), SExpr::make_list(std::move(vars)),
       SExpr::make_list({SExpr::make_atom("phi-star"), ba_to_sexpr(ds.phi_star)}),
       SExpr::make_list(std::move(psis))});
}

DeterminingSequence parse_ds(const SExpr& e, const Signature& sig) {
  if (!e.is_list() || e.head() != "ds" || e.size() != 4)
    throw ParseError("determining sequence: expected (ds (vars ...) (phi-star ...) (psis ...))",
                     e.line, e.col);
  DeterminingSequence ds;
  const SExpr& vs = e.at(1);
  if (!vs.is_list() || vs.head() != "vars")
    throw ParseError("determining sequence: expected (vars ...)", vs.line, vs.col);
  for (size_t i = 1; i < vs.size(); ++i) {
    if (!vs.at(i).is_atom())
      throw ParseError("determining sequence: variable names are atoms",
                       vs.at(i).line, vs.at(i).col);
    ds.vars.push_back(vs.at(i).atom);
  }
  const SExpr& ps = e.at(2);
  if (!ps.is_list() || ps.head() != "phi-star" || ps.size() != 2)
    throw ParseError("determining sequence: expected (phi-star <ba formula>)", ps.line, ps.col);
  ds.phi_star = parse_ba_formula(ps.at(1));
  const SExpr& qs = e.at(3);
  if (!qs.is_list() || qs.head() != "psis")
    throw ParseError("determining sequence: expected (psis ...)", qs.line, qs.col);
  for (size_t i = 1; i < qs.size(); ++i) ds.psis.push_back(parse_formula(qs.at(i), sig));
  ds.validate();
  return ds;
}

std::string print_ds(const DeterminingSequence& ds) { return to_text(ds_to_sexpr(ds)); }

// --- existential decompositions --------------------------------------------------------

namespace {

// strips the exists prefix with fresh display names; returns the matrix
Formula strip_exists(const Formula& f, std::vector<std::string>& us,
                     std::set<std::string>& used) {
  Formula g = f;
  while (g.kind == Formula::Kind::Exists) {
    std::string v = fresh_name(g.sym.empty() ? "u" : g.sym, used);
    used.insert(v);
    us.push_back(v);
    g = open_body(g.subs[0], v);
  }
  return g;
}

void flatten_and(const Formula& f, std::vector<Formula>& out) {
  if (f.kind == Formula::Kind::And) {
    for (const auto& s : f.subs) flatten_and(s, out);
  } else {
    out.push_back(f);
  }
}

Formula close_exists(Formula body, const std::vector<std::string>& us) {
  for (size_t j = us.size(); j-- > 0;) body = Formula::exists(us[j], body);
  return body;
}

}  // namespace

BurrisDecomposition burris_decompose(const Formula& f) {
  auto fv = free_vars(f);
  std::set<std::string> used(fv.begin(), fv.end());
  std::vector<std::string> us;
  Formula matrix = strip_exists(f, us, used);
  std::vector<Formula> lits;
  flatten_and(matrix, lits);
  std::vector<Formula> pos, neg;
  for (const auto& lit : lits) {
    if (lit.is_atom()) {
      pos.push_back(lit);
    } else if (lit.kind == Formula::Kind::Not && lit.subs[0].is_atom()) {
      neg.push_back(lit.subs[0]);
    } else {
      throw Error("burris_decompose: matrix must be a conjunction of literals");
    }
  }
  BurrisDecomposition d;
  d.phi0 = close_exists(Formula::and_(pos), us);
  for (const auto& theta : neg) {
    std::vector<Formula> conj = pos;
    conj.push_back(Formula::not_(theta));
    d.phis.push_back(close_exists(Formula::and_(std::move(conj)), us));
  }
  return d;
}

BurrisReport check_burris(const FiniteStructure& A, const Formula& f) {
  BurrisDecomposition d = burris_decompose(f);
  auto vars = free_vars(f);
  const int n = A.size;
  BurrisReport rep;
  std::vector<int> v(vars.size(), 0);
  long long total = 1;
  for (size_t j = 0; j < vars.size(); ++j) total *= n;
  for (long long lin = 0; lin < total; ++lin) {
    Assignment asg;
    for (size_t j = 0; j < vars.size(); ++j) asg[vars[j]] = v[j];
    bool lhs = eval_formula(A, f, asg);
    bool rhs = eval_formula(A, d.phi0, asg);
    for (const auto& phi : d.phis) {
      if (!rhs) break;
      rhs = eval_formula(A, phi, asg);
    }
    ++rep.assignments;
    if (lhs && !rhs) rep.forward_ok = false;
    if (rhs && !lhs) {
      rep.converse_ok = false;
      if (rep.converse_failures.size() < 16) rep.converse_failures.push_back({v, lhs, rhs});
    }
    for (size_t j = vars.size(); j-- > 0;) {
      if (++v[j] < n) break;
      v[j] = 0;
    }
  }
  return rep;
}

PairDecomposition pair_decompose(const Formula& f) {
  PairDecomposition pd;
  pd.params = free_vars(f);
  std::set<std::string> used(pd.params.begin(), pd.params.end());
  Formula matrix = strip_exists(f, pd.u_vars, used);
  std::vector<Formula> lits;
  flatten_and(matrix, lits);

  std::vector<Formula> pos;
  for (const auto& lit : lits) {
    bool negated = false;
    Formula atom = lit;
    if (atom.kind == Formula::Kind::Not) {
      negated = true;
      atom = atom.subs[0];
    }
    if (!atom.is_atom())
      throw Error("pair_decompose: matrix must be a conjunction of literals");
    if (atom.kind == Formula::Kind::Rel && atom.sym == "P" &&
        atom.terms[0].kind != Term::Kind::Free) {
      // P over a compound term: introduce a fresh component carrying the value
      std::string w = fresh_name("w", used);
      used.insert(w);
      pd.u_vars.push_back(w);
      Formula pw = Formula::rel("P", {Term::var(w)});
      if (negated) {
        pd.thetas.push_back(pw);
      } else {
        pos.push_back(pw);
      }
      pos.push_back(Formula::eq(Term::var(w), atom.terms[0]));
      continue;
    }
    if (negated) {
      pd.thetas.push_back(atom);
    } else {
      pos.push_back(atom);
    }
  }

  std::set<std::string> p_constrained;
  std::vector<Formula> pos_plus;
  for (const auto& a : pos) {
    if (a.kind == Formula::Kind::Rel && a.sym == "P") {
      if (a.terms[0].kind == Term::Kind::Free) p_constrained.insert(a.terms[0].name);
      continue;
    }
    pos_plus.push_back(a);
  }
  for (const auto& u : pd.u_vars) {
    if (p_constrained.count(u)) {
      pd.u0_vars.push_back(u);
    } else {
      pd.u1_vars.push_back(u);
    }
  }

  pd.psi0 = Formula::and_(pos);
  pd.psi0_plus = Formula::and_(std::move(pos_plus));
  pd.phi0 = close_exists(pd.psi0, pd.u_vars);
  return pd;
}

Formula PairDecomposition::block_formula(const std::vector<int>& block) const {
  std::vector<Formula> conj = psi0.subs;  // psi0 is always a conjunction
  for (int j : block) {
    if (j < 0 || static_cast<size_t>(j) >= thetas.size())
      throw Error("block_formula: negated-atom index out of range");
    conj.push_back(Formula::not_(thetas[static_cast<size_t>(j)]));
  }
  return close_exists(Formula::and_(std::move(conj)), u_vars);
}

std::vector<std::vector<std::vector<int>>> set_partitions(int n) {
  std::vector<std::vector<std::vector<int>>> out;
  if (n == 0) {
    out.push_back({});
    return out;
  }
  std::vector<int> label(static_cast<size_t>(n), 0);
  std::function<void(int, int)> go = [&](int i, int blocks) {
    if (i == n) {
      std::vector<std::vector<int>> part(static_cast<size_t>(blocks));
      for (int j = 0; j < n; ++j) part[static_cast<size_t>(label[static_cast<size_t>(j)])].push_back(j);
      out.push_back(std::move(part));
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      label[static_cast<size_t>(i)] = b;
      go(i + 1, std::max(blocks, b + 1));
    }
  };
  go(0, 0);
  return out;
}

PairDecompReport check_pair_decompose(const BooleanProduct& A, const Formula& f) {
  PairDecomposition pd = pair_decompose(f);
  const int j_count = static_cast<int>(pd.thetas.size());
  if (j_count > 5)
    throw Error("check_pair_decompose: too many negated atoms (cap 5)");
  auto partitions = set_partitions(j_count);
  PairDecompReport rep;
  rep.partitions = static_cast<long long>(partitions.size());

  const int k = A.index_count();
  const int m = static_cast<int>(A.carrier.size());
  const int var_count = static_cast<int>(pd.params.size());

  // per-factor truth tables: phi0 plus one table per distinct nonempty block
  std::set<unsigned> needed;
  for (const auto& part : partitions)
    for (const auto& block : part) {
      unsigned mask = 0;
      for (int j : block) mask |= 1u << j;
      needed.insert(mask);
    }
  std::vector<std::vector<char>> t0;
  for (int x = 0; x < k; ++x)
    t0.push_back(satisfying_table(A.factors[static_cast<size_t>(x)], pd.phi0, pd.params).bits);
  std::map<unsigned, std::vector<std::vector<char>>> tb;
  for (unsigned mask : needed) {
    std::vector<int> block;
    for (int j = 0; j < j_count; ++j)
      if (mask >> j & 1) block.push_back(j);
    Formula phi_block = pd.block_formula(block);
    auto& rows = tb[mask];
    for (int x = 0; x < k; ++x)
      rows.push_back(satisfying_table(A.factors[static_cast<size_t>(x)], phi_block, pd.params).bits);
  }

  FiniteStructure S = A.to_structure();
  ValuationTable lhs_table = satisfying_table(S, f, pd.params);

  long long total = 1;
  for (int j = 0; j < var_count; ++j) total *= m;
  std::vector<int> v(static_cast<size_t>(var_count), 0);
  std::vector<long long> idx(static_cast<size_t>(k), 0);
  for (long long lin = 0; lin < total; ++lin) {
    for (int x = 0; x < k; ++x) {
      const int n = A.factors[static_cast<size_t>(x)].size;
      long long ix = 0;
      for (int j = 0; j < var_count; ++j)
        ix = ix * n + A.carrier[static_cast<size_t>(v[static_cast<size_t>(j)])]
                               [static_cast<size_t>(x)];
      idx[static_cast<size_t>(x)] = ix;
    }
    bool lhs = lhs_table.bits[static_cast<size_t>(lin)] != 0;
    bool all0 = true;
    for (int x = 0; x < k && all0; ++x)
      all0 = t0[static_cast<size_t>(x)][static_cast<size_t>(idx[static_cast<size_t>(x)])] != 0;
    bool rhs = false;
    if (all0) {
      for (const auto& part : partitions) {
        bool covered = true;
        for (const auto& block : part) {
          unsigned mask = 0;
          for (int j : block) mask |= 1u << j;
          const auto& rows = tb.at(mask);
          bool witness = false;
          for (int x = 0; x < k && !witness; ++x)
            witness = rows[static_cast<size_t>(x)][static_cast<size_t>(idx[static_cast<size_t>(x)])] != 0;
          if (!witness) {
            covered = false;
            break;
          }
        }
        if (covered) {
          rhs = true;
          break;
        }
      }
    }
    ++rep.assignments;
    if (lhs && !rhs) {
      rep.forward_ok = false;
      if (rep.forward_failures.size() < 8) rep.forward_failures.push_back({v, lhs, rhs});
    }
    if (rhs && !lhs) {
      rep.converse_ok = false;
      if (rep.converse_failures.size() < 8) rep.converse_failures.push_back({v, lhs, rhs});
    }
    for (size_t j = v.size(); j-- > 0;) {
      if (++v[j] < m) break;
      v[j] = 0;
    }
  }
  return rep;
}

}  // namespace fvkit
