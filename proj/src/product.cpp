#include "fvkit/product.hpp"

#include <algorithm>
#include <map>

namespace fvkit {

// --- construction -------------------------------------------------------------------

BooleanProduct BooleanProduct::make_full(std::vector<FiniteStructure> factors) {
  BooleanProduct A;
  A.factors = std::move(factors);
  A.full = true;
  if (A.factors.empty()) throw Error("boolean product: needs at least one factor");
  size_t n = 1;
  for (auto& f : A.factors) {
    n *= static_cast<size_t>(f.size);
    if (n > (1u << 13)) throw Error("boolean product: full carrier too large");
  }
  size_t k = A.factors.size();
  std::vector<int> cur(k, 0);
  for (size_t i = 0; i < n; ++i) {
    A.carrier.push_back(cur);
    size_t j = k;
    while (j > 0) {
      --j;
      if (++cur[j] < A.factors[j].size) break;
      cur[j] = 0;
    }
  }
  A.validate();
  return A;
}

BooleanProduct BooleanProduct::make_carrier(std::vector<FiniteStructure> factors,
                                            std::vector<std::vector<int>> elements) {
  BooleanProduct A;
  A.factors = std::move(factors);
  A.full = false;
  A.carrier = std::move(elements);
  if (A.factors.empty()) throw Error("boolean product: needs at least one factor");
  A.validate();
  return A;
}

void BooleanProduct::validate() {
  const Signature& s = sig();
  for (auto& f : factors)
    if (print_signature(f.sig) != print_signature(s))
      throw Error("boolean product: factors must share one signature");
  size_t k = factors.size();
  if (carrier.empty()) throw Error("boolean product: empty carrier");
  index.clear();
  for (size_t i = 0; i < carrier.size(); ++i) {
    const auto& e = carrier[i];
    if (e.size() != k) throw Error("boolean product: element arity mismatch");
    for (size_t x = 0; x < k; ++x)
      if (e[x] < 0 || e[x] >= factors[x].size)
        throw Error("boolean product: coordinate out of range");
    if (!index.emplace(e, static_cast<int>(i)).second)
      throw Error("boolean product: duplicate carrier element");
  }
  // subdirect: every factor element is hit
  for (size_t x = 0; x < k; ++x) {
    std::vector<char> hit(static_cast<size_t>(factors[x].size), 0);
    for (auto& e : carrier) hit[static_cast<size_t>(e[x])] = 1;
    for (char h : hit)
      if (!h) throw Error("boolean product: carrier is not subdirect at coordinate " +
                          std::to_string(x));
  }
  // closure under constants and functions
  for (auto& c : s.constants)
    if (carrier_index(constant_elem(c)) < 0)
      throw Error("boolean product: carrier misses constant '" + c + "'");
  for (auto& [fn, ar] : s.functions) {
    std::vector<size_t> idx(static_cast<size_t>(ar), 0);
    for (;;) {
      std::vector<std::vector<int>> args;
      for (size_t i = 0; i < static_cast<size_t>(ar); ++i) args.push_back(carrier[idx[i]]);
      std::vector<int> res(k);
      for (size_t x = 0; x < k; ++x) {
        size_t pos = 0;
        for (auto& a : args) pos = pos * factors[x].size + static_cast<size_t>(a[x]);
        res[x] = factors[x].funcs.at(fn)[pos];
      }
      if (carrier_index(res) < 0)
        throw Error("boolean product: carrier not closed under '" + fn + "'");
      size_t i = idx.size();
      bool done = true;
      while (i > 0) {
        --i;
        if (++idx[i] < carrier.size()) {
          done = false;
          break;
        }
        idx[i] = 0;
      }
      if (done) break;
    }
  }
}

int BooleanProduct::carrier_index(const std::vector<int>& elem) const {
  auto it = index.find(elem);
  return it == index.end() ? -1 : it->second;
}

std::vector<int> BooleanProduct::apply(const std::string& fn,
                                       const std::vector<std::vector<int>>& args) const {
  size_t k = factors.size();
  std::vector<int> res(k);
  for (size_t x = 0; x < k; ++x) {
    auto it = factors[x].funcs.find(fn);
    if (it == factors[x].funcs.end()) throw Error("boolean product: no function '" + fn + "'");
    size_t pos = 0;
    for (auto& a : args) pos = pos * factors[x].size + static_cast<size_t>(a.at(x));
    res[x] = it->second[pos];
  }
  if (carrier_index(res) < 0) throw Error("boolean product: carrier not closed under '" + fn + "'");
  return res;
}

std::vector<int> BooleanProduct::constant_elem(const std::string& c) const {
  std::vector<int> res(factors.size());
  for (size_t x = 0; x < factors.size(); ++x) res[x] = factors[x].constant(c);
  return res;
}

FiniteStructure BooleanProduct::to_structure() const {
  FiniteStructure A;
  A.sig = sig();
  A.size = static_cast<int>(carrier.size());
  A.name = factors[0].name;
  for (size_t i = 1; i < factors.size(); ++i) A.name += "x" + factors[i].name;
  if (!full) A.name += "_sub";
  size_t m = carrier.size(), k = factors.size();
  for (auto& [fn, ar] : A.sig.functions) {
    size_t ext = 1;
    for (int i = 0; i < ar; ++i) {
      ext *= m;
      if (ext > (1u << 26)) throw Error("boolean product: table too large");
    }
    std::vector<int> tab(ext);
    std::vector<size_t> idx(static_cast<size_t>(ar), 0);
    for (size_t e = 0; e < ext; ++e) {
      size_t rem = e;
      for (size_t i = static_cast<size_t>(ar); i > 0; --i) {
        idx[i - 1] = rem % m;
        rem /= m;
      }
      std::vector<int> res(k);
      for (size_t x = 0; x < k; ++x) {
        size_t pos = 0;
        for (size_t i = 0; i < static_cast<size_t>(ar); ++i)
          pos = pos * factors[x].size + static_cast<size_t>(carrier[idx[i]][x]);
        res[x] = factors[x].funcs.at(fn)[pos];
      }
      int ci = carrier_index(res);
      if (ci < 0) throw Error("boolean product: carrier not closed under '" + fn + "'");
      tab[e] = ci;
    }
    A.funcs[fn] = std::move(tab);
  }
  for (auto& c : A.sig.constants) {
    int ci = carrier_index(constant_elem(c));
    if (ci < 0) throw Error("boolean product: carrier misses constant '" + c + "'");
    A.consts[c] = ci;
  }
  for (auto& [r, ar] : A.sig.relations) {
    size_t ext = 1;
    for (int i = 0; i < ar; ++i) ext *= m;
    std::vector<char> tab(ext);
    std::vector<size_t> idx(static_cast<size_t>(ar), 0);
    for (size_t e = 0; e < ext; ++e) {
      size_t rem = e;
      for (size_t i = static_cast<size_t>(ar); i > 0; --i) {
        idx[i - 1] = rem % m;
        rem /= m;
      }
      bool all = true;
      for (size_t x = 0; x < k && all; ++x) {
        std::vector<int> args(static_cast<size_t>(ar));
        for (size_t i = 0; i < static_cast<size_t>(ar); ++i) args[i] = carrier[idx[i]][x];
        all = factors[x].rel_holds(r, args);
      }
      tab[e] = all;
    }
    A.rels[r] = std::move(tab);
  }
  A.validate();
  return A;
}

// --- truth sets ------------------------------------------------------------------

unsigned truth_mask(const BooleanProduct& A, const Formula& f,
                    const std::vector<std::vector<int>>& args) {
  if (A.index_count() > 30) throw Error("truth_mask: too many coordinates");
  std::vector<std::string> vars = free_vars(f);
  if (vars.size() != args.size())
    throw Error("truth_set: expected " + std::to_string(vars.size()) + " arguments, got " +
                std::to_string(args.size()));
  unsigned mask = 0;
  for (int x = 0; x < A.index_count(); ++x) {
    Assignment asg;
    for (size_t i = 0; i < vars.size(); ++i) {
      if (args[i].size() != A.factors.size())
        throw Error("truth_set: argument arity mismatch");
      asg[vars[i]] = args[i][static_cast<size_t>(x)];
    }
    if (eval_formula(A.factors[static_cast<size_t>(x)], f, asg)) mask |= 1u << x;
  }
  return mask;
}

std::set<int> truth_set(const BooleanProduct& A, const Formula& f,
                        const std::vector<std::vector<int>>& args) {
  unsigned mask = truth_mask(A, f, args);
  std::set<int> out;
  for (int x = 0; x < A.index_count(); ++x)
    if (mask & (1u << x)) out.insert(x);
  return out;
}

// --- (P1)-(P3) -----------------------------------------------------------------------

namespace {

// collects atoms with binders opened to fresh names, so every atom is a
// standalone formula over free variables
void collect_atoms(const Formula& f, std::set<std::string>& used, std::vector<Formula>& out) {
  if (f.is_atom()) {
    out.push_back(f);
    return;
  }
  if (f.is_quantifier()) {
    std::string v = fresh_name(f.sym, used);
    used.insert(v);
    collect_atoms(open_body(f.subs[0], v), used, out);
    return;
  }
  for (auto& s : f.subs) collect_atoms(s, used, out);
}

}  // namespace

GammaReport check_gamma_properties(const BooleanProduct& A, const std::vector<Formula>& corpus,
                                   long long max_tuples_per_formula, int max_failures) {
  GammaReport rep;
  // (P1)/(P3): at finite scale every subset of X is clopen, so both reduce to
  // the truth sets being defined; we sweep them to make that effective.
  auto sweep = [&](const Formula& f, long long& counter) {
    size_t nv = free_vars(f).size();
    long long tuples = 1;
    for (size_t i = 0; i < nv; ++i) {
      tuples *= static_cast<long long>(A.carrier.size());
      if (tuples > max_tuples_per_formula) {
        tuples = max_tuples_per_formula;
        break;
      }
    }
    std::vector<size_t> idx(nv, 0);
    for (long long t = 0; t < tuples; ++t) {
      std::vector<std::vector<int>> args;
      for (size_t i = 0; i < nv; ++i) args.push_back(A.carrier[idx[i]]);
      truth_mask(A, f, args);
      ++counter;
      size_t i = nv;
      while (i > 0) {
        --i;
        if (++idx[i] < A.carrier.size()) break;
        idx[i] = 0;
      }
      if (nv == 0) break;
    }
  };
  std::vector<Formula> atoms;
  std::set<std::string> atom_texts;
  for (auto& f : corpus) {
    std::set<std::string> used;
    for (auto& v : free_vars(f)) used.insert(v);
    std::vector<Formula> here;
    collect_atoms(f, used, here);
    for (auto& a : here)
      if (atom_texts.insert(print_formula(a)).second) atoms.push_back(a);
  }
  for (auto& a : atoms) sweep(a, rep.atom_checks);
  for (auto& f : corpus) sweep(f, rep.formula_checks);
  // (P2): patchwork along every subset of X
  int k = A.index_count();
  if (k > 16) throw Error("check_gamma_properties: too many coordinates for the patch sweep");
  for (size_t fi = 0; fi < A.carrier.size(); ++fi) {
    for (size_t gi = 0; gi < A.carrier.size(); ++gi) {
      for (unsigned U = 0; U < (1u << k); ++U) {
        ++rep.patch_checks;
        std::vector<int> h(static_cast<size_t>(k));
        for (int x = 0; x < k; ++x)
          h[static_cast<size_t>(x)] =
              (U & (1u << x)) ? A.carrier[fi][static_cast<size_t>(x)]
                              : A.carrier[gi][static_cast<size_t>(x)];
        if (A.carrier_index(h) < 0) {
          rep.p2_ok = false;
          if (static_cast<int>(rep.p2_failures.size()) < max_failures) {
            PatchFailure fail;
            fail.f = A.carrier[fi];
            fail.g = A.carrier[gi];
            for (int x = 0; x < k; ++x)
              if (U & (1u << x)) fail.U.insert(x);
            rep.p2_failures.push_back(std::move(fail));
          } else {
            rep.p2_failures_truncated = true;
          }
        }
      }
    }
  }
  return rep;
}

std::vector<int> patch(const BooleanProduct& A, const std::vector<int>& f,
                       const std::vector<int>& g, const std::set<int>& U) {
  size_t k = A.factors.size();
  if (f.size() != k || g.size() != k) throw Error("patch: element arity mismatch");
  std::vector<int> h(k);
  for (size_t x = 0; x < k; ++x) h[x] = U.count(static_cast<int>(x)) ? f[x] : g[x];
  if (A.carrier_index(h) < 0) throw Error("no patch witness");
  return h;
}

// --- projector ----------------------------------------------------------------------

std::vector<int> projector_apply(const BooleanProduct& A, const std::vector<int>& a,
                                 const std::vector<int>& b) {
  size_t k = A.factors.size();
  if (a.size() != k || b.size() != k) throw Error("projector_apply: element arity mismatch");
  std::vector<int> res(k);
  for (size_t x = 0; x < k; ++x) {
    int zero = A.factors[x].constant("0");
    res[x] = (b[x] == zero) ? a[x] : zero;
  }
  if (A.carrier_index(res) < 0) throw Error("projector_apply: carrier not closed under p");
  return res;
}

ProjectorDefReport projector_definability_check(const BooleanProduct& A) {
  ProjectorDefReport rep;
  size_t m = A.carrier.size(), k = A.factors.size();
  // componentwise ring helpers over carrier positions
  std::vector<int> zero(k), one(k);
  for (size_t x = 0; x < k; ++x) {
    zero[x] = A.factors[x].constant("0");
    one[x] = A.factors[x].constant("1");
  }
  auto op = [&](const char* fn, const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> r(k);
    for (size_t x = 0; x < k; ++x) r[x] = A.factors[x].fun(fn, a[x], b[x]);
    return r;
  };
  for (size_t ai = 0; ai < m; ++ai)
    for (size_t bi = 0; bi < m; ++bi) {
      const std::vector<int>& a = A.carrier[ai];
      const std::vector<int>& b = A.carrier[bi];
      // p(a,b) componentwise (no carrier-membership requirement here; we only
      // compare against candidates c that are in the carrier)
      std::vector<int> pab(k);
      for (size_t x = 0; x < k; ++x) pab[x] = (b[x] == zero[x]) ? a[x] : zero[x];
      for (size_t ci = 0; ci < m; ++ci) {
        const std::vector<int>& c = A.carrier[ci];
        ++rep.triples;
        bool direct = c == pab;
        bool defined = false;
        for (size_t di = 0; di < m && !defined; ++di) {
          const std::vector<int>& d = A.carrier[di];
          std::vector<int> bd = op("*", b, d);
          if (op("*", bd, b) != b) continue;
          if (op("*", b, c) != zero) continue;
          if (op("*", op("-", c, a), op("-", one, bd)) != zero) continue;
          defined = true;
        }
        if (direct != defined) {
          rep.ok = false;
          if (rep.counterexamples.size() < 16) rep.counterexamples.push_back({a, b, c, direct, defined});
        }
      }
    }
  return rep;
}

// --- product files --------------------------------------------------------------------

BooleanProduct parse_product(const SExpr& e) {
  if (e.head() != "product") throw ParseError("expected (product ...)", e.line, e.col);
  std::vector<FiniteStructure> factors;
  bool full = true;
  std::vector<std::vector<int>> elems;
  bool carrier_seen = false;
  for (size_t i = 1; i < e.size(); ++i) {
    const SExpr& sec = e.at(i);
    if (sec.head() == "factors") {
      for (size_t j = 1; j < sec.size(); ++j) factors.push_back(parse_structure(sec.at(j)));
    } else if (sec.head() == "carrier") {
      carrier_seen = true;
      if (sec.size() == 2 && sec.at(1).is_atom() && sec.at(1).atom == "full") {
        full = true;
      } else if (sec.size() == 2 && sec.at(1).head() == "elements") {
        full = false;
        const SExpr& el = sec.at(1);
        for (size_t j = 1; j < el.size(); ++j) {
          std::vector<int> row;
          for (size_t x = 0; x < el.at(j).size(); ++x) row.push_back(el.at(j).at(x).as_int());
          elems.push_back(std::move(row));
        }
      } else {
        throw ParseError("expected (carrier full) or (carrier (elements ...))", sec.line, sec.col);
      }
    } else {
      throw ParseError("unknown product section '" + sec.head() + "'", sec.line, sec.col);
    }
  }
  if (!carrier_seen) full = true;
  if (full) return BooleanProduct::make_full(std::move(factors));
  return BooleanProduct::make_carrier(std::move(factors), std::move(elems));
}

BooleanProduct parse_product(std::string_view text) { return parse_product(parse_sexpr(text)); }

SExpr product_to_sexpr(const BooleanProduct& A) {
  std::vector<SExpr> fs = {SExpr::make_atom("factors")};
  for (auto& f : A.factors) fs.push_back(structure_to_sexpr(f));
  SExpr carrier;
  if (A.full) {
    carrier = SExpr::make_list({SExpr::make_atom("carrier"), SExpr::make_atom("full")});
  } else {
    std::vector<SExpr> el = {SExpr::make_atom("elements")};
    for (auto& e : A.carrier) {
      std::vector<SExpr> row;
      for (int v : e) row.push_back(SExpr::make_atom(std::to_string(v)));
      el.push_back(SExpr::make_list(std::move(row)));
    }
    carrier = SExpr::make_list({SExpr::make_atom("carrier"), SExpr::make_list(std::move(el))});
  }
  return SExpr::make_list(
      {SExpr::make_atom("product"), SExpr::make_list(std::move(fs)), std::move(carrier)});
}

std::string print_product(const BooleanProduct& A) { return to_text(product_to_sexpr(A)); }

}  // namespace fvkit
