#include "fvkit/semantics.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace fvkit {

// --- FiniteStructure ----------------------------------------------------------

static size_t power_checked(int base, int exp, const std::string& what) {
  size_t r = 1;
  for (int i = 0; i < exp; ++i) {
    r *= static_cast<size_t>(base);
    if (r > (size_t(1) << 26)) throw Error(what + ": table too large");
  }
  return r;
}

void FiniteStructure::validate() const {
  if (size < 1) throw Error("structure '" + name + "': empty universe");
  sig.validate();
  for (auto& [s, a] : sig.functions) {
    auto it = funcs.find(s);
    if (it == funcs.end()) throw Error("structure '" + name + "': missing function table '" + s + "'");
    if (it->second.size() != power_checked(size, a, name))
      throw Error("structure '" + name + "': wrong table extent for '" + s + "'");
    for (int v : it->second)
      if (v < 0 || v >= size) throw Error("structure '" + name + "': value out of range in '" + s + "'");
  }
  for (auto& c : sig.constants) {
    auto it = consts.find(c);
    if (it == consts.end()) throw Error("structure '" + name + "': missing constant '" + c + "'");
    if (it->second < 0 || it->second >= size)
      throw Error("structure '" + name + "': constant '" + c + "' out of range");
  }
  for (auto& [s, a] : sig.relations) {
    auto it = rels.find(s);
    if (it == rels.end()) throw Error("structure '" + name + "': missing relation table '" + s + "'");
    if (it->second.size() != power_checked(size, a, name))
      throw Error("structure '" + name + "': wrong table extent for '" + s + "'");
  }
}

int FiniteStructure::fun(const std::string& s, int a) const {
  auto it = funcs.find(s);
  if (it == funcs.end()) throw Error("structure '" + name + "': no function '" + s + "'");
  return it->second[static_cast<size_t>(a)];
}

int FiniteStructure::fun(const std::string& s, int a, int b) const {
  auto it = funcs.find(s);
  if (it == funcs.end()) throw Error("structure '" + name + "': no function '" + s + "'");
  return it->second[static_cast<size_t>(a) * size + b];
}

int FiniteStructure::constant(const std::string& s) const {
  auto it = consts.find(s);
  if (it == consts.end()) throw Error("structure '" + name + "': no constant '" + s + "'");
  return it->second;
}

bool FiniteStructure::rel_holds(const std::string& s, const std::vector<int>& args) const {
  auto it = rels.find(s);
  if (it == rels.end()) throw Error("structure '" + name + "': no relation '" + s + "'");
  size_t idx = 0;
  for (int a : args) idx = idx * size + static_cast<size_t>(a);
  return it->second[idx] != 0;
}

// --- pointwise evaluation --------------------------------------------------------

int eval_term(const FiniteStructure& A, const Term& t, const Assignment& asg,
              const std::vector<int>& bound) {
  switch (t.kind) {
    case Term::Kind::Free: {
      auto it = asg.find(t.name);
      if (it == asg.end()) throw Error("unassigned variable '" + t.name + "'");
      if (it->second < 0 || it->second >= A.size)
        throw Error("assignment for '" + t.name + "' out of range");
      return it->second;
    }
    case Term::Kind::Bound: {
      if (t.index < 0 || t.index >= static_cast<int>(bound.size()))
        throw Error("dangling bound variable");
      return bound[bound.size() - 1 - t.index];
    }
    case Term::Kind::Const:
      return A.constant(t.name);
    case Term::Kind::App: {
      auto it = A.funcs.find(t.name);
      if (it == A.funcs.end()) throw Error("structure '" + A.name + "': no function '" + t.name + "'");
      size_t idx = 0;
      for (auto& a : t.args) idx = idx * A.size + static_cast<size_t>(eval_term(A, a, asg, bound));
      return it->second[idx];
    }
  }
  throw Error("unreachable term kind");
}

static bool eval_rec(const FiniteStructure& A, const Formula& f, const Assignment& asg,
                     std::vector<int>& bound) {
  switch (f.kind) {
    case Formula::Kind::Eq:
      return eval_term(A, f.terms[0], asg, bound) == eval_term(A, f.terms[1], asg, bound);
    case Formula::Kind::Rel: {
      std::vector<int> args;
      args.reserve(f.terms.size());
      for (auto& t : f.terms) args.push_back(eval_term(A, t, asg, bound));
      return A.rel_holds(f.sym, args);
    }
    case Formula::Kind::Not:
      return !eval_rec(A, f.subs[0], asg, bound);
    case Formula::Kind::And: {
      for (auto& s : f.subs)
        if (!eval_rec(A, s, asg, bound)) return false;
      return true;
    }
    case Formula::Kind::Or: {
      for (auto& s : f.subs)
        if (eval_rec(A, s, asg, bound)) return true;
      return false;
    }
    case Formula::Kind::Imp:
      return !eval_rec(A, f.subs[0], asg, bound) || eval_rec(A, f.subs[1], asg, bound);
    case Formula::Kind::Exists: {
      for (int v = 0; v < A.size; ++v) {
        bound.push_back(v);
        bool ok = eval_rec(A, f.subs[0], asg, bound);
        bound.pop_back();
        if (ok) return true;
      }
      return false;
    }
    case Formula::Kind::Forall: {
      for (int v = 0; v < A.size; ++v) {
        bound.push_back(v);
        bool ok = eval_rec(A, f.subs[0], asg, bound);
        bound.pop_back();
        if (!ok) return false;
      }
      return true;
    }
  }
  throw Error("unreachable formula kind");
}

bool eval_formula(const FiniteStructure& A, const Formula& f, const Assignment& asg) {
  std::vector<int> bound;
  return eval_rec(A, f, asg, bound);
}

std::vector<std::vector<int>> definable_set(const FiniteStructure& A, const Formula& f,
                                            const std::vector<std::string>& vars,
                                            const Assignment& params) {
  for (auto& v : free_vars(f)) {
    if (params.count(v)) continue;
    if (std::find(vars.begin(), vars.end(), v) == vars.end())
      throw Error("definable_set: free variable '" + v + "' neither swept nor fixed");
  }
  std::vector<std::vector<int>> out;
  std::vector<int> tuple(vars.size(), 0);
  Assignment asg = params;
  for (;;) {
    for (size_t i = 0; i < vars.size(); ++i) asg[vars[i]] = tuple[i];
    if (eval_formula(A, f, asg)) out.push_back(tuple);
    size_t i = vars.size();
    while (i > 0) {
      --i;
      if (++tuple[i] < A.size) break;
      tuple[i] = 0;
      if (i == 0) return out;
    }
    if (vars.empty()) return out;
  }
}

// --- bulk evaluation ---------------------------------------------------------------

namespace {

// A term with symbols resolved against one structure, evaluable over a flat
// environment; this keeps the sweep loops free of string lookups.
struct RTerm {
  enum class K { Var, Lit, App };
  K kind = K::Lit;
  int slot = 0;  // Var: env position; Lit: element value
  const std::vector<int>* table = nullptr;
  std::vector<RTerm> args;

  int eval(const int* env, int n) const {
    switch (kind) {
      case K::Var:
        return env[slot];
      case K::Lit:
        return slot;
      case K::App: {
        size_t idx = 0;
        for (auto& a : args) idx = idx * n + static_cast<size_t>(a.eval(env, n));
        return (*table)[idx];
      }
    }
    return 0;
  }
};

RTerm resolve_term(const FiniteStructure& A, const Term& t, const std::map<std::string, int>& slots,
                   const Assignment& params) {
  RTerm r;
  switch (t.kind) {
    case Term::Kind::Free: {
      auto it = slots.find(t.name);
      if (it != slots.end()) {
        r.kind = RTerm::K::Var;
        r.slot = it->second;
        return r;
      }
      auto p = params.find(t.name);
      if (p == params.end()) throw Error("unassigned variable '" + t.name + "'");
      r.kind = RTerm::K::Lit;
      r.slot = p->second;
      return r;
    }
    case Term::Kind::Bound:
      throw Error("bulk evaluation hit an unopened binder");
    case Term::Kind::Const:
      r.kind = RTerm::K::Lit;
      r.slot = A.constant(t.name);
      return r;
    case Term::Kind::App: {
      auto it = A.funcs.find(t.name);
      if (it == A.funcs.end()) throw Error("structure '" + A.name + "': no function '" + t.name + "'");
      r.kind = RTerm::K::App;
      r.table = &it->second;
      for (auto& a : t.args) r.args.push_back(resolve_term(A, a, slots, params));
      return r;
    }
  }
  throw Error("unreachable term kind");
}

struct Table {
  std::vector<std::string> vars;  // sorted
  std::vector<char> bits;
};

size_t extent(int n, size_t k) {
  size_t r = 1;
  for (size_t i = 0; i < k; ++i) r *= static_cast<size_t>(n);
  return r;
}

// Odometer walk over `vars` axes; `fn(env)` is called for every tuple.
template <typename F>
void sweep(int n, size_t k, F&& fn) {
  std::vector<int> env(k, 0);
  size_t total = extent(n, k);
  for (size_t i = 0; i < total; ++i) {
    fn(env.data());
    size_t j = k;
    while (j > 0) {
      --j;
      if (++env[j] < n) break;
      env[j] = 0;
    }
  }
}

Table atom_table(const FiniteStructure& A, const Formula& f, const Assignment& params) {
  Table t;
  for (auto& v : free_vars(f))
    if (!params.count(v)) t.vars.push_back(v);
  std::sort(t.vars.begin(), t.vars.end());
  std::map<std::string, int> slots;
  for (size_t i = 0; i < t.vars.size(); ++i) slots[t.vars[i]] = static_cast<int>(i);
  std::vector<RTerm> rs;
  for (auto& tm : f.terms) rs.push_back(resolve_term(A, tm, slots, params));
  t.bits.resize(extent(A.size, t.vars.size()));
  size_t out = 0;
  if (f.kind == Formula::Kind::Eq) {
    sweep(A.size, t.vars.size(), [&](const int* env) {
      t.bits[out++] = rs[0].eval(env, A.size) == rs[1].eval(env, A.size);
    });
  } else {
    auto it = A.rels.find(f.sym);
    if (it == A.rels.end()) throw Error("structure '" + A.name + "': no relation '" + f.sym + "'");
    const std::vector<char>& rel = it->second;
    sweep(A.size, t.vars.size(), [&](const int* env) {
      size_t idx = 0;
      for (auto& r : rs) idx = idx * A.size + static_cast<size_t>(r.eval(env, A.size));
      t.bits[out++] = rel[idx];
    });
  }
  return t;
}

// Strides of `child` axes inside `target` axes (0 where absent).
std::vector<size_t> child_strides(const Table& child, const std::vector<std::string>& target, int n) {
  std::vector<size_t> stride_of_child(child.vars.size());
  size_t s = 1;
  for (size_t i = child.vars.size(); i > 0; --i) {
    stride_of_child[i - 1] = s;
    s *= static_cast<size_t>(n);
  }
  std::vector<size_t> out(target.size(), 0);
  for (size_t i = 0; i < target.size(); ++i) {
    auto it = std::find(child.vars.begin(), child.vars.end(), target[i]);
    if (it != child.vars.end()) out[i] = stride_of_child[static_cast<size_t>(it - child.vars.begin())];
  }
  return out;
}

Table formula_table(const FiniteStructure& A, const Formula& f, const Assignment& params, int depth) {
  switch (f.kind) {
    case Formula::Kind::Eq:
    case Formula::Kind::Rel:
      return atom_table(A, f, params);
    case Formula::Kind::Not: {
      Table t = formula_table(A, f.subs[0], params, depth);
      for (auto& b : t.bits) b = !b;
      return t;
    }
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Imp: {
      std::vector<Table> kids;
      std::set<std::string> vs;
      for (auto& s : f.subs) {
        kids.push_back(formula_table(A, s, params, depth));
        vs.insert(kids.back().vars.begin(), kids.back().vars.end());
      }
      Table t;
      t.vars.assign(vs.begin(), vs.end());
      size_t k = t.vars.size();
      t.bits.resize(extent(A.size, k));
      std::vector<std::vector<size_t>> strides;
      for (auto& kid : kids) strides.push_back(child_strides(kid, t.vars, A.size));
      std::vector<size_t> offs(kids.size(), 0);
      std::vector<int> env(k, 0);
      bool conj = f.kind == Formula::Kind::And;
      bool impl = f.kind == Formula::Kind::Imp;
      for (size_t i = 0; i < t.bits.size(); ++i) {
        bool val;
        if (impl) {
          val = !kids[0].bits[offs[0]] || kids[1].bits[offs[1]];
        } else {
          val = conj;
          for (size_t c = 0; c < kids.size(); ++c) {
            bool b = kids[c].bits[offs[c]] != 0;
            if (conj ? !b : b) {
              val = !conj;
              break;
            }
          }
        }
        t.bits[i] = val;
        size_t j = k;
        while (j > 0) {
          --j;
          if (++env[j] < A.size) {
            for (size_t c = 0; c < kids.size(); ++c) offs[c] += strides[c][j];
            break;
          }
          env[j] = 0;
          for (size_t c = 0; c < kids.size(); ++c) offs[c] -= strides[c][j] * (A.size - 1);
        }
      }
      return t;
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      std::string v = "#" + std::to_string(depth);
      Table kid = formula_table(A, open_body(f.subs[0], v), params, depth + 1);
      Table t;
      for (auto& x : kid.vars)
        if (x != v) t.vars.push_back(x);
      auto pos = std::find(kid.vars.begin(), kid.vars.end(), v);
      if (pos == kid.vars.end()) {
        // vacuous binder (universe nonempty): the quantifier is a no-op
        t.bits = kid.bits;
        return t;
      }
      size_t axis = static_cast<size_t>(pos - kid.vars.begin());
      size_t inner = extent(A.size, kid.vars.size() - axis - 1);
      size_t outer = extent(A.size, axis);
      bool ex = f.kind == Formula::Kind::Exists;
      t.bits.resize(extent(A.size, t.vars.size()));
      size_t out = 0;
      for (size_t hi = 0; hi < outer; ++hi) {
        size_t base_hi = hi * static_cast<size_t>(A.size) * inner;
        for (size_t lo = 0; lo < inner; ++lo) {
          bool val = !ex;
          size_t base = base_hi + lo;
          for (int x = 0; x < A.size; ++x) {
            bool b = kid.bits[base + static_cast<size_t>(x) * inner] != 0;
            if (ex ? b : !b) {
              val = ex;
              break;
            }
          }
          t.bits[out++] = val;
        }
      }
      return t;
    }
  }
  throw Error("unreachable formula kind");
}

}  // namespace

ValuationTable satisfying_table(const FiniteStructure& A, const Formula& f,
                                const std::vector<std::string>& vars, const Assignment& params) {
  for (auto& v : free_vars(f)) {
    if (params.count(v)) continue;
    if (std::find(vars.begin(), vars.end(), v) == vars.end())
      throw Error("satisfying_table: free variable '" + v + "' neither swept nor fixed");
  }
  Table t = formula_table(A, f, params, 0);
  ValuationTable out;
  out.vars = vars;
  out.bits.resize(extent(A.size, vars.size()));
  std::vector<size_t> strides = child_strides(t, vars, A.size);
  std::vector<int> env(vars.size(), 0);
  size_t off = 0;
  for (size_t i = 0; i < out.bits.size(); ++i) {
    out.bits[i] = t.bits.empty() ? 0 : t.bits[off];
    size_t j = vars.size();
    while (j > 0) {
      --j;
      if (++env[j] < A.size) {
        off += strides[j];
        break;
      }
      env[j] = 0;
      off -= strides[j] * (A.size - 1);
    }
  }
  if (t.bits.size() == 1) {
    // constant formula: broadcast
    for (auto& b : out.bits) b = t.bits[0];
  }
  return out;
}

DaggerReport check_daggers(const FiniteStructure& A, int max_failures) {
  DaggerReport rep;
  for (auto& [r, phi] : A.sig.dagger) {
    int ar = *A.sig.relation_arity(r);
    std::vector<std::string> vars;
    for (int i = 1; i <= ar; ++i) vars.push_back("x" + std::to_string(i));
    std::vector<int> tuple(static_cast<size_t>(ar), 0);
    for (;;) {
      Assignment asg;
      for (int i = 0; i < ar; ++i) asg[vars[static_cast<size_t>(i)]] = tuple[static_cast<size_t>(i)];
      bool holds = A.rel_holds(r, tuple);
      bool dag = eval_formula(A, phi, asg);
      if (dag != !holds) {
        rep.ok = false;
        if (static_cast<int>(rep.failures.size()) < max_failures)
          rep.failures.push_back({r, tuple, holds, dag});
      }
      int i = ar;
      while (i > 0) {
        --i;
        if (++tuple[static_cast<size_t>(i)] < A.size) break;
        tuple[static_cast<size_t>(i)] = 0;
        if (i == 0) goto next_rel;
      }
      if (ar == 0) break;
    }
  next_rel:;
  }
  return rep;
}

// --- builtins ---------------------------------------------------------------------

FiniteStructure make_zmod(int n) {
  if (n < 1) throw Error("zmod: modulus must be positive");
  FiniteStructure A;
  A.name = "zmod" + std::to_string(n);
  A.sig = sig_ring();
  A.size = n;
  std::vector<int> add(static_cast<size_t>(n) * n), sub(static_cast<size_t>(n) * n),
      mul(static_cast<size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      add[static_cast<size_t>(a) * n + b] = (a + b) % n;
      sub[static_cast<size_t>(a) * n + b] = ((a - b) % n + n) % n;
      mul[static_cast<size_t>(a) * n + b] = (a * b) % n;
    }
  A.funcs["+"] = std::move(add);
  A.funcs["-"] = std::move(sub);
  A.funcs["*"] = std::move(mul);
  A.consts["0"] = 0;
  A.consts["1"] = n == 1 ? 0 : 1;
  A.validate();
  return A;
}

namespace {

// Irreducible polynomials (little-endian coefficients, leading 1 included).
const std::map<int, std::pair<int, std::vector<int>>>& gf_tables() {
  static const std::map<int, std::pair<int, std::vector<int>>> t = {
      {4, {2, {1, 1, 1}}},        // x^2 + x + 1 over F2
      {8, {2, {1, 1, 0, 1}}},     // x^3 + x + 1 over F2
      {9, {3, {1, 0, 1}}},        // x^2 + 1 over F3
      {16, {2, {1, 1, 0, 0, 1}}}  // x^4 + x + 1 over F2
  };
  return t;
}

std::vector<int> gf_digits(int x, int p, int k) {
  std::vector<int> d(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    d[static_cast<size_t>(i)] = x % p;
    x /= p;
  }
  return d;
}

int gf_pack(const std::vector<int>& d, int p) {
  int x = 0;
  for (size_t i = d.size(); i > 0; --i) x = x * p + d[i - 1];
  return x;
}

}  // namespace

FiniteStructure make_gf(int q) {
  if (q < 2 || q > 16) throw Error("gf: order must be in 2..16");
  int p = 2;
  while (q % p != 0) ++p;
  int k = 0, qq = q;
  while (qq > 1) {
    if (qq % p != 0) throw Error("gf: " + std::to_string(q) + " is not a prime power");
    qq /= p;
    ++k;
  }
  if (k == 1) {
    FiniteStructure A = make_zmod(q);
    A.name = "gf" + std::to_string(q);
    return A;
  }
  auto it = gf_tables().find(q);
  if (it == gf_tables().end()) throw Error("gf: no modulus on file for order " + std::to_string(q));
  const std::vector<int>& mod = it->second.second;
  FiniteStructure A;
  A.name = "gf" + std::to_string(q);
  A.sig = sig_ring();
  A.size = q;
  auto add_digits = [&](std::vector<int> a, const std::vector<int>& b, int scale) {
    for (size_t i = 0; i < a.size(); ++i) a[i] = ((a[i] + scale * b[i]) % p + p) % p;
    return a;
  };
  auto mul_digits = [&](const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> prod(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
      for (size_t j = 0; j < b.size(); ++j) prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
    // reduce modulo the irreducible polynomial (monic, degree k)
    for (size_t d = prod.size(); d-- > static_cast<size_t>(k);) {
      int c = prod[d];
      if (c == 0) continue;
      for (size_t j = 0; j < mod.size(); ++j) {
        size_t pos = d - static_cast<size_t>(k) + j;
        prod[pos] = ((prod[pos] - c * mod[j]) % p + p) % p;
      }
    }
    prod.resize(static_cast<size_t>(k));
    return prod;
  };
  std::vector<int> add(static_cast<size_t>(q) * q), sub(static_cast<size_t>(q) * q),
      mul(static_cast<size_t>(q) * q);
  for (int a = 0; a < q; ++a) {
    auto da = gf_digits(a, p, k);
    for (int b = 0; b < q; ++b) {
      auto db = gf_digits(b, p, k);
      add[static_cast<size_t>(a) * q + b] = gf_pack(add_digits(da, db, 1), p);
      sub[static_cast<size_t>(a) * q + b] = gf_pack(add_digits(da, db, -1), p);
      mul[static_cast<size_t>(a) * q + b] = gf_pack(mul_digits(da, db), p);
    }
  }
  A.funcs["+"] = std::move(add);
  A.funcs["-"] = std::move(sub);
  A.funcs["*"] = std::move(mul);
  A.consts["0"] = 0;
  A.consts["1"] = 1;
  A.validate();
  return A;
}

FiniteStructure make_powerset(int k) {
  if (k < 0 || k > 16) throw Error("powerset: base set size must be in 0..16");
  int n = 1 << k;
  FiniteStructure A;
  A.name = "powerset" + std::to_string(k);
  A.sig = sig_ba();
  A.size = n;
  std::vector<int> meet(static_cast<size_t>(n) * n), join(static_cast<size_t>(n) * n), compl_(n);
  for (int a = 0; a < n; ++a) {
    compl_[static_cast<size_t>(a)] = ~a & (n - 1);
    for (int b = 0; b < n; ++b) {
      meet[static_cast<size_t>(a) * n + b] = a & b;
      join[static_cast<size_t>(a) * n + b] = a | b;
    }
  }
  A.funcs["meet"] = std::move(meet);
  A.funcs["join"] = std::move(join);
  A.funcs["compl"] = std::move(compl_);
  A.consts["0"] = 0;
  A.consts["1"] = n - 1;
  A.validate();
  return A;
}

FiniteStructure with_projector(const FiniteStructure& A) {
  if (A.sig.function_arity("p")) throw Error("structure '" + A.name + "' already has a projector");
  FiniteStructure B = A;
  B.sig = A.sig.with_function("p", 2, "_p");
  B.name = A.name + "^p";
  int zero = A.constant("0");
  std::vector<int> p(static_cast<size_t>(A.size) * A.size);
  for (int a = 0; a < A.size; ++a)
    for (int b = 0; b < A.size; ++b)
      p[static_cast<size_t>(a) * A.size + b] = (b == zero) ? a : zero;
  B.funcs["p"] = std::move(p);
  B.validate();
  return B;
}

FiniteStructure with_pair_predicate(const FiniteStructure& A, const std::vector<int>& subset) {
  if (A.sig.relation_arity("P")) throw Error("structure '" + A.name + "' already has P");
  FiniteStructure B = A;
  B.sig = A.sig.with_relation("P", 1, "_pair");
  std::vector<char> tab(static_cast<size_t>(A.size), 0);
  for (int x : subset) {
    if (x < 0 || x >= A.size) throw Error("pair predicate element out of range");
    tab[static_cast<size_t>(x)] = 1;
  }
  B.rels["P"] = std::move(tab);
  B.validate();
  return B;
}

FiniteStructure with_derivation_op(const FiniteStructure& A, const std::vector<int>& table) {
  if (A.sig.function_arity("delta")) throw Error("structure '" + A.name + "' already has delta");
  if (static_cast<int>(table.size()) != A.size) throw Error("derivation table has wrong extent");
  FiniteStructure B = A;
  B.sig = A.sig.with_function("delta", 1, "_delta");
  B.funcs["delta"] = table;
  B.validate();
  return B;
}

std::vector<int> subfield_elements(const FiniteStructure& gf, int sub) {
  std::vector<int> out;
  for (int x = 0; x < gf.size; ++x) {
    int acc = x;
    for (int i = 1; i < sub; ++i) acc = gf.fun("*", acc, x);
    if (acc == x) out.push_back(x);  // x^sub = x
  }
  if (static_cast<int>(out.size()) != sub)
    throw Error("no subfield of order " + std::to_string(sub) + " in " + gf.name);
  return out;
}

FiniteStructure direct_product(const std::vector<FiniteStructure>& factors) {
  if (factors.empty()) throw Error("direct_product: needs at least one factor");
  for (auto& f : factors)
    if (print_signature(f.sig) != print_signature(factors[0].sig))
      throw Error("direct_product: factors must share one signature");
  size_t n = 1;
  for (auto& f : factors) {
    n *= static_cast<size_t>(f.size);
    if (n > (1u << 13)) throw Error("direct_product: universe too large");
  }
  FiniteStructure A;
  A.sig = factors[0].sig;
  A.size = static_cast<int>(n);
  A.name = factors[0].name;
  for (size_t i = 1; i < factors.size(); ++i) A.name += "x" + factors[i].name;
  size_t k = factors.size();
  auto decode = [&](size_t e, std::vector<int>& coords) {
    for (size_t i = k; i > 0; --i) {
      coords[i - 1] = static_cast<int>(e % factors[i - 1].size);
      e /= static_cast<size_t>(factors[i - 1].size);
    }
  };
  auto encode = [&](const std::vector<int>& coords) {
    size_t e = 0;
    for (size_t i = 0; i < k; ++i) e = e * static_cast<size_t>(factors[i].size) + coords[i];
    return static_cast<int>(e);
  };
  for (auto& [s, ar] : A.sig.functions) {
    size_t ext = 1;
    for (int i = 0; i < ar; ++i) ext *= n;
    if (ext > (1u << 26)) throw Error("direct_product: function table too large");
    std::vector<int> tab(ext);
    std::vector<std::vector<int>> argc(static_cast<size_t>(ar), std::vector<int>(k));
    std::vector<size_t> idx(static_cast<size_t>(ar), 0);
    std::vector<int> res(k);
    for (size_t e = 0; e < ext; ++e) {
      size_t rem = e;
      for (size_t i = static_cast<size_t>(ar); i > 0; --i) {
        idx[i - 1] = rem % n;
        rem /= n;
      }
      for (size_t i = 0; i < static_cast<size_t>(ar); ++i) decode(idx[i], argc[i]);
      for (size_t c = 0; c < k; ++c) {
        size_t pos = 0;
        for (size_t i = 0; i < static_cast<size_t>(ar); ++i)
          pos = pos * factors[c].size + static_cast<size_t>(argc[i][c]);
        res[c] = factors[c].funcs.at(s)[pos];
      }
      tab[e] = encode(res);
    }
    A.funcs[s] = std::move(tab);
  }
  for (auto& c : A.sig.constants) {
    std::vector<int> coords(k);
    for (size_t i = 0; i < k; ++i) coords[i] = factors[i].constant(c);
    A.consts[c] = encode(coords);
  }
  for (auto& [s, ar] : A.sig.relations) {
    size_t ext = 1;
    for (int i = 0; i < ar; ++i) ext *= n;
    std::vector<char> tab(ext);
    std::vector<std::vector<int>> argc(static_cast<size_t>(ar), std::vector<int>(k));
    std::vector<size_t> idx(static_cast<size_t>(ar), 0);
    for (size_t e = 0; e < ext; ++e) {
      size_t rem = e;
      for (size_t i = static_cast<size_t>(ar); i > 0; --i) {
        idx[i - 1] = rem % n;
        rem /= n;
      }
      for (size_t i = 0; i < static_cast<size_t>(ar); ++i) decode(idx[i], argc[i]);
      bool all = true;
      for (size_t c = 0; c < k && all; ++c) {
        std::vector<int> args(static_cast<size_t>(ar));
        for (size_t i = 0; i < static_cast<size_t>(ar); ++i) args[i] = argc[i][c];
        all = factors[c].rel_holds(s, args);
      }
      tab[e] = all;
    }
    A.rels[s] = std::move(tab);
  }
  A.validate();
  return A;
}

// --- structure files ---------------------------------------------------------------

FiniteStructure parse_structure(const SExpr& e, const Signature* sig_hint) {
  std::string h = e.head();
  if (h == "builtin") {
    if (e.size() < 2 || !e.at(1).is_atom()) throw ParseError("expected (builtin <kind> ...)", e.line, e.col);
    const std::string& kind = e.at(1).atom;
    if (kind == "zmod") return make_zmod(e.at(2).as_int());
    if (kind == "gf") return make_gf(e.at(2).as_int());
    if (kind == "powerset") return make_powerset(e.at(2).as_int());
    throw ParseError("unknown builtin '" + kind + "'", e.line, e.col);
  }
  if (h != "structure") throw ParseError("expected (structure ...) or (builtin ...)", e.line, e.col);
  if (e.size() < 2 || !e.at(1).is_atom()) throw ParseError("structure needs a name", e.line, e.col);
  FiniteStructure A;
  A.name = e.at(1).atom;
  bool have_sig = false;
  for (size_t i = 2; i < e.size(); ++i) {
    const SExpr& sec = e.at(i);
    std::string sh = sec.head();
    if (sh == "signature") {
      if (sec.size() == 2 && sec.at(1).is_atom()) {
        auto b = builtin_signature(sec.at(1).atom);
        if (b) {
          A.sig = *b;
        } else if (sig_hint && sig_hint->name == sec.at(1).atom) {
          A.sig = *sig_hint;
        } else {
          throw ParseError("unknown signature '" + sec.at(1).atom + "'", sec.line, sec.col);
        }
      } else if (sec.size() == 2) {
        A.sig = parse_signature(sec.at(1));
      } else {
        throw ParseError("expected (signature <name-or-form>)", sec.line, sec.col);
      }
      have_sig = true;
    } else if (sh == "size") {
      A.size = sec.at(1).as_int();
    } else if (sh == "fun") {
      if (!have_sig) throw ParseError("signature must precede tables", sec.line, sec.col);
      const std::string& s = sec.at(1).atom;
      auto ar = A.sig.function_arity(s);
      if (!ar) throw ParseError("undeclared function '" + s + "'", sec.line, sec.col);
      auto& tab = A.funcs[s];
      tab.assign(power_checked(A.size, *ar, A.name), -1);
      for (size_t j = 2; j < sec.size(); ++j) {
        const SExpr& row = sec.at(j);
        if (!row.is_list() || static_cast<int>(row.size()) != *ar + 1)
          throw ParseError("function row needs arity+1 entries", row.line, row.col);
        size_t idx = 0;
        for (int a = 0; a < *ar; ++a) idx = idx * A.size + static_cast<size_t>(row.at(a).as_int());
        tab[idx] = row.at(static_cast<size_t>(*ar)).as_int();
      }
      for (int v : tab)
        if (v < 0) throw ParseError("function table for '" + s + "' is partial", sec.line, sec.col);
    } else if (sh == "const") {
      A.consts[sec.at(1).atom] = sec.at(2).as_int();
    } else if (sh == "rel") {
      if (!have_sig) throw ParseError("signature must precede tables", sec.line, sec.col);
      const std::string& s = sec.at(1).atom;
      auto ar = A.sig.relation_arity(s);
      if (!ar) throw ParseError("undeclared relation '" + s + "'", sec.line, sec.col);
      auto& tab = A.rels[s];
      tab.assign(power_checked(A.size, *ar, A.name), 0);
      for (size_t j = 2; j < sec.size(); ++j) {
        const SExpr& row = sec.at(j);
        if (!row.is_list() || static_cast<int>(row.size()) != *ar)
          throw ParseError("relation row needs arity entries", row.line, row.col);
        size_t idx = 0;
        for (int a = 0; a < *ar; ++a) idx = idx * A.size + static_cast<size_t>(row.at(a).as_int());
        tab[idx] = 1;
      }
    } else {
      throw ParseError("unknown structure section '" + sh + "'", sec.line, sec.col);
    }
  }
  A.validate();
  return A;
}

FiniteStructure parse_structure(std::string_view text, const Signature* sig_hint) {
  return parse_structure(parse_sexpr(text), sig_hint);
}

SExpr structure_to_sexpr(const FiniteStructure& A) {
  std::vector<SExpr> xs = {SExpr::make_atom("structure"), SExpr::make_atom(A.name),
                           SExpr::make_list({SExpr::make_atom("signature"), signature_to_sexpr(A.sig)}),
                           SExpr::make_list({SExpr::make_atom("size"),
                                             SExpr::make_atom(std::to_string(A.size))})};
  auto num = [](int v) { return SExpr::make_atom(std::to_string(v)); };
  for (auto& [s, ar] : A.sig.functions) {
    std::vector<SExpr> rows = {SExpr::make_atom("fun"), SExpr::make_atom(s)};
    const auto& tab = A.funcs.at(s);
    std::vector<int> args(static_cast<size_t>(ar), 0);
    for (size_t e = 0; e < tab.size(); ++e) {
      std::vector<SExpr> row;
      size_t rem = e;
      for (size_t i = static_cast<size_t>(ar); i > 0; --i) {
        args[i - 1] = static_cast<int>(rem % A.size);
        rem /= static_cast<size_t>(A.size);
      }
      for (int a : args) row.push_back(num(a));
      row.push_back(num(tab[e]));
      rows.push_back(SExpr::make_list(std::move(row)));
    }
    xs.push_back(SExpr::make_list(std::move(rows)));
  }
  for (auto& c : A.sig.constants)
    xs.push_back(SExpr::make_list({SExpr::make_atom("const"), SExpr::make_atom(c), num(A.consts.at(c))}));
  for (auto& [s, ar] : A.sig.relations) {
    std::vector<SExpr> rows = {SExpr::make_atom("rel"), SExpr::make_atom(s)};
    const auto& tab = A.rels.at(s);
    std::vector<int> args(static_cast<size_t>(ar), 0);
    for (size_t e = 0; e < tab.size(); ++e) {
      if (!tab[e]) continue;
      std::vector<SExpr> row;
      size_t rem = e;
      for (size_t i = static_cast<size_t>(ar); i > 0; --i) {
        args[i - 1] = static_cast<int>(rem % A.size);
        rem /= static_cast<size_t>(A.size);
      }
      for (int a : args) row.push_back(num(a));
      rows.push_back(SExpr::make_list(std::move(row)));
    }
    xs.push_back(SExpr::make_list(std::move(rows)));
  }
  return SExpr::make_list(std::move(xs));
}

std::string print_structure(const FiniteStructure& A) { return to_text(structure_to_sexpr(A)); }

}  // namespace fvkit
