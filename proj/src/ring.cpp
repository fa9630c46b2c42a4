#include "fvkit/ring.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "fvkit/sexpr.hpp"

namespace fvkit {

namespace {

constexpr int kFailCap = 8;

void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

}  // namespace

int FiniteRing::neg(int x) const {
  for (int y = 0; y < n; ++y)
    if (a(x, y) == zero) return y;
  throw Error("ring " + name + ": no additive inverse for " + std::to_string(x));
}

void FiniteRing::validate() const {
  require(n >= 1, "ring: empty carrier");
  require((int)add.size() == n * n && (int)mul.size() == n * n,
          "ring " + name + ": table extent mismatch");
  for (int v : add) require(v >= 0 && v < n, "ring " + name + ": add out of range");
  for (int v : mul) require(v >= 0 && v < n, "ring " + name + ": mul out of range");
  require(zero >= 0 && zero < n && one >= 0 && one < n,
          "ring " + name + ": distinguished element out of range");

  for (int x = 0; x < n; ++x) {
    require(a(x, zero) == x, "ring " + name + ": 0 is not additive identity");
    require(m(x, one) == x, "ring " + name + ": 1 is not multiplicative identity");
    bool inv = false;
    for (int y = 0; y < n && !inv; ++y) inv = a(x, y) == zero;
    require(inv, "ring " + name + ": missing additive inverse");
    for (int y = 0; y < n; ++y) {
      require(a(x, y) == a(y, x), "ring " + name + ": addition not commutative");
      require(m(x, y) == m(y, x), "ring " + name + ": multiplication not commutative");
    }
  }

  auto triple = [&](int x, int y, int z) {
    require(a(a(x, y), z) == a(x, a(y, z)), "ring " + name + ": addition not associative");
    require(m(m(x, y), z) == m(x, m(y, z)),
            "ring " + name + ": multiplication not associative");
    require(m(x, a(y, z)) == a(m(x, y), m(x, z)),
            "ring " + name + ": distributivity fails");
  };
  if (n <= 32) {
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z) triple(x, y, z);
  } else {
    std::mt19937 rng(0x5eed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int i = 0; i < 20000; ++i) triple(pick(rng), pick(rng), pick(rng));
  }
}

FiniteStructure FiniteRing::to_structure() const {
  FiniteStructure A;
  A.name = name;
  A.sig = sig_ring();
  A.size = n;
  A.funcs["+"] = add;
  A.funcs["*"] = mul;
  std::vector<int> sub_table(n * n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) sub_table[x * n + y] = sub(x, y);
  A.funcs["-"] = sub_table;
  A.consts["0"] = zero;
  A.consts["1"] = one;
  A.validate();
  return A;
}

FiniteRing ring_from_structure(const FiniteStructure& A) {
  FiniteRing R;
  R.name = A.name;
  R.n = A.size;
  R.add.resize(R.n * R.n);
  R.mul.resize(R.n * R.n);
  for (int x = 0; x < R.n; ++x)
    for (int y = 0; y < R.n; ++y) {
      R.add[x * R.n + y] = A.fun("+", x, y);
      R.mul[x * R.n + y] = A.fun("*", x, y);
    }
  R.zero = A.constant("0");
  R.one = A.constant("1");
  R.validate();
  return R;
}

FiniteRing ring_zmod(int n) { return ring_from_structure(make_zmod(n)); }

FiniteRing ring_gf(int q) { return ring_from_structure(make_gf(q)); }

FiniteRing ring_dual(int q) {
  FiniteRing F = ring_gf(q);
  FiniteRing R;
  R.name = "F" + std::to_string(q) + "[e]";
  R.n = q * q;
  R.add.resize(R.n * R.n);
  R.mul.resize(R.n * R.n);
  auto enc = [&](int a, int b) { return a + q * b; };
  for (int a1 = 0; a1 < q; ++a1)
    for (int b1 = 0; b1 < q; ++b1)
      for (int a2 = 0; a2 < q; ++a2)
        for (int b2 = 0; b2 < q; ++b2) {
          int x = enc(a1, b1), y = enc(a2, b2);
          R.add[x * R.n + y] = enc(F.a(a1, a2), F.a(b1, b2));
          // (a1 + b1 e)(a2 + b2 e) = a1 a2 + (a1 b2 + b1 a2) e
          R.mul[x * R.n + y] = enc(F.m(a1, a2), F.a(F.m(a1, b2), F.m(b1, a2)));
        }
  R.zero = enc(F.zero, F.zero);
  R.one = enc(F.one, F.zero);
  R.validate();
  return R;
}

FiniteRing ring_product(const std::vector<FiniteRing>& factors) {
  require(!factors.empty(), "ring_product: no factors");
  FiniteRing R;
  R.n = 1;
  for (size_t i = 0; i < factors.size(); ++i) {
    R.n *= factors[i].n;
    R.name += (i ? "x" : "") + factors[i].name;
  }
  auto decode = [&](int x) {
    std::vector<int> c(factors.size());
    for (size_t i = factors.size(); i-- > 0;) {
      c[i] = x % factors[i].n;
      x /= factors[i].n;
    }
    return c;
  };
  auto encode = [&](const std::vector<int>& c) {
    int x = 0;
    for (size_t i = 0; i < factors.size(); ++i) x = x * factors[i].n + c[i];
    return x;
  };
  R.add.resize(R.n * R.n);
  R.mul.resize(R.n * R.n);
  for (int x = 0; x < R.n; ++x)
    for (int y = 0; y < R.n; ++y) {
      std::vector<int> cx = decode(x), cy = decode(y), ca(factors.size()), cm(factors.size());
      for (size_t i = 0; i < factors.size(); ++i) {
        ca[i] = factors[i].a(cx[i], cy[i]);
        cm[i] = factors[i].m(cx[i], cy[i]);
      }
      R.add[x * R.n + y] = encode(ca);
      R.mul[x * R.n + y] = encode(cm);
    }
  std::vector<int> zs(factors.size()), os(factors.size());
  for (size_t i = 0; i < factors.size(); ++i) {
    zs[i] = factors[i].zero;
    os[i] = factors[i].one;
  }
  R.zero = encode(zs);
  R.one = encode(os);
  R.validate();
  return R;
}

IdempotentAlgebra idempotent_algebra(const FiniteRing& R) {
  IdempotentAlgebra B;
  B.ring = R;
  for (int e = 0; e < R.n; ++e)
    if (R.m(e, e) == e) B.elems.push_back(e);
  for (int e : B.elems) {
    if (e == R.zero) continue;
    bool minimal = true;
    for (int f : B.elems)
      if (f != R.zero && f != e && B.leq(f, e)) minimal = false;
    if (minimal) B.atoms.push_back(e);
  }
  return B;
}

VnrReport is_vnr(const FiniteRing& R) {
  VnrReport rep;
  rep.quasi_inverse.assign(R.n, -1);
  for (int x = 0; x < R.n; ++x) {
    for (int y = 0; y < R.n; ++y)
      if (R.m(R.m(x, y), x) == x) {
        rep.quasi_inverse[x] = y;
        break;
      }
    if (rep.quasi_inverse[x] < 0) {
      rep.ok = false;
      rep.witnesses.push_back(x);
    }
  }
  return rep;
}

namespace {

// eR with unit e, reindexed over its sorted carrier.
Stalk make_stalk(const FiniteRing& R, int atom) {
  Stalk s;
  s.atom = atom;
  int c = R.sub(R.one, atom);
  std::set<int> ideal, carrier;
  for (int r = 0; r < R.n; ++r) {
    ideal.insert(R.m(c, r));
    carrier.insert(R.m(atom, r));
  }
  s.ideal.assign(ideal.begin(), ideal.end());

  std::vector<int> elems(carrier.begin(), carrier.end());
  std::map<int, int> pos;
  for (size_t i = 0; i < elems.size(); ++i) pos[elems[i]] = (int)i;

  FiniteRing& F = s.field;
  F.name = R.name + "/(" + std::to_string(c) + ")";
  F.n = (int)elems.size();
  F.add.resize(F.n * F.n);
  F.mul.resize(F.n * F.n);
  for (int i = 0; i < F.n; ++i)
    for (int j = 0; j < F.n; ++j) {
      F.add[i * F.n + j] = pos.at(R.m(atom, R.a(elems[i], elems[j])));
      F.mul[i * F.n + j] = pos.at(R.m(elems[i], elems[j]));
    }
  F.zero = pos.at(R.zero);
  F.one = pos.at(atom);
  F.validate();

  s.project.resize(R.n);
  for (int r = 0; r < R.n; ++r) s.project[r] = pos.at(R.m(atom, r));
  return s;
}

bool is_field(const FiniteRing& F) {
  if (F.n < 2 || F.zero == F.one) return false;
  int units = 0;
  for (int x = 0; x < F.n; ++x) {
    if (x == F.zero) continue;
    for (int y = 0; y < F.n; ++y)
      if (y != F.zero && F.m(x, y) == F.zero) return false;  // zero divisor
    for (int y = 0; y < F.n; ++y)
      if (F.m(x, y) == F.one) {
        ++units;
        break;
      }
  }
  return units == F.n - 1;
}

}  // namespace

StalkDecomposition decompose_stalks(const FiniteRing& R) {
  if (!is_vnr(R).ok) throw Error("decompose_stalks: " + R.name + " is not von Neumann regular");
  IdempotentAlgebra B = idempotent_algebra(R);
  StalkDecomposition out;
  for (int atom : B.atoms) {
    Stalk s = make_stalk(R, atom);
    if (!is_field(s.field))
      throw Error("decompose_stalks: stalk at " + std::to_string(atom) + " is not a field");
    out.stalks.push_back(std::move(s));
  }

  out.iso.resize(R.n);
  long long prod = 1;
  for (const Stalk& s : out.stalks) prod *= s.field.n;
  std::set<std::vector<int>> seen;
  for (int r = 0; r < R.n; ++r) {
    for (const Stalk& s : out.stalks) out.iso[r].push_back(s.project[r]);
    seen.insert(out.iso[r]);
  }
  bool ok = prod == R.n && (int)seen.size() == R.n;
  for (int x = 0; x < R.n && ok; ++x)
    for (int y = 0; y < R.n && ok; ++y)
      for (size_t i = 0; i < out.stalks.size() && ok; ++i) {
        const FiniteRing& F = out.stalks[i].field;
        ok = out.iso[R.a(x, y)][i] == F.a(out.iso[x][i], out.iso[y][i]) &&
             out.iso[R.m(x, y)][i] == F.m(out.iso[x][i], out.iso[y][i]);
      }
  out.reconstruction_ok = ok;
  return out;
}

std::vector<std::vector<int>> maximal_ideals(const FiniteRing& R) {
  if (is_vnr(R).ok) {
    std::vector<std::vector<int>> out;
    for (const int atom : idempotent_algebra(R).atoms) {
      int c = R.sub(R.one, atom);
      std::set<int> ideal;
      for (int r = 0; r < R.n; ++r) ideal.insert(R.m(c, r));
      out.emplace_back(ideal.begin(), ideal.end());
    }
    return out;
  }

  require(R.n <= 16, "maximal_ideals: exhaustive scan limited to n <= 16");
  std::vector<uint32_t> proper;
  for (uint32_t s = 0; s < (1u << R.n); ++s) {
    if (!(s >> R.zero & 1) || (s >> R.one & 1)) continue;
    bool ideal = true;
    for (int x = 0; x < R.n && ideal; ++x) {
      if (!(s >> x & 1)) continue;
      for (int y = 0; y < R.n && ideal; ++y) {
        if ((s >> y & 1) && !(s >> R.a(x, y) & 1)) ideal = false;
        if (!(s >> R.m(x, y) & 1)) ideal = false;
      }
    }
    if (ideal) proper.push_back(s);
  }
  std::vector<std::vector<int>> out;
  for (uint32_t s : proper) {
    bool maximal = true;
    for (uint32_t t : proper)
      if (t != s && (s & t) == s) maximal = false;
    if (!maximal) continue;
    std::vector<int> elems;
    for (int x = 0; x < R.n; ++x)
      if (s >> x & 1) elems.push_back(x);
    out.push_back(std::move(elems));
  }
  return out;
}

DerivationTable parse_derivation(std::string_view text) {
  SExpr e = parse_sexpr(text);
  if (!e.is_list() || e.head() != "derivation")
    throw Error("parse_derivation: expected (derivation (elem image) ...)");
  std::map<int, int> entries;
  for (size_t i = 1; i < e.size(); ++i) {
    const SExpr& item = e.at(i);
    if (!item.is_list() || item.size() != 2)
      throw Error("parse_derivation: entries are (elem image) pairs");
    entries[item.at(0).as_int()] = item.at(1).as_int();
  }
  DerivationTable d;
  d.delta.resize(entries.size());
  for (size_t i = 0; i < d.delta.size(); ++i) {
    auto it = entries.find((int)i);
    if (it == entries.end())
      throw Error("parse_derivation: missing entry for element " + std::to_string(i));
    d.delta[i] = it->second;
  }
  return d;
}

std::string print_derivation(const DerivationTable& d) {
  std::vector<SExpr> items;
  items.push_back(SExpr::make_atom("derivation"));
  for (size_t i = 0; i < d.delta.size(); ++i)
    items.push_back(SExpr::make_list({SExpr::make_atom(std::to_string(i)),
                                      SExpr::make_atom(std::to_string(d.delta[i]))}));
  return to_text(SExpr::make_list(std::move(items)));
}

DerivationTable zero_derivation(const FiniteRing& R) {
  DerivationTable d;
  d.delta.assign(R.n, R.zero);
  return d;
}

DerivationTable dual_derivation(int q) {
  DerivationTable d;
  d.delta.resize(q * q);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) d.delta[a + q * b] = b;  // a + b e -> b
  return d;
}

DerivationTable product_derivation(const std::vector<FiniteRing>& factors,
                                   const std::vector<DerivationTable>& ds) {
  require(factors.size() == ds.size(), "product_derivation: factor/table count mismatch");
  int n = 1;
  for (const FiniteRing& F : factors) n *= F.n;
  DerivationTable d;
  d.delta.resize(n);
  for (int x = 0; x < n; ++x) {
    int rest = x, out = 0;
    std::vector<int> c(factors.size());
    for (size_t i = factors.size(); i-- > 0;) {
      c[i] = rest % factors[i].n;
      rest /= factors[i].n;
    }
    for (size_t i = 0; i < factors.size(); ++i) out = out * factors[i].n + ds[i].delta[c[i]];
    d.delta[x] = out;
  }
  return d;
}

DerivationReport check_derivation(const FiniteRing& R, const DerivationTable& d) {
  require((int)d.delta.size() == R.n, "check_derivation: table size mismatch");
  for (int v : d.delta) require(v >= 0 && v < R.n, "check_derivation: image out of range");
  DerivationReport rep;
  for (int x = 0; x < R.n; ++x)
    for (int y = 0; y < R.n; ++y) {
      if (d.delta[R.a(x, y)] != R.a(d.delta[x], d.delta[y])) {
        rep.additive_ok = false;
        if ((int)rep.additive_failures.size() < kFailCap) rep.additive_failures.push_back({x, y});
      }
      if (d.delta[R.m(x, y)] != R.a(R.m(d.delta[x], y), R.m(x, d.delta[y]))) {
        rep.leibniz_ok = false;
        if ((int)rep.leibniz_failures.size() < kFailCap) rep.leibniz_failures.push_back({x, y});
      }
    }
  for (int e : idempotent_algebra(R).elems)
    if (d.delta[e] != R.zero) {
      rep.idempotents_ok = false;
      rep.idempotent_failures.push_back(e);
    }
  for (int r = 0; r < R.n; ++r)
    if (d.delta[r] == R.zero) rep.constants.push_back(r);
  rep.ok = rep.additive_ok && rep.leibniz_ok;
  return rep;
}

std::vector<DerivationTable> enumerate_derivations(const FiniteRing& R) {
  require(R.n <= 16, "enumerate_derivations: limited to n <= 16");

  // additive generators: smallest element outside the running span
  std::vector<int> gens;
  std::set<int> span{R.zero};
  auto close = [&] {
    bool grew = true;
    while (grew) {
      grew = false;
      std::vector<int> cur(span.begin(), span.end());
      for (int x : cur)
        for (int g : gens)
          if (span.insert(R.a(x, g)).second) grew = true;
    }
  };
  for (int x = 0; x < R.n; ++x)
    if (!span.count(x)) {
      gens.push_back(x);
      close();
    }

  std::vector<DerivationTable> out;
  std::vector<int> images(gens.size(), 0);
  auto attempt = [&] {
    std::vector<int> delta(R.n, -1);
    delta[R.zero] = R.zero;
    bool grew = true;
    while (grew) {
      grew = false;
      for (int x = 0; x < R.n; ++x) {
        if (delta[x] < 0) continue;
        for (size_t i = 0; i < gens.size(); ++i) {
          int y = R.a(x, gens[i]);
          int img = R.a(delta[x], images[i]);
          if (delta[y] < 0) {
            delta[y] = img;
            grew = true;
          } else if (delta[y] != img) {
            return;  // inconsistent generator images
          }
        }
      }
    }
    for (int v : delta)
      if (v < 0) return;
    DerivationTable d{std::move(delta)};
    DerivationReport rep = check_derivation(R, d);
    if (rep.ok) out.push_back(std::move(d));
  };
  // odometer over generator images, last generator fastest
  while (true) {
    attempt();
    size_t i = gens.size();
    while (i > 0 && images[i - 1] == R.n - 1) images[--i] = 0;
    if (i == 0) break;
    ++images[i - 1];
  }
  return out;
}

DiffIdealReport check_differential_ideals(const FiniteRing& R, const DerivationTable& d) {
  require((int)d.delta.size() == R.n, "check_differential_ideals: table size mismatch");
  DiffIdealReport rep;
  for (const std::vector<int>& M : maximal_ideals(R)) {
    std::set<int> members(M.begin(), M.end());
    for (int m : M) {
      ++rep.checks;
      if (!members.count(d.delta[m])) {
        rep.ok = false;
        if ((int)rep.violations.size() < kFailCap)
          rep.violations.push_back({M, m, d.delta[m]});
      }
    }
  }
  return rep;
}

Subring constants_subring(const FiniteRing& R, const DerivationTable& d) {
  DerivationReport rep = check_derivation(R, d);
  if (!rep.ok) throw Error("constants_subring: table is not a derivation");
  Subring out;
  out.elems = rep.constants;
  std::map<int, int> pos;
  for (size_t i = 0; i < out.elems.size(); ++i) pos[out.elems[i]] = (int)i;
  FiniteRing& C = out.ring;
  C.name = R.name + "^delta";
  C.n = (int)out.elems.size();
  C.add.resize(C.n * C.n);
  C.mul.resize(C.n * C.n);
  for (int i = 0; i < C.n; ++i)
    for (int j = 0; j < C.n; ++j) {
      C.add[i * C.n + j] = pos.at(R.a(out.elems[i], out.elems[j]));
      C.mul[i * C.n + j] = pos.at(R.m(out.elems[i], out.elems[j]));
    }
  C.zero = pos.at(R.zero);
  C.one = pos.at(R.one);
  C.validate();
  return out;
}

}  // namespace fvkit
