#include "fvkit/pairs.hpp"

#include <algorithm>
#include <map>

namespace fvkit {

namespace {

constexpr int kPolyCap = 8;
constexpr int kRelCap = 16;

// the substructure induced on a sorted, operation-closed element subset
FiniteStructure induced_substructure(const FiniteStructure& A, const std::vector<int>& elems,
                                     const std::string& name) {
  std::map<int, int> pos;
  for (size_t i = 0; i < elems.size(); ++i) pos[elems[i]] = (int)i;
  int n = (int)elems.size();

  FiniteStructure S;
  S.name = name;
  S.sig = A.sig;
  S.size = n;
  for (const auto& [fn, arity] : A.sig.functions) {
    std::vector<int> table;
    std::vector<int> idx(arity, 0);
    table.reserve(1);
    while (true) {
      std::vector<int> args(arity);
      for (int i = 0; i < arity; ++i) args[i] = elems[idx[i]];
      int out;
      if (arity == 1)
        out = A.fun(fn, args[0]);
      else if (arity == 2)
        out = A.fun(fn, args[0], args[1]);
      else
        throw Error("substructure: unsupported arity for " + fn);
      auto it = pos.find(out);
      if (it == pos.end())
        throw Error("substructure: " + name + " not closed under " + fn);
      table.push_back(it->second);
      int i = arity;
      while (i > 0 && idx[i - 1] == n - 1) idx[--i] = 0;
      if (i == 0) break;
      ++idx[i - 1];
    }
    S.funcs[fn] = std::move(table);
  }
  for (const std::string& c : A.sig.constants) {
    auto it = pos.find(A.constant(c));
    if (it == pos.end()) throw Error("substructure: " + name + " misses constant " + c);
    S.consts[c] = it->second;
  }
  for (const auto& [rl, arity] : A.sig.relations) {
    std::vector<char> table;
    std::vector<int> idx(arity, 0);
    while (true) {
      std::vector<int> args(arity);
      for (int i = 0; i < arity; ++i) args[i] = elems[idx[i]];
      table.push_back(A.rel_holds(rl, args) ? 1 : 0);
      int i = arity;
      while (i > 0 && idx[i - 1] == n - 1) idx[--i] = 0;
      if (i == 0) break;
      ++idx[i - 1];
    }
    S.rels[rl] = std::move(table);
  }
  S.validate();
  return S;
}

}  // namespace

void PairStructure::validate() const {
  ambient.validate();
  if (!ambient.sig.relation_arity("P") || *ambient.sig.relation_arity("P") != 1)
    throw Error("pair: signature lacks the unary predicate P");
  if (p_elems.empty()) throw Error("pair: P is empty");
  if ((int)p_elems.size() >= ambient.size) throw Error("pair: P must be proper");
  for (size_t i = 0; i + 1 < p_elems.size(); ++i)
    if (p_elems[i] >= p_elems[i + 1]) throw Error("pair: P not sorted");
  for (int e : p_elems)
    if (e < 0 || e >= ambient.size || !ambient.rel_holds("P", {e}))
      throw Error("pair: element list disagrees with the P table");
  // closure comes out of the substructure construction
  induced_substructure(ambient, p_elems, ambient.name + "_P");
}

FiniteStructure PairStructure::substructure() const {
  return induced_substructure(ambient, p_elems, ambient.name + "_P");
}

PairStructure make_pair(FiniteStructure ambient) {
  PairStructure p;
  p.ambient = std::move(ambient);
  if (!p.ambient.sig.relation_arity("P") || *p.ambient.sig.relation_arity("P") != 1)
    throw Error("pair: signature lacks the unary predicate P");
  for (int e = 0; e < p.ambient.size; ++e)
    if (p.ambient.rel_holds("P", {e})) p.p_elems.push_back(e);
  p.validate();
  return p;
}

PairStructure make_subfield_pair(int q, int sub) {
  FiniteStructure gf = make_gf(q);
  return make_pair(with_pair_predicate(gf, subfield_elements(gf, sub)));
}

PairProduct PairProduct::make_full(std::vector<PairStructure> pairs) {
  if (pairs.empty()) throw Error("pair product: no factors");
  PairProduct P;
  std::vector<FiniteStructure> ambients;
  for (PairStructure& p : pairs) {
    p.validate();
    ambients.push_back(p.ambient);
  }
  P.pairs = std::move(pairs);
  P.ambient = BooleanProduct::make_full(std::move(ambients));
  return P;
}

std::vector<int> PPart::to_ambient(const std::vector<int>& d) const {
  std::vector<int> out(d.size());
  for (size_t i = 0; i < d.size(); ++i) out[i] = embed.at(i).at(d[i]);
  return out;
}

std::vector<int> PPart::from_ambient(const std::vector<int>& a) const {
  std::vector<int> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    out[i] = into.at(i).at(a[i]);
    if (out[i] < 0) throw Error("p_part: coordinate outside P");
  }
  return out;
}

PPart p_part(const PairProduct& A) {
  if (!A.ambient.full) throw Error("p_part: ambient product must be full");
  PPart pp;
  std::vector<FiniteStructure> fibers;
  for (const PairStructure& p : A.pairs) {
    fibers.push_back(p.substructure());
    pp.embed.push_back(p.p_elems);
    std::vector<int> inv(p.ambient.size, -1);
    for (size_t i = 0; i < p.p_elems.size(); ++i) inv[p.p_elems[i]] = (int)i;
    pp.into.push_back(std::move(inv));
  }
  pp.product = BooleanProduct::make_full(std::move(fibers));
  for (const std::vector<int>& d : pp.product.carrier)
    pp.carrier_in_ambient.push_back(pp.to_ambient(d));
  return pp;
}

FiberReport fiber_substructures(const BooleanProduct& A,
                                const std::vector<std::vector<int>>& D) {
  if (D.empty()) throw Error("fibers: empty carrier subset");
  std::set<std::vector<int>> members(D.begin(), D.end());
  for (const std::vector<int>& d : D)
    if (A.carrier_index(d) < 0) throw Error("fibers: element outside the carrier");

  // closure under functions and constants, componentwise
  for (const auto& [fn, arity] : A.sig().functions) {
    if (arity == 1) {
      for (const auto& d : D)
        if (!members.count(A.apply(fn, {d}))) throw Error("fibers: not closed under " + fn);
    } else if (arity == 2) {
      for (const auto& d : D)
        for (const auto& e : D)
          if (!members.count(A.apply(fn, {d, e})))
            throw Error("fibers: not closed under " + fn);
    } else {
      throw Error("fibers: unsupported arity for " + fn);
    }
  }
  for (const std::string& c : A.sig().constants)
    if (!members.count(A.constant_elem(c))) throw Error("fibers: missing constant " + c);

  FiberReport rep;
  long long box = 1;
  for (int x = 0; x < A.index_count(); ++x) {
    std::set<int> hit;
    for (const auto& d : D) hit.insert(d[x]);
    std::vector<int> elems(hit.begin(), hit.end());
    rep.fibers.push_back(induced_substructure(A.factors[x], elems,
                                              A.factors[x].name + "_fiber"));
    box *= (long long)elems.size();
    rep.elems.push_back(std::move(elems));
  }
  rep.full_box = box == (long long)D.size();
  return rep;
}

namespace {

// [phi(f)]^D via the fibers; args are ambient elements with all coordinates in D
std::set<int> relative_truth_set(const std::vector<FiniteStructure>& fibers,
                                 const std::vector<std::vector<int>>& fiber_elems,
                                 const Formula& phi, const std::vector<std::string>& vars,
                                 const std::vector<std::vector<int>>& args) {
  std::set<int> out;
  for (size_t x = 0; x < fibers.size(); ++x) {
    Assignment asg;
    for (size_t i = 0; i < vars.size(); ++i) {
      const std::vector<int>& elems = fiber_elems[x];
      auto it = std::lower_bound(elems.begin(), elems.end(), args[i][x]);
      if (it == elems.end() || *it != args[i][x])
        throw Error("relative truth set: argument coordinate outside the fiber");
      asg[vars[i]] = (int)(it - elems.begin());
    }
    if (eval_formula(fibers[x], phi, asg)) out.insert((int)x);
  }
  return out;
}

// partition of X by membership signature; atoms of the generated subalgebra
std::vector<std::set<int>> signature_blocks(int k, const std::vector<std::set<int>>& gens) {
  std::map<std::vector<char>, std::set<int>> blocks;
  for (int x = 0; x < k; ++x) {
    std::vector<char> key;
    for (const auto& g : gens) key.push_back(g.count(x) ? 1 : 0);
    blocks[key].insert(x);
  }
  std::vector<std::set<int>> out;
  for (auto& [key, b] : blocks) out.push_back(std::move(b));
  return out;
}

unsigned set_mask(const std::set<int>& s) {
  unsigned m = 0;
  for (int x : s) m |= 1u << x;
  return m;
}

std::vector<std::set<int>> algebra_from_blocks(const std::vector<std::set<int>>& blocks) {
  std::vector<std::set<int>> out;
  for (uint32_t s = 0; s < (1u << blocks.size()); ++s) {
    std::set<int> e;
    for (size_t i = 0; i < blocks.size(); ++i)
      if (s >> i & 1) e.insert(blocks[i].begin(), blocks[i].end());
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const std::set<int>& a, const std::set<int>& b) {
    return set_mask(a) < set_mask(b);
  });
  return out;
}

}  // namespace

SubalgebraReport pair_boolean_subalgebra(const BooleanProduct& A,
                                         const std::vector<std::vector<int>>& D,
                                         const std::vector<Formula>& corpus,
                                         long long max_tuples_per_formula) {
  FiberReport fib = fiber_substructures(A, D);
  SubalgebraReport rep;
  for (const Formula& phi : corpus) {
    std::vector<std::string> vars = free_vars(phi);
    long long tuples = 1;
    for (size_t i = 0; i < vars.size(); ++i) {
      tuples *= (long long)D.size();
      if (tuples > max_tuples_per_formula)
        throw Error("subalgebra: tuple budget exceeded for " + print_formula(phi));
    }
    std::vector<size_t> idx(vars.size(), 0);
    while (true) {
      std::vector<std::vector<int>> args;
      for (size_t i = 0; i < vars.size(); ++i) args.push_back(D[idx[i]]);
      std::set<int> ts = relative_truth_set(fib.fibers, fib.elems, phi, vars, args);
      if (std::find(rep.generators.begin(), rep.generators.end(), ts) == rep.generators.end())
        rep.generators.push_back(std::move(ts));
      size_t i = vars.size();
      while (i > 0 && idx[i - 1] == D.size() - 1) idx[--i] = 0;
      if (i == 0) break;
      ++idx[i - 1];
    }
  }
  std::vector<std::set<int>> blocks = signature_blocks(A.index_count(), rep.generators);
  rep.atom_count = (int)blocks.size();
  rep.elements = algebra_from_blocks(blocks);
  return rep;
}

namespace {

// the subalgebra of 2^X generated by the equality truth sets with parameters
// from `elems` (given as carrier coordinate vectors)
std::vector<std::set<int>> equality_blocks(const BooleanProduct& A,
                                           const std::vector<std::vector<int>>& elems) {
  std::vector<std::set<int>> gens;
  for (const auto& f : elems)
    for (const auto& g : elems) {
      std::set<int> eq;
      for (int x = 0; x < A.index_count(); ++x)
        if (f[x] == g[x]) eq.insert(x);
      if (std::find(gens.begin(), gens.end(), eq) == gens.end()) gens.push_back(std::move(eq));
    }
  return signature_blocks(A.index_count(), gens);
}

}  // namespace

DensePairReport dense_pair_check(const PairProduct& A, const Formula& chi, int d_max) {
  if (d_max < 1) throw Error("dense_pair_check: degree bound must be >= 1");
  const BooleanProduct& amb = A.ambient;
  PPart pp = p_part(A);
  DensePairReport rep;

  // (D1) equality-generated subalgebras
  std::vector<std::set<int>> amb_blocks = equality_blocks(amb, amb.carrier);
  std::vector<std::set<int>> pair_blocks = equality_blocks(amb, pp.carrier_in_ambient);
  std::vector<std::set<int>> amb_alg = algebra_from_blocks(amb_blocks);
  std::vector<std::set<int>> pair_alg = algebra_from_blocks(pair_blocks);
  rep.d1_atoms_ambient = (int)amb_blocks.size();
  rep.d1_atoms_pair = (int)pair_blocks.size();
  rep.d1_equal = amb_alg == pair_alg;
  rep.d1_same_atoms = rep.d1_atoms_ambient == rep.d1_atoms_pair;
  rep.d1_note =
      "finite-scale reading: algebras generated by equality truth sets; "
      "elementary equivalence reported as atom-count agreement";

  // (D2) bounded-degree root closure, fiber by fiber
  for (size_t x = 0; x < A.pairs.size(); ++x) {
    const FiniteStructure& F = A.pairs[x].ambient;
    const std::vector<int>& sub = A.pairs[x].p_elems;
    int zero = F.constant("0");
    for (int d = 1; d <= d_max; ++d) {
      std::vector<size_t> idx(d + 1, 0);  // coefficient odometer over sub, c_d fastest
      while (true) {
        std::vector<int> coeffs(d + 1);
        for (int i = 0; i <= d; ++i) coeffs[i] = sub[idx[i]];
        if (coeffs[d] != zero) {
          ++rep.d2_polys;
          auto value_at = [&](int a) {
            int v = coeffs[d];
            for (int i = d - 1; i >= 0; --i) v = F.fun("+", F.fun("*", v, a), coeffs[i]);
            return v;
          };
          std::vector<int> roots;
          for (int a = 0; a < F.size; ++a)
            if (value_at(a) == zero) roots.push_back(a);
          bool in_sub = false;
          for (int r : roots)
            in_sub = in_sub || std::binary_search(sub.begin(), sub.end(), r);
          if (!roots.empty() && !in_sub) {
            rep.d2_ok = false;
            if ((int)rep.d2_failures.size() < kPolyCap)
              rep.d2_failures.push_back({(int)x, coeffs, roots});
          }
        }
        int i = d + 1;
        while (i > 0 && idx[i - 1] == sub.size() - 1) idx[--i] = 0;
        if (i == 0) break;
        ++idx[i - 1];
      }
    }
  }

  // (D3) chi-balls with parameters from the ambient carrier
  std::vector<std::string> vars = free_vars(chi);
  std::vector<std::string> params(vars.begin() + (vars.empty() ? 0 : 1), vars.end());
  std::set<int> all;
  for (int x = 0; x < amb.index_count(); ++x) all.insert(x);
  std::set<std::vector<int>> dset(pp.carrier_in_ambient.begin(), pp.carrier_in_ambient.end());
  std::vector<size_t> pidx(params.size(), 0);
  while (true) {
    std::vector<std::vector<int>> b;
    for (size_t i = 0; i < params.size(); ++i) b.push_back(amb.carrier[pidx[i]]);
    ++rep.d3_balls;
    bool met = false;
    if (vars.empty()) {
      met = truth_set(amb, chi, {}) == all && !dset.empty();
    } else {
      for (const auto& a : pp.carrier_in_ambient) {
        std::vector<std::vector<int>> args{a};
        args.insert(args.end(), b.begin(), b.end());
        if (truth_set(amb, chi, args) == all) {
          met = true;
          break;
        }
      }
    }
    if (!met) {
      rep.d3_ok = false;
      if ((int)rep.d3_failures.size() < kPolyCap) rep.d3_failures.push_back(b);
    }
    size_t i = params.size();
    while (i > 0 && pidx[i - 1] == amb.carrier.size() - 1) pidx[--i] = 0;
    if (i == 0) break;
    ++pidx[i - 1];
  }

  // (D4) refinement of ambient idempotents by pair idempotents
  for (int x = 0; x < amb.index_count(); ++x)
    for (const std::set<int>& e : amb_alg) {
      if (!e.count(x)) continue;
      ++rep.d4_checks;
      bool refined = false;
      for (const std::set<int>& et : pair_alg) {
        if (et.empty() || !et.count(x)) continue;
        if (std::includes(e.begin(), e.end(), et.begin(), et.end())) {
          refined = true;
          break;
        }
      }
      if (!refined) {
        rep.d4_ok = false;
        if ((int)rep.d4_failures.size() < kPolyCap) rep.d4_failures.push_back({x, e});
      }
    }
  return rep;
}

RelativizationReport check_relativization(const PairProduct& A,
                                          const std::vector<Formula>& corpus,
                                          long long max_tuples_per_formula) {
  PPart pp = p_part(A);
  RelativizationReport rep;
  for (const Formula& phi : corpus) {
    Formula rel = relativize(phi, A.ambient.sig(), "P");
    std::vector<std::string> vars = free_vars(phi);
    long long tuples = 1;
    for (size_t i = 0; i < vars.size(); ++i) {
      tuples *= (long long)pp.product.carrier.size();
      if (tuples > max_tuples_per_formula)
        throw Error("relativization: tuple budget exceeded for " + print_formula(phi));
    }
    std::vector<size_t> idx(vars.size(), 0);
    while (true) {
      std::vector<std::vector<int>> fiber_args, amb_args;
      for (size_t i = 0; i < vars.size(); ++i) {
        fiber_args.push_back(pp.product.carrier[idx[i]]);
        amb_args.push_back(pp.carrier_in_ambient[idx[i]]);
      }
      std::set<int> pair_side = truth_set(pp.product, phi, fiber_args);
      std::set<int> amb_side = truth_set(A.ambient, rel, amb_args);
      ++rep.checks;
      if (pair_side != amb_side) {
        rep.ok = false;
        if ((int)rep.failures.size() < kRelCap)
          rep.failures.push_back({print_formula(phi), amb_args, pair_side, amb_side});
      }
      size_t i = vars.size();
      while (i > 0 && idx[i - 1] == pp.product.carrier.size() - 1) idx[--i] = 0;
      if (i == 0) break;
      ++idx[i - 1];
    }
  }
  return rep;
}

}  // namespace fvkit
