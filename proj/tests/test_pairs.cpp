#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "fvkit/pairs.hpp"

using namespace fvkit;

namespace {

PairProduct two_gf4_pairs() {
  return PairProduct::make_full({make_subfield_pair(4, 2), make_subfield_pair(4, 2)});
}

PairProduct mixed_pairs() {
  return PairProduct::make_full({make_subfield_pair(4, 2), make_subfield_pair(9, 3)});
}

std::vector<Formula> small_corpus(const Signature& sig) {
  std::vector<Formula> out;
  for (const char* s : {
           "(= x y)",
           "(= (+ x y) 0)",
           "(exists u (= (* u u) x))",
           "(forall u (or (= u 0) (exists v (= (* u v) 1))))",
           "(exists u (forall v (or (= v 0) (not (= (* u v) 0)))))",
       })
    out.push_back(parse_formula(s, sig));
  return out;
}

}  // namespace

TEST_CASE("subfield pairs validate; improper and non-closed P are rejected") {
  PairStructure p = make_subfield_pair(4, 2);
  CHECK(p.p_elems == std::vector<int>{0, 1});
  FiniteStructure sub = p.substructure();
  CHECK(sub.size == 2);
  CHECK(sub.fun("+", 1, 1) == 0);  // char 2
  CHECK(sub.fun("*", 1, 1) == 1);
  CHECK(sub.rel_holds("P", {0}));  // P restricts to everything
  CHECK(sub.rel_holds("P", {1}));

  PairStructure nine = make_subfield_pair(9, 3);
  CHECK(nine.p_elems.size() == 3);

  CHECK_THROWS_AS(make_subfield_pair(4, 4), Error);  // P must be proper

  FiniteStructure gf4 = make_gf(4);
  CHECK_THROWS_AS(make_pair(with_pair_predicate(gf4, {0, 2})), Error);  // not closed
  CHECK_THROWS_AS(make_pair(with_pair_predicate(gf4, {0})), Error);     // misses 1
  CHECK_THROWS_AS(make_pair(gf4), Error);  // no P in the signature
}

TEST_CASE("p_part of a pair product is the full box over the subfields") {
  PairProduct A = two_gf4_pairs();
  PPart pp = p_part(A);
  CHECK(pp.product.factors.size() == 2);
  CHECK(pp.product.factors[0].size == 2);
  CHECK(pp.product.carrier.size() == 4);
  CHECK(pp.embed[0] == std::vector<int>{0, 1});

  for (size_t i = 0; i < pp.product.carrier.size(); ++i) {
    CHECK(pp.to_ambient(pp.product.carrier[i]) == pp.carrier_in_ambient[i]);
    CHECK(pp.from_ambient(pp.carrier_in_ambient[i]) == pp.product.carrier[i]);
  }
  CHECK_THROWS_AS(pp.from_ambient({2, 0}), Error);

  PPart mixed = p_part(mixed_pairs());
  CHECK(mixed.product.carrier.size() == 6);
  CHECK(mixed.product.factors[1].size == 3);
}

TEST_CASE("patchwork: splices of P-elements stay in P") {
  PairProduct A = two_gf4_pairs();
  PPart pp = p_part(A);
  for (const auto& f : pp.carrier_in_ambient)
    for (const auto& g : pp.carrier_in_ambient)
      for (unsigned mask = 0; mask < 4; ++mask) {
        std::set<int> U;
        for (int x = 0; x < 2; ++x)
          if (mask >> x & 1) U.insert(x);
        std::vector<int> h = patch(A.ambient, f, g, U);
        CHECK_FALSE(pp.from_ambient(h).empty());  // throws when outside P
      }
}

TEST_CASE("the P-part passes the gamma properties") {
  for (PairProduct A : {two_gf4_pairs(), mixed_pairs()}) {
    PPart pp = p_part(A);
    GammaReport rep = check_gamma_properties(pp.product, small_corpus(pp.product.sig()));
    CHECK(rep.p1_ok);
    CHECK(rep.p2_ok);
    CHECK(rep.p3_ok);
  }
}

TEST_CASE("fibers of closed carrier subsets") {
  BooleanProduct A = BooleanProduct::make_full({make_gf(4), make_gf(4)});

  std::vector<std::vector<int>> diag;
  for (int e = 0; e < 4; ++e) diag.push_back({e, e});
  FiberReport d = fiber_substructures(A, diag);
  CHECK(d.fibers[0].size == 4);
  CHECK(d.fibers[1].size == 4);
  CHECK_FALSE(d.full_box);  // 4 != 16

  std::vector<std::vector<int>> box;
  for (int a : {0, 1})
    for (int b = 0; b < 4; ++b) box.push_back({a, b});
  FiberReport f = fiber_substructures(A, box);
  CHECK(f.fibers[0].size == 2);
  CHECK(f.fibers[1].size == 4);
  CHECK(f.full_box);

  CHECK_THROWS_AS(fiber_substructures(A, {{0, 0}, {1, 1}, {2, 2}}), Error);  // not closed
  CHECK_THROWS_AS(fiber_substructures(A, {}), Error);
}

TEST_CASE("remark-style degeneracy: full carrier fibers are the factors themselves") {
  BooleanProduct A = BooleanProduct::make_full({make_gf(2), make_gf(3)});
  FiberReport rep = fiber_substructures(A, A.carrier);
  CHECK(rep.full_box);
  for (int x = 0; x < 2; ++x) {
    CHECK(rep.fibers[x].size == A.factors[x].size);
    CHECK(rep.fibers[x].funcs == A.factors[x].funcs);
    CHECK(rep.fibers[x].consts == A.factors[x].consts);
  }
  // so relative truth sets collapse to plain ones
  Formula phi = parse_formula("(exists u (= (* u u) x))", A.sig());
  SubalgebraReport alg = pair_boolean_subalgebra(A, A.carrier, {phi});
  for (const auto& g : alg.generators) {
    bool found = false;
    for (const auto& f : A.carrier) found = found || truth_set(A, phi, {f}) == g;
    CHECK(found);
  }
}

TEST_CASE("generated subalgebras of the index powerset") {
  PairProduct A = two_gf4_pairs();
  PPart pp = p_part(A);
  const Signature& sig = A.ambient.sig();

  SubalgebraReport triv = pair_boolean_subalgebra(A.ambient, pp.carrier_in_ambient,
                                                  {parse_formula("(= x x)", sig)});
  CHECK(triv.generators.size() == 1);
  CHECK(triv.elements == std::vector<std::set<int>>{{}, {0, 1}});
  CHECK(triv.atom_count == 1);

  SubalgebraReport eq = pair_boolean_subalgebra(A.ambient, pp.carrier_in_ambient,
                                                {parse_formula("(= x y)", sig)});
  CHECK(eq.atom_count == 2);  // identical factors, P-part separates coordinates
  CHECK(eq.elements.size() == 4);

  // a corpus closed under negation yields a complement-closed generator set
  SubalgebraReport neg = pair_boolean_subalgebra(
      A.ambient, pp.carrier_in_ambient,
      {parse_formula("(= x y)", sig), parse_formula("(not (= x y))", sig)});
  std::set<int> all{0, 1};
  for (const auto& g : neg.generators) {
    std::set<int> co;
    std::set_difference(all.begin(), all.end(), g.begin(), g.end(),
                        std::inserter(co, co.begin()));
    CHECK(std::find(neg.generators.begin(), neg.generators.end(), co) != neg.generators.end());
  }
  // and the generated algebra is always complement-closed
  for (const auto& e : eq.elements) {
    std::set<int> co;
    std::set_difference(all.begin(), all.end(), e.begin(), e.end(),
                        std::inserter(co, co.begin()));
    CHECK(std::find(eq.elements.begin(), eq.elements.end(), co) != eq.elements.end());
  }
}

TEST_CASE("dense-pair conditions on subfield pair products") {
  PairProduct A = two_gf4_pairs();
  Formula top = parse_formula("(and)", A.ambient.sig());

  DensePairReport rep = dense_pair_check(A, top, 2);
  CHECK(rep.d1_equal);
  CHECK(rep.d1_same_atoms);
  CHECK(rep.d1_atoms_ambient == 2);
  CHECK(rep.d1_atoms_pair == 2);
  CHECK(rep.d3_ok);
  CHECK(rep.d3_balls == 1);
  CHECK(rep.d4_ok);
  CHECK(rep.d4_checks > 0);

  // (D2) fails at degree 2: x^2 + x + 1 splits only outside F2
  CHECK_FALSE(rep.d2_ok);
  REQUIRE(rep.d2_failures.size() == 2);  // one per factor
  CHECK(rep.d2_failures[0].factor == 0);
  CHECK(rep.d2_failures[0].coeffs == std::vector<int>{1, 1, 1});
  CHECK(rep.d2_failures[0].ambient_roots.size() == 2);
  CHECK(rep.d2_failures[1].factor == 1);
  CHECK(rep.d2_failures[1].coeffs == std::vector<int>{1, 1, 1});
  CHECK(rep.d2_polys == 12);  // per factor: 2 linear + 4 quadratic

  // at degree 1 the same pair is closed, so everything passes
  DensePairReport lin = dense_pair_check(A, top, 1);
  CHECK(lin.ok());

  CHECK_THROWS_AS(dense_pair_check(A, top, 0), Error);
}

TEST_CASE("a chi-ball can miss the P-part: exact witness") {
  PairProduct A = mixed_pairs();
  // ball of u = y + y: a singleton, outside D when 2y is
  Formula chi = parse_formula("(= u (+ y y))", A.ambient.sig());
  DensePairReport rep = dense_pair_check(A, chi, 1);
  CHECK_FALSE(rep.d3_ok);
  CHECK(rep.d3_balls == (long long)A.ambient.carrier.size());
  REQUIRE(!rep.d3_failures.empty());
  // every witness parameter has a coordinate with 2b outside the subfield
  for (const auto& b : rep.d3_failures) {
    const std::vector<int>& v = b.at(0);
    std::vector<int> twice{A.pairs[0].ambient.fun("+", v[0], v[0]),
                           A.pairs[1].ambient.fun("+", v[1], v[1])};
    bool outside = !std::binary_search(A.pairs[0].p_elems.begin(), A.pairs[0].p_elems.end(),
                                       twice[0]) ||
                   !std::binary_search(A.pairs[1].p_elems.begin(), A.pairs[1].p_elems.end(),
                                       twice[1]);
    CHECK(outside);
  }
}

TEST_CASE("relativization identity over the corpus") {
  for (PairProduct A :
       {two_gf4_pairs(), mixed_pairs(),
        PairProduct::make_full(
            {make_subfield_pair(4, 2), make_subfield_pair(4, 2), make_subfield_pair(4, 2)})}) {
    RelativizationReport rep = check_relativization(A, small_corpus(A.ambient.sig()));
    CAPTURE(A.ambient.factors.size());
    CHECK(rep.ok);
    CHECK(rep.failures.empty());
    CHECK(rep.checks > 0);
  }
}
