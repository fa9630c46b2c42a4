#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fvkit/product.hpp"

using namespace fvkit;

namespace {

BooleanProduct f2xf3() { return BooleanProduct::make_full({make_gf(2), make_gf(3)}); }

BooleanProduct diagonal_f2() {
  return BooleanProduct::make_carrier({make_gf(2), make_gf(2)}, {{0, 0}, {1, 1}});
}

std::vector<Formula> small_corpus(const Signature& sig) {
  std::vector<Formula> out;
  for (const char* s : {"(= x 0)", "(= x y)", "(not (= x 0))", "(and (= x 0) (= y 1))",
                        "(exists u (= (* u u) x))", "(forall u (= (* u x) 0))"})
    out.push_back(parse_formula(s, sig));
  return out;
}

}  // namespace

TEST_CASE("carrier construction and validation") {
  BooleanProduct A = f2xf3();
  CHECK(A.carrier.size() == 6);
  CHECK(A.carrier_index({1, 2}) == 5);
  CHECK(A.carrier_index({0, 0}) == 0);

  BooleanProduct D = diagonal_f2();
  CHECK(D.carrier.size() == 2);

  // not subdirect: constant column misses factor elements
  CHECK_THROWS_AS(BooleanProduct::make_carrier({make_gf(2), make_gf(2)}, {{0, 0}, {0, 1}}),
                  Error);
  // not closed under +: {(0,0),(1,0),(0,1)} since (1,0)+(0,1)=(1,1)
  CHECK_THROWS_AS(
      BooleanProduct::make_carrier({make_gf(2), make_gf(2)}, {{0, 0}, {1, 0}, {0, 1}}), Error);
  // mixed signatures
  CHECK_THROWS_AS(BooleanProduct::make_full({make_gf(2), make_powerset(1)}), Error);
}

TEST_CASE("to_structure matches direct_product on full carriers") {
  BooleanProduct A = f2xf3();
  FiniteStructure S = A.to_structure();
  FiniteStructure P = direct_product({make_gf(2), make_gf(3)});
  CHECK(S.size == P.size);
  CHECK(S.funcs == P.funcs);
  CHECK(S.consts == P.consts);

  // diagonal substructure is isomorphic to F2
  FiniteStructure D = diagonal_f2().to_structure();
  CHECK(D.size == 2);
  CHECK(D.fun("+", 1, 1) == 0);
}

TEST_CASE("truth sets") {
  BooleanProduct A = f2xf3();
  Signature ring = A.sig();
  // x = 0 at a = (0,1): true exactly at coordinate 0
  CHECK(truth_set(A, parse_formula("(= x 0)", ring), {{0, 1}}) == std::set<int>{0});
  // 2 is a non-square mod 3
  CHECK(truth_set(A, parse_formula("(exists y (= (* y y) x))", ring), {{1, 2}}) ==
        std::set<int>{0});
  // validities cover X
  CHECK(truth_set(A, parse_formula("(= x x)", ring), {{1, 2}}) == std::set<int>{0, 1});
  // wrong argument count
  CHECK_THROWS_AS(truth_set(A, parse_formula("(= x y)", ring), {{0, 0}}), Error);

  // boolean behavior: complement and intersection, exhaustively
  Formula f = parse_formula("(= x 0)", ring);
  Formula g = parse_formula("(exists u (= (* u u) x))", ring);
  Formula nf = Formula::not_(f);
  Formula fg = Formula::and_({f, g});
  for (auto& a : A.carrier) {
    unsigned mf = truth_mask(A, f, {a});
    CHECK(truth_mask(A, nf, {a}) == (~mf & 3u));
    CHECK(truth_mask(A, fg, {a}) == (mf & truth_mask(A, g, {a})));
  }
}

TEST_CASE("gamma properties") {
  BooleanProduct A = f2xf3();
  GammaReport rep = check_gamma_properties(A, small_corpus(A.sig()));
  CHECK(rep.p1_ok);
  CHECK(rep.p2_ok);
  CHECK(rep.p3_ok);
  CHECK(rep.p2_failures.empty());
  CHECK(rep.atom_checks > 0);

  // single factor
  BooleanProduct S = BooleanProduct::make_full({make_gf(3)});
  CHECK(check_gamma_properties(S, small_corpus(S.sig())).p2_ok);

  // diagonal carrier fails P2 with the first witness f=(0,0), g=(1,1), U={0}
  BooleanProduct D = diagonal_f2();
  GammaReport dr = check_gamma_properties(D, small_corpus(D.sig()));
  CHECK(dr.p1_ok);
  CHECK_FALSE(dr.p2_ok);
  REQUIRE(!dr.p2_failures.empty());
  CHECK(dr.p2_failures[0].f == std::vector<int>{0, 0});
  CHECK(dr.p2_failures[0].g == std::vector<int>{1, 1});
  CHECK(dr.p2_failures[0].U == std::set<int>{0});
}

TEST_CASE("patch") {
  BooleanProduct A = BooleanProduct::make_full({make_gf(2), make_gf(2)});
  CHECK(patch(A, {0, 0}, {1, 1}, {0}) == std::vector<int>{0, 1});
  CHECK(patch(A, {0, 0}, {1, 1}, {0, 1}) == std::vector<int>{0, 0});  // U = X returns f
  CHECK(patch(A, {0, 0}, {1, 1}, {}) == std::vector<int>{1, 1});      // U = {} returns g
  CHECK_THROWS_WITH(patch(diagonal_f2(), {0, 0}, {1, 1}, {0}), "no patch witness");
}

TEST_CASE("projector apply") {
  BooleanProduct A = BooleanProduct::make_full({make_gf(5), make_gf(5)});
  CHECK(projector_apply(A, {3, 0}, {0, 0}) == std::vector<int>{3, 0});
  // second argument invertible everywhere -> zero
  CHECK(projector_apply(A, {3, 4}, {1, 2}) == std::vector<int>{0, 0});
  CHECK(projector_apply(A, {3, 4}, {0, 2}) == std::vector<int>{3, 0});
}

TEST_CASE("projector identity pairs as truth-set identities") {
  // per coordinate, each factor being a field: the three projector encodings
  std::vector<BooleanProduct> prods;
  prods.push_back(BooleanProduct::make_full({make_gf(2), make_gf(3)}));
  prods.push_back(BooleanProduct::make_full({make_gf(4), make_gf(5)}));
  prods.push_back(BooleanProduct::make_full({make_gf(2), make_gf(2), make_gf(5)}));
  for (auto& A : prods) {
    size_t k = A.factors.size();
    for (auto& u : A.carrier)
      for (auto& v : A.carrier) {
        std::vector<int> p(k);
        for (size_t x = 0; x < k; ++x) p[x] = v[x] == 0 ? u[x] : 0;
        for (size_t x = 0; x < k; ++x) {
          bool u0 = u[x] == 0, v0 = v[x] == 0;
          REQUIRE((u0 || v0) == (p[x] == u[x]));
          REQUIRE((u0 && v0) ==
                  (A.factors[x].fun("+", p[x], v[x]) == 0));
          REQUIRE((u0 || !v0) == (p[x] == 0));
        }
      }
  }
}

TEST_CASE("discriminator law, stalk-wise on F2 x F3") {
  BooleanProduct A = f2xf3();
  for (auto& u : A.carrier)
    for (auto& v : A.carrier)
      for (auto& w : A.carrier)
        for (auto& z : A.carrier)
          for (size_t x = 0; x < 2; ++x) {
            const FiniteStructure& F = A.factors[x];
            int um = F.fun("-", u[x], w[x]);
            int uv = F.fun("-", u[x], v[x]);
            int lhs = uv == 0 ? um : 0;  // p(u-w, u-v)
            bool law = lhs == F.fun("-", u[x], z[x]);
            bool rhs = (u[x] == v[x] && w[x] == z[x]) || (u[x] != v[x] && u[x] == z[x]);
            REQUIRE(law == rhs);
          }
}

TEST_CASE("eq-style projector definability") {
  // single factor F5
  ProjectorDefReport r1 = projector_definability_check(BooleanProduct::make_full({make_gf(5)}));
  CHECK(r1.ok);
  CHECK(r1.triples == 125);

  // F2 x F3 exhaustive
  ProjectorDefReport r2 = projector_definability_check(f2xf3());
  CHECK(r2.ok);
  CHECK(r2.triples == 216);
  CHECK(r2.counterexamples.empty());

  // b = 0 forces c = a: direct consequence probed via the report being clean
  // plus a spot check of the right-hand side semantics
  BooleanProduct A = f2xf3();
  for (auto& a : A.carrier) {
    // with b = (0,0), rhs reduces to c = a
    std::vector<int> b = {0, 0};
    for (auto& c : A.carrier) {
      bool defined = false;
      for (auto& d : A.carrier) {
        (void)d;
        bool c1 = true;  // bdb = b holds as b = 0
        bool c2 = true;  // bc = 0 holds
        bool c3 = c == a;  // (c-a)(1-bd) = (c-a)*1
        if (c1 && c2 && c3) defined = true;
      }
      CHECK(defined == (c == a));
    }
  }
}

TEST_CASE("product files roundtrip") {
  BooleanProduct A = f2xf3();
  std::string text = print_product(A);
  BooleanProduct B = parse_product(text);
  CHECK(B.full);
  CHECK(B.carrier == A.carrier);
  CHECK(print_product(B) == text);

  BooleanProduct D = diagonal_f2();
  BooleanProduct E = parse_product(print_product(D));
  CHECK_FALSE(E.full);
  CHECK(E.carrier == D.carrier);

  BooleanProduct F = parse_product("(product (factors (builtin gf 2) (builtin gf 3)))");
  CHECK(F.full);
  CHECK(F.carrier.size() == 6);
  CHECK_THROWS_AS(parse_product("(product (factors (builtin gf 2)) (carrier bogus))"),
                  ParseError);
}
