#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fvkit/semantics.hpp"

#include <set>

using namespace fvkit;

namespace {

// independent oracle: squares mod n computed by a plain loop
std::set<int> squares_mod(int n) {
  std::set<int> s;
  for (int y = 0; y < n; ++y) s.insert(y * y % n);
  return s;
}

}  // namespace

TEST_CASE("zmod tables") {
  FiniteStructure A = make_zmod(6);
  CHECK(A.size == 6);
  CHECK(A.fun("+", 3, 5) == 2);
  CHECK(A.fun("*", 3, 4) == 0);
  CHECK(A.fun("-", 1, 5) == 2);
  CHECK(A.constant("0") == 0);
  CHECK(A.constant("1") == 1);
  CHECK_THROWS_AS(make_zmod(0), Error);
}

TEST_CASE("gf4 arithmetic") {
  // index = c0 + 2*c1 for c0 + c1*t, t^2 = t + 1
  FiniteStructure F = make_gf(4);
  CHECK(F.fun("*", 2, 2) == 3);   // t*t = t+1
  CHECK(F.fun("*", 2, 3) == 1);   // t*(t+1) = 1
  CHECK(F.fun("+", 2, 3) == 1);   // t + (t+1) = 1
  CHECK(F.fun("-", 0, 2) == 2);   // char 2
  // Frobenius squares each element; x -> x^2 permutes F4
  std::set<int> image;
  for (int x = 0; x < 4; ++x) image.insert(F.fun("*", x, x));
  CHECK(image.size() == 4);
}

TEST_CASE("gf field laws, exhaustively") {
  for (int q : {2, 3, 4, 5, 8, 9, 16}) {
    FiniteStructure F = make_gf(q);
    // every nonzero element has a multiplicative inverse
    for (int x = 1; x < q; ++x) {
      bool inv = false;
      for (int y = 1; y < q; ++y) inv = inv || F.fun("*", x, y) == 1;
      CHECK(inv);
    }
    // associativity and distributivity
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b)
        for (int c = 0; c < q; ++c) {
          REQUIRE(F.fun("*", F.fun("*", a, b), c) == F.fun("*", a, F.fun("*", b, c)));
          REQUIRE(F.fun("+", F.fun("+", a, b), c) == F.fun("+", a, F.fun("+", b, c)));
          REQUIRE(F.fun("*", a, F.fun("+", b, c)) ==
                  F.fun("+", F.fun("*", a, b), F.fun("*", a, c)));
        }
    // subtraction really is the inverse of addition
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) REQUIRE(F.fun("+", F.fun("-", a, b), b) == a);
  }
  CHECK_THROWS_AS(make_gf(6), Error);
  CHECK_THROWS_AS(make_gf(32), Error);
}

TEST_CASE("subfields") {
  std::vector<int> f2 = subfield_elements(make_gf(4), 2);
  CHECK(f2 == std::vector<int>{0, 1});
  std::vector<int> f3 = subfield_elements(make_gf(9), 3);
  CHECK(f3 == std::vector<int>{0, 1, 2});
  FiniteStructure F16 = make_gf(16);
  std::vector<int> f4 = subfield_elements(F16, 4);
  CHECK(f4.size() == 4);
  // closed under multiplication
  for (int a : f4)
    for (int b : f4)
      CHECK(std::find(f4.begin(), f4.end(), F16.fun("*", a, b)) != f4.end());
  CHECK_THROWS_AS(subfield_elements(make_gf(8), 4), Error);
}

TEST_CASE("powerset algebra laws") {
  for (int k : {0, 1, 2, 3, 4}) {
    FiniteStructure B = make_powerset(k);
    int n = B.size;
    CHECK(n == (1 << k));
    for (int a = 0; a < n; ++a) {
      CHECK(B.fun("join", a, B.fun("compl", a)) == B.constant("1"));
      CHECK(B.fun("meet", a, B.fun("compl", a)) == B.constant("0"));
      for (int b = 0; b < n; ++b) {
        CHECK(B.fun("meet", a, b) == B.fun("meet", b, a));
        CHECK(B.fun("join", a, B.fun("meet", a, b)) == a);  // absorption
        for (int c = 0; c < n; ++c)
          REQUIRE(B.fun("meet", a, B.fun("join", b, c)) ==
                  B.fun("join", B.fun("meet", a, b), B.fun("meet", a, c)));
      }
    }
  }
}

TEST_CASE("eval_formula basics") {
  Signature ring = sig_ring();
  FiniteStructure F3 = make_zmod(3);
  Formula sq = parse_formula("(exists y (= (* y y) x))", ring);
  CHECK(eval_formula(F3, sq, {{"x", 1}}));
  CHECK_FALSE(eval_formula(F3, sq, {{"x", 2}}));  // 2 is a non-square mod 3

  FiniteStructure F2 = make_zmod(2);
  Formula two = parse_formula("(exists u (and (not (= u 0)) (not (= u 1))))", ring);
  CHECK_FALSE(eval_formula(F2, two, {}));
  CHECK(eval_formula(F3, two, {}));

  Formula id = parse_formula("(forall x (= x x))", ring);
  for (int n : {1, 2, 5}) CHECK(eval_formula(make_zmod(n), id, {}));

  CHECK_THROWS_AS(eval_formula(F3, sq, {}), Error);  // uncovered free variable
}

TEST_CASE("definable sets") {
  Signature ring = sig_ring();
  FiniteStructure F5 = make_zmod(5);
  auto sols = definable_set(F5, parse_formula("(= (* x x) 1)", ring), {"x"});
  CHECK(sols == std::vector<std::vector<int>>{{1}, {4}});
  auto all = definable_set(make_zmod(3), parse_formula("(= x x)", ring), {"x"});
  CHECK(all == std::vector<std::vector<int>>{{0}, {1}, {2}});

  // oracle: squares mod n by independent loop
  for (int n : {2, 3, 5, 7}) {
    auto sq = definable_set(make_zmod(n), parse_formula("(exists y (= (* y y) x))", ring), {"x"});
    std::set<int> got;
    for (auto& t : sq) got.insert(t[0]);
    CHECK(got == squares_mod(n));
  }
}

TEST_CASE("direct products") {
  FiniteStructure F2 = make_gf(2), F3 = make_gf(3);
  FiniteStructure P = direct_product({F2, F3});
  CHECK(P.size == 6);
  // (1,2)*(1,2) = (1,1); coordinates packed first-factor-major
  auto enc = [&](int a, int b) { return a * 3 + b; };
  CHECK(P.fun("*", enc(1, 2), enc(1, 2)) == enc(1, 1));
  CHECK(P.constant("1") == enc(1, 1));

  Signature ring = sig_ring();
  FiniteStructure Q = direct_product({F2, F2});
  Formula f = parse_formula(
      "(exists y (and (= (* y y) y) (and (not (= y 0)) (not (= y 1)))))", ring);
  CHECK(eval_formula(Q, f, {}));   // witness (0,1)
  CHECK_FALSE(eval_formula(F2, f, {}));

  CHECK_THROWS_AS(direct_product({}), Error);
  CHECK_THROWS_AS(direct_product({F2, make_powerset(1)}), Error);
}

TEST_CASE("bulk tables agree with pointwise evaluation") {
  Signature ring = sig_ring();
  std::vector<std::string> corpus = {
      "(= x y)",
      "(= (* x x) y)",
      "(exists u (= (* u u) x))",
      "(imp (= x 0) (exists u (= (+ u u) y)))",
      "(forall u (or (= (* u x) 0) (not (= y 0))))",
      "(and (= x x) (= 0 0))",
      "(not (= 1 0))",
  };
  for (auto& A : {make_zmod(4), make_gf(4), direct_product({make_gf(2), make_gf(3)})}) {
    for (auto& s : corpus) {
      Formula f = parse_formula(s, ring);
      ValuationTable t = satisfying_table(A, f, {"x", "y"});
      REQUIRE(t.bits.size() == static_cast<size_t>(A.size) * A.size);
      for (int x = 0; x < A.size; ++x)
        for (int y = 0; y < A.size; ++y) {
          bool direct = eval_formula(A, f, {{"x", x}, {"y", y}});
          REQUIRE((t.bits[static_cast<size_t>(x) * A.size + y] != 0) == direct);
        }
    }
  }
}

TEST_CASE("bulk tables with fixed parameters") {
  Signature ring = sig_ring();
  FiniteStructure F5 = make_zmod(5);
  Formula f = parse_formula("(= (* x x) y)", ring);
  ValuationTable t = satisfying_table(F5, f, {"x"}, {{"y", 4}});
  for (int x = 0; x < 5; ++x) CHECK((t.bits[static_cast<size_t>(x)] != 0) == (x * x % 5 == 4));
  CHECK_THROWS_AS(satisfying_table(F5, f, {"x"}), Error);
}

TEST_CASE("pair predicate and daggers") {
  FiniteStructure F4 = make_gf(4);
  FiniteStructure P = with_pair_predicate(F4, {0, 1});
  CHECK(P.rel_holds("P", {1}));
  CHECK_FALSE(P.rel_holds("P", {2}));

  // attach a correct dagger: not P(x) iff exists z (P-free witness form)
  Signature s = P.sig;
  s.dagger["P"] = parse_formula("(exists z (and (P z) (= (* z (+ x1 x1)) 1)))", s);
  // that dagger is wrong (char 2 makes x1+x1 = 0); check_daggers must flag it
  FiniteStructure bad = P;
  bad.sig = s;
  DaggerReport rep = check_daggers(bad);
  CHECK_FALSE(rep.ok);
  CHECK(!rep.failures.empty());

  // a correct one for this structure: complement of {0,1} is {t, t+1} = non-roots of x^2+x
  Signature s2 = P.sig;
  s2.dagger["P"] = parse_formula("(exists z (and (= (+ (* x1 x1) x1) (+ z 1)) (= (* z 0) 1)))", s2);
  // intentionally unsatisfiable right conjunct -> dagger false everywhere -> still wrong
  FiniteStructure bad2 = P;
  bad2.sig = s2;
  CHECK_FALSE(check_daggers(bad2).ok);

  Signature s3 = P.sig;
  s3.dagger["P"] = parse_formula("(exists z (= (* x1 (+ x1 1)) (+ (* z z) z)))", s3);
  // x(x+1) = z^2+z has solutions for exactly... check by hand below instead of asserting blindly
  FiniteStructure maybe = P;
  maybe.sig = s3;
  DaggerReport r3 = check_daggers(maybe);
  // independent truth: P = {0,1} and z^2+z ranges over {0, t^2+t=1? } — verify per element
  for (int x = 0; x < 4; ++x) {
    bool dag = false;
    for (int z = 0; z < 4; ++z)
      dag = dag || F4.fun("*", x, F4.fun("+", x, 1)) == F4.fun("+", F4.fun("*", z, z), z);
    bool holds = x == 0 || x == 1;
    if (dag == !holds) continue;
    CHECK_FALSE(r3.ok);
  }
}

TEST_CASE("structure files roundtrip") {
  FiniteStructure A = make_zmod(3);
  std::string text = print_structure(A);
  FiniteStructure B = parse_structure(text);
  CHECK(print_structure(B) == text);
  CHECK(B.fun("+", 2, 2) == 1);

  FiniteStructure C = parse_structure("(builtin gf 4)");
  CHECK(C.size == 4);
  CHECK(C.name == "gf4");
  FiniteStructure D = parse_structure("(builtin powerset 2)");
  CHECK(D.size == 4);

  std::string manual =
      "(structure tiny (signature ring) (size 2) "
      "(fun + (0 0 0) (0 1 1) (1 0 1) (1 1 0)) "
      "(fun - (0 0 0) (0 1 1) (1 0 1) (1 1 0)) "
      "(fun * (0 0 0) (0 1 0) (1 0 0) (1 1 1)) "
      "(const 0 0) (const 1 1))";
  FiniteStructure E = parse_structure(manual);
  CHECK(E.fun("*", 1, 1) == 1);
  CHECK_THROWS_AS(parse_structure("(structure bad (signature ring) (size 2) (fun + (0 0 0)))"),
                  ParseError);
  CHECK_THROWS_AS(parse_structure("(builtin frobnicate 3)"), ParseError);
}
