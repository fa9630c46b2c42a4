#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fvkit/projector.hpp"

using namespace fvkit;

namespace {

std::string translate_text(const char* s, const Signature& sig) {
  return print_formula(projector_translate(parse_formula(s, sig), sig));
}

// ring language plus a unary relation r whose complement is x has an inverse
Signature ring_with_r() {
  Signature sig = sig_ring().with_relation("r", 1, "_r");
  sig.dagger["r"] = parse_formula("(exists s (= (* x1 s) 1))", sig);
  sig.validate();
  return sig;
}

FiniteStructure gf3_with_r() {
  FiniteStructure B = make_gf(3);
  B.name = "gf3_r";
  B.sig = ring_with_r();
  B.rels["r"] = {1, 0, 0};  // r = {0}
  B.validate();
  return B;
}

}  // namespace

TEST_CASE("open-formula encodings") {
  Signature sig = sig_ring();
  CHECK(translate_text("(or (= u 0) (not (= v 0)))", sig) == "(= (p u v) 0)");
  CHECK(translate_text("(and (= u 0) (= v 0))", sig) == "(= (+ (p u v) v) 0)");
  CHECK(translate_text("(or (= u 0) (= v 0))", sig) == "(= (- (p u v) u) 0)");
  CHECK(translate_text("(not (= u 0))", sig) == "(forall w (= (p w u) 0))");
  CHECK(translate_text("(= (* u u) y)", sig) == "(= (- (* u u) y) 0)");
  // empty boolean combinations collapse to truth / falsity over the zero term
  CHECK(translate_text("(and)", sig) == "(= 0 0)");
  CHECK(translate_text("(or)", sig) == "(forall w (= (p w 0) 0))");
}

TEST_CASE("prefixes carry over; the extra universal goes outside") {
  Signature sig = sig_ring();
  CHECK(translate_text("(exists u (= (* u u) y))", sig) ==
        "(exists u (= (- (* u u) y) 0))");
  CHECK(translate_text("(forall u (not (= (* u x) 0)))", sig) ==
        "(forall w (forall u (= (p w (* u x)) 0)))");
  CHECK(translate_text("(exists u (forall v (imp (= u x) (not (= v 0)))))", sig) ==
        "(forall w (exists u (forall v (= (p w (+ (p (- u x) v) v)) 0))))");
  CHECK_THROWS_AS(projector_translate(parse_formula("(not (exists u (= u 0)))", sig), sig),
                  Error);
}

TEST_CASE("translation is truth-preserving on small fields") {
  Signature sig = sig_ring();
  std::vector<Formula> corpus;
  for (const char* s : {
           "(= x 0)",
           "(not (= x y))",
           "(exists u (= (* u u) x))",
           "(forall u (or (= u x) (not (= (* u u) x))))",
           "(exists u (forall v (or (= (* u v) x) (and (= u x) (not (= v 0))))))",
           "(forall u (exists v (imp (= (* u u) x) (= (+ v v) u))))",
           "(exists u (and (not (= u 0)) (not (= u 1))))",
           "(forall u (forall v (or (not (= (* u v) 0)) (or (= u 0) (= v 0)))))",
           "(imp (= x y) (= (* x x) (* y y)))",
       })
    corpus.push_back(parse_formula(s, sig));

  for (int q : {2, 3, 4, 5}) {
    TranslationReport rep = check_projector_translation(make_gf(q), corpus, sig);
    CAPTURE(q);
    CHECK(rep.ok);
    CHECK(rep.failures.empty());
    long long expect = 0;
    for (const auto& f : corpus) {
      long long t = 1;
      for (size_t j = 0; j < free_vars(f).size(); ++j) t *= q;
      expect += t;
    }
    CHECK(rep.assignments == expect);
  }

  // the encodings presume two distinct elements
  CHECK_THROWS_AS(check_projector_translation(make_zmod(1), corpus, sig), Error);
}

TEST_CASE("relational matrices: conjunctive form under a forall-exists prefix") {
  Signature sig = ring_with_r();
  CHECK(translate_text("(forall u (exists v (and (r (* u v)) (not (r (+ u v))))))", sig) ==
        "(forall u (exists v (exists s (and (r (* u v)) (= (- (* (+ u v) s) 1) 0)))))");
  CHECK(translate_text("(forall u (exists v (and (r (* u v)) (not (= u v)))))", sig) ==
        "(forall z (forall u (exists v (and (r (* u v)) (= (p z (- u v)) 0)))))");
  // no negated conjunct: no projector needed at all
  CHECK(translate_text("(forall u (exists v (and (r (* u v)) (= (+ u v) 1))))", sig) ==
        "(forall u (exists v (and (r (* u v)) (= (- (+ u v) 1) 0))))");

  CHECK_THROWS_AS(
      projector_translate(parse_formula("(forall u (or (r u) (= u 0)))", sig), sig), Error);
  CHECK_THROWS_AS(
      projector_translate(parse_formula("(exists u (forall v (r (* u v))))", sig), sig),
      Error);
  // unary predicate with no eliminator
  Signature pair = sig_ring_pair();
  CHECK_THROWS_AS(
      projector_translate(parse_formula("(exists u (not (P u)))", pair), pair), Error);
  // eliminator bodies must be positive
  Signature bad = sig_ring().with_relation("r", 1, "_r");
  bad.dagger["r"] = Formula::exists("s", Formula::not_(Formula::eq(Term::var("s"), Term::cnst("0"))));
  CHECK_THROWS_AS(
      projector_translate(parse_formula("(not (r x))", bad), bad), Error);
}

TEST_CASE("relational translation is truth-preserving") {
  Signature sig = ring_with_r();
  FiniteStructure B = gf3_with_r();
  std::vector<Formula> corpus;
  for (const char* s : {
           "(forall u (exists v (and (r (* u v)) (not (r (+ u v))))))",
           "(forall u (exists v (and (r (* u v)) (not (= u v)))))",
           "(forall u (exists v (and (r (+ u v)) (= (* v v) (* u u)))))",
           "(exists v (and (r (* x v)) (not (= v 0))))",
       })
    corpus.push_back(parse_formula(s, sig));
  TranslationReport rep = check_projector_translation(B, corpus, sig);
  CHECK(rep.ok);
  CHECK(rep.failures.empty());
}

TEST_CASE("identity pairs hold pointwise on expanded fields") {
  auto pairs = projector_identities();
  REQUIRE(pairs.size() == 3);
  for (int q : {2, 3, 4, 5}) {
    FiniteStructure Dp = with_projector(make_gf(q));
    for (const auto& [lhs, rhs] : pairs) {
      for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b) {
          Assignment asg{{"u", a}, {"v", b}};
          CHECK(eval_formula(Dp, lhs, asg) == eval_formula(Dp, rhs, asg));
        }
    }
  }
}

TEST_CASE("identities as truth-set equalities on products") {
  std::vector<BooleanProduct> products;
  products.push_back(BooleanProduct::make_full(
      {with_projector(make_gf(2)), with_projector(make_gf(3))}));
  products.push_back(BooleanProduct::make_full(
      {with_projector(make_gf(2)), with_projector(make_gf(2)), with_projector(make_gf(5))}));
  for (const auto& A : products) {
    IdentityReport rep = check_projector_identities(A, projector_identities());
    CHECK(rep.ok);
    long long c2 = static_cast<long long>(A.carrier.size()) * A.carrier.size();
    CHECK(rep.checks == 3 * c2);
  }
}

TEST_CASE("discriminator law: truth sets match; the naive product reading fails") {
  BooleanProduct A = BooleanProduct::make_full(
      {with_projector(make_gf(2)), with_projector(make_gf(3))});
  auto law = discriminator_law();
  IdentityReport rep = check_projector_identities(A, {law});
  CHECK(rep.ok);
  CHECK(rep.checks == 6LL * 6 * 6 * 6);

  // componentwise projector on a genuine product: the single-structure
  // biconditional breaks, so the coordinatewise reading above is the right one
  FiniteStructure S = A.to_structure();
  Assignment asg{{"u", A.carrier_index({0, 0})},
                 {"v", A.carrier_index({0, 1})},
                 {"w", A.carrier_index({1, 0})},
                 {"z", A.carrier_index({1, 0})}};
  CHECK(eval_formula(S, law.first, asg));
  CHECK_FALSE(eval_formula(S, law.second, asg));
}
