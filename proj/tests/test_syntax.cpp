#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fvkit/semantics.hpp"
#include "fvkit/syntax.hpp"

#include <set>
using namespace fvkit;

TEST_CASE("sexpr roundtrip and errors") {
  SExpr e = parse_sexpr("(a (b c) d) ; trailing comment");
  CHECK(to_text(e) == "(a (b c) d)");
  CHECK(e.size() == 3);
  CHECK(e.at(1).at(0).atom == "b");

  CHECK_THROWS_AS(parse_sexpr("(a (b)"), ParseError);
  CHECK_THROWS_AS(parse_sexpr("a)"), ParseError);
  CHECK_THROWS_AS(parse_sexpr("(a) (b)"), ParseError);
  CHECK(parse_sexpr_list("(a) (b)").size() == 2);

  // positions are 1-based
  try {
    parse_sexpr("(a\n  b))");
    CHECK(false);
  } catch (const ParseError& err) {
    CHECK(err.line == 2);
    CHECK(err.col == 5);
  }
}

TEST_CASE("formula parse, print, roundtrip") {
  Signature ring = sig_ring();
  Formula f = parse_formula("(forall x (= x x))", ring);
  CHECK(print_formula(f) == "(forall x (= x x))");

  Formula g = parse_formula("(exists y (= (* y y) x))", ring);
  CHECK(free_vars(g) == std::vector<std::string>{"x"});
  CHECK(print_formula(g) == "(exists y (= (* y y) x))");

  // signature gating: p is only available in the L_p expansion
  CHECK_THROWS_AS(parse_formula("(= (p u v) w)", ring), ParseError);
  Formula h = parse_formula("(= (p u v) w)", sig_ring_p());
  CHECK(print_formula(h) == "(= (p u v) w)");

  // arity checks
  CHECK_THROWS_AS(parse_formula("(= (+ x) y)", ring), ParseError);
  CHECK_THROWS_AS(parse_formula("(= x y z)", ring), ParseError);
  CHECK_THROWS_AS(parse_formula("(exists (= x x))", ring), ParseError);

  // roundtrip is structural identity
  for (const char* s : {"(and (= x 0) (or (= y 1) (not (= x y))))",
                        "(imp (exists u (= (* u u) x)) (forall v (= (+ v 0) v)))",
                        "(exists x (exists y (and (= x y) (exists z (= (+ x z) y)))))"}) {
    Formula a = parse_formula(s, ring);
    Formula b = parse_formula(print_formula(a), ring);
    CHECK(a == b);
  }
}

TEST_CASE("binder display names never capture") {
  Signature ring = sig_ring();
  // inner binder shadows the outer display name; printing must rename
  Formula inner = Formula::eq(Term::var("x"), Term::var("y"));
  Formula f = Formula::exists("y", Formula::and_({Formula::eq(Term::var("x"), Term::var("y")),
                                                  Formula::exists("x", inner)}));
  std::string printed = print_formula(f);
  Formula re = parse_formula(printed, ring);
  CHECK(re == f);
  // second print cycle is stable
  CHECK(print_formula(re) == printed);

  // substitution avoids capture: replace y by x inside (exists x (= y x))
  Formula g = Formula::exists("x", Formula::eq(Term::var("y"), Term::var("x")));
  Formula gs = subst_free(g, "y", Term::var("x"));
  Formula expect = parse_formula("(exists x' (= x x'))", ring);
  CHECK(gs == expect);
}

TEST_CASE("free variable order is first occurrence") {
  Signature ring = sig_ring();
  Formula f = parse_formula("(and (= y x) (= z y))", ring);
  CHECK(free_vars(f) == std::vector<std::string>{"y", "x", "z"});
  CHECK(quantifier_depth(f) == 0);
  CHECK(quantifier_depth(parse_formula("(exists u (forall v (= u v)))", ring)) == 2);
}

TEST_CASE("nnf") {
  Signature ring = sig_ring();
  auto nnf = [&](const char* s) { return print_formula(to_nnf(parse_formula(s, ring))); };
  CHECK(nnf("(not (and (= x 0) (= y 0)))") == "(or (not (= x 0)) (not (= y 0)))");
  CHECK(nnf("(not (not (= x 0)))") == "(= x 0)");
  CHECK(nnf("(not (exists u (= u x)))") == "(forall u (not (= u x)))");
  CHECK(nnf("(imp (= x 0) (= y 0))") == "(or (not (= x 0)) (= y 0))");
  CHECK(nnf("(not (imp (= x 0) (= y 0)))") == "(and (= x 0) (not (= y 0)))");
}

TEST_CASE("prenex shape and determinism") {
  Signature ring = sig_ring();
  auto pnf = [&](const char* s) { return print_formula(to_prenex(parse_formula(s, ring))); };
  CHECK(pnf("(not (exists x (= x 0)))") == "(forall x (not (= x 0)))");
  // capture avoidance across conjuncts: second binder freshened
  CHECK(pnf("(and (exists x (= x y)) (exists x (= (+ x x) y)))") ==
        "(exists x (exists x' (and (= x y) (= (+ x' x') y))))");
  // existentials pulled before universals when both movable
  CHECK(pnf("(and (forall x (= x x)) (exists y (= y 0)))") ==
        "(exists y (forall x (and (= x x) (= y 0))))");

  // prenex output is a quantifier prefix over a quantifier-free matrix
  Formula p = to_prenex(parse_formula(
      "(imp (exists u (= (* u u) x)) (and (forall v (= (+ v 0) v)) (exists w (= w x))))", ring));
  Formula m = p;
  std::set<std::string> opened;
  while (m.is_quantifier()) {
    std::string v = fresh_name(m.sym, opened);
    opened.insert(v);
    m = open_body(m.subs[0], v);
  }
  CHECK(quantifier_depth(m) == 0);
}

TEST_CASE("prenex preserves truth on small structures") {
  Signature ring = sig_ring();
  std::vector<std::string> corpus = {
      "(imp (exists u (= (* u u) x)) (exists v (= (+ v v) x)))",
      "(not (and (exists u (= u x)) (forall v (= (* v x) 0))))",
      "(or (forall u (= (* u x) u)) (exists u (= (+ u u) 1)))",
      "(imp (forall u (exists v (= (+ u v) x))) (= x x))",
      "(and (exists x (= (* x x) y)) (not (exists x (= (+ x x) y))))",
  };
  for (int n : {2, 3}) {
    FiniteStructure A = make_zmod(n);
    for (auto& s : corpus) {
      Formula f = parse_formula(s, ring);
      Formula p = to_prenex(f);
      for (auto& v : free_vars(f)) CAPTURE(v);
      std::vector<std::string> vs = free_vars(f);
      std::vector<int> tuple(vs.size(), 0);
      for (;;) {
        Assignment asg;
        for (size_t i = 0; i < vs.size(); ++i) asg[vs[i]] = tuple[i];
        CHECK(eval_formula(A, f, asg) == eval_formula(A, p, asg));
        size_t i = vs.size();
        while (i > 0) {
          --i;
          if (++tuple[i] < n) break;
          tuple[i] = 0;
          if (i == 0) goto next;
        }
        if (vs.empty()) break;
      }
    next:;
    }
  }
}

TEST_CASE("relativize") {
  Signature sig = sig_ring_pair();
  auto rel = [&](const char* s) { return print_formula(relativize(parse_formula(s, sig), sig, "P")); };
  CHECK(rel("(exists x (= (* x x) y))") == "(exists x (and (P x) (= (* x x) y)))");
  CHECK(rel("(forall x (= (* x x) y))") == "(forall x (imp (P x) (= (* x x) y)))");
  CHECK(rel("(= x y)") == "(= x y)");
  CHECK_THROWS_AS(relativize(parse_formula("(= x y)", sig), sig, "Q"), Error);
}

TEST_CASE("differential unfolding") {
  Signature sig = sig_ring_delta();
  Formula f = parse_formula("(= (* (delta x) x) 0)", sig);
  Unfolding u = unfold_differential_terms(f, sig);
  CHECK(print_formula(u.formula) == "(= (* x_1 x_0) 0)");
  REQUIRE(u.jets.vars == std::vector<std::string>{"x"});
  CHECK(u.jets.orders == std::vector<int>{1});

  Formula g = parse_formula("(= (+ (delta (delta x)) y) 0)", sig);
  Unfolding v = unfold_differential_terms(g, sig);
  CHECK(print_formula(v.formula) == "(= (+ x_2 y_0) 0)");
  CHECK(v.jets.vars == std::vector<std::string>{"x", "y"});
  CHECK(v.jets.orders == std::vector<int>{2, 0});

  // delta over a product expands by one Leibniz step
  Formula h = parse_formula("(= (delta (* x y)) 0)", sig);
  Unfolding w = unfold_differential_terms(h, sig);
  CHECK(print_formula(w.formula) == "(= (+ (* x_1 y_0) (* x_0 y_1)) 0)");

  CHECK_THROWS_AS(unfold_differential_terms(parse_formula("(exists x (= (delta x) 0))", sig), sig),
                  Error);
}

TEST_CASE("unfolding agrees with direct evaluation on a differential ring") {
  // F2[e]/(e^2): elements 0,1,e,1+e indexed 0..3; delta = d/de sends a+be to b
  FiniteStructure R;
  R.name = "f2eps";
  R.sig = sig_ring();
  R.size = 4;
  auto pack = [](int a, int b) { return a + 2 * b; };
  std::vector<int> add(16), sub(16), mul(16), del(4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          add[pack(a, b) * 4 + pack(c, d)] = pack(a ^ c, b ^ d);
          sub[pack(a, b) * 4 + pack(c, d)] = pack(a ^ c, b ^ d);
          mul[pack(a, b) * 4 + pack(c, d)] = pack(a & c, (a & d) ^ (b & c));
        }
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) del[pack(a, b)] = pack(b, 0);
  R.funcs["+"] = add;
  R.funcs["-"] = sub;
  R.funcs["*"] = mul;
  R.consts["0"] = 0;
  R.consts["1"] = 1;
  R.validate();
  FiniteStructure Rd = with_derivation_op(R, del);

  Signature sig = sig_ring_delta();
  for (const char* s : {"(= (* (delta x) x) 0)", "(= (delta (* x y)) (+ x y))",
                        "(not (= (delta (+ x (* y y))) 0))"}) {
    Formula f = parse_formula(s, sig);
    Unfolding u = unfold_differential_terms(f, sig);
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 4; ++y) {
        Assignment direct = {{"x", x}, {"y", y}};
        // jet substitution: v_k = delta^k(v)
        Assignment jets;
        for (size_t i = 0; i < u.jets.vars.size(); ++i) {
          int val = direct.count(u.jets.vars[i]) ? direct[u.jets.vars[i]] : 0;
          for (int k = 0; k <= u.jets.orders[i]; ++k) {
            jets[u.jets.jet_names[i][static_cast<size_t>(k)]] = val;
            val = del[static_cast<size_t>(val)];
          }
        }
        Assignment dneed;
        for (auto& v : free_vars(f)) dneed[v] = direct[v];
        CHECK(eval_formula(Rd, f, dneed) == eval_formula(R, u.formula, jets));
      }
  }
}

TEST_CASE("signature parse, print, validation") {
  std::string text =
      "(signature ringP (functions (+ 2) (- 2) (* 2)) (constants 0 1) (relations (P 1)) "
      "(dagger (P (exists z (and (P z) (= (* z x1) 1))))))";
  Signature sig = parse_signature(text);
  CHECK(sig.name == "ringP");
  CHECK(sig.relation_arity("P") == 1);
  CHECK(sig.dagger.count("P") == 1);
  Signature re = parse_signature(print_signature(sig));
  CHECK(print_signature(re) == print_signature(sig));

  // dagger with negation is rejected
  CHECK_THROWS_AS(parse_signature("(signature s (functions (+ 2) (- 2) (* 2)) (constants 0 1) "
                                  "(relations (P 1)) (dagger (P (not (P x1)))))"),
                  Error);
  // dagger free variables must be exactly x1..xn
  CHECK_THROWS_AS(parse_signature("(signature s (functions (+ 2) (- 2) (* 2)) (constants 0 1) "
                                  "(relations (P 1)) (dagger (P (P y))))"),
                  Error);
  // keyword collision
  CHECK_THROWS_AS(parse_signature("(signature s (functions (not 2)) (constants) (relations))"),
                  Error);

  CHECK(builtin_signature("ring").has_value());
  CHECK(builtin_signature("ba").has_value());
  CHECK(!builtin_signature("nope").has_value());
}

TEST_CASE("formula weight and ordering helpers") {
  Signature ring = sig_ring();
  Formula a = parse_formula("(= x 0)", ring);
  Formula b = parse_formula("(= (+ x x) 0)", ring);
  CHECK(formula_weight(a) < formula_weight(b));
  CHECK(a == parse_formula("(= x 0)", ring));
  CHECK(a != b);
}
