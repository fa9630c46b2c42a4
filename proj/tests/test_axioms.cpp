#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "fvkit/axioms.hpp"
#include "fvkit/ring.hpp"
#include "json.hpp"

using namespace fvkit;

namespace {

bool verdict(const TheoryEvaluation& ev, const std::string& label) {
  for (auto& v : ev.verdicts)
    if (v.label == label) return v.holds;
  FAIL("missing verdict ", label);
  return false;
}

bool all_hold(const TheoryEvaluation& ev) {
  for (auto& v : ev.verdicts)
    if (!v.holds) return false;
  return true;
}

// independent oracle for linear independence over a sub-carrier: no nonzero
// coefficient tuple from `sub` combines the arguments to zero
bool indep(const FiniteStructure& A, const std::vector<int>& sub,
           const std::vector<int>& args) {
  std::vector<size_t> idx(args.size(), 0);
  for (;;) {
    int s = A.constant("0");
    bool nonzero = false;
    for (size_t i = 0; i < args.size(); ++i) {
      int z = sub[idx[i]];
      if (z != A.constant("0")) nonzero = true;
      s = A.fun("+", s, A.fun("*", z, args[i]));
    }
    if (nonzero && s == A.constant("0")) return false;
    size_t i = args.size();
    while (i > 0 && ++idx[i - 1] == sub.size()) idx[--i] = 0;
    if (i == 0) return true;
  }
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("every theory emits, parses and roundtrips") {
  auto all = theory_names();
  CHECK(all.size() == 20);
  for (const auto& name : all) {
    INFO("theory ", name);
    AxiomCorpusEntry e = emit_theory(name);
    CHECK(e.theory == name);
    CHECK(!e.axioms.empty());
    e.sig.validate();
    std::set<std::string> labels;
    for (auto& ax : e.axioms) {
      INFO("axiom ", ax.label);
      CHECK(labels.insert(ax.label).second);
      Formula back = parse_formula(print_formula(ax.formula), e.sig);
      CHECK(back == ax.formula);
      CHECK(free_vars(ax.formula).empty());  // all axioms are sentences
    }
  }
  // parametrized variants roundtrip too
  TheoryParams p;
  p.n = 3;
  for (const auto& name : {"T_reg", "ell_n", "T_reg_v_0", "char0", "lambda"}) {
    AxiomCorpusEntry e = emit_theory(name, p);
    for (auto& ax : e.axioms)
      CHECK(parse_formula(print_formula(ax.formula), e.sig) == ax.formula);
  }
}

TEST_CASE("emission is deterministic") {
  TheoryParams p;
  p.n = 3;
  p.k = 2;
  AxiomCorpusEntry a = emit_theory("T_reg_v_p", p);
  AxiomCorpusEntry b = emit_theory("T_reg_v_p", p);
  REQUIRE(a.axioms.size() == b.axioms.size());
  for (size_t i = 0; i < a.axioms.size(); ++i) {
    CHECK(a.axioms[i].label == b.axioms[i].label);
    CHECK(a.axioms[i].formula == b.axioms[i].formula);
    CHECK(print_formula(a.axioms[i].formula) == print_formula(b.axioms[i].formula));
  }
}

TEST_CASE("emit errors: unknown theory and bad bounds") {
  CHECK_THROWS_AS(emit_theory("no_such_theory"), Error);
  TheoryParams z;
  z.n = 0;
  CHECK_THROWS_AS(emit_theory("char0", z), Error);
  TheoryParams neg;
  neg.n = -2;
  CHECK_THROWS_AS(emit_theory("T_reg", neg), Error);
  TheoryParams one;
  one.n = 1;
  CHECK_THROWS_AS(emit_theory("ell_n", one), Error);
  TheoryParams badsig;
  badsig.sigma = "(= u xn)";  // u is not a z-indexed variable
  CHECK_THROWS_AS(emit_theory("scheme_G", badsig), Error);
  TheoryParams nozs;
  nozs.sigma = "(= xn 0)";
  CHECK_THROWS_AS(emit_theory("scheme_G", nozs), Error);
}

TEST_CASE("projector defining axiom is the single expected sentence") {
  AxiomCorpusEntry e = emit_theory("projector_def");
  REQUIRE(e.axioms.size() == 1);
  CHECK(e.axioms[0].label == "projector_def");
  CHECK(print_formula(e.axioms[0].formula) ==
        "(forall a (forall b (exists d (and (= (* (* b d) b) b) "
        "(= (* (- (p a b) a) (- 1 (* b d))) 0) (= (* (p a b) b) 0)))))");
  CHECK(e.find("projector_def") != nullptr);
  CHECK(e.find("missing") == nullptr);
}

TEST_CASE("regularity axiom separates Z/6 from Z/4") {
  AxiomCorpusEntry e = emit_theory("vnr");
  TheoryEvaluation on6 = evaluate_theory(e, make_zmod(6));
  CHECK(all_hold(on6));
  TheoryEvaluation on4 = evaluate_theory(e, make_zmod(4));
  CHECK(verdict(on4, "regular") == false);
  CHECK(verdict(on4, "add_assoc"));
  CHECK(verdict(on4, "distrib"));
}

TEST_CASE("characteristic scheme: guard keeps zero idempotent out") {
  AxiomCorpusEntry e = emit_theory("char0");
  REQUIRE(e.axioms.size() == 4);
  TheoryEvaluation on6 = evaluate_theory(e, make_zmod(6));
  CHECK(verdict(on6, "char0_1"));
  CHECK(verdict(on6, "char0_2") == false);  // 2 * 3 = 0 with 3 idempotent
  CHECK(verdict(on6, "char0_3") == false);  // 3 * 4 = 0 with 4 idempotent
  TheoryEvaluation on5 = evaluate_theory(e, make_gf(5));
  CHECK(all_hold(on5));  // only idempotents are 0 and 1, and k.1 != 0 for k < 5
}

TEST_CASE("differential axioms and the missing minimal idempotent") {
  AxiomCorpusEntry e = emit_theory("axioms_A");
  FiniteRing dual = ring_dual(2);
  FiniteStructure A = with_derivation_op(dual.to_structure(), dual_derivation(2).delta);
  TheoryEvaluation ev = evaluate_theory(e, A);
  CHECK(verdict(ev, "delta_additive"));
  CHECK(verdict(ev, "delta_leibniz"));
  CHECK(verdict(ev, "regular") == false);  // epsilon has no quasi-inverse
  CHECK(verdict(ev, "no_minimal_idempotent") == false);

  FiniteStructure Z6 = with_derivation_op(make_zmod(6), std::vector<int>(6, 0));
  TheoryEvaluation ev6 = evaluate_theory(e, Z6);
  CHECK(verdict(ev6, "regular"));
  CHECK(verdict(ev6, "delta_additive"));
  CHECK(verdict(ev6, "no_minimal_idempotent") == false);  // finite: 3 is minimal
}

TEST_CASE("lattice-ordered theories report honestly on a finite carrier") {
  // F_2 ordered 0 < 1: inf is min; translation invariance cannot survive
  // modular addition, and the verdict list says exactly that
  FiniteStructure F2 = make_gf(2);
  F2.sig = F2.sig.with_function("inf", 2, "_inf");
  F2.funcs["inf"] = {0, 0, 0, 1};
  F2.validate();
  TheoryEvaluation tf = evaluate_theory(emit_theory("T_f"), F2);
  CHECK(verdict(tf, "inf_comm"));
  CHECK(verdict(tf, "inf_assoc"));
  CHECK(verdict(tf, "inf_idem"));
  CHECK(verdict(tf, "inf_translate") == false);  // (0 inf 1)+1 = 1 but 1 inf 0 = 0
  CHECK(verdict(tf, "reduced"));
  CHECK(verdict(tf, "f_ring"));

  TheoryEvaluation treg = evaluate_theory(emit_theory("T_reg"), F2);
  CHECK(verdict(treg, "regular"));
  CHECK(verdict(treg, "odd_root_1"));
  CHECK(verdict(treg, "odd_root_3") == false);  // y^3 + y + 1 has no root in F_2
  CHECK(verdict(treg, "sqrt_pos"));
  CHECK(verdict(treg, "no_minimal_idempotent") == false);
}

TEST_CASE("trivially valued fields are models of the divisibility axioms") {
  AxiomCorpusEntry tv = emit_theory("T_v");
  REQUIRE(tv.sig.dagger.count("div") == 1);
  REQUIRE(tv.sig.dagger.count("Div") == 1);
  for (int q : {2, 3, 4, 5, 9}) {
    INFO("field of size ", q);
    FiniteStructure A = with_trivial_valuation(make_gf(q));
    // spot-check the tables: div misses only (0, y != 0), Div = nonzero x zero
    CHECK(A.rel_holds("div", {1, 0}));
    CHECK(A.rel_holds("div", {1, 1}));
    CHECK(!A.rel_holds("div", {0, 1}));
    CHECK(A.rel_holds("Div", {1, 0}));
    CHECK(!A.rel_holds("Div", {1, 1}));
    TheoryEvaluation ev = evaluate_theory(tv, A);
    CHECK(all_hold(ev));
    CHECK(ev.daggers.ok);
  }
  CHECK_THROWS_AS(evaluate_theory(tv, make_zmod(6)), Error);  // no div table
}

TEST_CASE("valued variants: roots and residue schemes on trivial valuations") {
  FiniteStructure F5 = with_trivial_valuation(make_gf(5));
  TheoryEvaluation v0 = evaluate_theory(emit_theory("T_reg_v_0"), F5);
  CHECK(verdict(v0, "monic_root_1"));
  CHECK(verdict(v0, "monic_root_2") == false);  // y^2 = 2 has no solution mod 5
  CHECK(verdict(v0, "char0_3"));
  CHECK(verdict(v0, "no_minimal_idempotent") == false);
  CHECK(verdict(v0, "O_one"));

  TheoryParams p3;
  p3.p = 3;
  FiniteStructure F3 = with_trivial_valuation(make_gf(3));
  TheoryEvaluation vp = evaluate_theory(emit_theory("T_reg_v_p", p3), F3);
  CHECK(verdict(vp, "hensel_1"));
  CHECK(verdict(vp, "hensel_2"));
  CHECK(verdict(vp, "hensel_3"));
  CHECK(verdict(vp, "discrete_value"));
  CHECK(verdict(vp, "zgroup_2"));
  CHECK(verdict(vp, "residue_F3"));  // x(x-1)(x-2) = 0 for every x mod 3
  CHECK(verdict(vp, "no_minimal_idempotent") == false);
  CHECK(vp.daggers.ok);
}

TEST_CASE("linear-independence corpus evaluates on the subfield pair") {
  TheoryParams p;
  p.n = 3;
  AxiomCorpusEntry e = emit_theory("ell_n", p);
  REQUIRE(e.axioms.size() == 3);
  CHECK(e.find("ell_2_def") != nullptr);
  CHECK(e.find("ell_3_def") != nullptr);
  CHECK(e.find("P_complement") != nullptr);

  FiniteStructure A = make_gf(4);
  std::vector<int> sub = subfield_elements(A, 2);
  A.sig = e.sig;
  std::vector<char> pt(4, 0);
  for (int s : sub) pt[static_cast<size_t>(s)] = 1;
  A.rels["P"] = pt;
  std::vector<char> e2(16), e3(64);
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) {
      e2[static_cast<size_t>(x) * 4 + y] = indep(A, sub, {x, y}) ? 1 : 0;
      for (int z = 0; z < 4; ++z)
        e3[(static_cast<size_t>(x) * 4 + y) * 4 + z] =
            indep(A, sub, {x, y, z}) ? 1 : 0;
    }
  A.rels["ell_2"] = e2;
  A.rels["ell_3"] = e3;
  A.validate();

  // dimension 2 over the subfield: some pair independent, no triple is
  CHECK(A.rel_holds("ell_2", {2, 1}));
  bool any3 = false;
  for (char c : e3) any3 = any3 || c;
  CHECK(!any3);

  TheoryEvaluation ev = evaluate_theory(e, A);
  CHECK(all_hold(ev));
  CHECK(ev.daggers.ok);
}

TEST_CASE("algebraic-dependence corpus evaluates on the subfield pair") {
  AxiomCorpusEntry e = emit_theory("Dnk");  // n = 2, k = 1
  REQUIRE(e.axioms.size() == 3);
  FiniteStructure A = make_gf(4);
  std::vector<int> sub = subfield_elements(A, 2);
  A.sig = e.sig;
  std::vector<char> pt(4, 0);
  for (int s : sub) pt[static_cast<size_t>(s)] = 1;
  A.rels["P"] = pt;
  // Dt_1_1(x): no c1 x + c0 = 0 with coefficients in P, c1 != 0
  std::vector<char> d1(4, 1);
  for (int x = 0; x < 4; ++x)
    for (int c1 : sub)
      for (int c0 : sub)
        if (c1 != 0 && A.fun("+", A.fun("*", c1, x), c0) == 0)
          d1[static_cast<size_t>(x)] = 0;
  // Dt_2_1(x, y): no c1 x + c2 y + c0 = 0 with some positive-degree ci != 0
  std::vector<char> d2(16, 1);
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y)
      for (int c1 : sub)
        for (int c2 : sub)
          for (int c0 : sub)
            if ((c1 != 0 || c2 != 0) &&
                A.fun("+", A.fun("+", A.fun("*", c1, x), A.fun("*", c2, y)), c0) == 0)
              d2[static_cast<size_t>(x) * 4 + y] = 0;
  A.rels["Dt_1_1"] = d1;
  A.rels["Dt_2_1"] = d2;
  A.validate();

  CHECK(!A.rel_holds("Dt_1_1", {0}));  // 0 is in the subfield
  CHECK(A.rel_holds("Dt_1_1", {2}));   // a generator is not
  TheoryEvaluation ev = evaluate_theory(e, A);
  CHECK(all_hold(ev));
  CHECK(ev.daggers.ok);
}

TEST_CASE("power predicates and their bounded complements on F_5") {
  AxiomCorpusEntry e = emit_theory("pcf_powers");
  FiniteStructure A = with_power_predicates(make_gf(5), 2);
  CHECK(A.rel_holds("P_2", {4}));
  CHECK(!A.rel_holds("P_2", {2}));
  TheoryEvaluation ev = evaluate_theory(e, A);
  CHECK(verdict(ev, "P_2_def"));
  CHECK(ev.daggers.ok);  // 2 is a non-residue: one representative suffices
  CHECK_THROWS_AS(with_power_predicates(make_gf(5), 1), Error);
}

TEST_CASE("ball relations: order and valuation readings") {
  AxiomCorpusEntry ord = emit_theory("chi_order");
  FiniteStructure F2 = make_gf(2);
  F2.sig = ord.sig;
  F2.funcs["inf"] = {0, 0, 0, 1};
  // chi(x, y) iff |x| <= |y| and y invertible; on 0 < 1 that is y = 1
  F2.rels["chi"] = {0, 1, 0, 1};
  F2.validate();
  TheoryEvaluation oe = evaluate_theory(ord, F2);
  CHECK(all_hold(oe));
  F2.rels["chi"] = {1, 1, 1, 1};
  CHECK(!all_hold(evaluate_theory(ord, F2)));

  AxiomCorpusEntry val = emit_theory("chi_val");
  FiniteStructure F3 = with_trivial_valuation(make_gf(3));
  F3.sig = val.sig;
  std::vector<char> chi(9, 0);
  for (int x = 1; x < 3; ++x)
    for (int y = 0; y < 3; ++y) chi[static_cast<size_t>(x) * 3 + y] = 1;
  F3.rels["chi"] = chi;  // x div y always holds for invertible x
  F3.validate();
  TheoryEvaluation ve = evaluate_theory(val, F3);
  CHECK(all_hold(ve));
  CHECK(ve.daggers.ok);
}

TEST_CASE("generic-derivation instances substitute jets into sigma") {
  AxiomCorpusEntry d = emit_theory("scheme_G");
  REQUIRE(d.axioms.size() == 1);
  CHECK(d.axioms[0].note.find("interpretation") != std::string::npos);
  CHECK(print_formula(d.axioms[0].formula) ==
        "(imp (exists c1 (exists b (and (chi 0 b) (forall z1 (imp (chi (- z1 c1) b) "
        "(exists xn (= xn z1))))))) (exists a (= (delta a) a)))");

  TheoryParams p;
  p.sigma = "(= (+ z1 z2) xn)";
  AxiomCorpusEntry g = emit_theory("scheme_G", p);
  std::string text = print_formula(g.axioms[0].formula);
  CHECK(text.find("(exists a (= (+ a (delta a)) (delta (delta a))))") !=
        std::string::npos);

  // on a zero-derivation ring with all-pass balls the instance evaluates
  FiniteStructure A = with_derivation_op(make_zmod(3), {0, 0, 0});
  A.sig = d.sig;
  std::vector<char> chi(9, 0);
  for (int x = 0; x < 3; ++x)
    for (int y = 1; y < 3; ++y) chi[static_cast<size_t>(x) * 3 + y] = 1;
  A.rels["chi"] = chi;
  A.validate();
  TheoryEvaluation ev = evaluate_theory(d, A);
  CHECK(verdict(ev, "G_instance"));  // delta = 0 fixes a = 0
}

TEST_CASE("boolean algebra corpus and the atomless axiom") {
  FiniteStructure B = make_powerset(2);
  TheoryEvaluation ba = evaluate_theory(emit_theory("ba"), B);
  CHECK(all_hold(ba));
  TheoryEvaluation at = evaluate_theory(emit_theory("T_at"), B);
  CHECK(verdict(at, "atomless") == false);
  CHECK(verdict(at, "distrib_mj"));
}

TEST_CASE("theory files: one formula per axiom plus a manifest") {
  namespace fs = std::filesystem;
  AxiomCorpusEntry e = emit_theory("T_v");
  fs::path dir = "test_axioms_out/tv";
  fs::remove_all("test_axioms_out");
  auto files = write_theory_files(e, dir.string());
  REQUIRE(files.size() == e.axioms.size() + 1);
  CHECK(files.back() == "manifest.json");

  auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["theory"] == "T_v");
  REQUIRE(manifest["axioms"].size() == e.axioms.size());
  Signature sig = parse_signature(manifest["signature_text"].get<std::string>());
  for (size_t i = 0; i < e.axioms.size(); ++i) {
    auto row = manifest["axioms"][i];
    CHECK(row["label"] == e.axioms[i].label);
    Formula back = parse_formula(slurp(dir / row["file"].get<std::string>()), sig);
    CHECK(back == e.axioms[i].formula);
  }

  // byte-for-byte determinism
  fs::path dir2 = "test_axioms_out/tv2";
  write_theory_files(e, dir2.string());
  CHECK(slurp(dir / "manifest.json") == slurp(dir2 / "manifest.json"));
  CHECK(slurp(dir / "O_one.fml") == slurp(dir2 / "O_one.fml"));
  fs::remove_all("test_axioms_out");
}
