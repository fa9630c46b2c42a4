#include "fvkit/axioms.hpp"

#include <filesystem>
#include <fstream>
#include <functional>

#include "json.hpp"

namespace fvkit {

namespace {

using std::string;
using std::to_string;
using std::vector;

// --- term/formula text builders ---------------------------------------------

string num(int m) {  // the numeral m as a ring term
  if (m <= 0) return "0";
  if (m == 1) return "1";
  return "(+ 1 " + num(m - 1) + ")";
}

string rep_sum(int c, const string& t) {  // t + t + ... (c copies, c >= 1)
  if (c <= 1) return t;
  return "(+ " + t + " " + rep_sum(c - 1, t) + ")";
}

string pow_t(const string& v, int d) {
  if (d <= 0) return "1";
  if (d == 1) return v;
  return "(* " + v + " " + pow_t(v, d - 1) + ")";
}

string fold_op(const string& op, const string& unit, const vector<string>& xs) {
  if (xs.empty()) return unit;
  string out = xs.back();
  for (size_t i = xs.size() - 1; i-- > 0;) out = "(" + op + " " + xs[i] + " " + out + ")";
  return out;
}
string fold_sum(const vector<string>& xs) { return fold_op("+", "0", xs); }
string fold_prod(const vector<string>& xs) { return fold_op("*", "1", xs); }

string fold_and(const vector<string>& xs) {
  if (xs.size() == 1) return xs[0];
  string out = "(and";
  for (auto& x : xs) out += " " + x;
  return out + ")";
}
string fold_or(const vector<string>& xs) {
  if (xs.size() == 1) return xs[0];
  string out = "(or";
  for (auto& x : xs) out += " " + x;
  return out + ")";
}

string iff(const string& a, const string& b) {
  return "(and (imp " + a + " " + b + ") (imp " + b + " " + a + "))";
}

string foralls(const vector<string>& vs, const string& body) {
  string out = body;
  for (size_t i = vs.size(); i-- > 0;) out = "(forall " + vs[i] + " " + out + ")";
  return out;
}
string existss(const vector<string>& vs, const string& body) {
  string out = body;
  for (size_t i = vs.size(); i-- > 0;) out = "(exists " + vs[i] + " " + out + ")";
  return out;
}

vector<string> names(const string& base, int from, int to) {
  vector<string> out;
  for (int i = from; i <= to; ++i) out.push_back(base + to_string(i));
  return out;
}

int ipow(int b, int e) {
  int out = 1;
  while (e-- > 0) out *= b;
  return out;
}

// --- entry assembly -----------------------------------------------------------

struct Builder {
  AxiomCorpusEntry e;
  Builder(string theory, Signature sig) {
    e.theory = std::move(theory);
    e.sig = std::move(sig);
  }
  void add(const string& label, const string& text, const string& note = "") {
    e.axioms.push_back({label, parse_formula(text, e.sig), note});
  }
  void add(const string& label, Formula f, const string& note = "") {
    e.axioms.push_back({label, std::move(f), note});
  }
};

void append_ring(Builder& b) {
  b.add("add_assoc", "(forall x (forall y (forall z (= (+ (+ x y) z) (+ x (+ y z))))))");
  b.add("add_comm", "(forall x (forall y (= (+ x y) (+ y x))))");
  b.add("add_zero", "(forall x (= (+ x 0) x))");
  b.add("sub_def", "(forall x (forall y (= (+ (- x y) y) x)))");
  b.add("mul_assoc", "(forall x (forall y (forall z (= (* (* x y) z) (* x (* y z))))))");
  b.add("mul_comm", "(forall x (forall y (= (* x y) (* y x))))");
  b.add("mul_one", "(forall x (= (* x 1) x))");
  b.add("distrib",
        "(forall x (forall y (forall z (= (* x (+ y z)) (+ (* x y) (* x z))))))");
}

const char* kRegular = "(forall x (exists y (= (* (* x y) x) x)))";

const char* kNoMinimalIdempotent =
    "(forall e (imp (and (= (* e e) e) (not (= e 0))) "
    "(exists f (and (= (* f f) f) (= (* f e) f) (not (= f 0)) (not (= f e))))))";

void append_diff(Builder& b) {
  b.add("delta_additive",
        "(forall x (forall y (= (delta (+ x y)) (+ (delta x) (delta y)))))");
  b.add("delta_leibniz",
        "(forall x (forall y (= (delta (* x y)) (+ (* (delta x) y) (* x (delta y))))))");
}

// y^d + u_{d-1} y^{d-1} + ... + u_0 has a root
string monic_root_text(int d) {
  vector<string> ts = {pow_t("y", d)};
  for (int i = d - 1; i >= 1; --i) ts.push_back("(* u" + to_string(i) + " " + pow_t("y", i) + ")");
  ts.push_back("u0");
  return foralls(names("u", 0, d - 1), "(exists y (= " + fold_sum(ts) + " 0))");
}

void append_val(Builder& b) {
  b.add("O_one", "(div 1 1)");
  b.add("O_ring_closed",
        "(forall x (forall y (imp (and (div 1 x) (div 1 y)) "
        "(and (div 1 (+ x y)) (div 1 (- x y)) (div 1 (* x y))))))");
  b.add("O_total_div",
        "(forall x (forall y (imp (and (div 1 x) (div 1 y)) "
        "(exists z (and (div 1 z) (= (* (- (* y z) x) (- (* z x) y)) 0))))))",
        "witness existential scoped to the conclusion");
  b.add("O_quasi_inverse",
        "(forall x (exists y (exists z (and (div 1 y) (div 1 z) "
        "(= (* (- y x) (- 1 (* x z))) 0)))))");
  b.add("M_absorb",
        "(forall x (forall y (imp (and (div 1 x) (Div 1 y)) (Div 1 (* x y)))))");
  b.add("M_unit_complement",
        "(forall x (imp (and (div 1 x) (not (Div 1 x))) "
        "(exists y (and (div 1 y) (Div 1 (- 1 (* x y)))))))",
        "witness existential scoped to the conclusion");
}

string char0_text(int n) {
  return "(forall e (imp (and (= (* e e) e) (not (= e 0))) (not (= " + rep_sum(n, "e") +
         " 0))))";
}

// --- signatures ----------------------------------------------------------------

Signature sig_ring_inf() { return sig_ring().with_function("inf", 2, "_inf"); }

Signature sig_ring_val() {
  Signature s = sig_ring().with_relation("div", 2, "_val").with_relation("Div", 2, "");
  s.dagger["div"] = parse_formula("(Div x2 x1)", s);
  s.dagger["Div"] = parse_formula("(div x2 x1)", s);
  s.validate();
  return s;
}

// sum z1*x1 + ... + zk*xk
string lin_comb(int k, const string& zs, const string& xs) {
  vector<string> ts;
  for (int i = 1; i <= k; ++i)
    ts.push_back("(* " + zs + to_string(i) + " " + xs + to_string(i) + ")");
  return fold_sum(ts);
}

// Exists z1..zk with some zi nonzero, sum zi*xi = 0, all zi in P.  The dagger
// form witnesses nonzeroness by invertibility to stay negation-free.
string ell_complement(int k, bool dagger_form) {
  vector<string> conj;
  vector<string> nz;
  for (int i = 1; i <= k; ++i)
    nz.push_back(dagger_form ? "(= (* z" + to_string(i) + " w) 1)"
                             : "(not (= z" + to_string(i) + " 0))");
  conj.push_back(dagger_form ? existss({"w"}, fold_or(nz)) : fold_or(nz));
  conj.push_back("(= " + lin_comb(k, "z", "x") + " 0)");
  for (int i = 1; i <= k; ++i) conj.push_back("(P z" + to_string(i) + ")");
  return existss(names("z", 1, k), fold_and(conj));
}

Signature sig_ring_ell(int n) {
  Signature s = sig_ring().with_relation("P", 1, "_ell" + to_string(n));
  for (int k = 2; k <= n; ++k) s.relations.emplace_back("ell_" + to_string(k), k);
  s.dagger["P"] = parse_formula("(ell_2 1 x1)", s);
  for (int k = 2; k <= n; ++k)
    s.dagger["ell_" + to_string(k)] = parse_formula(ell_complement(k, true), s);
  s.validate();
  return s;
}

// Exponent vectors for nv variables, total degree 0..k, degree-major.
vector<vector<int>> monomials(int nv, int k) {
  vector<vector<int>> out;
  vector<int> a(static_cast<size_t>(nv), 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == nv - 1) {
      a[static_cast<size_t>(pos)] = left;
      out.push_back(a);
      return;
    }
    for (int v = left; v >= 0; --v) {
      a[static_cast<size_t>(pos)] = v;
      rec(pos + 1, left - v);
    }
  };
  for (int d = 0; d <= k; ++d) rec(0, d);
  return out;
}

// Exists coefficients in P, not all positive-degree ones zero, with the degree
// <= k polynomial vanishing on x1..xn.
string dependence_formula(int nv, int k, bool dagger_form) {
  auto mons = monomials(nv, k);
  vector<string> terms, nz, conj;
  for (size_t m = 0; m < mons.size(); ++m) {
    string c = "c" + to_string(m);
    vector<string> fs;
    int deg = 0;
    for (int j = 0; j < nv; ++j) {
      deg += mons[m][static_cast<size_t>(j)];
      if (mons[m][static_cast<size_t>(j)] > 0)
        fs.push_back(pow_t("x" + to_string(j + 1), mons[m][static_cast<size_t>(j)]));
    }
    terms.push_back(deg == 0 ? c : "(* " + c + " " + fold_prod(fs) + ")");
    if (deg > 0)
      nz.push_back(dagger_form ? "(= (* " + c + " w) 1)" : "(not (= " + c + " 0))");
  }
  conj.push_back(dagger_form ? existss({"w"}, fold_or(nz)) : fold_or(nz));
  conj.push_back("(= " + fold_sum(terms) + " 0)");
  for (size_t m = 0; m < mons.size(); ++m) conj.push_back("(P c" + to_string(m) + ")");
  return existss(names("c", 0, static_cast<int>(mons.size()) - 1), fold_and(conj));
}

string dt_name(int nv, int k) { return "Dt_" + to_string(nv) + "_" + to_string(k); }

Signature sig_ring_dnk(int n, int k) {
  Signature s =
      sig_ring().with_relation("P", 1, "_D" + to_string(n) + "_" + to_string(k));
  for (int nv = 1; nv <= n; ++nv)
    for (int kk = 1; kk <= k; ++kk) s.relations.emplace_back(dt_name(nv, kk), nv);
  s.dagger["P"] = parse_formula("(Dt_1_1 x1)", s);
  for (int nv = 1; nv <= n; ++nv)
    for (int kk = 1; kk <= k; ++kk)
      s.dagger[dt_name(nv, kk)] = parse_formula(dependence_formula(nv, kk, true), s);
  s.validate();
  return s;
}

string rel_app(const string& r, const vector<string>& args) {
  string out = "(" + r;
  for (auto& a : args) out += " " + a;
  return out + ")";
}

// --- theory emitters ------------------------------------------------------------

int bound(const std::optional<int>& v, int dflt, const char* what) {
  if (!v) return dflt;
  if (*v <= 0) throw Error(string("emit_theory: ") + what + " bound must be positive");
  return *v;
}

AxiomCorpusEntry emit_ell(int n) {
  if (n < 2) throw Error("emit_theory: ell_n needs n >= 2");
  Builder b("ell_n", sig_ring_ell(n));
  for (int k = 2; k <= n; ++k) {
    string rel = rel_app("ell_" + to_string(k), names("x", 1, k));
    b.add("ell_" + to_string(k) + "_def",
          foralls(names("x", 1, k), iff(rel, "(not " + ell_complement(k, false) + ")")));
  }
  b.add("P_complement", "(forall x " + iff("(not (P x))", "(ell_2 1 x)") + ")");
  return b.e;
}

AxiomCorpusEntry emit_dnk(int n, int k) {
  Builder b("Dnk", sig_ring_dnk(n, k));
  for (int nv = 1; nv <= n; ++nv)
    for (int kk = 1; kk <= k; ++kk) {
      string rel = rel_app(dt_name(nv, kk), names("x", 1, nv));
      b.add(dt_name(nv, kk) + "_def",
            foralls(names("x", 1, nv),
                    iff(rel, "(not " + dependence_formula(nv, kk, false) + ")")),
            "dependence requires a nonzero positive-degree coefficient");
    }
  b.add("P_complement", "(forall x " + iff("(not (P x))", "(Dt_1_1 x)") + ")");
  return b.e;
}

AxiomCorpusEntry emit_lambda(int n) {
  if (n < 2) throw Error("emit_theory: lambda needs n >= 2");
  Signature s = sig_ring().with_relation("P", 1, "_lambda" + to_string(n));
  for (int k : vector<int>{2, n, n + 1}) {
    if (s.relation_arity("ell_" + to_string(k))) continue;
    s.relations.emplace_back("ell_" + to_string(k), k);
  }
  for (int i = 1; i <= n; ++i)
    s.functions.emplace_back("lambda_" + to_string(n) + "_" + to_string(i), n + 1);
  s.dagger["P"] = parse_formula("(ell_2 1 x1)", s);
  for (auto& [r, ar] : s.relations)
    if (r.rfind("ell_", 0) == 0) s.dagger[r] = parse_formula(ell_complement(ar, true), s);
  s.validate();

  Builder b("lambda", s);
  vector<string> xs = names("x", 1, n);
  vector<string> xy = xs;
  xy.push_back("y");
  for (int i = 1; i <= n; ++i) {
    string fn = "lambda_" + to_string(n) + "_" + to_string(i);
    vector<string> fargs = {"y"};
    for (auto& x : xs) fargs.push_back(x);
    string lhs = "(= z " + rel_app(fn, fargs) + ")";
    vector<string> inner;
    for (int j = 1; j <= n; ++j) inner.push_back("(P z" + to_string(j) + ")");
    inner.push_back("(= y " + lin_comb(n, "z", "x") + ")");
    inner.push_back("(= z" + to_string(i) + " z)");
    string branch1 = fold_and({rel_app("ell_" + to_string(n), xs),
                               "(not " + rel_app("ell_" + to_string(n + 1), xy) + ")",
                               existss(names("z", 1, n), fold_and(inner))});
    string branch2 = fold_and({rel_app("ell_" + to_string(n + 1), xy), "(= z 0)"});
    vector<string> quant = {"y"};
    for (auto& x : xs) quant.push_back(x);
    quant.push_back("z");
    b.add(fn + "_def", foralls(quant, iff(lhs, fold_or({branch1, branch2}))),
          "definitional expansion; meaningful over genuine dense pairs");
  }
  return b.e;
}

AxiomCorpusEntry emit_pcf_powers(int n, int reps) {
  if (n < 2) throw Error("emit_theory: pcf_powers needs n >= 2");
  Signature s = sig_ring().with_relation("P_2", 1, "_pow" + to_string(n));
  for (int j = 3; j <= n; ++j) s.relations.emplace_back("P_" + to_string(j), 1);
  for (int j = 2; j <= n; ++j) {
    vector<string> disj;
    for (int r = 2; r <= reps + 1; ++r)
      disj.push_back("(= x1 (* " + num(r) + " " + pow_t("y", j) + "))");
    s.dagger["P_" + to_string(j)] =
        parse_formula(existss({"y", "w"}, fold_and({"(= (* y w) 1)", fold_or(disj)})), s);
  }
  s.validate();
  Builder b("pcf_powers", s);
  for (int j = 2; j <= n; ++j)
    b.add("P_" + to_string(j) + "_def",
          "(forall x " +
              iff("(P_" + to_string(j) + " x)",
                  "(exists y (= x " + pow_t("y", j) + "))") +
              ")",
          "complement uses bounded numeral coset representatives");
  return b.e;
}

string abs_t(const string& t) { return "(- 0 (inf (- 0 " + t + ") " + t + "))"; }

AxiomCorpusEntry emit_scheme_g(const string& sigma_text) {
  Signature s = sig_ring_delta().with_relation("chi", 2, "_chi");
  string text = sigma_text.empty() ? "(= xn z1)" : sigma_text;
  Formula sigma = parse_formula(text, s);
  auto fv = free_vars(sigma);
  bool has_xn = false;
  int n = 0;
  for (auto& v : fv) {
    bool z_index = v.size() > 1 && v[0] == 'z' &&
                   v.find_first_not_of("0123456789", 1) == string::npos;
    if (v == "xn") {
      has_xn = true;
    } else if (z_index) {
      n = std::max(n, std::stoi(v.substr(1)));
    } else {
      throw Error("emit_theory: scheme_G sigma must use variables z1..zn and xn");
    }
  }
  if (!has_xn || n == 0)
    throw Error("emit_theory: scheme_G sigma must use variables z1..zn and xn");
  for (int i = 1; i <= n; ++i)
    if (!has_free_var(sigma, "z" + to_string(i)))
      throw Error("emit_theory: scheme_G sigma must use variables z1..zn and xn");

  vector<string> balls;
  for (int i = 1; i <= n; ++i)
    balls.push_back("(chi (- z" + to_string(i) + " c" + to_string(i) + ") b)");
  string premise = existss(names("c", 1, n),
                           existss({"b"}, fold_and({"(chi 0 b)",
                                                    foralls(names("z", 1, n),
                                                            "(imp " + fold_and(balls) +
                                                                " (exists xn " +
                                                                print_formula(sigma) +
                                                                "))")})));
  Term jet = Term::var("a");
  Formula conc = sigma;
  for (int i = 1; i <= n; ++i) {
    conc = subst_free(conc, "z" + to_string(i), jet);
    jet = Term::app("delta", {jet});
  }
  conc = subst_free(conc, "xn", jet);
  Builder b("scheme_G", s);
  b.add("G_instance", Formula::imp(parse_formula(premise, s), Formula::exists("a", conc)),
        "interpretation: the open-set premise is read as containing a chi-ball");
  return b.e;
}

void append_ba(Builder& b) {
  b.add("meet_comm", "(forall x (forall y (= (meet x y) (meet y x))))");
  b.add("join_comm", "(forall x (forall y (= (join x y) (join y x))))");
  b.add("meet_assoc",
        "(forall x (forall y (forall z (= (meet (meet x y) z) (meet x (meet y z))))))");
  b.add("join_assoc",
        "(forall x (forall y (forall z (= (join (join x y) z) (join x (join y z))))))");
  b.add("absorb_mj", "(forall x (forall y (= (meet x (join x y)) x)))");
  b.add("absorb_jm", "(forall x (forall y (= (join x (meet x y)) x)))");
  b.add("distrib_mj",
        "(forall x (forall y (forall z (= (meet x (join y z)) "
        "(join (meet x y) (meet x z))))))");
  b.add("compl_meet", "(forall x (= (meet x (compl x)) 0))");
  b.add("compl_join", "(forall x (= (join x (compl x)) 1))");
}

}  // namespace

const AxiomEntry* AxiomCorpusEntry::find(const string& label) const {
  for (auto& a : axioms)
    if (a.label == label) return &a;
  return nullptr;
}

vector<string> theory_names() {
  return {"ring",   "vnr",        "projector_def", "diff_ring", "axioms_A",
          "T_f",    "T_reg",      "T_v",           "char0",     "T_reg_v_0",
          "T_reg_v_p", "ell_n",   "Dnk",           "lambda",    "pcf_powers",
          "chi_order", "chi_val", "scheme_G",      "ba",        "T_at"};
}

AxiomCorpusEntry emit_theory(const string& name, const TheoryParams& params) {
  if (name == "ring") {
    Builder b("ring", sig_ring());
    append_ring(b);
    return b.e;
  }
  if (name == "vnr") {
    Builder b("vnr", sig_ring());
    append_ring(b);
    b.add("regular", kRegular);
    return b.e;
  }
  if (name == "projector_def") {
    Builder b("projector_def", sig_ring_p());
    b.add("projector_def",
          "(forall a (forall b (exists d (and (= (* (* b d) b) b) "
          "(= (* (- (p a b) a) (- 1 (* b d))) 0) (= (* (p a b) b) 0)))))");
    return b.e;
  }
  if (name == "diff_ring") {
    Builder b("diff_ring", sig_ring_delta());
    append_diff(b);
    return b.e;
  }
  if (name == "axioms_A") {
    Builder b("axioms_A", sig_ring_delta());
    append_ring(b);
    b.add("regular", kRegular);
    append_diff(b);
    b.add("no_minimal_idempotent", kNoMinimalIdempotent);
    return b.e;
  }
  if (name == "T_f") {
    Builder b("T_f", sig_ring_inf());
    append_ring(b);
    b.add("inf_comm", "(forall x (forall y (= (inf x y) (inf y x))))");
    b.add("inf_assoc",
          "(forall x (forall y (forall z (= (inf (inf x y) z) (inf x (inf y z))))))");
    b.add("inf_idem", "(forall x (= (inf x x) x))");
    b.add("inf_translate",
          "(forall x (forall y (forall z (= (+ (inf x y) z) (inf (+ x z) (+ y z))))))");
    b.add("pos_mul_closed",
          "(forall x (forall y (imp (and (= (inf x 0) 0) (= (inf y 0) 0)) "
          "(= (inf (* x y) 0) 0))))");
    b.add("reduced", "(forall x (imp (= (* x x) 0) (= x 0)))");
    b.add("f_ring", "(forall a (forall b (imp (= (inf a b) 0) (= (* a b) 0))))");
    return b.e;
  }
  if (name == "T_reg") {
    int n = bound(params.n, 3, "n");
    AxiomCorpusEntry tf = emit_theory("T_f");
    Builder b("T_reg", sig_ring_inf());
    b.e.axioms = tf.axioms;
    b.add("regular", kRegular);
    b.add("no_minimal_idempotent", kNoMinimalIdempotent);
    for (int d = 1; d <= n; d += 2) b.add("odd_root_" + to_string(d), monic_root_text(d));
    b.add("sqrt_pos", "(forall x (imp (= (inf x 0) 0) (exists y (= (* y y) x))))");
    return b.e;
  }
  if (name == "T_v") {
    Builder b("T_v", sig_ring_val());
    append_ring(b);
    b.add("regular", kRegular);
    append_val(b);
    return b.e;
  }
  if (name == "char0") {
    int n = bound(params.n, 4, "n");
    Builder b("char0", sig_ring());
    for (int i = 1; i <= n; ++i)
      b.add("char0_" + to_string(i), char0_text(i), "restricted to nonzero idempotents");
    return b.e;
  }
  if (name == "T_reg_v_0") {
    int n = bound(params.n, 3, "n");
    AxiomCorpusEntry tv = emit_theory("T_v");
    Builder b("T_reg_v_0", tv.sig);
    b.e.axioms = tv.axioms;
    b.add("no_minimal_idempotent", kNoMinimalIdempotent);
    for (int d = 1; d <= n; ++d) b.add("monic_root_" + to_string(d), monic_root_text(d));
    for (int i = 1; i <= n; ++i)
      b.add("char0_" + to_string(i), char0_text(i), "restricted to nonzero idempotents");
    return b.e;
  }
  if (name == "T_reg_v_p") {
    int n = bound(params.n, 3, "n");
    int m = bound(params.k, 2, "k");
    int p = bound(params.p, 2, "p");
    if (p < 2) throw Error("emit_theory: T_reg_v_p needs p >= 2");
    AxiomCorpusEntry tv = emit_theory("T_v");
    Builder b("T_reg_v_p", tv.sig);
    b.e.axioms = tv.axioms;
    b.add("no_minimal_idempotent", kNoMinimalIdempotent);
    for (int d = 1; d <= n; ++d) {
      if (d == 1) {
        b.add("hensel_1", "(exists y (= (+ y 1) 0))");
        continue;
      }
      vector<string> prem, ts = {pow_t("y", d), pow_t("y", d - 1)};
      for (int i = 0; i <= d - 2; ++i) prem.push_back("(Div 1 u" + to_string(i) + ")");
      for (int i = d - 2; i >= 1; --i)
        ts.push_back("(* u" + to_string(i) + " " + pow_t("y", i) + ")");
      ts.push_back("u0");
      b.add("hensel_" + to_string(d),
            foralls(names("u", 0, d - 2), "(imp " + fold_and(prem) + " (exists y (= " +
                                              fold_sum(ts) + " 0)))"));
    }
    b.add("discrete_value",
          "(forall x (forall y (imp (Div x y) (div " + rep_sum(p, "x") + " y))))");
    for (int mm = 2; mm <= m; ++mm) {
      vector<string> disj;
      for (int l = 0; l < mm; ++l)
        disj.push_back("(= (* a (* e " + num(ipow(p, l)) + ")) " + pow_t("b", mm) + ")");
      b.add("zgroup_" + to_string(mm),
            "(forall a (imp (not (= a 0)) " +
                existss({"b", "e", "f"},
                        fold_and({"(div 1 e)", "(div 1 f)", "(= (* e f) 1)",
                                  fold_or(disj)})) +
                "))",
            "witness existential scoped to the conclusion");
    }
    vector<string> fs = {"x"};
    for (int j = 1; j <= p - 1; ++j) fs.push_back("(- x " + num(j) + ")");
    b.add("residue_F" + to_string(p),
          "(forall x (imp (div 1 x) (Div 1 " + fold_prod(fs) + ")))");
    return b.e;
  }
  if (name == "ell_n") return emit_ell(bound(params.n, 2, "n"));
  if (name == "Dnk") return emit_dnk(bound(params.n, 2, "n"), bound(params.k, 1, "k"));
  if (name == "lambda") return emit_lambda(bound(params.n, 2, "n"));
  if (name == "pcf_powers")
    return emit_pcf_powers(bound(params.n, 2, "n"), bound(params.k, 1, "k"));
  if (name == "chi_order") {
    Builder b("chi_order", sig_ring_inf().with_relation("chi", 2, "_chi"));
    b.add("chi_def",
          foralls({"x", "y"},
                  iff("(chi x y)", fold_and({"(= (inf " + abs_t("x") + " " + abs_t("y") +
                                                 ") " + abs_t("x") + ")",
                                             "(exists w (= (* y w) 1))"}))));
    return b.e;
  }
  if (name == "chi_val") {
    Signature s = sig_ring_val().with_relation("chi", 2, "_chi");
    Builder b("chi_val", s);
    b.add("chi_def",
          foralls({"x", "y"},
                  iff("(chi x y)",
                      fold_and({"(div x y)", "(exists w (= (* x w) 1))"}))));
    return b.e;
  }
  if (name == "scheme_G") return emit_scheme_g(params.sigma);
  if (name == "ba") {
    Builder b("ba", sig_ba());
    append_ba(b);
    return b.e;
  }
  if (name == "T_at") {
    Builder b("T_at", sig_ba());
    append_ba(b);
    b.add("atomless",
          "(forall x (imp (not (= x 0)) "
          "(exists y (and (not (= y 0)) (not (= y x)) (= (meet y x) y)))))");
    return b.e;
  }
  throw Error("emit_theory: unknown theory '" + name + "'");
}

TheoryEvaluation evaluate_theory(const AxiomCorpusEntry& entry, const FiniteStructure& A) {
  for (auto& [s, ar] : entry.sig.functions) {
    auto got = A.sig.function_arity(s);
    if (!got || *got != ar)
      throw Error("evaluate_theory: structure '" + A.name + "' lacks function '" + s + "'");
  }
  for (auto& c : entry.sig.constants)
    if (!A.sig.has_constant(c))
      throw Error("evaluate_theory: structure '" + A.name + "' lacks constant '" + c + "'");
  for (auto& [s, ar] : entry.sig.relations) {
    auto got = A.sig.relation_arity(s);
    if (!got || *got != ar)
      throw Error("evaluate_theory: structure '" + A.name + "' lacks relation '" + s + "'");
  }
  TheoryEvaluation out;
  out.theory = entry.theory;
  for (auto& ax : entry.axioms)
    out.verdicts.push_back({ax.label, eval_formula(A, ax.formula, {})});
  if (!entry.sig.dagger.empty()) {
    FiniteStructure B = A;
    B.sig.dagger = entry.sig.dagger;
    out.daggers = check_daggers(B);
  }
  return out;
}

FiniteStructure with_trivial_valuation(const FiniteStructure& field) {
  FiniteStructure A = field;
  Signature s = field.sig.with_relation("div", 2, "_triv").with_relation("Div", 2, "");
  s.dagger["div"] = parse_formula("(Div x2 x1)", s);
  s.dagger["Div"] = parse_formula("(div x2 x1)", s);
  s.validate();
  A.sig = s;
  A.name = field.name + "_triv";
  int n = A.size;
  int zero = A.constant("0");
  std::vector<char> dv(static_cast<size_t>(n) * n), Dv(static_cast<size_t>(n) * n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      dv[static_cast<size_t>(x) * n + y] = (x != zero || y == zero) ? 1 : 0;
      Dv[static_cast<size_t>(x) * n + y] = (x != zero && y == zero) ? 1 : 0;
    }
  A.rels["div"] = dv;
  A.rels["Div"] = Dv;
  A.validate();
  return A;
}

FiniteStructure with_power_predicates(const FiniteStructure& A, int n) {
  if (n < 2) throw Error("with_power_predicates: n must be >= 2");
  FiniteStructure B = A;
  Signature s = A.sig;
  for (int j = 2; j <= n; ++j) s.relations.emplace_back("P_" + to_string(j), 1);
  s.name += "_pow" + to_string(n);
  s.validate();
  B.sig = s;
  B.name = A.name + "_pow" + to_string(n);
  for (int j = 2; j <= n; ++j) {
    std::vector<char> tab(static_cast<size_t>(A.size), 0);
    for (int y = 0; y < A.size; ++y) {
      int t = y;
      for (int i = 1; i < j; ++i) t = A.fun("*", t, y);
      tab[static_cast<size_t>(t)] = 1;
    }
    B.rels["P_" + to_string(j)] = tab;
  }
  B.validate();
  return B;
}

vector<string> write_theory_files(const AxiomCorpusEntry& entry, const string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::ordered_json manifest;
  manifest["theory"] = entry.theory;
  manifest["signature"] = entry.sig.name;
  manifest["signature_text"] = print_signature(entry.sig);
  manifest["axioms"] = nlohmann::ordered_json::array();
  vector<string> written;
  for (auto& ax : entry.axioms) {
    string file = ax.label + ".fml";
    std::ofstream out(fs::path(dir) / file);
    if (!out) throw Error("write_theory_files: cannot write " + file);
    out << print_formula(ax.formula) << "\n";
    nlohmann::ordered_json row;
    row["label"] = ax.label;
    row["file"] = file;
    if (!ax.note.empty()) row["note"] = ax.note;
    manifest["axioms"].push_back(row);
    written.push_back(file);
  }
  std::ofstream mout(fs::path(dir) / "manifest.json");
  if (!mout) throw Error("write_theory_files: cannot write manifest.json");
  mout << manifest.dump(2) << "\n";
  written.push_back("manifest.json");
  return written;
}

}  // namespace fvkit
