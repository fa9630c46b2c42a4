// Python bindings: a string-first functional facade over the core library.
// Formulas travel as canonical s-expression text, structures and rings as
// spec strings ("builtin:gf:4", a file path, or inline "(structure ...)"),
// and reports as plain dicts.  Errors surface as fvkit.Error.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "fvkit/axioms.hpp"
#include "fvkit/corpus.hpp"
#include "fvkit/fv.hpp"
#include "fvkit/pairs.hpp"
#include "fvkit/product.hpp"
#include "fvkit/projector.hpp"
#include "fvkit/report.hpp"
#include "fvkit/ring.hpp"
#include "fvkit/semantics.hpp"
#include "fvkit/suite.hpp"
#include "fvkit/syntax.hpp"

namespace py = pybind11;
using namespace fvkit;

namespace {

Signature sig_by_name(const std::string& name) {
  if (auto s = builtin_signature(name)) return *s;
  throw Error("unknown signature '" + name + "' (try ring, ring_p, ring_pair, ring_delta, ba)");
}

Formula parse_text(const std::string& text, const std::string& sig) {
  return parse_formula(text, sig_by_name(sig));
}

// Inline "(structure ...)" / "(builtin ...)" text is accepted alongside the
// spec grammar so callers need not touch the filesystem.
FiniteStructure structure_from_spec(const std::string& spec) {
  std::string s = spec;
  size_t i = s.find_first_not_of(" \t\r\n");
  if (i != std::string::npos && s[i] == '(') return parse_structure(s);
  return resolve_structure_spec(spec, ".");
}

FiniteRing ring_from_spec(const std::string& spec) { return resolve_ring_spec(spec, "."); }

BooleanProduct product_from_specs(const std::vector<std::string>& factors) {
  std::vector<FiniteStructure> fs;
  for (const auto& spec : factors) fs.push_back(structure_from_spec(spec));
  return BooleanProduct::make_full(std::move(fs));
}

PairProduct pair_product_from_specs(const std::vector<std::string>& factors) {
  std::vector<PairStructure> ps;
  for (const auto& spec : factors) ps.push_back(make_pair(structure_from_spec(spec)));
  return PairProduct::make_full(std::move(ps));
}

Assignment assignment_from_dict(const std::map<std::string, int>& asg) {
  Assignment out;
  for (const auto& [k, v] : asg) out[k] = v;
  return out;
}

TheoryParams params_from_args(int n, int k, int p, const std::string& sigma) {
  TheoryParams params;
  if (n > 0) params.n = n;
  if (k > 0) params.k = k;
  if (p > 0) params.p = p;
  params.sigma = sigma;
  return params;
}

std::vector<std::string> corpus_text(const std::vector<Formula>& corpus) {
  std::vector<std::string> out;
  out.reserve(corpus.size());
  for (const auto& f : corpus) out.push_back(print_formula(f));
  return out;
}

std::vector<Formula> formulas_from_texts(const std::vector<std::string>& texts,
                                         const Signature& sig) {
  std::vector<Formula> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(parse_formula(t, sig));
  return out;
}

}  // namespace

PYBIND11_MODULE(_fvkit, m) {
  m.doc() = "finite first-order structures, boolean products, and transfer checks";
  m.attr("__version__") = kToolkitVersion;

  py::register_exception<Error>(m, "Error");

  // --- formulas -------------------------------------------------------
  m.def(
      "parse",
      [](const std::string& text, const std::string& sig) {
        return print_formula(parse_text(text, sig));
      },
      py::arg("text"), py::arg("sig") = "ring",
      "parse a formula and return its canonical form");
  m.def(
      "free_vars",
      [](const std::string& text, const std::string& sig) {
        return free_vars(parse_text(text, sig));
      },
      py::arg("text"), py::arg("sig") = "ring");
  m.def(
      "quantifier_depth",
      [](const std::string& text, const std::string& sig) {
        return quantifier_depth(parse_text(text, sig));
      },
      py::arg("text"), py::arg("sig") = "ring");
  m.def(
      "weight",
      [](const std::string& text, const std::string& sig) {
        return formula_weight(parse_text(text, sig));
      },
      py::arg("text"), py::arg("sig") = "ring");
  m.def(
      "to_prenex",
      [](const std::string& text, const std::string& sig) {
        return print_formula(to_prenex(parse_text(text, sig)));
      },
      py::arg("text"), py::arg("sig") = "ring");
  m.def(
      "to_nnf",
      [](const std::string& text, const std::string& sig) {
        return print_formula(to_nnf(parse_text(text, sig)));
      },
      py::arg("text"), py::arg("sig") = "ring");
  m.def(
      "relativize",
      [](const std::string& text, const std::string& sig, const std::string& p) {
        Signature s = sig_by_name(sig);
        return print_formula(relativize(parse_formula(text, s), s, p));
      },
      py::arg("text"), py::arg("sig") = "ring_pair", py::arg("p") = "P",
      "bound every quantifier by the unary predicate p");
  m.def(
      "projector_translate",
      [](const std::string& text) {
        Signature s = sig_ring_p();
        return print_formula(projector_translate(parse_formula(text, s), s));
      },
      py::arg("text"), "rewrite a prenex ring formula through the binary projector");

  // --- structures and evaluation --------------------------------------
  m.def(
      "structure",
      [](const std::string& spec) { return print_structure(structure_from_spec(spec)); },
      py::arg("spec"), "resolve a structure spec and return its table form");
  m.def(
      "eval_formula",
      [](const std::string& spec, const std::string& formula,
         const std::map<std::string, int>& assignment) {
        FiniteStructure A = structure_from_spec(spec);
        return eval_formula(A, parse_formula(formula, A.sig), assignment_from_dict(assignment));
      },
      py::arg("spec"), py::arg("formula"), py::arg("assignment") = std::map<std::string, int>{});
  m.def(
      "definable_set",
      [](const std::string& spec, const std::string& formula) {
        FiniteStructure A = structure_from_spec(spec);
        Formula f = parse_formula(formula, A.sig);
        return definable_set(A, f, free_vars(f));
      },
      py::arg("spec"), py::arg("formula"),
      "tuples over the free variables, in variable-name order");

  // --- determining sequences -------------------------------------------
  m.def(
      "fv_compile",
      [](const std::string& formula, const std::string& sig, int max_psis) {
        FvOptions opt;
        opt.max_psis = max_psis;
        return print_ds(fv_compile(parse_text(formula, sig), opt));
      },
      py::arg("formula"), py::arg("sig") = "ring", py::arg("max_psis") = 12);
  m.def(
      "fv_eval",
      [](const std::vector<std::string>& factors, const std::string& formula,
         const std::vector<std::vector<int>>& args, int max_psis) {
        BooleanProduct P = product_from_specs(factors);
        FvOptions opt;
        opt.max_psis = max_psis;
        DeterminingSequence ds = fv_compile(parse_formula(formula, P.sig()), opt);
        return fv_eval(P, ds, args);
      },
      py::arg("factors"), py::arg("formula"),
      py::arg("args") = std::vector<std::vector<int>>{}, py::arg("max_psis") = 12,
      "evaluate via the determining sequence; args are coordinate vectors, one "
      "per free variable in sorted name order");
  m.def(
      "fv_verify",
      [](const std::vector<std::string>& factors, const std::string& formula, int max_psis) {
        BooleanProduct P = product_from_specs(factors);
        FvOptions opt;
        opt.max_psis = max_psis;
        FvVerifyReport r = fv_verify(P, parse_formula(formula, P.sig()), opt);
        py::dict d;
        d["assignments"] = r.assignments;
        d["disagreements"] = r.disagreements;
        d["psi_count"] = r.psi_count;
        return d;
      },
      py::arg("factors"), py::arg("formula"), py::arg("max_psis") = 12,
      "sweep every assignment, comparing direct and transferred truth");

  // --- rings ------------------------------------------------------------
  m.def(
      "ring_decompose",
      [](const std::string& spec) {
        FiniteRing R = ring_from_spec(spec);
        VnrReport vnr = is_vnr(R);
        py::dict d;
        d["size"] = R.n;
        d["regular"] = vnr.ok;
        if (vnr.ok) {
          StalkDecomposition sd = decompose_stalks(R);
          std::vector<int> sizes;
          for (const auto& s : sd.stalks) sizes.push_back(s.field.n);
          d["stalk_sizes"] = sizes;
          d["reconstruction_ok"] = sd.reconstruction_ok;
          d["atoms"] = idempotent_algebra(R).atoms;
        }
        return d;
      },
      py::arg("spec"), "Pierce decomposition of a von Neumann regular ring");
  m.def(
      "derivations",
      [](const std::string& spec) {
        std::vector<std::vector<int>> out;
        for (const auto& t : enumerate_derivations(ring_from_spec(spec))) out.push_back(t.delta);
        return out;
      },
      py::arg("spec"), "all derivation tables, the zero map first");
  m.def(
      "check_derivation",
      [](const std::string& spec, const std::vector<int>& table) {
        FiniteRing R = ring_from_spec(spec);
        DerivationTable d;
        d.delta = table;
        DerivationReport rep = check_derivation(R, d);
        DiffIdealReport ideals = check_differential_ideals(R, d);
        py::dict out;
        out["ok"] = rep.ok;
        out["idempotents_ok"] = rep.idempotents_ok;
        out["ideals_ok"] = ideals.ok;
        return out;
      },
      py::arg("spec"), py::arg("table"));

  // --- pairs --------------------------------------------------------------
  m.def(
      "pair_check",
      [](const std::vector<std::string>& factors, const std::string& chi, int d_max) {
        PairProduct A = pair_product_from_specs(factors);
        Formula c = parse_formula(chi, A.ambient.sig());
        DensePairReport r = dense_pair_check(A, c, d_max);
        py::dict d;
        d["ok"] = r.ok();
        d["d1_equal"] = r.d1_equal;
        d["d1_atoms_ambient"] = r.d1_atoms_ambient;
        d["d1_atoms_pair"] = r.d1_atoms_pair;
        d["d2_ok"] = r.d2_ok;
        d["d2_polys"] = r.d2_polys;
        py::list polys;
        for (const auto& pf : r.d2_failures) {
          py::dict w;
          w["factor"] = pf.factor;
          w["coeffs"] = pf.coeffs;
          w["ambient_roots"] = pf.ambient_roots;
          polys.append(w);
        }
        d["d2_failures"] = polys;
        d["d3_ok"] = r.d3_ok;
        d["d3_balls"] = r.d3_balls;
        d["d4_ok"] = r.d4_ok;
        d["d4_checks"] = r.d4_checks;
        return d;
      },
      py::arg("factors"), py::arg("chi") = "(and)", py::arg("d_max") = 2,
      "density conditions D1-D4 for a full pair product");
  m.def(
      "check_relativization",
      [](const std::vector<std::string>& factors, const std::vector<std::string>& formulas,
         long long max_tuples) {
        PairProduct A = pair_product_from_specs(factors);
        RelativizationReport r = check_relativization(
            A, formulas_from_texts(formulas, A.ambient.sig()), max_tuples);
        py::dict d;
        d["ok"] = r.ok;
        d["checks"] = r.checks;
        return d;
      },
      py::arg("factors"), py::arg("formulas"), py::arg("max_tuples") = 4096);
  m.def(
      "check_burris",
      [](const std::string& spec, const std::string& formula) {
        FiniteStructure A = structure_from_spec(spec);
        BurrisReport r = check_burris(A, parse_formula(formula, A.sig));
        py::dict d;
        d["forward_ok"] = r.forward_ok;
        d["converse_ok"] = r.converse_ok;
        d["converse_failures"] = r.converse_failures.size();
        return d;
      },
      py::arg("spec"), py::arg("formula"),
      "factor/product transfer for existential formulas over literals");

  // --- axiom corpus ---------------------------------------------------------
  m.def("theory_names", &theory_names);
  m.def(
      "emit_theory",
      [](const std::string& name, int n, int k, int p, const std::string& sigma) {
        AxiomCorpusEntry entry = emit_theory(name, params_from_args(n, k, p, sigma));
        py::list out;
        for (const auto& ax : entry.axioms) {
          py::dict d;
          d["label"] = ax.label;
          d["formula"] = print_formula(ax.formula);
          d["note"] = ax.note;
          out.append(d);
        }
        return out;
      },
      py::arg("name"), py::arg("n") = 0, py::arg("k") = 0, py::arg("p") = 0,
      py::arg("sigma") = "");
  m.def(
      "evaluate_theory",
      [](const std::string& name, const std::string& spec, int n, int k, int p,
         const std::string& sigma) {
        AxiomCorpusEntry entry = emit_theory(name, params_from_args(n, k, p, sigma));
        TheoryEvaluation ev = evaluate_theory(entry, structure_from_spec(spec));
        py::dict verdicts;
        for (const auto& v : ev.verdicts) verdicts[py::str(v.label)] = v.holds;
        py::dict d;
        d["theory"] = ev.theory;
        d["verdicts"] = verdicts;
        d["daggers_ok"] = ev.daggers.ok;
        return d;
      },
      py::arg("name"), py::arg("spec"), py::arg("n") = 0, py::arg("k") = 0, py::arg("p") = 0,
      py::arg("sigma") = "");
  m.def(
      "write_theory_files",
      [](const std::string& name, const std::string& dir, int n, int k, int p,
         const std::string& sigma) {
        return write_theory_files(emit_theory(name, params_from_args(n, k, p, sigma)), dir);
      },
      py::arg("name"), py::arg("dir"), py::arg("n") = 0, py::arg("k") = 0, py::arg("p") = 0,
      py::arg("sigma") = "");

  // --- corpus -----------------------------------------------------------------
  m.def(
      "generate_corpus",
      [](const std::string& sig, int max_depth, int num_vars, int term_depth, int budget,
         int atom_pairs, unsigned seed) {
        CorpusSpec spec;
        spec.sig = sig_by_name(sig);
        spec.max_depth = max_depth;
        spec.num_vars = num_vars;
        spec.term_depth = term_depth;
        spec.layer_budget = budget;
        spec.atom_pairs = atom_pairs;
        spec.seed = seed;
        return corpus_text(generate_corpus(spec));
      },
      py::arg("sig") = "ring", py::arg("max_depth") = 2, py::arg("num_vars") = 3,
      py::arg("term_depth") = 2, py::arg("budget") = 32, py::arg("atom_pairs") = 4,
      py::arg("seed") = 0u,
      "deterministic layered corpus; budget <= 0 keeps whole layers");

  // --- suites -------------------------------------------------------------------
  m.def(
      "run_suite",
      [](const std::string& path) {
        Report rep = run_suite_file(path);
        nlohmann::ordered_json j = rep.to_json();
        j["digest"] = rep.digest();
        return j.dump(2);
      },
      py::arg("path"), "run a suite config; returns the report as JSON text");
}
