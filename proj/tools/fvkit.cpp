// fvkit command line: parse/evaluate formulas, build boolean products, compile
// and verify determining sequences, decompose rings, check pairs, emit axiom
// corpora, generate formula corpora, and run suite configs.
//
// Exit codes: 0 success (and every assertive check passed), 1 assertive check
// failures, 2 usage errors, missing files, or parse errors.
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fvkit/axioms.hpp"
#include "fvkit/corpus.hpp"
#include "fvkit/fv.hpp"
#include "fvkit/pairs.hpp"
#include "fvkit/product.hpp"
#include "fvkit/projector.hpp"
#include "fvkit/ring.hpp"
#include "fvkit/semantics.hpp"
#include "fvkit/suite.hpp"
#include "fvkit/syntax.hpp"

namespace fs = std::filesystem;
using namespace fvkit;

namespace {

Signature sig_from_spec(const std::string& spec) {
  if (auto s = builtin_signature(spec)) return *s;
  return parse_signature(read_file(spec));
}

Formula formula_from_opts(const std::string& text, const std::string& file, const Signature& sig) {
  if (!text.empty() && !file.empty()) throw Error("give either --formula or --file, not both");
  if (!text.empty()) return parse_formula(text, sig);
  if (!file.empty()) return parse_formula(read_file(file), sig);
  throw Error("one of --formula or --file is required");
}

Assignment assignment_from_text(const std::string& text) {
  Assignment asg;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    size_t eq = item.find('=');
    if (eq == std::string::npos) throw Error("bad assignment entry '" + item + "' (want var=element)");
    std::string var = item.substr(0, eq), val = item.substr(eq + 1);
    if (val.empty() || val.find_first_not_of("0123456789") != std::string::npos)
      throw Error("bad assignment value '" + val + "'");
    asg[var] = std::stoi(val);
  }
  return asg;
}

std::vector<int> coords_from_text(const std::string& text) {
  std::vector<int> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      throw Error("bad coordinate '" + item + "'");
    out.push_back(std::stoi(item));
  }
  return out;
}

BooleanProduct product_from_opts(const std::vector<std::string>& factor_specs,
                                 const std::string& file) {
  if (!factor_specs.empty() && !file.empty())
    throw Error("give either --factor specs or --product file, not both");
  if (!file.empty()) return parse_product(read_file(file));
  if (factor_specs.empty()) throw Error("one of --factor or --product is required");
  std::vector<FiniteStructure> factors;
  for (const std::string& s : factor_specs) factors.push_back(resolve_structure_spec(s, ""));
  return BooleanProduct::make_full(std::move(factors));
}

void write_text(const std::string& path, const std::string& text) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fvkit: finite first-order structures, boolean products, and transfer checks"};
  app.require_subcommand(1);
  int rc = 0;

  // --- parse -----------------------------------------------------------------
  auto* cmd_parse = app.add_subcommand("parse", "parse a formula and print its canonical form");
  std::string pa_sig = "ring", pa_formula, pa_file;
  cmd_parse->add_option("--sig", pa_sig, "signature name or .sig file");
  cmd_parse->add_option("--formula", pa_formula, "formula text");
  cmd_parse->add_option("--file", pa_file, "formula file");
  cmd_parse->callback([&] {
    Signature sig = sig_from_spec(pa_sig);
    Formula f = formula_from_opts(pa_formula, pa_file, sig);
    std::cout << print_formula(f) << "\n";
    std::string vars;
    for (const std::string& v : free_vars(f)) vars += (vars.empty() ? "" : " ") + v;
    std::cout << "free: " << (vars.empty() ? "-" : vars) << "\n";
    std::cout << "quantifier depth: " << quantifier_depth(f) << "\n";
  });

  // --- eval ------------------------------------------------------------------
  auto* cmd_eval = app.add_subcommand("eval", "evaluate a formula in a finite structure");
  std::string ev_structure, ev_formula, ev_file, ev_assign;
  cmd_eval->add_option("--structure", ev_structure, "structure file or builtin:<kind>:<args>")
      ->required();
  cmd_eval->add_option("--formula", ev_formula, "formula text");
  cmd_eval->add_option("--file", ev_file, "formula file");
  cmd_eval->add_option("--assign", ev_assign, "free-variable assignment, e.g. x=0,y=2");
  cmd_eval->callback([&] {
    FiniteStructure A = resolve_structure_spec(ev_structure, "");
    Formula f = formula_from_opts(ev_formula, ev_file, A.sig);
    bool v = eval_formula(A, f, assignment_from_text(ev_assign));
    std::cout << (v ? "true" : "false") << "\n";
    if (!v) rc = 1;
  });

  // --- product ---------------------------------------------------------------
  auto* cmd_product = app.add_subcommand("product", "build or inspect a boolean product");
  std::vector<std::string> pr_factors;
  std::string pr_file, pr_out;
  cmd_product->add_option("--factor", pr_factors, "factor structure spec (repeatable)");
  cmd_product->add_option("--product", pr_file, "existing product file");
  cmd_product->add_option("--out", pr_out, "write the canonical product file here");
  cmd_product->callback([&] {
    BooleanProduct P = product_from_opts(pr_factors, pr_file);
    std::cout << "factors: " << P.index_count() << ", carrier: " << P.carrier.size()
              << (P.full ? " (full)" : " (explicit)") << "\n";
    if (!pr_out.empty()) write_text(pr_out, print_product(P) + "\n");
  });

  // --- fv compile | eval | verify ---------------------------------------------
  auto* cmd_fv = app.add_subcommand("fv", "determining sequences");
  cmd_fv->require_subcommand(1);

  auto* fv_c = cmd_fv->add_subcommand("compile", "compile a determining sequence");
  std::string fc_sig = "ring", fc_formula, fc_file;
  int fc_max_psis = 12;
  fv_c->add_option("--sig", fc_sig, "signature name or .sig file");
  fv_c->add_option("--formula", fc_formula, "formula text");
  fv_c->add_option("--file", fc_file, "formula file");
  fv_c->add_option("--max-psis", fc_max_psis, "bound on the psi list at each exists-step");
  fv_c->callback([&] {
    Signature sig = sig_from_spec(fc_sig);
    Formula f = formula_from_opts(fc_formula, fc_file, sig);
    FvOptions opt;
    opt.max_psis = fc_max_psis;
    std::cout << print_ds(fv_compile(f, opt)) << "\n";
  });

  auto* fv_e = cmd_fv->add_subcommand("eval", "evaluate a formula over a product via transfer");
  std::string fe_product, fe_formula, fe_file;
  std::vector<std::string> fe_args;
  fv_e->add_option("--product", fe_product, "product file")->required();
  fv_e->add_option("--formula", fe_formula, "formula text");
  fv_e->add_option("--file", fe_file, "formula file");
  fv_e->add_option("--arg", fe_args, "element per free variable, as factor coordinates c1,c2,...");
  fv_e->callback([&] {
    BooleanProduct P = parse_product(read_file(fe_product));
    Formula f = formula_from_opts(fe_formula, fe_file, P.sig());
    DeterminingSequence ds = fv_compile(f);
    std::vector<std::vector<int>> args;
    for (const std::string& a : fe_args) args.push_back(coords_from_text(a));
    bool v = fv_eval(P, ds, args);
    std::cout << (v ? "true" : "false") << "\n";
    if (!v) rc = 1;
  });

  auto* fv_v = cmd_fv->add_subcommand("verify", "compare direct and transfer evaluation");
  std::string fvv_product, fvv_formulas;
  long long fvv_max_factors = 4;
  int fvv_max_psis = 12;
  fv_v->add_option("--product", fvv_product, "product file")->required();
  fv_v->add_option("--formulas", fvv_formulas, "formula corpus file")->required();
  fv_v->add_option("--max-factors", fvv_max_factors, "refuse larger products");
  fv_v->add_option("--max-psis", fvv_max_psis, "bound on the psi list at each exists-step");
  fv_v->callback([&] {
    BooleanProduct P = parse_product(read_file(fvv_product));
    if (P.index_count() > fvv_max_factors)
      throw Error("product exceeds --max-factors = " + std::to_string(fvv_max_factors));
    std::vector<Formula> corpus = load_corpus(fvv_formulas, P.sig());
    FvOptions opt;
    opt.max_psis = fvv_max_psis;
    long long assignments = 0, disagreements = 0;
    for (const Formula& f : corpus) {
      FvVerifyReport r = fv_verify(P, f, opt);
      assignments += r.assignments;
      disagreements += r.disagreements;
      if (r.disagreements > 0)
        std::cout << "[FAIL] " << print_formula(f) << " (" << r.disagreements
                  << " disagreements)\n";
    }
    std::cout << corpus.size() << " formulas, " << assignments << " assignments, "
              << disagreements << " disagreements\n";
    if (disagreements > 0) rc = 1;
  });

  // --- ring decompose | derivations | check -----------------------------------
  auto* cmd_ring = app.add_subcommand("ring", "finite ring analysis");
  cmd_ring->require_subcommand(1);

  auto* ring_d = cmd_ring->add_subcommand("decompose", "Pierce decomposition into fields");
  std::string rd_ring;
  ring_d->add_option("--ring", rd_ring, "ring file or builtin:<kind>:<n>")->required();
  ring_d->callback([&] {
    FiniteRing R = resolve_ring_spec(rd_ring, "");
    VnrReport vnr = is_vnr(R);
    if (!vnr.ok) {
      std::cout << R.name << ": not von Neumann regular (witness element "
                << vnr.witnesses.at(0) << ")\n";
      rc = 1;
      return;
    }
    StalkDecomposition sd = decompose_stalks(R);
    std::cout << R.name << " = ";
    for (size_t i = 0; i < sd.stalks.size(); ++i)
      std::cout << (i ? " x " : "") << "F" << sd.stalks[i].field.n;
    std::cout << (sd.reconstruction_ok ? "  (isomorphism verified)" : "  (FAILED)") << "\n";
    if (!sd.reconstruction_ok) rc = 1;
  });

  auto* ring_v = cmd_ring->add_subcommand("derivations", "enumerate all derivations");
  std::string rv_ring;
  bool rv_tables = false;
  ring_v->add_option("--ring", rv_ring, "ring file or builtin:<kind>:<n>")->required();
  ring_v->add_flag("--tables", rv_tables, "print each derivation table");
  ring_v->callback([&] {
    FiniteRing R = resolve_ring_spec(rv_ring, "");
    std::vector<DerivationTable> ds = enumerate_derivations(R);
    std::cout << R.name << ": " << ds.size() << " derivations\n";
    if (rv_tables)
      for (const DerivationTable& d : ds) std::cout << print_derivation(d) << "\n";
  });

  auto* ring_c = cmd_ring->add_subcommand("check", "derivation laws and differential ideals");
  std::string rc_ring, rc_derivation;
  ring_c->add_option("--ring", rc_ring, "ring file or builtin:<kind>:<n>")->required();
  ring_c->add_option("--derivation", rc_derivation, "derivation file (default: enumerate)");
  ring_c->callback([&] {
    FiniteRing R = resolve_ring_spec(rc_ring, "");
    std::vector<DerivationTable> ds;
    if (rc_derivation.empty()) ds = enumerate_derivations(R);
    else ds.push_back(parse_derivation(read_file(rc_derivation)));
    bool vnr = is_vnr(R).ok;
    bool all_laws = true;
    int violating = 0;
    for (const DerivationTable& d : ds) {
      DerivationReport r = check_derivation(R, d);
      all_laws = all_laws && r.ok && r.idempotents_ok;
      DiffIdealReport ideals = check_differential_ideals(R, d);
      if (!ideals.ok) {
        ++violating;
        std::cout << "non-differential maximal ideal under " << print_derivation(d) << "\n";
      }
    }
    std::cout << R.name << ": " << ds.size() << " derivations, laws "
              << (all_laws ? "ok" : "FAIL") << ", regular = " << (vnr ? "true" : "false")
              << ", " << violating << " with a non-differential maximal ideal\n";
    if (!all_laws || (vnr && violating > 0)) rc = 1;
  });

  // --- pair check --------------------------------------------------------------
  auto* cmd_pair = app.add_subcommand("pair", "dense-pair conditions");
  cmd_pair->require_subcommand(1);
  auto* pair_c = cmd_pair->add_subcommand("check", "run D1-D4 on a full pair product");
  std::vector<std::string> pc_structures;
  std::string pc_chi = "(and)";
  int pc_dmax = 2;
  pair_c->add_option("--structure", pc_structures, "pair structure spec (repeatable)")->required();
  pair_c->add_option("--chi", pc_chi, "ball formula chi(u, y)");
  pair_c->add_option("--d-max", pc_dmax, "polynomial degree bound for D2");
  pair_c->callback([&] {
    std::vector<PairStructure> pairs;
    for (const std::string& s : pc_structures)
      pairs.push_back(make_pair(resolve_structure_spec(s, "")));
    PairProduct A = PairProduct::make_full(std::move(pairs));
    Formula chi = parse_formula(pc_chi, A.ambient.sig());
    DensePairReport r = dense_pair_check(A, chi, pc_dmax);
    std::cout << "D1 subalgebras: " << (r.d1_equal ? "equal" : "differ") << " ("
              << r.d1_atoms_pair << " vs " << r.d1_atoms_ambient << " atoms)\n";
    std::cout << "D2 root closure: " << (r.d2_ok ? "ok" : "fails") << " over " << r.d2_polys
              << " polynomials\n";
    for (const auto& pf : r.d2_failures) {
      std::cout << "  factor " << pf.factor << ", coefficients";
      for (int c : pf.coeffs) std::cout << " " << c;
      std::cout << "\n";
    }
    std::cout << "D3 chi-balls: " << (r.d3_ok ? "ok" : "fails") << " over " << r.d3_balls
              << " balls\n";
    std::cout << "D4 refinement: " << (r.d4_ok ? "ok" : "fails") << " over " << r.d4_checks
              << " checks\n";
    // report-only: the exit code stays 0
  });

  // --- axioms emit | eval --------------------------------------------------------
  auto* cmd_axioms = app.add_subcommand("axioms", "machine-readable axiom corpora");
  cmd_axioms->require_subcommand(1);

  auto* ax_e = cmd_axioms->add_subcommand("emit", "write one .fml per axiom plus a manifest");
  std::string ae_theory, ae_out = "axioms_out", ae_sigma;
  int ae_n = 0, ae_k = 0, ae_p = 0;
  ax_e->add_option("--theory", ae_theory, "theory name (see --list)")->required();
  ax_e->add_option("--out", ae_out, "output directory");
  ax_e->add_option("--n", ae_n, "primary bound parameter");
  ax_e->add_option("--k", ae_k, "secondary bound parameter");
  ax_e->add_option("--p", ae_p, "prime parameter");
  ax_e->add_option("--sigma", ae_sigma, "scheme instance formula (scheme_G)");
  ax_e->callback([&] {
    TheoryParams params;
    if (ae_n > 0) params.n = ae_n;
    if (ae_k > 0) params.k = ae_k;
    if (ae_p > 0) params.p = ae_p;
    params.sigma = ae_sigma;
    AxiomCorpusEntry entry = emit_theory(ae_theory, params);
    std::vector<std::string> files = write_theory_files(entry, ae_out);
    for (const std::string& f : files) std::cout << f << "\n";
  });

  auto* ax_l = cmd_axioms->add_subcommand("list", "list theory names");
  ax_l->callback([&] {
    for (const std::string& t : theory_names()) std::cout << t << "\n";
  });

  auto* ax_v = cmd_axioms->add_subcommand("eval", "evaluate a theory on a finite structure");
  std::string av_theory, av_structure, av_sigma;
  int av_n = 0, av_k = 0, av_p = 0;
  ax_v->add_option("--theory", av_theory, "theory name")->required();
  ax_v->add_option("--structure", av_structure, "structure file or builtin spec")->required();
  ax_v->add_option("--n", av_n, "primary bound parameter");
  ax_v->add_option("--k", av_k, "secondary bound parameter");
  ax_v->add_option("--p", av_p, "prime parameter");
  ax_v->add_option("--sigma", av_sigma, "scheme instance formula (scheme_G)");
  ax_v->callback([&] {
    TheoryParams params;
    if (av_n > 0) params.n = av_n;
    if (av_k > 0) params.k = av_k;
    if (av_p > 0) params.p = av_p;
    params.sigma = av_sigma;
    AxiomCorpusEntry entry = emit_theory(av_theory, params);
    FiniteStructure A = resolve_structure_spec(av_structure, "");
    TheoryEvaluation ev = evaluate_theory(entry, A);
    int failed = 0;
    for (const AxiomVerdict& v : ev.verdicts) {
      std::cout << (v.holds ? "[pass] " : "[fail] ") << v.label << "\n";
      if (!v.holds) ++failed;
    }
    if (!entry.sig.dagger.empty())
      std::cout << "complements: " << (ev.daggers.ok ? "ok" : "FAIL") << "\n";
    std::cout << failed << " of " << ev.verdicts.size() << " axioms fail on " << A.name << "\n";
  });

  // --- corpus --------------------------------------------------------------------
  auto* cmd_corpus = app.add_subcommand("corpus", "generate the canonical formula corpus");
  std::string co_sig = "ring", co_out;
  CorpusSpec co_spec;
  cmd_corpus->add_option("--sig", co_sig, "signature name or .sig file");
  cmd_corpus->add_option("--max-depth", co_spec.max_depth, "quantifier layers");
  cmd_corpus->add_option("--num-vars", co_spec.num_vars, "variables from the pool x, y, z");
  cmd_corpus->add_option("--term-depth", co_spec.term_depth, "right-combed nesting bound");
  cmd_corpus->add_option("--budget", co_spec.layer_budget, "formulas kept per layer (0 = all)");
  cmd_corpus->add_option("--seed", co_spec.seed, "recorded in the summary line");
  cmd_corpus->add_option("--out", co_out, "write the corpus here instead of stdout");
  cmd_corpus->callback([&] {
    co_spec.sig = sig_from_spec(co_sig);
    std::vector<Formula> corpus = generate_corpus(co_spec);
    if (co_out.empty()) {
      std::cout << corpus_to_text(corpus);
    } else {
      write_corpus(corpus, co_out);
      std::cout << corpus.size() << " formulas (sig " << co_spec.sig.name << ", depth "
                << co_spec.max_depth << ", vars " << co_spec.num_vars << ", terms "
                << co_spec.term_depth << ", budget " << co_spec.layer_budget << ", seed "
                << co_spec.seed << ") -> " << co_out << "\n";
    }
  });

  // --- run -------------------------------------------------------------------------
  auto* cmd_run = app.add_subcommand("run", "run a suite config");
  std::string ru_config, ru_out;
  cmd_run->add_option("config", ru_config, "suite .toml file")->required();
  cmd_run->add_option("--out", ru_out, "write the JSON report here");
  cmd_run->callback([&] {
    Report rep = run_suite_file(ru_config);
    for (const CheckRecord& c : rep.checks) {
      const char* tag = c.pass ? (c.assertive ? "[ok]  " : "[info]")
                               : (c.assertive ? "[FAIL]" : "[info]");
      std::cout << tag << " " << c.name << ": " << c.detail << "\n";
    }
    std::cout << "suite " << rep.suite << ": " << rep.checks.size() << " checks, "
              << rep.assertive_failures() << " assertive failures, digest " << rep.digest()
              << "\n";
    if (!ru_out.empty()) write_report(rep, ru_out);
    if (!rep.all_assertive_pass()) rc = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
