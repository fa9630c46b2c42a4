#include "fvkit/suite.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <sstream>

#include "fvkit/axioms.hpp"
#include "fvkit/corpus.hpp"
#include "fvkit/fv.hpp"
#include "fvkit/pairs.hpp"
#include "fvkit/product.hpp"
#include "fvkit/projector.hpp"
#include "fvkit/ring.hpp"
#include "fvkit/semantics.hpp"

namespace fvkit {

// --- config parsing ----------------------------------------------------------------

bool TomlTable::has(const std::string& key) const { return kv.count(key) > 0; }

std::string TomlTable::get_str(const std::string& key) const {
  auto it = kv.find(key);
  if (it == kv.end() || it->second.kind != TomlValue::Kind::Str)
    throw Error("suite config: missing string key '" + key + "'");
  return it->second.str;
}

std::string TomlTable::get_str(const std::string& key, const std::string& dflt) const {
  auto it = kv.find(key);
  if (it == kv.end()) return dflt;
  if (it->second.kind != TomlValue::Kind::Str)
    throw Error("suite config: key '" + key + "' is not a string");
  return it->second.str;
}

long long TomlTable::get_int(const std::string& key, long long dflt) const {
  auto it = kv.find(key);
  if (it == kv.end()) return dflt;
  if (it->second.kind != TomlValue::Kind::Int)
    throw Error("suite config: key '" + key + "' is not an integer");
  return it->second.num;
}

bool TomlTable::get_bool(const std::string& key, bool dflt) const {
  auto it = kv.find(key);
  if (it == kv.end()) return dflt;
  if (it->second.kind != TomlValue::Kind::Bool)
    throw Error("suite config: key '" + key + "' is not a boolean");
  return it->second.flag;
}

std::vector<std::string> TomlTable::get_list(const std::string& key) const {
  auto it = kv.find(key);
  if (it == kv.end()) return {};
  if (it->second.kind == TomlValue::Kind::Str) return {it->second.str};
  if (it->second.kind != TomlValue::Kind::List)
    throw Error("suite config: key '" + key + "' is not a string array");
  return it->second.list;
}

namespace {

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// cuts a trailing comment, respecting double-quoted strings
std::string uncomment(const std::string& line) {
  bool in_str = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
    if (c == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

std::string parse_quoted(const std::string& s, size_t& i, int lineno) {
  if (i >= s.size() || s[i] != '"') throw ParseError("expected a quoted string", lineno, static_cast<int>(i) + 1);
  std::string out;
  for (++i; i < s.size(); ++i) {
    char c = s[i];
    if (c == '\\' && i + 1 < s.size() && (s[i + 1] == '"' || s[i + 1] == '\\')) {
      out += s[++i];
      continue;
    }
    if (c == '"') {
      ++i;
      return out;
    }
    out += c;
  }
  throw ParseError("unterminated string", lineno, static_cast<int>(s.size()));
}

TomlValue parse_value(const std::string& s, size_t& i, int lineno) {
  TomlValue v;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  if (i >= s.size()) throw ParseError("missing value", lineno, static_cast<int>(i) + 1);
  char c = s[i];
  if (c == '"') {
    v.kind = TomlValue::Kind::Str;
    v.str = parse_quoted(s, i, lineno);
    return v;
  }
  if (c == '[') {
    v.kind = TomlValue::Kind::List;
    ++i;
    while (true) {
      while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
      if (i >= s.size()) throw ParseError("unterminated array", lineno, static_cast<int>(i) + 1);
      if (s[i] == ']') {
        ++i;
        return v;
      }
      v.list.push_back(parse_quoted(s, i, lineno));
    }
  }
  size_t start = i;
  while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
  std::string tok = s.substr(start, i - start);
  if (tok == "true" || tok == "false") {
    v.kind = TomlValue::Kind::Bool;
    v.flag = tok == "true";
    return v;
  }
  size_t digits = tok.size() > 1 && tok[0] == '-' ? 1 : 0;
  if (tok.empty() || tok.find_first_not_of("0123456789", digits) != std::string::npos)
    throw ParseError("unrecognized value '" + tok + "'", lineno, static_cast<int>(start) + 1);
  v.kind = TomlValue::Kind::Int;
  v.num = std::stoll(tok);
  return v;
}

std::string render_value(const TomlValue& v) {
  switch (v.kind) {
    case TomlValue::Kind::Str: return v.str;
    case TomlValue::Kind::Int: return std::to_string(v.num);
    case TomlValue::Kind::Bool: return v.flag ? "true" : "false";
    case TomlValue::Kind::List: {
      std::string out;
      for (const std::string& s : v.list) {
        if (!out.empty()) out += ",";
        out += s;
      }
      return out;
    }
  }
  return "";
}

}  // namespace

SuiteConfig parse_suite_config(std::string_view text) {
  SuiteConfig cfg;
  TomlTable top;
  TomlTable* current = &top;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = strip(uncomment(raw));
    if (line.empty()) continue;
    if (line == "[[check]]") {
      cfg.checks.emplace_back();
      current = &cfg.checks.back();
      continue;
    }
    if (line[0] == '[') throw ParseError("unsupported table header '" + line + "'", lineno, 1);
    size_t i = 0;
    while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_')) ++i;
    std::string key = line.substr(0, i);
    if (key.empty()) throw ParseError("expected a key", lineno, 1);
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size() || line[i] != '=') throw ParseError("expected '=' after '" + key + "'", lineno, static_cast<int>(i) + 1);
    ++i;
    TomlValue v = parse_value(line, i, lineno);
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i != line.size()) throw ParseError("trailing characters after value", lineno, static_cast<int>(i) + 1);
    if (!current->kv.emplace(key, std::move(v)).second)
      throw ParseError("duplicate key '" + key + "'", lineno, 1);
  }
  cfg.name = top.get_str("name", "suite");
  return cfg;
}

SuiteConfig load_suite_config(const std::string& path) {
  return parse_suite_config(read_file(path));
}

// --- check execution ---------------------------------------------------------------

namespace {

namespace fs = std::filesystem;

struct Ctx {
  std::string base;
  Report* rep = nullptr;

  std::string resolve(const std::string& ref) const {
    fs::path p(ref);
    if (p.is_absolute() || base.empty()) return ref;
    return (fs::path(base) / p).string();
  }

  std::string load(const std::string& ref) {
    std::string path = resolve(ref);
    std::string text = read_file(path);
    rep->input_hashes[ref] = fnv1a64_hex(text);
    return text;
  }
};

// builtin:<kind>[:<int>...] or a data file reference
bool is_builtin(const std::string& spec) { return spec.rfind("builtin:", 0) == 0; }

std::vector<std::string> split_colons(const std::string& s) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t at = s.find(':', start);
    parts.push_back(s.substr(start, at == std::string::npos ? at : at - start));
    if (at == std::string::npos) return parts;
    start = at + 1;
  }
}

int builtin_arg(const std::vector<std::string>& parts, size_t i, const std::string& spec) {
  if (i >= parts.size()) throw Error("builtin spec '" + spec + "' is missing an argument");
  const std::string& tok = parts[i];
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    throw Error("builtin spec '" + spec + "' has a non-numeric argument");
  return std::stoi(tok);
}

FiniteStructure builtin_structure(const std::string& spec) {
  std::vector<std::string> p = split_colons(spec);
  const std::string& kind = p.at(1);
  if (kind == "zmod") return make_zmod(builtin_arg(p, 2, spec));
  if (kind == "gf") return make_gf(builtin_arg(p, 2, spec));
  if (kind == "powerset") return make_powerset(builtin_arg(p, 2, spec));
  if (kind == "gf_triv") return with_trivial_valuation(make_gf(builtin_arg(p, 2, spec)));
  if (kind == "gf_proj") return with_projector(make_gf(builtin_arg(p, 2, spec)));
  if (kind == "subfield_pair") {
    int q = builtin_arg(p, 2, spec), sub = builtin_arg(p, 3, spec);
    return make_subfield_pair(q, sub).ambient;
  }
  throw Error("unknown builtin structure '" + spec + "'");
}

FiniteRing builtin_ring(const std::string& spec) {
  std::vector<std::string> p = split_colons(spec);
  const std::string& kind = p.at(1);
  if (kind == "zmod") return ring_zmod(builtin_arg(p, 2, spec));
  if (kind == "gf") return ring_gf(builtin_arg(p, 2, spec));
  if (kind == "dual") return ring_dual(builtin_arg(p, 2, spec));
  if (kind == "dual_sq") {
    FiniteRing d = ring_dual(builtin_arg(p, 2, spec));
    return ring_product({d, d});
  }
  throw Error("unknown builtin ring '" + spec + "'");
}

FiniteStructure resolve_structure(Ctx& ctx, const std::string& spec) {
  if (!is_builtin(spec)) return parse_structure(ctx.load(spec));
  return builtin_structure(spec);
}

FiniteRing resolve_ring(Ctx& ctx, const std::string& spec) {
  if (!is_builtin(spec)) return ring_from_structure(parse_structure(ctx.load(spec)));
  return builtin_ring(spec);
}

BooleanProduct resolve_product(Ctx& ctx, const TomlTable& t) {
  if (t.has("factors")) {
    std::vector<FiniteStructure> factors;
    for (const std::string& ref : t.get_list("factors"))
      factors.push_back(resolve_structure(ctx, ref));
    return BooleanProduct::make_full(std::move(factors));
  }
  return parse_product(ctx.load(t.get_str("product")));
}

std::vector<Formula> resolve_formulas(Ctx& ctx, const TomlTable& t, const Signature& sig) {
  return corpus_from_text(ctx.load(t.get_str("formulas")), sig);
}

Formula resolve_formula(Ctx& ctx, const TomlTable& t, const Signature& sig) {
  if (t.has("formula")) return parse_formula(t.get_str("formula"), sig);
  return parse_formula(ctx.load(t.get_str("formula_file")), sig);
}

PairProduct resolve_pair_product(Ctx& ctx, const TomlTable& t) {
  std::vector<PairStructure> pairs;
  for (const std::string& ref : t.get_list("structures"))
    pairs.push_back(make_pair(resolve_structure(ctx, ref)));
  if (pairs.empty()) throw Error("suite config: 'structures' must name at least one pair");
  return PairProduct::make_full(std::move(pairs));
}

std::string check_digest(const TomlTable& t) {
  std::string canon;
  for (const auto& [k, v] : t.kv) canon += k + "=" + render_value(v) + "\n";
  return fnv1a64_hex(canon);
}

nlohmann::ordered_json to_json(const std::vector<int>& xs) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (int x : xs) a.push_back(x);
  return a;
}

nlohmann::ordered_json to_json(const std::set<int>& xs) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (int x : xs) a.push_back(x);
  return a;
}

CheckRecord base_record(const TomlTable& t, const std::string& kind, size_t i) {
  CheckRecord c;
  c.kind = kind;
  c.name = t.get_str("name", kind + "_" + std::to_string(i));
  c.inputs_digest = check_digest(t);
  return c;
}

void run_fv_verify(Ctx& ctx, const TomlTable& t, CheckRecord c, Report& rep) {
  BooleanProduct P = resolve_product(ctx, t);
  long long max_factors = t.get_int("max_factors", 4);
  if (P.index_count() > max_factors)
    throw Error("suite config: product exceeds max_factors = " + std::to_string(max_factors));
  std::vector<Formula> corpus = resolve_formulas(ctx, t, P.sig());
  FvOptions opt;
  opt.max_psis = static_cast<int>(t.get_int("max_psis", 12));
  long long assignments = 0, disagreements = 0;
  for (const Formula& f : corpus) {
    FvVerifyReport r = fv_verify(P, f, opt);
    assignments += r.assignments;
    disagreements += r.disagreements;
    if (r.disagreements > 0 && c.witnesses.size() < 8) {
      nlohmann::ordered_json w;
      w["formula"] = print_formula(f);
      w["assignment"] = to_json(r.items.at(0).assignment);
      w["direct"] = r.items.at(0).direct;
      w["transfer"] = r.items.at(0).transfer;
      c.witnesses.push_back(std::move(w));
    }
  }
  c.pass = disagreements == 0;
  c.detail = std::to_string(corpus.size()) + " formulas, " + std::to_string(assignments) +
             " assignments, " + std::to_string(disagreements) + " disagreements";
  rep.checks.push_back(std::move(c));
}

void run_gamma(Ctx& ctx, const TomlTable& t, CheckRecord c, Report& rep) {
  BooleanProduct P = resolve_product(ctx, t);
  std::vector<Formula> corpus = resolve_formulas(ctx, t, P.sig());
  GammaReport r = check_gamma_properties(P, corpus, t.get_int("max_tuples", 4096));
  c.pass = r.p1_ok && r.p2_ok && r.p3_ok;
  c.detail = "P1 " + std::string(r.p1_ok ? "ok" : "FAIL") + ", P2 " + (r.p2_ok ? "ok" : "FAIL") +
             ", P3 " + (r.p3_ok ? "ok" : "FAIL") + "; " + std::to_string(r.patch_checks) +
             " patch checks";
  for (size_t i = 0; i < r.p2_failures.size() && i < 4; ++i) {
    nlohmann::ordered_json w;
    w["f"] = to_json(r.p2_failures[i].f);
    w["g"] = to_json(r.p2_failures[i].g);
    w["U"] = to_json(r.p2_failures[i].U);
    c.witnesses.push_back(std::move(w));
  }
  rep.checks.push_back(std::move(c));
}

void run_projector_identities(Ctx& ctx, const TomlTable& t, CheckRecord c, Report& rep) {
  BooleanProduct P = resolve_product(ctx, t);
  std::vector<std::pair<Formula, Formula>> pairs = projector_identities();
  if (t.get_bool("discriminator", true)) pairs.push_back(discriminator_law());
  IdentityReport r = check_projector_identities(P, pairs);
  c.pass = r.ok;
  c.detail = std::to_string(pairs.size()) + " identities, " + std::to_string(r.checks) + " checks";
  for (size_t i = 0; i < r.failures.size() && i < 4; ++i) {
    nlohmann::ordered_json w;
    w["identity"] = r.failures[i].identity;
    w["lhs"] = to_json(r.failures[i].lhs);
    w["rhs"] = to_json(r.failures[i].rhs);
    c.witnesses.push_back(std::move(w));
  }
  rep.checks.push_back(std::move(c));
}

void run_projector_translation(Ctx& ctx, const TomlTable& t, CheckRecord c, Report& rep) {
  FiniteStructure D = resolve_structure(ctx, t.get_str("structure"));
  std::vector<Formula> corpus = resolve_formulas(ctx, t, D.sig);
  TranslationReport r = check_projector_translation(D, corpus, D.sig);
  c.pass = r.ok;
  c.detail = std::to_string(corpus.size()) + " formulas, " + std::to_string(r.assignments) +
             " assignments";
  for (size_t i = 0; i < r.failures.size() && i < 4; ++i) {
    nlohmann::ordered_json w;
    w["formula"] = r.failures[i].formula;
    w["assignment"] = to_json(r.failures[i].assignment);
    c.witnesses.push_back(std::move(w));
  }
  rep.checks.push_back(std::move(c));
}

void run_projector_definability(Ctx& ctx, const TomlTable& t, CheckRecord c, Report& rep) {
  BooleanProduct P = resolve_product(ctx, t);
  ProjectorDefReport r = projector_definability_check(P);
  c.pass = r.ok;
  c.detail = std::to_string(r.triples) + " triples";
  rep.checks.push_back(std::move(c));
}

void run_stone(Ctx& ctx, const TomlTable& t, CheckRecord c, Report& rep) {
  FiniteRing R = resolve_ring(ctx, t.get_str("ring"));
  VnrReport vnr = is_vnr(R);
  bool expect_vnr = t.get_bool("expect_vnr", true);
  if (!expect_vnr) {
    c.pass = !vnr.ok;
    c.detail = R.name + ": regular = " + (vnr.ok ? "true" : "false") + " (expected failure)";
    c.witnesses.push_back(nlohmann::ordered_json{{"no_quasi_inverse", to_json(vnr.witnesses)}});
    rep.checks.push_back(std::move(c));
    return;
  }
  if (!vnr.ok) {
    c.pass = false;
    c.detail = R.name + ": not von Neumann regular";
    rep.checks.push_back(std::move(c));
    return;
  }
  StalkDecomposition sd = decompose_stalks(R);
  c.pass = sd.reconstruction_ok;
  std::string sizes;
  for (const Stalk& s : sd.stalks) sizes += (sizes.empty() ? "" : "x") + std::to_string(s.field.n);
  c.detail = R.name + " = product of fields " + sizes +
             (sd.reconstruction_ok ? " (isomorphism verified)" : " (reconstruction FAILED)");
  rep.checks.push_back(std::move(c));
}

void run_derivations(Ctx& ctx, const TomlTable& t, CheckRecord c, Report& rep) {
  FiniteRing R = resolve_ring(ctx, t.get_str("ring"));
  std::vector<DerivationTable> ds = enumerate_derivations(R);
  bool laws_ok = true;
  for (const DerivationTable& d : ds) {
    DerivationReport r = check_derivation(R, d);
    laws_ok = laws_ok && r.ok && r.idempotents_ok;
  }
  bool vnr = is_vnr(R).ok;
  int violating = 0;
  for (const DerivationTable& d : ds)
    if (!check_differential_ideals(R, d).ok) ++violating;
  std::string ideals = t.get_str("ideals", vnr ? "assert" : "report");
  bool ideals_ok = true;
  if (ideals == "assert") ideals_ok = violating == 0;
  else if (ideals == "expect_violation") ideals_ok = violating > 0;
  else if (ideals != "report") throw Error("suite config: unknown ideals mode '" + ideals + "'");
  long long expect_count = t.get_int("expect_count", -1);
  bool count_ok = expect_count < 0 || static_cast<long long>(ds.size()) == expect_count;
  c.pass = laws_ok && ideals_ok && count_ok;
  c.detail = R.name + ": " + std::to_string(ds.size()) + " derivations, laws " +
             (laws_ok ? "ok" : "FAIL") + ", " + std::to_string(violating) +
             " with a non-differential maximal ideal";
  rep.checks.push_back(std::move(c));
}

void run_relativization(Ctx& ctx, const TomlTable& t, CheckRecord c, Report& rep) {
  PairProduct pp = resolve_pair_product(ctx, t);
  std::vector<Formula> corpus = resolve_formulas(ctx, t, pp.ambient.sig());
  RelativizationReport r = check_relativization(pp, corpus, t.get_int("max_tuples", 4096));
  c.pass = r.ok;
  c.detail = std::to_string(corpus.size()) + " formulas, " + std::to_string(r.checks) + " truth sets";
  for (size_t i = 0; i < r.failures.size() && i < 4; ++i) {
    nlohmann::ordered_json w;
    w["formula"] = r.failures[i].formula;
    w["pair_side"] = to_json(r.failures[i].pair_side);
    w["ambient_side"] = to_json(r.failures[i].ambient_side);
    c.witnesses.push_back(std::move(w));
  }
  rep.checks.push_back(std::move(c));
}

void run_daggers(Ctx& ctx, const TomlTable& t, CheckRecord c, Report& rep) {
  FiniteStructure A = resolve_structure(ctx, t.get_str("structure"));
  DaggerReport r = check_daggers(A);
  c.pass = r.ok;
  c.detail = A.name + ": " + std::to_string(A.sig.dagger.size()) + " complement entries";
  for (size_t i = 0; i < r.failures.size() && i < 4; ++i) {
    nlohmann::ordered_json w;
    w["relation"] = r.failures[i].relation;
    w["tuple"] = to_json(r.failures[i].tuple);
    c.witnesses.push_back(std::move(w));
  }
  rep.checks.push_back(std::move(c));
}

void run_axioms(Ctx& ctx, const TomlTable& t, CheckRecord c, Report& rep) {
  TheoryParams params;
  if (t.has("n")) params.n = static_cast<int>(t.get_int("n", 0));
  if (t.has("k")) params.k = static_cast<int>(t.get_int("k", 0));
  if (t.has("p")) params.p = static_cast<int>(t.get_int("p", 0));
  params.sigma = t.get_str("sigma", "");
  AxiomCorpusEntry entry = emit_theory(t.get_str("theory"), params);
  FiniteStructure A = resolve_structure(ctx, t.get_str("structure"));
  TheoryEvaluation ev = evaluate_theory(entry, A);
  std::vector<std::string> expect_fail = t.get_list("expect_fail");
  auto expected_fail = [&](const std::string& label) {
    return std::find(expect_fail.begin(), expect_fail.end(), label) != expect_fail.end();
  };
  int mismatches = 0;
  for (const AxiomVerdict& v : ev.verdicts) {
    if (v.holds == expected_fail(v.label)) {
      ++mismatches;
      if (c.witnesses.size() < 8)
        c.witnesses.push_back(nlohmann::ordered_json{{"axiom", v.label}, {"holds", v.holds}});
    }
  }
  c.pass = mismatches == 0 && ev.daggers.ok;
  c.detail = entry.theory + " on " + A.name + ": " + std::to_string(ev.verdicts.size()) +
             " axioms, " + std::to_string(mismatches) + " unexpected verdicts, complements " +
             (ev.daggers.ok ? "ok" : "FAIL");
  rep.checks.push_back(std::move(c));
}

void run_burris(Ctx& ctx, const TomlTable& t, CheckRecord c, Report& rep) {
  FiniteStructure A = resolve_structure(ctx, t.get_str("structure"));
  Formula f = resolve_formula(ctx, t, A.sig);
  BurrisReport r = check_burris(A, f);

  CheckRecord fwd = c;
  fwd.name = c.name + ".forward";
  fwd.pass = r.forward_ok;
  fwd.detail = "decomposition implied over " + std::to_string(r.assignments) + " assignments";
  rep.checks.push_back(std::move(fwd));

  CheckRecord conv = std::move(c);
  conv.name = conv.name + ".converse";
  conv.assertive = false;
  conv.pass = r.converse_ok;
  conv.detail = std::string("converse ") + (r.converse_ok ? "holds" : "fails") + " on " + A.name;
  for (size_t i = 0; i < r.converse_failures.size() && i < 4; ++i) {
    nlohmann::ordered_json w;
    w["assignment"] = to_json(r.converse_failures[i].assignment);
    w["lhs"] = r.converse_failures[i].lhs;
    w["rhs"] = r.converse_failures[i].rhs;
    conv.witnesses.push_back(std::move(w));
  }
  rep.checks.push_back(std::move(conv));
}

void run_pair_decompose(Ctx& ctx, const TomlTable& t, CheckRecord c, Report& rep) {
  PairProduct pp = resolve_pair_product(ctx, t);
  Formula f = resolve_formula(ctx, t, pp.ambient.sig());
  PairDecompReport r = check_pair_decompose(pp.ambient, f);

  CheckRecord fwd = c;
  fwd.name = c.name + ".forward";
  fwd.pass = r.forward_ok;
  fwd.detail = std::to_string(r.assignments) + " assignments, " + std::to_string(r.partitions) +
               " partitions";
  rep.checks.push_back(std::move(fwd));

  CheckRecord conv = std::move(c);
  conv.name = conv.name + ".converse";
  conv.assertive = false;
  conv.pass = r.converse_ok;
  conv.detail = std::string("converse ") + (r.converse_ok ? "holds" : "fails");
  for (size_t i = 0; i < r.converse_failures.size() && i < 4; ++i) {
    nlohmann::ordered_json w;
    w["assignment"] = to_json(r.converse_failures[i].assignment);
    w["lhs"] = r.converse_failures[i].lhs;
    w["rhs"] = r.converse_failures[i].rhs;
    conv.witnesses.push_back(std::move(w));
  }
  rep.checks.push_back(std::move(conv));
}

void run_dense(Ctx& ctx, const TomlTable& t, CheckRecord c, Report& rep) {
  PairProduct pp = resolve_pair_product(ctx, t);
  Formula chi = resolve_formula(ctx, t, pp.ambient.sig());
  DensePairReport r = dense_pair_check(pp, chi, static_cast<int>(t.get_int("d_max", 2)));
  c.assertive = false;
  c.pass = r.ok();
  c.detail = std::string("D1 ") + (r.d1_equal ? "ok" : "differs") + ", D2 " +
             (r.d2_ok ? "ok" : "FAIL") + " (" + std::to_string(r.d2_polys) + " polys), D3 " +
             (r.d3_ok ? "ok" : "FAIL") + ", D4 " + (r.d4_ok ? "ok" : "FAIL");
  nlohmann::ordered_json d1;
  d1["atoms_ambient"] = r.d1_atoms_ambient;
  d1["atoms_pair"] = r.d1_atoms_pair;
  d1["note"] = r.d1_note;
  c.witnesses.push_back(std::move(d1));
  for (size_t i = 0; i < r.d2_failures.size() && i < 4; ++i) {
    nlohmann::ordered_json w;
    w["factor"] = r.d2_failures[i].factor;
    w["coeffs"] = to_json(r.d2_failures[i].coeffs);
    w["ambient_roots"] = to_json(r.d2_failures[i].ambient_roots);
    c.witnesses.push_back(std::move(w));
  }
  rep.checks.push_back(std::move(c));
}

}  // namespace

FiniteStructure resolve_structure_spec(const std::string& spec, const std::string& base_dir) {
  if (is_builtin(spec)) return builtin_structure(spec);
  fs::path p(spec);
  std::string path = p.is_absolute() || base_dir.empty() ? spec : (fs::path(base_dir) / p).string();
  return parse_structure(read_file(path));
}

FiniteRing resolve_ring_spec(const std::string& spec, const std::string& base_dir) {
  if (is_builtin(spec)) return builtin_ring(spec);
  fs::path p(spec);
  std::string path = p.is_absolute() || base_dir.empty() ? spec : (fs::path(base_dir) / p).string();
  return ring_from_structure(parse_structure(read_file(path)));
}

Report run_suite(const SuiteConfig& cfg, const std::string& base_dir) {
  auto t0 = std::chrono::steady_clock::now();
  Report rep;
  rep.suite = cfg.name;
  Ctx ctx{base_dir, &rep};
  size_t i = 0;
  for (const TomlTable& t : cfg.checks) {
    std::string kind = t.get_str("kind");
    CheckRecord c = base_record(t, kind, i++);
    if (kind == "fv_verify") run_fv_verify(ctx, t, std::move(c), rep);
    else if (kind == "gamma") run_gamma(ctx, t, std::move(c), rep);
    else if (kind == "projector_identities") run_projector_identities(ctx, t, std::move(c), rep);
    else if (kind == "projector_translation") run_projector_translation(ctx, t, std::move(c), rep);
    else if (kind == "projector_definability") run_projector_definability(ctx, t, std::move(c), rep);
    else if (kind == "stone") run_stone(ctx, t, std::move(c), rep);
    else if (kind == "derivations") run_derivations(ctx, t, std::move(c), rep);
    else if (kind == "relativization") run_relativization(ctx, t, std::move(c), rep);
    else if (kind == "daggers") run_daggers(ctx, t, std::move(c), rep);
    else if (kind == "axioms") run_axioms(ctx, t, std::move(c), rep);
    else if (kind == "burris") run_burris(ctx, t, std::move(c), rep);
    else if (kind == "pair_decompose") run_pair_decompose(ctx, t, std::move(c), rep);
    else if (kind == "dense") run_dense(ctx, t, std::move(c), rep);
    else throw Error("suite config: unknown check kind '" + kind + "'");
  }
  rep.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

Report run_suite_file(const std::string& path) {
  SuiteConfig cfg = load_suite_config(path);
  std::string base = std::filesystem::path(path).parent_path().string();
  Report rep = run_suite(cfg, base);
  rep.input_hashes[std::filesystem::path(path).filename().string()] = fnv1a64_hex(read_file(path));
  return rep;
}

}  // namespace fvkit
