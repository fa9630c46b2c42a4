#pragma once

#include <map>
#include <string>
#include <vector>

#include "fvkit/report.hpp"
#include "fvkit/ring.hpp"
#include "fvkit/semantics.hpp"

namespace fvkit {

// Structure references understood by suites and the command line: a data file
// path (resolved against base_dir) or one of
//   builtin:zmod:<n>  builtin:gf:<q>  builtin:powerset:<k>  builtin:gf_triv:<q>
//   builtin:gf_proj:<q>  builtin:subfield_pair:<q>:<sub>
FiniteStructure resolve_structure_spec(const std::string& spec, const std::string& base_dir);
// Ring references: a data file path or builtin:zmod/gf/dual/dual_sq:<n>.
FiniteRing resolve_ring_spec(const std::string& spec, const std::string& base_dir);

// Minimal TOML subset for suite configs: `key = value` lines with strings,
// integers, booleans and single-line string arrays, plus [[check]] table
// headers and # comments.
struct TomlValue {
  enum class Kind { Str, Int, Bool, List };
  Kind kind = Kind::Str;
  std::string str;
  long long num = 0;
  bool flag = false;
  std::vector<std::string> list;
};

struct TomlTable {
  std::map<std::string, TomlValue> kv;

  bool has(const std::string& key) const;
  std::string get_str(const std::string& key) const;  // throws when missing
  std::string get_str(const std::string& key, const std::string& dflt) const;
  long long get_int(const std::string& key, long long dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;
  std::vector<std::string> get_list(const std::string& key) const;
};

struct SuiteConfig {
  std::string name;
  std::vector<TomlTable> checks;  // one per [[check]] block
};

SuiteConfig parse_suite_config(std::string_view text);
SuiteConfig load_suite_config(const std::string& path);

// Runs every check; data paths resolve relative to `base_dir`.  Check kinds:
//   assertive: fv_verify, gamma, projector_identities, projector_translation,
//              projector_definability, stone, derivations, relativization,
//              daggers, axioms; plus the forward halves of burris and pair_decompose
//   report-only: the converse halves of burris and pair_decompose, and dense (D1-D4)
// Structure references are data files or builtin:<kind>[:<arg>...] specs.
Report run_suite(const SuiteConfig& cfg, const std::string& base_dir);
Report run_suite_file(const std::string& path);

}  // namespace fvkit
