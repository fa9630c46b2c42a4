#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace fvkit {

inline constexpr const char* kToolkitVersion = "0.1.0";

// FNV-1a, 64 bit; hex digests are 16 lowercase hex digits.
std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

// Reads a whole file; throws Error("cannot read <path>") when missing.
std::string read_file(const std::string& path);

// One named check inside a suite run.  Report-only checks record their
// verdict but never fail the run.
struct CheckRecord {
  std::string name;
  std::string kind;
  bool assertive = true;
  bool pass = true;
  std::string inputs_digest;       // digest of the check's canonical input text
  std::string detail;              // one human-readable line
  nlohmann::ordered_json witnesses = nlohmann::ordered_json::array();
};

// A machine-readable run summary.  `elapsed_seconds` is informational and is
// excluded from the report digest, so repeated runs over identical inputs
// produce identical digests.
struct Report {
  std::string suite;
  std::string version = kToolkitVersion;
  std::vector<CheckRecord> checks;
  std::map<std::string, std::string> input_hashes;  // path -> content digest
  double elapsed_seconds = 0.0;

  bool all_assertive_pass() const;
  int assertive_failures() const;
  nlohmann::ordered_json to_json() const;
  std::string digest() const;  // over to_json() minus the timing field
};

void write_report(const Report& r, const std::string& path);

}  // namespace fvkit
