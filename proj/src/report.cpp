#include "fvkit/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fvkit/sexpr.hpp"

namespace fvkit {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view data) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(data);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool Report::all_assertive_pass() const { return assertive_failures() == 0; }

int Report::assertive_failures() const {
  int n = 0;
  for (const CheckRecord& c : checks)
    if (c.assertive && !c.pass) ++n;
  return n;
}

nlohmann::ordered_json Report::to_json() const {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["version"] = version;
  j["checks"] = nlohmann::ordered_json::array();
  for (const CheckRecord& c : checks) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["kind"] = c.kind;
    jc["assertive"] = c.assertive;
    jc["pass"] = c.pass;
    jc["inputs_digest"] = c.inputs_digest;
    jc["detail"] = c.detail;
    jc["witnesses"] = c.witnesses;
    j["checks"].push_back(std::move(jc));
  }
  j["input_hashes"] = input_hashes;
  j["assertive_failures"] = assertive_failures();
  j["elapsed_seconds"] = elapsed_seconds;
  return j;
}

std::string Report::digest() const {
  nlohmann::ordered_json j = to_json();
  j.erase("elapsed_seconds");
  return fnv1a64_hex(j.dump());
}

void write_report(const Report& r, const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  nlohmann::ordered_json j = r.to_json();
  j["digest"] = r.digest();
  out << j.dump(2) << "\n";
}

}  // namespace fvkit
