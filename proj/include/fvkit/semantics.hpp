#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fvkit/syntax.hpp"

namespace fvkit {

// A total interpretation of a signature on the universe {0, ..., size-1}.
// Function and relation tables are flat row-major arrays of extent
// size^arity; evaluation is Tarskian with depth-first short-circuiting.
struct FiniteStructure {
  std::string name;
  Signature sig;
  int size = 0;
  std::map<std::string, std::vector<int>> funcs;   // symbol -> table
  std::map<std::string, int> consts;               // symbol -> element
  std::map<std::string, std::vector<char>> rels;   // symbol -> membership table

  void validate() const;  // totality, ranges, arity-consistent extents

  int fun(const std::string& s, int a) const;
  int fun(const std::string& s, int a, int b) const;
  int constant(const std::string& s) const;
  bool rel_holds(const std::string& s, const std::vector<int>& args) const;
};

using Assignment = std::map<std::string, int>;

int eval_term(const FiniteStructure& A, const Term& t, const Assignment& asg,
              const std::vector<int>& bound);
bool eval_formula(const FiniteStructure& A, const Formula& f, const Assignment& asg);

// All tuples over `vars` satisfying f (plain nested-loop sweep).
std::vector<std::vector<int>> definable_set(const FiniteStructure& A, const Formula& f,
                                            const std::vector<std::string>& vars,
                                            const Assignment& params = {});

// Bulk evaluator: the satisfying set of f as a bit table over the given
// variable axes (row-major, first axis slowest).  Independent of the
// pointwise path only in mechanics, not in semantics; tests tie the two.
struct ValuationTable {
  std::vector<std::string> vars;
  std::vector<char> bits;  // extent size^vars.size()
};
ValuationTable satisfying_table(const FiniteStructure& A, const Formula& f,
                                const std::vector<std::string>& vars,
                                const Assignment& params = {});

// Checks the dagger (complement) biconditional of every relation that has
// one: for all tuples, not r(a) iff dagger_r(a).  Failures are data.
struct DaggerReport {
  bool ok = true;
  struct Item {
    std::string relation;
    std::vector<int> tuple;
    bool rel_value;
    bool dagger_value;
  };
  std::vector<Item> failures;
};
DaggerReport check_daggers(const FiniteStructure& A, int max_failures = 16);

// --- builtins ---------------------------------------------------------------

FiniteStructure make_zmod(int n);             // Z/n over the ring signature
FiniteStructure make_gf(int q);               // finite field, q = p^k <= 16
FiniteStructure make_powerset(int k);         // boolean algebra 2^{0..k-1}
// The projector expansion: adds p with p(a,b) = a when b = 0, else 0.
FiniteStructure with_projector(const FiniteStructure& A);
// Adds the unary predicate P interpreted by `subset`.
FiniteStructure with_pair_predicate(const FiniteStructure& A, const std::vector<int>& subset);
// Adds the unary operator delta interpreted by `table`.
FiniteStructure with_derivation_op(const FiniteStructure& A, const std::vector<int>& table);
// Elements of the subfield of order `sub` inside make_gf(q).
std::vector<int> subfield_elements(const FiniteStructure& gf, int sub);

// Componentwise direct product; relations hold iff they hold in every factor.
FiniteStructure direct_product(const std::vector<FiniteStructure>& factors);

// Structure files: (structure <name> (signature <ref>) (size n) (fun ...)
// (const ...) (rel ...)) or builtin shorthand (builtin zmod 6) etc.
FiniteStructure parse_structure(const SExpr& e, const Signature* sig_hint = nullptr);
FiniteStructure parse_structure(std::string_view text, const Signature* sig_hint = nullptr);
SExpr structure_to_sexpr(const FiniteStructure& A);
std::string print_structure(const FiniteStructure& A);

}  // namespace fvkit
