#pragma once

// Finite boolean products: coordinate-indexed families of structures over one
// signature with either the FULL carrier (all choice functions) or an explicit
// operation-closed, subdirect carrier. Truth sets, patchwork, projector.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fvkit/semantics.hpp"

namespace fvkit {

struct BooleanProduct {
  std::vector<FiniteStructure> factors;   // index set X = {0 .. k-1}
  bool full = true;
  std::vector<std::vector<int>> carrier;  // coordinate vectors; lex order when full
  std::map<std::vector<int>, int> index;  // element -> carrier position (built by validate)

  static BooleanProduct make_full(std::vector<FiniteStructure> factors);
  static BooleanProduct make_carrier(std::vector<FiniteStructure> factors,
                                     std::vector<std::vector<int>> elements);

  int index_count() const { return static_cast<int>(factors.size()); }
  const Signature& sig() const { return factors.at(0).sig; }
  // position of an element in the carrier, -1 if absent
  int carrier_index(const std::vector<int>& elem) const;
  // componentwise function application; the result must lie in the carrier
  std::vector<int> apply(const std::string& fn, const std::vector<std::vector<int>>& args) const;
  std::vector<int> constant_elem(const std::string& c) const;
  // the carrier as a FiniteStructure (universe = carrier positions)
  FiniteStructure to_structure() const;

  // builds the index, then checks closure + subdirectness; throws on violation
  void validate();
};

// [f(args)] = set of coordinates where the factor satisfies f; args are matched
// to free_vars(f) in first-occurrence order.
std::set<int> truth_set(const BooleanProduct& A, const Formula& f,
                        const std::vector<std::vector<int>>& args);
// same as a bitmask (bit x = coordinate x); index_count() <= 30 enforced
unsigned truth_mask(const BooleanProduct& A, const Formula& f,
                    const std::vector<std::vector<int>>& args);

struct PatchFailure {
  std::vector<int> f, g;
  std::set<int> U;
};

struct GammaReport {
  bool p1_ok = true;  // atomic truth sets defined (clopen is automatic at finite scale)
  bool p2_ok = true;  // patchwork
  bool p3_ok = true;  // first-order truth sets defined
  long long atom_checks = 0;
  long long formula_checks = 0;
  long long patch_checks = 0;
  std::vector<PatchFailure> p2_failures;  // capped
  bool p2_failures_truncated = false;
};

// (P1)-(P3) over a formula corpus; P2 searches every (f, g, U) splice.
GammaReport check_gamma_properties(const BooleanProduct& A, const std::vector<Formula>& corpus,
                                   long long max_tuples_per_formula = 4096,
                                   int max_failures = 64);

// splice: result agrees with f on U and with g off U; throws "no patch witness"
// when the carrier lacks it
std::vector<int> patch(const BooleanProduct& A, const std::vector<int>& f,
                       const std::vector<int>& g, const std::set<int>& U);

// componentwise p(a,b): a_x where b_x = 0, and 0 elsewhere
std::vector<int> projector_apply(const BooleanProduct& A, const std::vector<int>& a,
                                 const std::vector<int>& b);

struct ProjectorDefReport {
  bool ok = true;
  long long triples = 0;
  struct Item {
    std::vector<int> a, b, c;
    bool direct;   // c = p(a,b)
    bool defined;  // the positive-existential right-hand side
  };
  std::vector<Item> counterexamples;  // capped at 16
};

// For all a, b, c: existence of d with bdb = b, bc = 0, (c-a)(1-bd) = 0
// holds exactly when c = p(a,b).
ProjectorDefReport projector_definability_check(const BooleanProduct& A);

// product files: (product (factors <form>...) (carrier full | (elements (..)...)))
BooleanProduct parse_product(const SExpr& e);
BooleanProduct parse_product(std::string_view text);
SExpr product_to_sexpr(const BooleanProduct& A);
std::string print_product(const BooleanProduct& A);

}  // namespace fvkit
