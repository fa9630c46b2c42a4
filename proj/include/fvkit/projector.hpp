#pragma once

// Projector translation: prenex L-formulas become L_p-formulas whose matrix is
// atomic (or a conjunction of atomics when relation symbols are involved),
// using the three open-formula encodings
//   u=0 or v=0   <->  p(u,v) - u = 0
//   u=0 and v=0  <->  p(u,v) + v = 0
//   u=0 or v!=0  <->  p(u,v) = 0
// valid in every structure of size > 1 interpreting p(a,b) = a when b = 0, else 0.

#include "fvkit/product.hpp"

namespace fvkit {

// f must be prenex. Negated relation atoms are replaced by their complement
// eliminators from sig.dagger (whose existentials join the prefix); remaining
// relation atoms must sit conjunctively under a forall-exists prefix.
Formula projector_translate(const Formula& f, const Signature& sig);

// the three identity pairs (lhs over the ring language, rhs over ring_p)
std::vector<std::pair<Formula, Formula>> projector_identities();
// p(u-w, u-v) = u-z  vs  (u=v and w=z) or (u!=v and u=z)
std::pair<Formula, Formula> discriminator_law();

// truth-set equality of formula pairs over every carrier tuple; factors must
// interpret p
struct IdentityReport {
  bool ok = true;
  long long checks = 0;
  struct Item {
    size_t identity = 0;
    std::vector<std::vector<int>> args;
    std::set<int> lhs, rhs;
  };
  std::vector<Item> failures;  // capped at 8
};
IdentityReport check_projector_identities(const BooleanProduct& A,
                                          const std::vector<std::pair<Formula, Formula>>& pairs);

// per-structure biconditional: D |= f(a)  iff  D^p |= translate(prenex f)(a),
// exhaustively over all assignments; requires |D| > 1
struct TranslationReport {
  bool ok = true;
  long long assignments = 0;
  struct Item {
    std::string formula;
    std::vector<int> assignment;
    bool direct = false;
    bool translated = false;
  };
  std::vector<Item> failures;  // capped at 16
};
TranslationReport check_projector_translation(const FiniteStructure& D,
                                              const std::vector<Formula>& corpus,
                                              const Signature& sig);

}  // namespace fvkit
