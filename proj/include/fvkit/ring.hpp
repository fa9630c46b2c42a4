#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fvkit/semantics.hpp"

namespace fvkit {

// A finite commutative ring with 1 on {0, ..., n-1}.  Tables are flat n*n
// row-major; construction-time validation is exhaustive for n <= 32 and
// switches to fixed-seed sampling above.
struct FiniteRing {
  std::string name;
  int n = 0;
  std::vector<int> add, mul;
  int zero = 0, one = 0;

  int a(int x, int y) const { return add[x * n + y]; }
  int m(int x, int y) const { return mul[x * n + y]; }
  int neg(int x) const;  // the additive inverse, by row scan
  int sub(int x, int y) const { return a(x, neg(y)); }

  void validate() const;
  FiniteStructure to_structure() const;  // over sig_ring
};

// Requires +, -, * and constants 0, 1; extra symbols are ignored.
FiniteRing ring_from_structure(const FiniteStructure& A);

FiniteRing ring_zmod(int n);
FiniteRing ring_gf(int q);
// F_q[e]/(e^2): a + b e encoded as a + q*b.
FiniteRing ring_dual(int q);
// Componentwise product; mixed-radix encoding, first factor slowest.
FiniteRing ring_product(const std::vector<FiniteRing>& factors);

// The idempotents {e : e^2 = e} as a boolean algebra: meet ef,
// join e + f - ef, complement 1 - e.
struct IdempotentAlgebra {
  FiniteRing ring;
  std::vector<int> elems;  // sorted; includes 0 and 1
  std::vector<int> atoms;  // minimal nonzero idempotents

  int meet(int e, int f) const { return ring.m(e, f); }
  int join(int e, int f) const { return ring.sub(ring.a(e, f), ring.m(e, f)); }
  int complement(int e) const { return ring.sub(ring.one, e); }
  bool leq(int e, int f) const { return meet(e, f) == e; }
};
IdempotentAlgebra idempotent_algebra(const FiniteRing& R);

// Von Neumann regularity: every x has y with xyx = x.
struct VnrReport {
  bool ok = true;
  std::vector<int> witnesses;      // elements with no quasi-inverse
  std::vector<int> quasi_inverse;  // per element: least y with xyx = x, else -1
};
VnrReport is_vnr(const FiniteRing& R);

// One Pierce stalk per atom e: the maximal ideal (1-e)R and the quotient,
// realised as eR with unit e.
struct Stalk {
  int atom;
  std::vector<int> ideal;    // (1-e)R, sorted
  FiniteRing field;          // eR reindexed
  std::vector<int> project;  // r -> index of e*r in the stalk
};
struct StalkDecomposition {
  std::vector<Stalk> stalks;
  std::vector<std::vector<int>> iso;  // r -> stalk coordinates
  bool reconstruction_ok = false;     // iso is a ring isomorphism onto the product
};
// Throws unless R is von Neumann regular; verifies every stalk is a field.
StalkDecomposition decompose_stalks(const FiniteRing& R);

// Maximal ideals, each a sorted element list: by atoms ((1-e)R) when R is
// von Neumann regular, by exhaustive subset scan otherwise (n <= 16).
std::vector<std::vector<int>> maximal_ideals(const FiniteRing& R);

// delta as a plain image table over the carrier.
struct DerivationTable {
  std::vector<int> delta;
};

// (derivation (0 0) (1 0) ...) -- one (element image) pair per element
DerivationTable parse_derivation(std::string_view text);
std::string print_derivation(const DerivationTable& d);

DerivationTable zero_derivation(const FiniteRing& R);
// d/de on ring_dual(q): a + b e -> b.
DerivationTable dual_derivation(int q);
// Componentwise map on ring_product(factors).
DerivationTable product_derivation(const std::vector<FiniteRing>& factors,
                                   const std::vector<DerivationTable>& ds);

struct DerivationReport {
  bool ok = true;  // additive and Leibniz
  bool additive_ok = true, leibniz_ok = true, idempotents_ok = true;
  std::vector<std::pair<int, int>> additive_failures;  // capped at 8
  std::vector<std::pair<int, int>> leibniz_failures;   // capped at 8
  std::vector<int> idempotent_failures;
  std::vector<int> constants;  // C_R = {r : delta(r) = 0}
};
DerivationReport check_derivation(const FiniteRing& R, const DerivationTable& d);

// All derivations of R (n <= 16): images of additive generators, closed by
// additivity, filtered by the Leibniz rule.  Deterministic order; the zero
// map comes first.
std::vector<DerivationTable> enumerate_derivations(const FiniteRing& R);

// delta(M) <= M for every maximal ideal M.  Runs on non-regular rings too;
// that is where violations live.
struct DiffIdealReport {
  bool ok = true;
  long long checks = 0;
  struct Item {
    std::vector<int> ideal;
    int element, image;
  };
  std::vector<Item> violations;  // capped at 8
};
DiffIdealReport check_differential_ideals(const FiniteRing& R, const DerivationTable& d);

// The constants C_R as a ring of its own; elems maps new index -> old element.
struct Subring {
  FiniteRing ring;
  std::vector<int> elems;
};
Subring constants_subring(const FiniteRing& R, const DerivationTable& d);

}  // namespace fvkit
