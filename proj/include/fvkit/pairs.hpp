#pragma once

#include <set>
#include <string>
#include <vector>

#include "fvkit/product.hpp"

namespace fvkit {

// An L_P pair (A, D): ambient structure whose unary predicate P names a
// proper substructure's domain.
struct PairStructure {
  FiniteStructure ambient;   // signature contains unary P
  std::vector<int> p_elems;  // sorted

  // P nonempty, closed under functions and constants, proper
  void validate() const;
  // the induced structure on P, reindexed over 0..|P|-1 (P becomes total)
  FiniteStructure substructure() const;
};

// Reads P off the ambient relation table; validates.
PairStructure make_pair(FiniteStructure ambient);
// (F_q, F_sub): the subfield pair over the ring-with-P signature.
PairStructure make_subfield_pair(int q, int sub);

struct PairProduct {
  std::vector<PairStructure> pairs;
  BooleanProduct ambient;  // FULL product of the ambient structures

  static PairProduct make_full(std::vector<PairStructure> pairs);
};

// The P-part D = {a : every coordinate satisfies P} as a FULL box over the
// fiber substructures, with coordinate maps back into the ambient factors.
// Carrier positions agree: product.carrier[i] maps to carrier_in_ambient[i].
struct PPart {
  BooleanProduct product;
  std::vector<std::vector<int>> embed;  // factor: fiber index -> ambient element
  std::vector<std::vector<int>> into;   // factor: ambient element -> fiber index / -1
  std::vector<std::vector<int>> carrier_in_ambient;

  std::vector<int> to_ambient(const std::vector<int>& d) const;
  // throws when a coordinate lies outside P
  std::vector<int> from_ambient(const std::vector<int>& a) const;
};
PPart p_part(const PairProduct& A);

// Fibers D_x = {d(x) : d in D} of an operation-closed carrier subset, each
// as a reindexed substructure of the factor; full_box records |D| = prod |D_x|.
struct FiberReport {
  std::vector<FiniteStructure> fibers;
  std::vector<std::vector<int>> elems;  // factor: fiber index -> factor element
  bool full_box = false;
};
FiberReport fiber_substructures(const BooleanProduct& A,
                                const std::vector<std::vector<int>>& D);

// The boolean subalgebra of subsets of X generated by the relative truth
// sets [phi(f)]^D, f over D, phi over the corpus.
struct SubalgebraReport {
  std::vector<std::set<int>> generators;  // distinct truth sets, first occurrence
  std::vector<std::set<int>> elements;    // the generated algebra, by ascending mask
  int atom_count = 0;
};
SubalgebraReport pair_boolean_subalgebra(const BooleanProduct& A,
                                         const std::vector<std::vector<int>>& D,
                                         const std::vector<Formula>& corpus,
                                         long long max_tuples_per_formula = 4096);

// Finite-scale dense-pair conditions for a full pair product.
//   (D1) subalgebra comparison: X(D)* vs X(A)*, both generated by equality
//        truth sets with parameters from the respective carriers; reports
//        equality and atom counts (elementary equivalence surrogate).
//   (D2) root closure: every polynomial of degree <= d_max with coefficients
//        in the fiber that has a root in the ambient factor has one in the
//        fiber.  Bounded degree stands in for acl-closure; the value of the
//        check is its exact negative witnesses.
//   (D3) for every parameter tuple b, the chi-ball {a : [chi(a,b)] = X}
//        meets D; empty balls count as failures.
//   (D4) every nonzero e in X(A)* containing a point x refines to some
//        nonzero e' in X(D)* below e containing x.
struct DensePairReport {
  bool d1_equal = false, d1_same_atoms = false;
  int d1_atoms_ambient = 0, d1_atoms_pair = 0;
  std::string d1_note;

  bool d2_ok = true;
  long long d2_polys = 0;
  struct PolyFailure {
    int factor;
    std::vector<int> coeffs;  // c_0 .. c_d, ambient element ids
    std::vector<int> ambient_roots;
  };
  std::vector<PolyFailure> d2_failures;  // capped at 8

  bool d3_ok = true;
  long long d3_balls = 0;
  std::vector<std::vector<std::vector<int>>> d3_failures;  // parameter tuples, capped at 8

  bool d4_ok = true;
  long long d4_checks = 0;
  struct RefineFailure {
    int x;
    std::set<int> e;
  };
  std::vector<RefineFailure> d4_failures;  // capped at 8

  bool ok() const { return d1_equal && d2_ok && d3_ok && d4_ok; }
};
DensePairReport dense_pair_check(const PairProduct& A, const Formula& chi, int d_max);

// [phi(f)] over the P-part fibers against [phi^P(f)] over the ambient
// product, for every corpus formula and every tuple from D.
struct RelativizationReport {
  bool ok = true;
  long long checks = 0;
  struct Item {
    std::string formula;
    std::vector<std::vector<int>> args;  // ambient coordinates
    std::set<int> pair_side, ambient_side;
  };
  std::vector<Item> failures;  // capped at 16
};
RelativizationReport check_relativization(const PairProduct& A,
                                          const std::vector<Formula>& corpus,
                                          long long max_tuples_per_formula = 4096);

}  // namespace fvkit
