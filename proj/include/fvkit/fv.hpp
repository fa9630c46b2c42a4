#pragma once

// Determining sequences: compile a first-order formula into a boolean-algebra
// formula over truth-set variables plus factor formulas, then evaluate product
// satisfaction through the powerset algebra of the index set.

#include "fvkit/product.hpp"

namespace fvkit {

// BA formulas over designated set variables z0..z(l-1), extended with a bounded
// partition-selector construct. Inside a part node, variable indices are local
// slots w0..w(m-1) bound to the unions of the selected partition pieces.
struct BAFormula {
  enum class Kind { EqOne, EqZero, Not, And, Part };
  Kind kind = Kind::EqOne;
  int var = -1;                 // EqOne / EqZero
  std::vector<BAFormula> subs;  // Not: 1 child; And: n children; Part: the inner formula
  int part_arity = 0;           // m
  std::vector<int> part_vars;   // 2^m entries: outer variable for each subset mask S

  static BAFormula eq_one(int v);
  static BAFormula eq_zero(int v);
  static BAFormula not_(BAFormula f);
  static BAFormula and_(std::vector<BAFormula> fs);
  static BAFormula part(int m, std::vector<int> vars, BAFormula inner);
  bool operator==(const BAFormula& o) const;
  bool operator!=(const BAFormula& o) const { return !(*this == o); }
};

struct DeterminingSequence {
  BAFormula phi_star;
  std::vector<Formula> psis;      // factor formulas, shared parameter tuple
  std::vector<std::string> vars;  // the parameter tuple (free variables)
  void validate() const;
};

struct FvOptions {
  bool dedup = true;  // merge syntactically equal psis before each exists-step
  int max_psis = 12;  // loud failure beyond this psi-list length at an exists-step
};

// connective basis not / and / exists; universals become not-exists-not
Formula normalize_basis(const Formula& f);

DeterminingSequence fv_compile(const Formula& f, const FvOptions& opt = {});

// evaluate over subsets of {0..x_count-1} given as bitmasks, one per variable
bool ba_eval(const BAFormula& phi, const std::vector<unsigned>& sets, int x_count);

// product satisfaction via truth sets: X(A)* |= Phi*([psi_1(args)], ...)
bool fv_eval(const BooleanProduct& A, const DeterminingSequence& ds,
             const std::vector<std::vector<int>>& args);

struct FvVerifyReport {
  long long assignments = 0;
  long long disagreements = 0;
  size_t psi_count = 0;
  struct Item {
    std::vector<int> assignment;  // carrier positions, one per variable
    bool direct = false;
    bool transfer = false;
  };
  std::vector<Item> items;  // capped at 16
};

// sweeps every assignment, comparing direct evaluation with fv_eval
FvVerifyReport fv_verify(const BooleanProduct& A, const Formula& f, const FvOptions& opt = {});

// the partition construct spelled out with genuine BA quantifiers (z0, z1, ...
// free; partition pieces existentially quantified); used for side-by-side
// semantics checks at small scale
Formula ba_to_quantified(const BAFormula& phi);

// (= zK 1) | (= zK 0) | (not f) | (and f...) | (part <m> (<var>...) f)
SExpr ba_to_sexpr(const BAFormula& phi);
BAFormula parse_ba_formula(const SExpr& e);
BAFormula parse_ba_formula(std::string_view text);
std::string print_ba_formula(const BAFormula& phi);

// (ds (vars <v>...) (phi-star <ba>) (psis <formula>...))
SExpr ds_to_sexpr(const DeterminingSequence& ds);
DeterminingSequence parse_ds(const SExpr& e, const Signature& sig);
std::string print_ds(const DeterminingSequence& ds);

// --- existential decompositions -----------------------------------------------------

// f = exists u-bar (conj of literals)  ->  phi0 plus one phi_j per negated literal
struct BurrisDecomposition {
  Formula phi0;
  std::vector<Formula> phis;
};
BurrisDecomposition burris_decompose(const Formula& f);

struct BurrisReport {
  bool forward_ok = true;   // f -> phi0 and all phi_j (logically valid)
  bool converse_ok = true;  // reported, never assumed
  long long assignments = 0;
  struct Item {
    std::vector<int> assignment;
    bool lhs = false, rhs = false;
  };
  std::vector<Item> converse_failures;  // capped at 16
};
BurrisReport check_burris(const FiniteStructure& A, const Formula& f);

// existential L_P formulas: P-atoms over compound terms get a fresh variable,
// the quantified tuple splits into the P-constrained and free parts
struct PairDecomposition {
  std::vector<std::string> u_vars;   // full quantified tuple (with introduced w's)
  std::vector<std::string> u0_vars;  // components u with P(u) among the positive atoms
  std::vector<std::string> u1_vars;
  std::vector<std::string> params;   // free variables of the input
  Formula psi0;                      // conjunction of positive atoms
  Formula psi0_plus;                 // psi0 without P-atoms (an L-formula)
  std::vector<Formula> thetas;       // negated atoms, in positive form
  Formula phi0;                      // exists u-bar psi0
  // phi_{J_s} = exists u-bar (psi0 and the negations of the block's thetas)
  Formula block_formula(const std::vector<int>& block) const;
};
PairDecomposition pair_decompose(const Formula& f);

struct PairDecompReport {
  bool forward_ok = true;
  bool converse_ok = true;
  long long assignments = 0;
  long long partitions = 0;  // set partitions of the negated-atom index set
  struct Item {
    std::vector<int> assignment;
    bool lhs = false, rhs = false;
  };
  std::vector<Item> forward_failures;   // must stay empty
  std::vector<Item> converse_failures;  // reported
};
// A's factors are pair structures (P in the signature); evaluates both sides of
// the coordinatewise decomposition for every parameter assignment
PairDecompReport check_pair_decompose(const BooleanProduct& A, const Formula& f);

// all set partitions of {0..n-1} into nonempty blocks, deterministic order
std::vector<std::vector<std::vector<int>>> set_partitions(int n);

}  // namespace fvkit
