#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fvkit/semantics.hpp"

namespace fvkit {

// Machine-readable corpus of axiom systems: each theory is a labeled list of
// sentences over a fixed signature, parseable and printable, evaluable on any
// finite structure interpreting that signature.  Schemas are emitted up to
// explicit bounds, never streamed.

struct AxiomEntry {
  std::string label;    // stable, file-safe
  Formula formula;      // a sentence over the entry signature
  std::string note;     // reading notes (e.g. interpretation flags), may be empty
};

struct AxiomCorpusEntry {
  std::string theory;
  Signature sig;
  std::vector<AxiomEntry> axioms;

  const AxiomEntry* find(const std::string& label) const;  // nullptr if absent
};

// Schema bounds; a theory uses only the fields it documents and ignores the
// rest.  Supplying a non-positive bound is an error.
struct TheoryParams {
  std::optional<int> n;  // main bound: degrees, arities, characteristic range
  std::optional<int> k;  // secondary bound: polynomial degree, representative count
  std::optional<int> p;  // residue characteristic (>= 2)
  std::string sigma;     // defining formula for a scheme_G instance
};

// Emitted theories:
//   ring             commutative unital ring laws
//   vnr              ring + the regularity axiom forall x exists y (xyx = x)
//   projector_def    the single defining axiom for the binary projector p
//   diff_ring        additivity and the Leibniz law for delta
//   axioms_A         vnr differential ring with no minimal idempotent
//   T_f              lattice-ordered reduced f-ring laws (binary inf)
//   T_reg            T_f + regular + no minimal idempotent + odd-degree roots
//                    (odd degrees 1..n, default 3) + square roots of positives
//   T_v              vnr ring with div/Div valuation-divisibility axioms
//   char0            forall e (e^2 = e and e != 0 -> n.e != 0), n = 1..bound (default 4)
//   T_reg_v_0        T_v + no minimal idempotent + monic roots (degrees 1..n,
//                    default 3) + char0 scheme
//   T_reg_v_p        T_v + no minimal idempotent + henselian scheme (degrees
//                    1..n, default 3) + discrete value + Z-group scheme
//                    (m = 2..k, default 2) + residue field F_p (p default 2)
//   ell_n            linear-independence relations ell_k, k = 2..n (default 2):
//                    definitional biconditionals + the P complement law
//   Dnk              algebraic-dependence complements Dt_n'_k' for n' = 1..n,
//                    k' = 1..k (defaults 2, 1) + the P complement law
//   lambda           component functions lambda_n_i, i = 1..n (default 2),
//                    as definitional biconditionals
//   pcf_powers       power predicates P_j, j = 2..n (default 2); complements
//                    use k bounded numeral representatives (default 1)
//   chi_order        the order-topology ball relation chi over ring + inf
//   chi_val          the valuation-topology ball relation chi over ring + div
//   scheme_G         one generic-derivation instance for a definable family
//                    sigma(z1..zn, xn); the open-set premise is read as
//                    containing a chi-ball (flagged in the entry note)
//   ba               boolean algebra laws
//   T_at             ba + the atomless axiom
std::vector<std::string> theory_names();
AxiomCorpusEntry emit_theory(const std::string& name, const TheoryParams& params = {});

// Per-axiom verdicts on a finite structure; no aggregation is imposed (finite
// models are expected to fail e.g. "no minimal idempotent", and that is data).
// Relations carrying complement formulas are cross-checked as biconditionals.
struct AxiomVerdict {
  std::string label;
  bool holds = false;
};
struct TheoryEvaluation {
  std::string theory;
  std::vector<AxiomVerdict> verdicts;
  DaggerReport daggers;
};
// Throws if A does not declare every symbol of the entry signature.
TheoryEvaluation evaluate_theory(const AxiomCorpusEntry& entry, const FiniteStructure& A);

// The trivially valued expansion of a field-like structure: div holds at
// (x, y) iff x != 0 or y = 0 (that is, v(x) <= v(y) for the valuation that is
// 0 off zero), Div iff x != 0 and y = 0; both carry their mutual complements.
FiniteStructure with_trivial_valuation(const FiniteStructure& field);

// Adds unary predicates P_2..P_n, P_j holding on j-th powers.
FiniteStructure with_power_predicates(const FiniteStructure& A, int n);

// Writes one "<label>.fml" per axiom plus "manifest.json" into dir (created
// if missing).  Returns the list of file names written, manifest last.
std::vector<std::string> write_theory_files(const AxiomCorpusEntry& entry,
                                            const std::string& dir);

}  // namespace fvkit
