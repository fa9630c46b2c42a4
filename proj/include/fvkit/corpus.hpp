#pragma once

#include <string>
#include <vector>

#include "fvkit/syntax.hpp"

namespace fvkit {

// Deterministic layered formula corpus.  Layer 0 holds equality atoms (= t 0)
// over right-combed terms plus relation atoms over plain variables, and their
// negations; layer k+1 quantifies layer k over each pool variable and pairs
// layer k with leading atoms under or/and/imp.  Every layer is sorted by
// (weight, structural order), deduplicated up to alpha-equivalence, and cut to
// the layer budget, so reruns are byte-identical for a fixed spec.
struct CorpusSpec {
  Signature sig = sig_ring();
  int max_depth = 2;     // quantifier layers beyond the atomic one
  int num_vars = 3;      // drawn from the pool x, y, z
  int term_depth = 2;    // right-combed nesting bound
  int layer_budget = 32; // formulas kept per layer
  int atom_pairs = 4;    // leading atoms paired into each boolean step
  unsigned seed = 0;     // recorded for reproducibility; selection is canonical
};

// the variable pool prefix used by the generator
std::vector<std::string> corpus_vars(int num_vars);

// right-combed terms t ::= a | (f a t), a a pool variable or constant,
// depth <= term_depth; canonical (weight, structural) order
std::vector<Term> corpus_terms(const Signature& sig, int num_vars, int term_depth);

// the atomic layer before negation closure
std::vector<Formula> corpus_atoms(const CorpusSpec& spec);

// all layers concatenated, layer-major
std::vector<Formula> generate_corpus(const CorpusSpec& spec);

// one formula per line
std::string corpus_to_text(const std::vector<Formula>& corpus);
std::vector<Formula> corpus_from_text(std::string_view text, const Signature& sig);

// writes <stem>.fml (one formula per line); returns the number of formulas
int write_corpus(const std::vector<Formula>& corpus, const std::string& path);
std::vector<Formula> load_corpus(const std::string& path, const Signature& sig);

}  // namespace fvkit
