#include "fvkit/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace fvkit {
namespace {

bool weight_less(const Formula& a, const Formula& b) {
  int wa = formula_weight(a), wb = formula_weight(b);
  if (wa != wb) return wa < wb;
  return a < b;
}

void canonicalize(std::vector<Formula>& layer) {
  std::sort(layer.begin(), layer.end(), weight_less);
  layer.erase(std::unique(layer.begin(), layer.end()), layer.end());
}

int term_weight(const Term& t) {
  int w = 1;
  for (const Term& a : t.args) w += term_weight(a);
  return w;
}

void check_spec(const CorpusSpec& spec) {
  spec.sig.validate();
  if (spec.num_vars < 1 || spec.num_vars > 3)
    throw Error("corpus: num_vars must be between 1 and 3");
  if (spec.term_depth < 0) throw Error("corpus: term_depth must be >= 0");
  if (spec.max_depth < 0) throw Error("corpus: max_depth must be >= 0");
  if (spec.atom_pairs < 0) throw Error("corpus: atom_pairs must be >= 0");
}

size_t cap(size_t n, int budget) {
  if (budget <= 0) return n;  // budget 0 disables the cut
  return std::min(n, static_cast<size_t>(budget));
}

}  // namespace

std::vector<std::string> corpus_vars(int num_vars) {
  static const std::vector<std::string> pool = {"x", "y", "z"};
  if (num_vars < 1 || num_vars > static_cast<int>(pool.size()))
    throw Error("corpus: num_vars must be between 1 and 3");
  return {pool.begin(), pool.begin() + num_vars};
}

std::vector<Term> corpus_terms(const Signature& sig, int num_vars, int term_depth) {
  std::vector<Term> bases;
  for (const std::string& v : corpus_vars(num_vars)) bases.push_back(Term::var(v));
  for (const std::string& c : sig.constants) bases.push_back(Term::cnst(c));

  // right-combed shapes: every argument but the last is a base term
  std::vector<Term> prev = bases, all = bases;
  for (int d = 1; d <= term_depth; ++d) {
    std::vector<Term> next;
    for (const auto& [f, arity] : sig.functions) {
      std::vector<size_t> idx(static_cast<size_t>(arity) - 1, 0);
      while (true) {
        for (const Term& tail : prev) {
          std::vector<Term> args;
          for (size_t i : idx) args.push_back(bases[i]);
          args.push_back(tail);
          next.push_back(Term::app(f, std::move(args)));
        }
        size_t k = 0;
        for (; k < idx.size(); ++k) {
          if (++idx[k] < bases.size()) break;
          idx[k] = 0;
        }
        if (k == idx.size()) break;
      }
    }
    all.insert(all.end(), next.begin(), next.end());
    prev = std::move(next);
  }
  std::sort(all.begin(), all.end(), [](const Term& a, const Term& b) {
    int wa = term_weight(a), wb = term_weight(b);
    if (wa != wb) return wa < wb;
    return a < b;
  });
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

std::vector<Formula> corpus_atoms(const CorpusSpec& spec) {
  check_spec(spec);
  std::vector<Formula> atoms;
  std::vector<Term> terms = corpus_terms(spec.sig, spec.num_vars, spec.term_depth);

  if (spec.sig.has_constant("0")) {
    for (const Term& t : terms) atoms.push_back(Formula::eq(t, Term::cnst("0")));
  } else {
    for (size_t i = 0; i < terms.size(); ++i)
      for (size_t j = i + 1; j < terms.size(); ++j)
        atoms.push_back(Formula::eq(terms[i], terms[j]));
  }

  std::vector<Term> vars;
  for (const std::string& v : corpus_vars(spec.num_vars)) vars.push_back(Term::var(v));
  for (const auto& [r, arity] : spec.sig.relations) {
    std::vector<size_t> idx(static_cast<size_t>(arity), 0);
    while (true) {
      std::vector<Term> args;
      for (size_t i : idx) args.push_back(vars[i]);
      atoms.push_back(Formula::rel(r, std::move(args)));
      size_t k = 0;
      for (; k < idx.size(); ++k) {
        if (++idx[k] < vars.size()) break;
        idx[k] = 0;
      }
      if (k == idx.size()) break;
    }
  }
  canonicalize(atoms);
  return atoms;
}

std::vector<Formula> generate_corpus(const CorpusSpec& spec) {
  check_spec(spec);
  const std::vector<std::string> vars = corpus_vars(spec.num_vars);
  const std::vector<Formula> atoms = corpus_atoms(spec);
  const size_t npair = std::min(atoms.size(), static_cast<size_t>(spec.atom_pairs));

  std::vector<Formula> layer = atoms;
  for (const Formula& a : atoms) layer.push_back(Formula::not_(a));
  canonicalize(layer);
  layer.resize(cap(layer.size(), spec.layer_budget));

  std::set<Formula> seen(layer.begin(), layer.end());
  std::vector<Formula> out = layer;
  for (int d = 1; d <= spec.max_depth; ++d) {
    std::vector<Formula> next;
    auto push = [&](Formula f) {
      if (seen.insert(f).second) next.push_back(std::move(f));
    };
    for (const Formula& f : layer) {
      for (const std::string& v : vars) {
        if (!has_free_var(f, v)) continue;
        push(Formula::exists(v, f));
        push(Formula::forall(v, f));
      }
      for (size_t i = 0; i < npair; ++i) {
        push(Formula::or_({f, atoms[i]}));
        push(Formula::and_({f, atoms[i]}));
        push(Formula::imp(atoms[i], f));
      }
    }
    canonicalize(next);
    next.resize(cap(next.size(), spec.layer_budget));
    for (const Formula& f : next) seen.insert(f);
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

std::string corpus_to_text(const std::vector<Formula>& corpus) {
  std::string out;
  for (const Formula& f : corpus) {
    out += print_formula(f);
    out += '\n';
  }
  return out;
}

std::vector<Formula> corpus_from_text(std::string_view text, const Signature& sig) {
  std::vector<Formula> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == ';') continue;
    out.push_back(parse_formula(line, sig));
  }
  return out;
}

int write_corpus(const std::vector<Formula>& corpus, const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("corpus: cannot write " + path);
  out << corpus_to_text(corpus);
  return static_cast<int>(corpus.size());
}

std::vector<Formula> load_corpus(const std::string& path, const Signature& sig) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("corpus: cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return corpus_from_text(buf.str(), sig);
}

}  // namespace fvkit
