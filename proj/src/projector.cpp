#include "fvkit/projector.hpp"

namespace fvkit {

namespace {

Term papp(const Term& a, const Term& b) { return Term::app("p", {a, b}); }

Term zero() { return Term::cnst("0"); }

// t = s rendered as a single term vanishing exactly when the equation holds
Term eq_diff(const Term& a, const Term& b) {
  if (b == zero()) return a;
  if (a == zero()) return b;
  return Term::app("-", {a, b});
}

bool contains_relation(const Formula& f) {
  if (f.kind == Formula::Kind::Rel) return true;
  for (const auto& s : f.subs)
    if (contains_relation(s)) return true;
  return false;
}

// sign: true means "t = 0", false means "t != 0"
struct SignedTerm {
  Term t;
  bool pos = true;
};

SignedTerm fold_and(const SignedTerm& a, const SignedTerm& b) {
  if (a.pos && b.pos) return {Term::app("+", {papp(a.t, b.t), b.t}), true};
  if (a.pos && !b.pos) return {papp(b.t, a.t), false};
  if (!a.pos && b.pos) return {papp(a.t, b.t), false};
  return {Term::app("-", {papp(a.t, b.t), a.t}), false};
}

SignedTerm fold_or(const SignedTerm& a, const SignedTerm& b) {
  if (a.pos && b.pos) return {Term::app("-", {papp(a.t, b.t), a.t}), true};
  if (a.pos && !b.pos) return {papp(a.t, b.t), true};
  if (!a.pos && b.pos) return {papp(b.t, a.t), true};
  return {Term::app("+", {papp(a.t, b.t), b.t}), false};
}

SignedTerm fold_matrix(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::Eq:
      return {eq_diff(f.terms[0], f.terms[1]), true};
    case K::Not: {
      SignedTerm s = fold_matrix(f.subs[0]);
      s.pos = !s.pos;
      return s;
    }
    case K::And: {
      if (f.subs.empty()) return {zero(), true};
      SignedTerm acc = fold_matrix(f.subs[0]);
      for (size_t i = 1; i < f.subs.size(); ++i) acc = fold_and(acc, fold_matrix(f.subs[i]));
      return acc;
    }
    case K::Or: {
      if (f.subs.empty()) return {zero(), false};
      SignedTerm acc = fold_matrix(f.subs[0]);
      for (size_t i = 1; i < f.subs.size(); ++i) acc = fold_or(acc, fold_matrix(f.subs[i]));
      return acc;
    }
    case K::Imp: {
      SignedTerm a = fold_matrix(f.subs[0]);
      a.pos = !a.pos;
      return fold_or(a, fold_matrix(f.subs[1]));
    }
    default:
      throw Error("projector_translate: matrix must be quantifier-free");
  }
}

// dagger bodies must be positive: and/or over equations and relation atoms
void check_positive_open(const Formula& f) {
  using K = Formula::Kind;
  if (f.is_atom()) return;
  if (f.kind == K::And || f.kind == K::Or) {
    for (const auto& s : f.subs) check_positive_open(s);
    return;
  }
  throw Error("projector_translate: complement eliminator must be existential-positive");
}

// replaces negated relation atoms by dagger instances, hoisting the
// eliminators' existentials (opened with fresh names) into `hoisted`
Formula eliminate_negated_relations(const Formula& f, const Signature& sig,
                                    std::set<std::string>& used,
                                    std::vector<std::string>& hoisted) {
  using K = Formula::Kind;
  if (f.kind == K::Not && f.subs[0].kind == K::Rel) {
    const Formula& atom = f.subs[0];
    auto it = sig.dagger.find(atom.sym);
    if (it == sig.dagger.end())
      throw Error("projector_translate: relation atom " + atom.sym +
                  " has no complement eliminator");
    Formula inst = it->second;
    for (size_t i = 0; i < atom.terms.size(); ++i)
      inst = subst_free(inst, "x" + std::to_string(i + 1), atom.terms[i]);
    while (inst.kind == K::Exists) {
      std::string v = fresh_name(inst.sym.empty() ? "s" : inst.sym, used);
      used.insert(v);
      hoisted.push_back(v);
      inst = open_body(inst.subs[0], v);
    }
    check_positive_open(inst);
    return inst;
  }
  if (f.kind == K::And || f.kind == K::Or) {
    Formula out = f;
    for (auto& s : out.subs) s = eliminate_negated_relations(s, sig, used, hoisted);
    return out;
  }
  return f;
}

void flatten_conjuncts(const Formula& f, std::vector<Formula>& out) {
  if (f.kind == Formula::Kind::And) {
    for (const auto& s : f.subs) flatten_conjuncts(s, out);
  } else {
    out.push_back(f);
  }
}

Formula rebuild_prefix(Formula body,
                       const std::vector<std::pair<Formula::Kind, std::string>>& prefix) {
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it)
    body = it->first == Formula::Kind::Exists ? Formula::exists(it->second, body)
                                              : Formula::forall(it->second, body);
  return body;
}

}  // namespace

Formula projector_translate(const Formula& f, const Signature& sig) {
  // binders are de Bruijn, so only free names and already-opened prefix
  // names can be captured; original binder names survive when they can
  std::set<std::string> used;
  for (const auto& v : free_vars(f)) used.insert(v);

  std::vector<std::pair<Formula::Kind, std::string>> prefix;
  Formula g = f;
  while (g.is_quantifier()) {
    std::string want = g.sym.empty() ? "u" : g.sym;
    std::string v = used.count(want) ? fresh_name(want, used) : want;
    used.insert(v);
    prefix.push_back({g.kind, v});
    g = open_body(g.subs[0], v);
  }
  if (quantifier_depth(g) > 0)
    throw Error("projector_translate: formula must be in prenex form");

  std::vector<std::string> hoisted;
  Formula matrix = eliminate_negated_relations(to_nnf(g), sig, used, hoisted);
  for (const auto& v : hoisted) prefix.push_back({Formula::Kind::Exists, v});

  if (!contains_relation(matrix)) {
    SignedTerm st = fold_matrix(matrix);
    if (st.pos) return rebuild_prefix(Formula::eq(st.t, zero()), prefix);
    // a negated atomic needs one more universal: forall w p(w,t) = 0 iff t != 0
    std::string w = fresh_name("w", used);
    Formula hat = Formula::eq(papp(Term::var(w), st.t), zero());
    return Formula::forall(w, rebuild_prefix(std::move(hat), prefix));
  }

  // relational case: conjunctive matrix under a forall-exists prefix
  bool seen_exists = false;
  for (const auto& q : prefix) {
    if (q.first == Formula::Kind::Exists) {
      seen_exists = true;
    } else if (seen_exists) {
      throw Error("projector_translate: relation atoms require a forall-exists prefix");
    }
  }
  std::vector<Formula> conjuncts;
  flatten_conjuncts(matrix, conjuncts);
  std::string z = fresh_name("z", used);
  bool z_used = false;
  std::vector<Formula> atomics;
  for (const auto& c : conjuncts) {
    if (contains_relation(c)) {
      if (c.kind != Formula::Kind::Rel)
        throw Error("projector_translate: relation atom in non-conjunctive position");
      atomics.push_back(c);
      continue;
    }
    SignedTerm st = fold_matrix(c);
    if (st.pos) {
      atomics.push_back(Formula::eq(st.t, zero()));
    } else {
      z_used = true;
      atomics.push_back(Formula::eq(papp(Term::var(z), st.t), zero()));
    }
  }
  Formula body = rebuild_prefix(Formula::and_(std::move(atomics)), prefix);
  return z_used ? Formula::forall(z, std::move(body)) : body;
}

std::vector<std::pair<Formula, Formula>> projector_identities() {
  Signature sig = sig_ring_p();
  auto mk = [&](const char* a, const char* b) {
    return std::make_pair(parse_formula(a, sig), parse_formula(b, sig));
  };
  return {
      mk("(or (= u 0) (= v 0))", "(= (p u v) u)"),
      mk("(and (= u 0) (= v 0))", "(= (+ (p u v) v) 0)"),
      mk("(or (= u 0) (not (= v 0)))", "(= (p u v) 0)"),
  };
}

std::pair<Formula, Formula> discriminator_law() {
  Signature sig = sig_ring_p();
  return {parse_formula("(= (p (- u w) (- u v)) (- u z))", sig),
          parse_formula("(or (and (= u v) (= w z)) (and (not (= u v)) (= u z)))", sig)};
}

IdentityReport check_projector_identities(
    const BooleanProduct& A, const std::vector<std::pair<Formula, Formula>>& pairs) {
  IdentityReport rep;
  for (size_t pi = 0; pi < pairs.size(); ++pi) {
    const Formula& lhs = pairs[pi].first;
    const Formula& rhs = pairs[pi].second;
    std::vector<std::string> vars = free_vars(Formula::and_({lhs, rhs}));
    auto lv = free_vars(lhs);
    auto rv = free_vars(rhs);
    const size_t n = vars.size();
    const size_t m = A.carrier.size();
    long long total = 1;
    for (size_t j = 0; j < n; ++j) total *= static_cast<long long>(m);
    for (long long lin = 0; lin < total; ++lin) {
      std::map<std::string, const std::vector<int>*> env;
      long long t = lin;
      for (size_t j = n; j-- > 0;) {
        env[vars[j]] = &A.carrier[static_cast<size_t>(t % m)];
        t /= static_cast<long long>(m);
      }
      std::vector<std::vector<int>> largs, rargs;
      for (const auto& v : lv) largs.push_back(*env.at(v));
      for (const auto& v : rv) rargs.push_back(*env.at(v));
      std::set<int> ls = truth_set(A, lhs, largs);
      std::set<int> rs = truth_set(A, rhs, rargs);
      ++rep.checks;
      if (ls != rs) {
        rep.ok = false;
        if (rep.failures.size() < 8) {
          std::vector<std::vector<int>> args;
          for (const auto& v : vars) args.push_back(*env.at(v));
          rep.failures.push_back({pi, args, ls, rs});
        }
      }
    }
  }
  return rep;
}

TranslationReport check_projector_translation(const FiniteStructure& D,
                                              const std::vector<Formula>& corpus,
                                              const Signature& sig) {
  if (D.size < 2)
    throw Error("check_projector_translation: structure must have more than one element");
  FiniteStructure Dp = with_projector(D);
  TranslationReport rep;
  for (const Formula& f : corpus) {
    Formula fp = projector_translate(to_prenex(f), sig);
    auto vars = free_vars(f);
    long long total = 1;
    for (size_t j = 0; j < vars.size(); ++j) total *= D.size;
    std::vector<int> v(vars.size(), 0);
    for (long long lin = 0; lin < total; ++lin) {
      Assignment asg;
      for (size_t j = 0; j < vars.size(); ++j) asg[vars[j]] = v[j];
      bool direct = eval_formula(D, f, asg);
      bool translated = eval_formula(Dp, fp, asg);
      ++rep.assignments;
      if (direct != translated) {
        rep.ok = false;
        if (rep.failures.size() < 16)
          rep.failures.push_back({print_formula(f), v, direct, translated});
      }
      for (size_t j = vars.size(); j-- > 0;) {
        if (++v[j] < D.size) break;
        v[j] = 0;
      }
    }
  }
  return rep;
}

}  // namespace fvkit
