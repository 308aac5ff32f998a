#include "ffde/oracle.hpp"

#include <algorithm>

#include "ffde/valuation.hpp"

namespace ffde {

namespace {

void collect_atoms(const FormulaPtr& f, std::set<std::string>& out) {
  switch (f->kind) {
    case Conn::Atom:
      if (!f->terms.empty())
        throw InvalidArgument("oracle: atom '" + f->name + "' takes arguments");
      out.insert(f->name);
      return;
    case Conn::Neg:
      collect_atoms(f->left, out);
      return;
    case Conn::And:
    case Conn::Or:
      collect_atoms(f->left, out);
      collect_atoms(f->right, out);
      return;
    default:
      throw InvalidArgument("oracle: formula is outside the propositional fragment");
  }
}

PairValue lookup(const PairAssignment& a, const std::string& atom) {
  auto it = a.find(atom);
  return it == a.end() ? PairValue{} : it->second;
}

}  // namespace

std::set<std::string> propositional_atoms(const FormulaPtr& f) {
  std::set<std::string> out;
  collect_atoms(f, out);
  return out;
}

PairValue eval_pair(const FormulaPtr& f, const PairAssignment& a) {
  switch (f->kind) {
    case Conn::Atom:
      if (!f->terms.empty())
        throw InvalidArgument("oracle: atom '" + f->name + "' takes arguments");
      return lookup(a, f->name);
    case Conn::Neg: {
      PairValue v = eval_pair(f->left, a);
      return {v.falsity, v.truth};
    }
    case Conn::And: {
      PairValue l = eval_pair(f->left, a), r = eval_pair(f->right, a);
      return {l.truth && r.truth, l.falsity || r.falsity};
    }
    case Conn::Or: {
      PairValue l = eval_pair(f->left, a), r = eval_pair(f->right, a);
      return {l.truth || r.truth, l.falsity && r.falsity};
    }
    default:
      throw InvalidArgument("oracle: formula is outside the propositional fragment");
  }
}

OracleVerdict fde_consequence(const std::vector<FormulaPtr>& gamma, const FormulaPtr& goal) {
  std::set<std::string> atom_set = propositional_atoms(goal);
  for (const auto& g : gamma) collect_atoms(g, atom_set);
  const std::vector<std::string> atoms(atom_set.begin(), atom_set.end());
  const size_t k = atoms.size();

  OracleVerdict verdict;
  const std::uint64_t total = std::uint64_t{1} << (2 * k);
  for (std::uint64_t i = 0; i < total; ++i) {
    PairAssignment a;
    for (size_t j = 0; j < k; ++j) {
      const unsigned code = static_cast<unsigned>(i >> (2 * (k - 1 - j))) & 3u;
      a[atoms[j]] = PairValue{(code & 2u) != 0, (code & 1u) != 0};
    }
    ++verdict.assignments_checked;
    bool premises_hold = std::all_of(gamma.begin(), gamma.end(), [&](const FormulaPtr& g) {
      return eval_pair(g, a).truth;
    });
    if (premises_hold && !eval_pair(goal, a).truth) {
      verdict.valid = false;
      verdict.witness = std::move(a);
      return verdict;
    }
  }
  return verdict;
}

KripkeModel model_for_assignment(const Signature& sig, const PairAssignment& a) {
  KripkeModel m;
  m.stages = {"w1"};
  m.domains["w1"] = {};
  m.id_pos["w1"] = {};
  m.id_neg["w1"] = {};
  for (const auto& [p, arity] : sig.predicates) {
    if (arity != 0)
      throw InvalidArgument("oracle: predicate '" + p + "' is not 0-ary");
    PredInterp& interp = m.predicates[p]["w1"];
    const PairValue v = lookup(a, p);
    if (v.truth) interp.pos.insert(Tuple{});
    if (v.falsity) interp.neg.insert(Tuple{});
  }
  return m;
}

bool agrees_with_model_semantics(const Signature& sig, const FormulaPtr& f,
                                 const PairAssignment& a) {
  const KripkeModel m = model_for_assignment(sig, a);
  Evaluator ev(sig, m);
  const PairValue direct = eval_pair(f, a);
  return direct.truth == ev.eval(f, "w1") && direct.falsity == ev.eval_neg(f, "w1");
}

CrossCheckReport compare_with_kripke(int atom_count, int depth) {
  if (atom_count < 1 || atom_count > 3)
    throw InvalidArgument("compare_with_kripke: atom_count must be between 1 and 3");
  if (depth < 0 || depth > 3)
    throw InvalidArgument("compare_with_kripke: depth must be between 0 and 3");

  Signature sig;
  sig.logic = Logic::FFDE;
  std::vector<std::string> atoms;
  for (int i = 1; i <= atom_count; ++i) {
    atoms.push_back("p" + std::to_string(i));
    sig.predicates[atoms.back()] = 0;
  }

  // Layer d holds the formulas of exact connective depth d.  Subformulas are
  // shared across layers so the memoizing evaluator visits each node once
  // per model.
  std::vector<std::vector<FormulaPtr>> layers(static_cast<size_t>(depth) + 1);
  for (const auto& name : atoms) layers[0].push_back(mk_atom(name, {}));
  std::uint64_t total = layers[0].size();
  for (int d = 1; d <= depth; ++d) {
    std::vector<FormulaPtr> shallower;  // depth < d-1
    for (int e = 0; e + 1 < d; ++e)
      shallower.insert(shallower.end(), layers[e].begin(), layers[e].end());
    const std::vector<FormulaPtr>& prev = layers[d - 1];
    std::vector<FormulaPtr>& out = layers[d];
    auto both = [&](const FormulaPtr& l, const FormulaPtr& r) {
      out.push_back(mk_and(l, r));
      out.push_back(mk_or(l, r));
    };
    for (const auto& f : prev) out.push_back(mk_neg(f));
    for (const auto& f : prev)
      for (const auto& g : prev) both(f, g);
    for (const auto& f : prev)
      for (const auto& g : shallower) {
        both(f, g);
        both(g, f);
      }
    total += out.size();
    if (total > 1'000'000)
      throw InvalidArgument("compare_with_kripke: formula space too large");
  }

  CrossCheckReport report;
  report.formulas = total;
  const std::uint64_t assignments = std::uint64_t{1} << (2 * atom_count);
  for (std::uint64_t i = 0; i < assignments; ++i) {
    PairAssignment a;
    for (int j = 0; j < atom_count; ++j) {
      const unsigned code = static_cast<unsigned>(i >> (2 * (atom_count - 1 - j))) & 3u;
      a[atoms[static_cast<size_t>(j)]] = PairValue{(code & 2u) != 0, (code & 1u) != 0};
    }
    const KripkeModel m = model_for_assignment(sig, a);
    Evaluator ev(sig, m);
    for (const auto& layer : layers)
      for (const auto& f : layer) {
        const PairValue direct = eval_pair(f, a);
        const PairValue kripke{ev.eval(f, "w1"), ev.eval_neg(f, "w1")};
        ++report.cases;
        if (!(direct == kripke)) ++report.mismatches;
      }
  }
  return report;
}

}  // namespace ffde
