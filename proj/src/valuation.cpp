#include "ffde/valuation.hpp"

#include <algorithm>

namespace ffde {

std::string four_value_name(FourValue v) {
  switch (v) {
    case FourValue::T: return "T";
    case FourValue::B: return "B";
    case FourValue::N: return "N";
    case FourValue::F: return "F";
  }
  return "?";
}

Evaluator::Evaluator(const Signature& sig, const KripkeModel& model)
    : sig_(sig), model_(model) {
  const PairSet leq = order_closure_pairs(model);
  for (const auto& w : model.stages) {
    auto& ups = up_[w];
    for (const auto& w2 : model.stages)
      if (leq.count({w, w2})) ups.push_back(w2);
    const auto& dom = model.domain(w);
    domains_[w].assign(dom.begin(), dom.end());
    elements_.insert(dom.begin(), dom.end());
  }
}

const std::string& Evaluator::require_stage(const std::string& stage) const {
  if (!up_.count(stage)) throw InvalidArgument("eval: unknown stage '" + stage + "'");
  return stage;
}

bool Evaluator::is_closed(const FormulaPtr& f) {
  auto it = closed_.find(f.get());
  if (it != closed_.end()) return it->second;
  return closed_.emplace(f.get(), free_vars(f).empty()).first->second;
}

std::optional<std::string> Evaluator::term_at(const Term& t, const std::string& stage,
                                              const Env& env) const {
  switch (t.kind) {
    case TermKind::Constant:
      return model_.constant_at(t.name, stage);
    case TermKind::DiagramConstant: {
      if (!elements_.count(t.name))
        throw InvalidArgument("eval: diagram constant '@" + t.name +
                              "' names an element the model does not have");
      if (model_.domain(stage).count(t.name)) return t.name;
      return std::nullopt;
    }
    case TermKind::Variable: {
      auto it = env.find(t.name);
      if (it == env.end())
        throw InvalidArgument("eval: free variable '" + t.name + "'");
      // Bound values are drawn from some stage at or below the current one,
      // and domains grow along the order, so the value is always present.
      return it->second;
    }
  }
  return std::nullopt;
}

bool Evaluator::eval(const FormulaPtr& f, const std::string& stage) {
  Env env;
  roots_.insert(f);
  return ev(f, require_stage(stage), false, env);
}

bool Evaluator::eval_neg(const FormulaPtr& f, const std::string& stage) {
  Env env;
  roots_.insert(f);
  return ev(f, require_stage(stage), true, env);
}

FourValue Evaluator::four_valued(const FormulaPtr& f, const std::string& stage) {
  const bool truth = eval(f, stage);
  const bool falsity = eval_neg(f, stage);
  if (truth && falsity) return FourValue::B;
  if (truth) return FourValue::T;
  if (falsity) return FourValue::F;
  return FourValue::N;
}

bool Evaluator::ev(const FormulaPtr& f, const std::string& stage, bool neg, Env& env) {
  const bool cacheable = is_closed(f);
  const std::tuple<const Formula*, std::string, bool> key{f.get(), stage, neg};
  if (cacheable) {
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }

  bool result = false;
  switch (f->kind) {
    case Conn::Def: {
      auto val = term_at(f->terms[0], stage, env);
      result = neg ? !val.has_value() : val.has_value();
      break;
    }
    case Conn::Id: {
      auto a = term_at(f->terms[0], stage, env);
      auto b = term_at(f->terms[1], stage, env);
      if (!a || !b) {
        result = false;
        break;
      }
      auto it = (neg ? model_.id_neg : model_.id_pos).find(stage);
      result = it != (neg ? model_.id_neg : model_.id_pos).end() && it->second.count({*a, *b});
      break;
    }
    case Conn::Atom: {
      Tuple tup;
      bool all_defined = true;
      for (const auto& t : f->terms) {
        auto val = term_at(t, stage, env);
        if (!val) {
          all_defined = false;
          break;
        }
        tup.push_back(*val);
      }
      if (!all_defined) {
        result = false;
        break;
      }
      auto pit = model_.predicates.find(f->name);
      if (pit == model_.predicates.end()) {
        result = false;
        break;
      }
      auto wit = pit->second.find(stage);
      if (wit == pit->second.end()) {
        result = false;
        break;
      }
      result = (neg ? wit->second.neg : wit->second.pos).count(tup) > 0;
      break;
    }
    case Conn::Neg:
      // v(~A, w) dispatches on the negand; v(~~A, w) = v(A, w).
      result = neg ? ev(f->left, stage, false, env) : ev(f->left, stage, true, env);
      break;
    case Conn::And:
      if (neg)  // ~(A & B) behaves as ~A | ~B
        result = ev(f->left, stage, true, env) || ev(f->right, stage, true, env);
      else
        result = ev(f->left, stage, false, env) && ev(f->right, stage, false, env);
      break;
    case Conn::Or:
      if (neg)  // ~(A | B) behaves as ~A & ~B
        result = ev(f->left, stage, true, env) && ev(f->right, stage, true, env);
      else
        result = ev(f->left, stage, false, env) || ev(f->right, stage, false, env);
      break;
    case Conn::Imp:
      if (neg) {
        result = ev(f->left, stage, false, env) && ev(f->right, stage, true, env);
      } else {
        result = true;
        for (const auto& w2 : up_.at(stage))
          if (ev(f->left, w2, false, env) && !ev(f->right, w2, false, env)) {
            result = false;
            break;
          }
      }
      break;
    case Conn::Forall:
    case Conn::Exists: {
      // Truth of forall and falsity of exists range over all later stages;
      // truth of exists and falsity of forall are witnessed at this stage.
      const bool universal = (f->kind == Conn::Forall) != neg;
      const std::string var = f->name;
      auto saved = env.find(var) == env.end() ? std::optional<std::string>{}
                                              : std::optional<std::string>{env[var]};
      if (universal) {
        result = true;
        for (const auto& w2 : up_.at(stage)) {
          for (const auto& a : domains_.at(w2)) {
            env[var] = a;
            if (!ev(f->left, w2, neg, env)) {
              result = false;
              break;
            }
          }
          if (!result) break;
        }
      } else {
        result = false;
        for (const auto& a : domains_.at(stage)) {
          env[var] = a;
          if (ev(f->left, stage, neg, env)) {
            result = true;
            break;
          }
        }
      }
      if (saved)
        env[var] = *saved;
      else
        env.erase(var);
      break;
    }
  }

  if (cacheable) memo_.emplace(key, result);
  return result;
}

bool eval(const Signature& sig, const KripkeModel& model, const FormulaPtr& f,
          const std::string& stage) {
  return Evaluator(sig, model).eval(f, stage);
}

bool eval_neg(const Signature& sig, const KripkeModel& model, const FormulaPtr& f,
              const std::string& stage) {
  return Evaluator(sig, model).eval_neg(f, stage);
}

FourValue four_valued(const Signature& sig, const KripkeModel& model, const FormulaPtr& f,
                      const std::string& stage) {
  return Evaluator(sig, model).four_valued(f, stage);
}

bool holds_at_all_stages(const Signature& sig, const KripkeModel& model, const FormulaPtr& f) {
  Evaluator ev(sig, model);
  return std::all_of(model.stages.begin(), model.stages.end(),
                     [&](const std::string& w) { return ev.eval(f, w); });
}

bool is_persistent(const Signature& sig, const KripkeModel& model, const FormulaPtr& f) {
  Evaluator ev(sig, model);
  for (const auto& [w, w2] : order_closure_pairs(model))
    if (w != w2 && ev.eval(f, w) && !ev.eval(f, w2)) return false;
  return true;
}

std::optional<std::string> counterexample_stage(const Signature& sig, const KripkeModel& model,
                                                const std::vector<FormulaPtr>& gamma,
                                                const FormulaPtr& goal) {
  Evaluator ev(sig, model);
  for (const auto& w : model.stages) {
    bool premises_hold = std::all_of(gamma.begin(), gamma.end(),
                                     [&](const FormulaPtr& g) { return ev.eval(g, w); });
    if (premises_hold && !ev.eval(goal, w)) return w;
  }
  return std::nullopt;
}

}  // namespace ffde
