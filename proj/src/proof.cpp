#include "ffde/proof.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json.hpp"

namespace ffde {

using nlohmann::json;

namespace {

constexpr std::pair<Rule, const char*> kRuleNames[] = {
    {Rule::Hyp, "Hyp"},
    {Rule::AndI, "AndI"},
    {Rule::AndE_L, "AndE_L"},
    {Rule::AndE_R, "AndE_R"},
    {Rule::OrI_L, "OrI_L"},
    {Rule::OrI_R, "OrI_R"},
    {Rule::OrE, "OrE"},
    {Rule::NegAndI_L, "NegAndI_L"},
    {Rule::NegAndI_R, "NegAndI_R"},
    {Rule::NegAndE, "NegAndE"},
    {Rule::NegOrI, "NegOrI"},
    {Rule::NegOrE_L, "NegOrE_L"},
    {Rule::NegOrE_R, "NegOrE_R"},
    {Rule::DNI, "DNI"},
    {Rule::DNE, "DNE"},
    {Rule::DefI, "DefI"},
    {Rule::PEX_D, "PEX_D"},
    {Rule::PEM_D, "PEM_D"},
    {Rule::AllI_D, "AllI_D"},
    {Rule::AllE_D, "AllE_D"},
    {Rule::ExI_D, "ExI_D"},
    {Rule::ExE_D, "ExE_D"},
    {Rule::NegAllI_D, "NegAllI_D"},
    {Rule::NegAllE_D, "NegAllE_D"},
    {Rule::NegExI_D, "NegExI_D"},
    {Rule::NegExE_D, "NegExE_D"},
    {Rule::EqI, "EqI"},
    {Rule::EqE, "EqE"},
    {Rule::NeqI, "NeqI"},
    {Rule::ImpI, "ImpI"},
    {Rule::ImpE, "ImpE"},
    {Rule::NegImpI, "NegImpI"},
    {Rule::NegImpE_L, "NegImpE_L"},
    {Rule::NegImpE_R, "NegImpE_R"},
};

bool rule_discharges(Rule r) {
  switch (r) {
    case Rule::OrE:
    case Rule::NegAndE:
    case Rule::ImpI:
    case Rule::AllI_D:
    case Rule::ExE_D:
    case Rule::NegAllE_D:
    case Rule::NegExI_D:
      return true;
    default:
      return false;
  }
}

bool rule_has_eigen(Rule r) {
  switch (r) {
    case Rule::AllI_D:
    case Rule::ExE_D:
    case Rule::NegAllE_D:
    case Rule::NegExI_D:
      return true;
    default:
      return false;
  }
}

bool rule_has_template(Rule r) { return r == Rule::EqE || r == Rule::NeqI; }

bool rule_is_implication(Rule r) {
  switch (r) {
    case Rule::ImpI:
    case Rule::ImpE:
    case Rule::NegImpI:
    case Rule::NegImpE_L:
    case Rule::NegImpE_R:
      return true;
    default:
      return false;
  }
}

size_t premise_count(Rule r) {
  switch (r) {
    case Rule::Hyp:
    case Rule::PEM_D:
      return 0;
    case Rule::AndE_L:
    case Rule::AndE_R:
    case Rule::OrI_L:
    case Rule::OrI_R:
    case Rule::NegAndI_L:
    case Rule::NegAndI_R:
    case Rule::NegOrE_L:
    case Rule::NegOrE_R:
    case Rule::DNI:
    case Rule::DNE:
    case Rule::DefI:
    case Rule::EqI:
    case Rule::AllI_D:
    case Rule::NegExI_D:
    case Rule::ImpI:
    case Rule::NegImpE_L:
    case Rule::NegImpE_R:
      return 1;
    case Rule::AndI:
    case Rule::NegOrI:
    case Rule::PEX_D:
    case Rule::EqE:
    case Rule::NeqI:
    case Rule::AllE_D:
    case Rule::ExI_D:
    case Rule::ExE_D:
    case Rule::NegAllI_D:
    case Rule::NegAllE_D:
    case Rule::NegExE_D:
    case Rule::ImpE:
    case Rule::NegImpI:
      return 2;
    case Rule::OrE:
    case Rule::NegAndE:
      return 3;
  }
  return 0;
}

// Open hypotheses, grouped by label.  A label may cover several distinct
// formulas (they merge when subtrees are shared or labels are reused).
using OpenHyps = std::map<int, FormulaSet>;

struct Checker {
  const Signature& sig;
  CheckMode mode;

  [[noreturn]] static void fail(const char* kind, const std::string& path,
                                const std::string& message) {
    throw ProofError({kind, path, message});
  }

  static std::string child(const std::string& path, size_t i) {
    return (path.empty() ? "" : path + ".") + "premises[" + std::to_string(i) + "]";
  }

  static void merge(OpenHyps& dst, const OpenHyps& src) {
    for (const auto& [label, forms] : src) dst[label].insert(forms.begin(), forms.end());
  }

  // Removes the cited label after checking everything under it is allowed.
  static void discharge(OpenHyps& open, int label, const FormulaSet& allowed,
                        const std::string& path) {
    auto it = open.find(label);
    if (it == open.end()) return;  // vacuous discharge
    for (const auto& f : it->second)
      if (!allowed.count(f))
        fail("DischargeViolation", path,
             "hypothesis '" + render(f) + "' under label " + std::to_string(label) +
                 " cannot be discharged by this rule");
    open.erase(it);
  }

  static void forbid_label(const OpenHyps& open, int label, const std::string& path,
                           const char* where) {
    if (open.count(label))
      fail("DischargeViolation", path,
           "label " + std::to_string(label) + " is open in the " + where +
               " premise and cannot be discharged there");
  }

  static void check_fresh(const OpenHyps& open, const std::string& eigen,
                          const FormulaSet& exempt, const std::string& path) {
    for (const auto& [label, forms] : open)
      for (const auto& f : forms)
        if (occurs_constant(f, eigen) && !exempt.count(f))
          fail("FreshnessViolation", path,
               "eigenconstant '" + eigen + "' occurs in open hypothesis '" + render(f) + "'");
  }

  const Formula& need(const FormulaPtr& f, Conn kind, const std::string& path,
                      const std::string& what) const {
    if (!f || f->kind != kind) fail("RuleMismatch", path, what);
    return *f;
  }

  void need_equal(const FormulaPtr& got, const FormulaPtr& want, const std::string& path,
                  const std::string& what) const {
    if (!equal(got, want))
      fail("RuleMismatch", path, what + ": expected '" + render(want) + "', got '" + render(got) + "'");
  }

  // Template shape policing for the identity rules.
  void check_template(const FormulaPtr& tmpl, const std::string& var, bool allow_negated,
                      const std::string& path) const {
    if (!tmpl) fail("PreconditionViolation", path, "rule requires a template");
    if (var.empty()) fail("PreconditionViolation", path, "rule requires a template variable");
    for (const auto& v : free_vars(tmpl))
      if (v != var)
        fail("TemplateViolation", path, "template has a stray free variable '" + v + "'");
    const Formula* base = tmpl.get();
    bool negated = false;
    if (base->kind == Conn::Neg) {
      negated = true;
      base = base->left.get();
    }
    if (negated && !allow_negated)
      fail("TemplateViolation", path, "negated templates are not admissible for this rule");
    switch (base->kind) {
      case Conn::Atom:
      case Conn::Id:
        return;
      case Conn::Def:
        if (mode == CheckMode::Strict)
          fail("ModeViolation", path,
               "definedness templates are only admitted in permissive mode");
        return;
      default:
        fail("TemplateViolation", path, "template must be a possibly negated atom");
    }
  }

  void check_eigen(const std::string& eigen, const std::string& path) const {
    if (eigen.empty()) fail("PreconditionViolation", path, "rule requires an eigenconstant");
    if (!sig.has_constant(eigen) && !is_minted_constant(eigen))
      fail("PreconditionViolation", path,
           "eigenconstant '" + eigen + "' is neither declared nor minted");
  }

  OpenHyps visit(const DerivationPtr& d, const std::string& path) {
    if (!d) fail("PreconditionViolation", path, "missing derivation node");
    if (!d->conclusion) fail("PreconditionViolation", path, "missing conclusion");
    try {
      check_sentence(sig, d->conclusion);
    } catch (const ParseError& e) {
      fail("PreconditionViolation", path, e.what());
    }

    const Rule r = d->rule;
    if (rule_is_implication(r) && sig.logic != Logic::FN4)
      fail("PreconditionViolation", path,
           std::string(rule_name(r)) + " requires the implication fragment (FN4)");

    // Attribute policing: each rule takes exactly its own attributes.
    if (r == Rule::Hyp) {
      if (d->label < 1) fail("PreconditionViolation", path, "hypothesis label must be >= 1");
    } else if (d->label != 0) {
      fail("PreconditionViolation", path, "only hypotheses carry a label");
    }
    if (rule_discharges(r)) {
      if (!d->discharge) fail("PreconditionViolation", path, "rule requires a discharge label");
      if (*d->discharge < 1) fail("PreconditionViolation", path, "discharge label must be >= 1");
    } else if (d->discharge) {
      fail("PreconditionViolation", path, "rule does not discharge hypotheses");
    }
    if (rule_has_eigen(r)) {
      check_eigen(d->eigen, path);
    } else if (!d->eigen.empty()) {
      fail("PreconditionViolation", path, "rule does not take an eigenconstant");
    }
    if (!rule_has_template(r) && (d->tmpl || !d->var.empty()))
      fail("PreconditionViolation", path, "rule does not take a template");
    if (r == Rule::DefI) {
      if (!d->index) fail("PreconditionViolation", path, "rule requires an argument index");
    } else if (d->index) {
      fail("PreconditionViolation", path, "rule does not take an argument index");
    }

    if (d->premises.size() != premise_count(r))
      fail("RuleMismatch", path,
           std::string(rule_name(r)) + " takes " + std::to_string(premise_count(r)) +
               " premises, got " + std::to_string(d->premises.size()));

    std::vector<OpenHyps> open;
    open.reserve(d->premises.size());
    for (size_t i = 0; i < d->premises.size(); ++i)
      open.push_back(visit(d->premises[i], child(path, i)));
    auto concl_of = [&](size_t i) { return d->premises[i]->conclusion; };
    const FormulaPtr& concl = d->conclusion;

    OpenHyps out;
    switch (r) {
      case Rule::Hyp:
        out[d->label].insert(concl);
        return out;

      case Rule::AndI: {
        const Formula& c = need(concl, Conn::And, path, "conclusion must be a conjunction");
        need_equal(concl_of(0), c.left, path, "left conjunct");
        need_equal(concl_of(1), c.right, path, "right conjunct");
        break;
      }
      case Rule::AndE_L: {
        const Formula& p = need(concl_of(0), Conn::And, path, "premise must be a conjunction");
        need_equal(concl, p.left, path, "conclusion");
        break;
      }
      case Rule::AndE_R: {
        const Formula& p = need(concl_of(0), Conn::And, path, "premise must be a conjunction");
        need_equal(concl, p.right, path, "conclusion");
        break;
      }

      case Rule::OrI_L: {
        const Formula& c = need(concl, Conn::Or, path, "conclusion must be a disjunction");
        need_equal(concl_of(0), c.left, path, "left disjunct");
        break;
      }
      case Rule::OrI_R: {
        const Formula& c = need(concl, Conn::Or, path, "conclusion must be a disjunction");
        need_equal(concl_of(0), c.right, path, "right disjunct");
        break;
      }
      case Rule::OrE: {
        const Formula& p = need(concl_of(0), Conn::Or, path, "major premise must be a disjunction");
        need_equal(concl_of(1), concl, path, "first case conclusion");
        need_equal(concl_of(2), concl, path, "second case conclusion");
        forbid_label(open[0], *d->discharge, path, "major");
        discharge(open[1], *d->discharge, {p.left}, path);
        discharge(open[2], *d->discharge, {p.right}, path);
        break;
      }

      case Rule::NegAndI_L: {
        const Formula& c = need(concl, Conn::Neg, path, "conclusion must be negated");
        const Formula& a = need(c.left, Conn::And, path, "conclusion must negate a conjunction");
        need_equal(concl_of(0), mk_neg(a.left), path, "premise");
        break;
      }
      case Rule::NegAndI_R: {
        const Formula& c = need(concl, Conn::Neg, path, "conclusion must be negated");
        const Formula& a = need(c.left, Conn::And, path, "conclusion must negate a conjunction");
        need_equal(concl_of(0), mk_neg(a.right), path, "premise");
        break;
      }
      case Rule::NegAndE: {
        const Formula& p = need(concl_of(0), Conn::Neg, path, "major premise must be negated");
        const Formula& a = need(p.left, Conn::And, path, "major premise must negate a conjunction");
        need_equal(concl_of(1), concl, path, "first case conclusion");
        need_equal(concl_of(2), concl, path, "second case conclusion");
        forbid_label(open[0], *d->discharge, path, "major");
        discharge(open[1], *d->discharge, {mk_neg(a.left)}, path);
        discharge(open[2], *d->discharge, {mk_neg(a.right)}, path);
        break;
      }

      case Rule::NegOrI: {
        const Formula& c = need(concl, Conn::Neg, path, "conclusion must be negated");
        const Formula& o = need(c.left, Conn::Or, path, "conclusion must negate a disjunction");
        need_equal(concl_of(0), mk_neg(o.left), path, "first premise");
        need_equal(concl_of(1), mk_neg(o.right), path, "second premise");
        break;
      }
      case Rule::NegOrE_L: {
        const Formula& p = need(concl_of(0), Conn::Neg, path, "premise must be negated");
        const Formula& o = need(p.left, Conn::Or, path, "premise must negate a disjunction");
        need_equal(concl, mk_neg(o.left), path, "conclusion");
        break;
      }
      case Rule::NegOrE_R: {
        const Formula& p = need(concl_of(0), Conn::Neg, path, "premise must be negated");
        const Formula& o = need(p.left, Conn::Or, path, "premise must negate a disjunction");
        need_equal(concl, mk_neg(o.right), path, "conclusion");
        break;
      }

      case Rule::DNI: {
        const Formula& c = need(concl, Conn::Neg, path, "conclusion must be doubly negated");
        const Formula& i = need(c.left, Conn::Neg, path, "conclusion must be doubly negated");
        need_equal(concl_of(0), i.left, path, "premise");
        break;
      }
      case Rule::DNE: {
        const Formula& p = need(concl_of(0), Conn::Neg, path, "premise must be doubly negated");
        const Formula& i = need(p.left, Conn::Neg, path, "premise must be doubly negated");
        need_equal(concl, i.left, path, "conclusion");
        break;
      }

      case Rule::DefI: {
        const Formula* core = concl_of(0).get();
        if (core->kind == Conn::Neg) core = core->left.get();
        if (core->kind != Conn::Atom && core->kind != Conn::Id)
          fail("RuleMismatch", path,
               "premise must be a possibly negated predicate or identity atom");
        const int i = *d->index;
        if (i < 1 || static_cast<size_t>(i) > core->terms.size())
          fail("PreconditionViolation", path,
               "argument index " + std::to_string(i) + " is out of range");
        need_equal(concl, mk_def(core->terms[static_cast<size_t>(i) - 1]), path, "conclusion");
        break;
      }
      case Rule::PEX_D: {
        const Formula& p0 = need(concl_of(0), Conn::Def, path,
                                 "first premise must be a definedness claim");
        const Formula& p1 = need(concl_of(1), Conn::Neg, path,
                                 "second premise must be a negated definedness claim");
        const Formula& p1d = need(p1.left, Conn::Def, path,
                                  "second premise must be a negated definedness claim");
        if (!(p0.terms[0] == p1d.terms[0]))
          fail("RuleMismatch", path, "the two premises must concern the same term");
        break;  // conclusion is arbitrary
      }
      case Rule::PEM_D: {
        const Formula& c = need(concl, Conn::Or, path,
                                "conclusion must be 'D(t) | ~D(t)' for some term t");
        const Formula& l = need(c.left, Conn::Def, path,
                                "conclusion must be 'D(t) | ~D(t)' for some term t");
        const Formula& rn = need(c.right, Conn::Neg, path,
                                 "conclusion must be 'D(t) | ~D(t)' for some term t");
        const Formula& rd = need(rn.left, Conn::Def, path,
                                 "conclusion must be 'D(t) | ~D(t)' for some term t");
        if (!(l.terms[0] == rd.terms[0]))
          fail("RuleMismatch", path, "both disjuncts must concern the same term");
        break;
      }

      case Rule::AllI_D: {
        const Formula& c = need(concl, Conn::Forall, path, "conclusion must be universal");
        const Term e = Term::constant(d->eigen);
        need_equal(concl_of(0), substitute(c.left, c.name, e), path, "premise");
        if (occurs_constant(concl, d->eigen))
          fail("FreshnessViolation", path,
               "eigenconstant '" + d->eigen + "' occurs in the conclusion");
        const FormulaPtr de = mk_def(e);
        discharge(open[0], *d->discharge, {de}, path);
        check_fresh(open[0], d->eigen, {de}, path);
        break;
      }
      case Rule::NegExI_D: {
        const Formula& c = need(concl, Conn::Neg, path, "conclusion must be negated");
        const Formula& q = need(c.left, Conn::Exists, path,
                                "conclusion must negate an existential");
        const Term e = Term::constant(d->eigen);
        need_equal(concl_of(0), mk_neg(substitute(q.left, q.name, e)), path, "premise");
        if (occurs_constant(concl, d->eigen))
          fail("FreshnessViolation", path,
               "eigenconstant '" + d->eigen + "' occurs in the conclusion");
        const FormulaPtr de = mk_def(e);
        discharge(open[0], *d->discharge, {de}, path);
        check_fresh(open[0], d->eigen, {de}, path);
        break;
      }
      case Rule::AllE_D: {
        const Formula& p = need(concl_of(0), Conn::Forall, path,
                                "major premise must be universal");
        const Formula& dt = need(concl_of(1), Conn::Def, path,
                                 "minor premise must be a definedness claim");
        need_equal(concl, substitute(p.left, p.name, dt.terms[0]), path, "conclusion");
        break;
      }
      case Rule::ExI_D: {
        const Formula& c = need(concl, Conn::Exists, path, "conclusion must be existential");
        const Formula& dt = need(concl_of(1), Conn::Def, path,
                                 "minor premise must be a definedness claim");
        need_equal(concl_of(0), substitute(c.left, c.name, dt.terms[0]), path, "premise");
        break;
      }
      case Rule::NegAllI_D: {
        const Formula& c = need(concl, Conn::Neg, path, "conclusion must be negated");
        const Formula& q = need(c.left, Conn::Forall, path,
                                "conclusion must negate a universal");
        const Formula& dt = need(concl_of(1), Conn::Def, path,
                                 "minor premise must be a definedness claim");
        need_equal(concl_of(0), mk_neg(substitute(q.left, q.name, dt.terms[0])), path, "premise");
        break;
      }
      case Rule::NegExE_D: {
        const Formula& p = need(concl_of(0), Conn::Neg, path, "major premise must be negated");
        const Formula& q = need(p.left, Conn::Exists, path,
                                "major premise must negate an existential");
        const Formula& dt = need(concl_of(1), Conn::Def, path,
                                 "minor premise must be a definedness claim");
        need_equal(concl, mk_neg(substitute(q.left, q.name, dt.terms[0])), path, "conclusion");
        break;
      }
      case Rule::ExE_D: {
        const Formula& p = need(concl_of(0), Conn::Exists, path,
                                "major premise must be existential");
        need_equal(concl_of(1), concl, path, "minor conclusion");
        const Term e = Term::constant(d->eigen);
        if (occurs_constant(concl_of(0), d->eigen))
          fail("FreshnessViolation", path,
               "eigenconstant '" + d->eigen + "' occurs in the major premise");
        if (occurs_constant(concl, d->eigen))
          fail("FreshnessViolation", path,
               "eigenconstant '" + d->eigen + "' occurs in the conclusion");
        const FormulaSet allowed = {substitute(p.left, p.name, e), mk_def(e)};
        forbid_label(open[0], *d->discharge, path, "major");
        discharge(open[1], *d->discharge, allowed, path);
        check_fresh(open[1], d->eigen, allowed, path);
        break;
      }
      case Rule::NegAllE_D: {
        const Formula& p = need(concl_of(0), Conn::Neg, path, "major premise must be negated");
        const Formula& q = need(p.left, Conn::Forall, path,
                                "major premise must negate a universal");
        need_equal(concl_of(1), concl, path, "minor conclusion");
        const Term e = Term::constant(d->eigen);
        if (occurs_constant(concl_of(0), d->eigen))
          fail("FreshnessViolation", path,
               "eigenconstant '" + d->eigen + "' occurs in the major premise");
        if (occurs_constant(concl, d->eigen))
          fail("FreshnessViolation", path,
               "eigenconstant '" + d->eigen + "' occurs in the conclusion");
        const FormulaSet allowed = {mk_neg(substitute(q.left, q.name, e)), mk_def(e)};
        forbid_label(open[0], *d->discharge, path, "major");
        discharge(open[1], *d->discharge, allowed, path);
        check_fresh(open[1], d->eigen, allowed, path);
        break;
      }

      case Rule::EqI: {
        const Formula& p = need(concl_of(0), Conn::Def, path,
                                "premise must be a definedness claim");
        need_equal(concl, mk_id(p.terms[0], p.terms[0]), path, "conclusion");
        break;
      }
      case Rule::EqE: {
        check_template(d->tmpl, d->var, /*allow_negated=*/true, path);
        const Formula& id = need(concl_of(1), Conn::Id, path,
                                 "second premise must be an identity");
        need_equal(concl_of(0), substitute(d->tmpl, d->var, id.terms[0]), path,
                   "first premise");
        need_equal(concl, substitute(d->tmpl, d->var, id.terms[1]), path, "conclusion");
        break;
      }
      case Rule::NeqI: {
        check_template(d->tmpl, d->var, /*allow_negated=*/false, path);
        if (!x_free_in_all_subformulas(d->tmpl, d->var))
          fail("TemplateViolation", path,
               "template variable '" + d->var + "' must occur in the template");
        const Formula& c = need(concl, Conn::Neg, path, "conclusion must be a negated identity");
        const Formula& id = need(c.left, Conn::Id, path,
                                 "conclusion must be a negated identity");
        need_equal(concl_of(0), substitute(d->tmpl, d->var, id.terms[0]), path,
                   "first premise");
        need_equal(concl_of(1), mk_neg(substitute(d->tmpl, d->var, id.terms[1])), path,
                   "second premise");
        break;
      }

      case Rule::ImpI: {
        const Formula& c = need(concl, Conn::Imp, path, "conclusion must be an implication");
        need_equal(concl_of(0), c.right, path, "premise");
        discharge(open[0], *d->discharge, {c.left}, path);
        break;
      }
      case Rule::ImpE: {
        const Formula& p = need(concl_of(0), Conn::Imp, path,
                                "major premise must be an implication");
        need_equal(concl_of(1), p.left, path, "minor premise");
        need_equal(concl, p.right, path, "conclusion");
        break;
      }
      case Rule::NegImpI: {
        const Formula& c = need(concl, Conn::Neg, path, "conclusion must be negated");
        const Formula& i = need(c.left, Conn::Imp, path,
                                "conclusion must negate an implication");
        need_equal(concl_of(0), i.left, path, "first premise");
        need_equal(concl_of(1), mk_neg(i.right), path, "second premise");
        break;
      }
      case Rule::NegImpE_L: {
        const Formula& p = need(concl_of(0), Conn::Neg, path, "premise must be negated");
        const Formula& i = need(p.left, Conn::Imp, path,
                                "premise must negate an implication");
        need_equal(concl, i.left, path, "conclusion");
        break;
      }
      case Rule::NegImpE_R: {
        const Formula& p = need(concl_of(0), Conn::Neg, path, "premise must be negated");
        const Formula& i = need(p.left, Conn::Imp, path,
                                "premise must negate an implication");
        need_equal(concl, mk_neg(i.right), path, "conclusion");
        break;
      }
    }

    for (const auto& o : open) merge(out, o);
    return out;
  }
};

}  // namespace

const char* rule_name(Rule r) {
  for (const auto& [rule, name] : kRuleNames)
    if (rule == r) return name;
  return "?";
}

std::optional<Rule> rule_from_name(const std::string& name) {
  for (const auto& [rule, n] : kRuleNames)
    if (name == n) return rule;
  return std::nullopt;
}

DerivationPtr hyp(FormulaPtr conclusion, int label) {
  auto d = std::make_shared<Derivation>();
  d->rule = Rule::Hyp;
  d->conclusion = std::move(conclusion);
  d->label = label;
  return d;
}

DerivationPtr node(Rule rule, FormulaPtr conclusion, std::vector<DerivationPtr> premises) {
  auto d = std::make_shared<Derivation>();
  d->rule = rule;
  d->conclusion = std::move(conclusion);
  d->premises = std::move(premises);
  return d;
}

std::string check_error_to_json(const CheckError& e) {
  json out;
  out["error"] = {{"kind", e.kind}, {"path", e.path}, {"message", e.message}};
  return out.dump(2) + "\n";
}

std::string render_sequent(const CheckedSequent& s) {
  std::string out;
  bool first = true;
  for (const auto& a : s.assumptions) {
    if (!first) out += ", ";
    out += render(a);
    first = false;
  }
  if (!s.assumptions.empty()) out += " ";
  out += "⊢ " + render(s.conclusion);
  return out;
}

CheckedSequent check(const Signature& sig, const DerivationPtr& d, CheckMode mode) {
  Checker checker{sig, mode};
  OpenHyps open = checker.visit(d, "");
  CheckedSequent s;
  s.conclusion = d->conclusion;
  for (const auto& [label, forms] : open) s.assumptions.insert(forms.begin(), forms.end());
  return s;
}

// ---------------------------------------------------------------------------
// Derived rules

namespace {

bool contains_def(const FormulaPtr& f) {
  if (!f) return false;
  if (f->kind == Conn::Def) return true;
  return contains_def(f->left) || contains_def(f->right);
}

struct MacroCtx {
  const Signature& sig;
  std::string var;
  int next_label = 3;  // labels 1 and 2 are the advertised hypotheses
  int next_mint = 1;
  std::set<std::string> reserved;

  int fresh_label() { return next_label++; }

  std::string fresh_const() {
    for (;;) {
      std::string name = "e#" + std::to_string(next_mint++);
      if (!reserved.count(name)) return name;
    }
  }
};

void reserve_constants(MacroCtx& ctx, const FormulaPtr& tmpl, const Term& c1, const Term& c2) {
  for (const auto& name : constants_of(tmpl)) ctx.reserved.insert(name);
  ctx.reserved.insert(c1.name);
  ctx.reserved.insert(c2.name);
}

void require_ground(const Term& t, const char* which) {
  if (t.kind == TermKind::Variable)
    throw InvalidArgument(std::string("derived rule: ") + which + " must be a ground term");
}

// a & b, then project a back out: conclusion a, hypotheses of both subtrees.
DerivationPtr pad(const DerivationPtr& keep, const DerivationPtr& use) {
  auto conj = node(Rule::AndI, mk_and(keep->conclusion, use->conclusion), {keep, use});
  return node(Rule::AndE_L, keep->conclusion, {conj});
}

DerivationPtr def_i(const DerivationPtr& premise, int index, Term term) {
  auto d = std::make_shared<Derivation>();
  d->rule = Rule::DefI;
  d->conclusion = mk_def(std::move(term));
  d->premises = {premise};
  d->index = index;
  return d;
}

DerivationPtr with_discharge(Rule rule, FormulaPtr conclusion, std::vector<DerivationPtr> premises,
                             int label) {
  auto d = std::make_shared<Derivation>();
  d->rule = rule;
  d->conclusion = std::move(conclusion);
  d->premises = std::move(premises);
  d->discharge = label;
  return d;
}

DerivationPtr with_eigen(Rule rule, FormulaPtr conclusion, std::vector<DerivationPtr> premises,
                         const std::string& eigen, int label) {
  auto d = std::make_shared<Derivation>();
  d->rule = rule;
  d->conclusion = std::move(conclusion);
  d->premises = std::move(premises);
  d->eigen = eigen;
  d->discharge = label;
  return d;
}

DerivationPtr eq_e(FormulaPtr conclusion, const DerivationPtr& inst, const DerivationPtr& id,
                   FormulaPtr tmpl, const std::string& var) {
  auto d = std::make_shared<Derivation>();
  d->rule = Rule::EqE;
  d->conclusion = std::move(conclusion);
  d->premises = {inst, id};
  d->tmpl = std::move(tmpl);
  d->var = var;
  return d;
}

DerivationPtr neq_i(FormulaPtr conclusion, const DerivationPtr& pos, const DerivationPtr& neg,
                    FormulaPtr tmpl, const std::string& var) {
  auto d = std::make_shared<Derivation>();
  d->rule = Rule::NeqI;
  d->conclusion = std::move(conclusion);
  d->premises = {pos, neg};
  d->tmpl = std::move(tmpl);
  d->var = var;
  return d;
}

// From a node proving ~(a = b), derive ~(b = a) with the strict template
// 'x = b': its instance at b is 'b = b' (via definedness of b from the
// premise), and its negated instance at a is the premise itself.
DerivationPtr flip_neq(const DerivationPtr& n, const std::string& var) {
  const Formula& id = *n->conclusion->left;
  const Term& a = id.terms[0];
  const Term& b = id.terms[1];
  auto d_b = def_i(n, 2, b);
  auto b_eq_b = node(Rule::EqI, mk_id(b, b), {d_b});
  return neq_i(mk_neg(mk_id(b, a)), b_eq_b, n, mk_id(Term::variable(var), b), var);
}

// Builds a node proving subst(T, to) from src proving subst(T, from) and
// id proving 'from = to'.  Every case consumes both src and id, so the
// final open hypotheses are exactly those of the two inputs.
DerivationPtr eq_rewrite(MacroCtx& ctx, const FormulaPtr& T, const Term& from, const Term& to,
                         const DerivationPtr& src, const DerivationPtr& id) {
  const std::string& x = ctx.var;
  auto inst = [&](const FormulaPtr& f, const Term& t) { return substitute(f, x, t); };

  if (!free_vars(T).count(x)) return pad(src, id);

  switch (T->kind) {
    case Conn::Atom:
    case Conn::Id:
      return eq_e(inst(T, to), src, id, T, x);
    case Conn::Def: {
      // D(to) follows from the identity itself; keep src in the hypotheses.
      auto d_to = def_i(id, 2, to);
      return pad(d_to, src);
    }
    case Conn::Neg: {
      const FormulaPtr& B = T->left;
      switch (B->kind) {
        case Conn::Atom:
        case Conn::Id:
          return eq_e(inst(T, to), src, id, T, x);
        case Conn::Def: {
          // The identity makes 'from' defined, clashing with src: ~D(from).
          auto d_from = def_i(id, 1, from);
          return node(Rule::PEX_D, inst(T, to), {d_from, src});
        }
        case Conn::Neg: {
          auto stripped = node(Rule::DNE, inst(B->left, from), {src});
          auto moved = eq_rewrite(ctx, B->left, from, to, stripped, id);
          return node(Rule::DNI, inst(T, to), {moved});
        }
        case Conn::And: {
          const FormulaPtr np = mk_neg(B->left), nq = mk_neg(B->right);
          const int label = ctx.fresh_label();
          auto b1 = node(Rule::NegAndI_L, inst(T, to),
                         {eq_rewrite(ctx, np, from, to, hyp(inst(np, from), label), id)});
          auto b2 = node(Rule::NegAndI_R, inst(T, to),
                         {eq_rewrite(ctx, nq, from, to, hyp(inst(nq, from), label), id)});
          return with_discharge(Rule::NegAndE, inst(T, to), {src, b1, b2}, label);
        }
        case Conn::Or: {
          const FormulaPtr np = mk_neg(B->left), nq = mk_neg(B->right);
          auto l = eq_rewrite(ctx, np, from, to, node(Rule::NegOrE_L, inst(np, from), {src}), id);
          auto r = eq_rewrite(ctx, nq, from, to, node(Rule::NegOrE_R, inst(nq, from), {src}), id);
          return node(Rule::NegOrI, inst(T, to), {l, r});
        }
        case Conn::Imp: {
          const FormulaPtr& P = B->left;
          const FormulaPtr nq = mk_neg(B->right);
          auto p = eq_rewrite(ctx, P, from, to, node(Rule::NegImpE_L, inst(P, from), {src}), id);
          auto q = eq_rewrite(ctx, nq, from, to, node(Rule::NegImpE_R, inst(nq, from), {src}), id);
          return node(Rule::NegImpI, inst(T, to), {p, q});
        }
        case Conn::Forall: {
          const std::string y = B->name;
          const Term e = Term::constant(ctx.fresh_const());
          const int label = ctx.fresh_label();
          const FormulaPtr body = mk_neg(substitute(B->left, y, e));
          auto hyp_b = hyp(inst(body, from), label);
          auto hyp_d = hyp(mk_def(e), label);
          auto moved = eq_rewrite(ctx, body, from, to, hyp_b, id);
          auto intro = node(Rule::NegAllI_D, inst(T, to), {moved, hyp_d});
          return with_eigen(Rule::NegAllE_D, inst(T, to), {src, intro}, e.name, label);
        }
        case Conn::Exists: {
          const std::string y = B->name;
          const Term e = Term::constant(ctx.fresh_const());
          const int label = ctx.fresh_label();
          const FormulaPtr body = mk_neg(substitute(B->left, y, e));
          auto hyp_d = hyp(mk_def(e), label);
          auto stripped = node(Rule::NegExE_D, inst(body, from), {src, hyp_d});
          auto moved = eq_rewrite(ctx, body, from, to, stripped, id);
          return with_eigen(Rule::NegExI_D, inst(T, to), {moved}, e.name, label);
        }
      }
      break;
    }
    case Conn::And: {
      auto l = eq_rewrite(ctx, T->left, from, to,
                          node(Rule::AndE_L, inst(T->left, from), {src}), id);
      auto r = eq_rewrite(ctx, T->right, from, to,
                          node(Rule::AndE_R, inst(T->right, from), {src}), id);
      return node(Rule::AndI, inst(T, to), {l, r});
    }
    case Conn::Or: {
      const int label = ctx.fresh_label();
      auto b1 = node(Rule::OrI_L, inst(T, to),
                     {eq_rewrite(ctx, T->left, from, to, hyp(inst(T->left, from), label), id)});
      auto b2 = node(Rule::OrI_R, inst(T, to),
                     {eq_rewrite(ctx, T->right, from, to, hyp(inst(T->right, from), label), id)});
      return with_discharge(Rule::OrE, inst(T, to), {src, b1, b2}, label);
    }
    case Conn::Imp: {
      // Move the antecedent back with the reversed identity, apply src,
      // move the consequent forward.
      auto d_from = def_i(id, 1, from);
      auto refl = node(Rule::EqI, mk_id(from, from), {d_from});
      auto id_rev =
          eq_e(mk_id(to, from), refl, id, mk_id(Term::variable(ctx.var), from), ctx.var);
      const int label = ctx.fresh_label();
      auto hyp_p = hyp(inst(T->left, to), label);
      auto p_from = eq_rewrite(ctx, T->left, to, from, hyp_p, id_rev);
      auto q_from = node(Rule::ImpE, inst(T->right, from), {src, p_from});
      auto q_to = eq_rewrite(ctx, T->right, from, to, q_from, id);
      return with_discharge(Rule::ImpI, inst(T, to), {q_to}, label);
    }
    case Conn::Forall: {
      const std::string y = T->name;
      const Term e = Term::constant(ctx.fresh_const());
      const int label = ctx.fresh_label();
      const FormulaPtr body = substitute(T->left, y, e);
      auto hyp_d = hyp(mk_def(e), label);
      auto stripped = node(Rule::AllE_D, inst(body, from), {src, hyp_d});
      auto moved = eq_rewrite(ctx, body, from, to, stripped, id);
      return with_eigen(Rule::AllI_D, inst(T, to), {moved}, e.name, label);
    }
    case Conn::Exists: {
      const std::string y = T->name;
      const Term e = Term::constant(ctx.fresh_const());
      const int label = ctx.fresh_label();
      const FormulaPtr body = substitute(T->left, y, e);
      auto hyp_b = hyp(inst(body, from), label);
      auto hyp_d = hyp(mk_def(e), label);
      auto moved = eq_rewrite(ctx, body, from, to, hyp_b, id);
      auto intro = node(Rule::ExI_D, inst(T, to), {moved, hyp_d});
      return with_eigen(Rule::ExE_D, inst(T, to), {src, intro}, e.name, label);
    }
  }
  throw InvalidArgument("derived rule: unsupported template shape");
}

// Builds a node proving ~(a1 = a2) from pos proving subst(T, a1) and neg
// proving ~subst(T, a2).  Requires ctx.var free in every subformula of T.
DerivationPtr neq_build(MacroCtx& ctx, const FormulaPtr& T, const Term& a1, const Term& a2,
                        const DerivationPtr& pos, const DerivationPtr& neg) {
  const std::string& x = ctx.var;
  auto inst = [&](const FormulaPtr& f, const Term& t) { return substitute(f, x, t); };
  const FormulaPtr goal = mk_neg(mk_id(a1, a2));

  switch (T->kind) {
    case Conn::Atom:
    case Conn::Id:
      return neq_i(goal, pos, neg, T, x);
    case Conn::Neg: {
      // pos: ~B(a1), neg: ~~B(a2).  Recurse with the roles swapped, then flip.
      auto b_pos = node(Rule::DNE, inst(T->left, a2), {neg});
      auto inner = neq_build(ctx, T->left, a2, a1, b_pos, pos);
      return flip_neq(inner, x);
    }
    case Conn::And: {
      const int label = ctx.fresh_label();
      const FormulaPtr np = mk_neg(inst(T->left, a2)), nq = mk_neg(inst(T->right, a2));
      auto b1 = neq_build(ctx, T->left, a1, a2,
                          node(Rule::AndE_L, inst(T->left, a1), {pos}), hyp(np, label));
      auto b2 = neq_build(ctx, T->right, a1, a2,
                          node(Rule::AndE_R, inst(T->right, a1), {pos}), hyp(nq, label));
      return with_discharge(Rule::NegAndE, goal, {neg, b1, b2}, label);
    }
    case Conn::Or: {
      const int label = ctx.fresh_label();
      auto b1 = neq_build(ctx, T->left, a1, a2, hyp(inst(T->left, a1), label),
                          node(Rule::NegOrE_L, mk_neg(inst(T->left, a2)), {neg}));
      auto b2 = neq_build(ctx, T->right, a1, a2, hyp(inst(T->right, a1), label),
                          node(Rule::NegOrE_R, mk_neg(inst(T->right, a2)), {neg}));
      return with_discharge(Rule::OrE, goal, {pos, b1, b2}, label);
    }
    case Conn::Forall: {
      const std::string y = T->name;
      const Term e = Term::constant(ctx.fresh_const());
      const int label = ctx.fresh_label();
      const FormulaPtr body = substitute(T->left, y, e);
      auto hyp_nb = hyp(mk_neg(inst(body, a2)), label);
      auto hyp_d = hyp(mk_def(e), label);
      auto b_pos = node(Rule::AllE_D, inst(body, a1), {pos, hyp_d});
      auto inner = neq_build(ctx, body, a1, a2, b_pos, hyp_nb);
      return with_eigen(Rule::NegAllE_D, goal, {neg, inner}, e.name, label);
    }
    case Conn::Exists: {
      const std::string y = T->name;
      const Term e = Term::constant(ctx.fresh_const());
      const int label = ctx.fresh_label();
      const FormulaPtr body = substitute(T->left, y, e);
      auto hyp_b = hyp(inst(body, a1), label);
      auto hyp_d = hyp(mk_def(e), label);
      auto b_neg = node(Rule::NegExE_D, mk_neg(inst(body, a2)), {neg, hyp_d});
      auto inner = neq_build(ctx, body, a1, a2, hyp_b, b_neg);
      return with_eigen(Rule::ExE_D, goal, {pos, inner}, e.name, label);
    }
    default:
      throw InvalidArgument("derived rule: unsupported template shape");
  }
}

void check_macro_template(const FormulaPtr& tmpl, const std::string& var) {
  if (!tmpl) throw InvalidArgument("derived rule: missing template");
  if (var.empty()) throw InvalidArgument("derived rule: missing template variable");
  for (const auto& v : free_vars(tmpl))
    if (v != var)
      throw InvalidArgument("derived rule: template has a stray free variable '" + v + "'");
}

}  // namespace

DerivationPtr gen_eq_e(const Signature& sig, const FormulaPtr& tmpl, const std::string& var,
                       const Term& c1, const Term& c2) {
  check_macro_template(tmpl, var);
  require_ground(c1, "the first term");
  require_ground(c2, "the second term");
  if (contains_imp(tmpl) && sig.logic != Logic::FN4)
    throw InvalidArgument("derived rule: implication templates need an FN4 signature");
  MacroCtx ctx{sig, var, 3, 1, {}};
  reserve_constants(ctx, tmpl, c1, c2);
  auto src = hyp(substitute(tmpl, var, c1), 1);
  auto id = hyp(mk_id(c1, c2), 2);
  return eq_rewrite(ctx, tmpl, c1, c2, src, id);
}

DerivationPtr gen_neq_i(const Signature& sig, const FormulaPtr& tmpl, const std::string& var,
                        const Term& c1, const Term& c2) {
  check_macro_template(tmpl, var);
  require_ground(c1, "the first term");
  require_ground(c2, "the second term");
  if (contains_imp(tmpl))
    throw InvalidArgument(
        "derived rule: implication templates make inequality introduction unsound");
  if (contains_def(tmpl))
    throw InvalidArgument(
        "derived rule: definedness templates make inequality introduction unsound");
  if (!x_free_in_all_subformulas(tmpl, var))
    throw InvalidArgument(
        "derived rule: the variable must be free in every subformula of the template");
  MacroCtx ctx{sig, var, 3, 1, {}};
  reserve_constants(ctx, tmpl, c1, c2);
  auto pos = hyp(substitute(tmpl, var, c1), 1);
  auto neg = hyp(mk_neg(substitute(tmpl, var, c2)), 2);
  return neq_build(ctx, tmpl, c1, c2, pos, neg);
}

DerivationPtr sym_neq(const Signature& sig, const Term& c1, const Term& c2) {
  (void)sig;
  require_ground(c1, "the first term");
  require_ground(c2, "the second term");
  return flip_neq(hyp(mk_neg(mk_id(c2, c1)), 1), "x");
}

// ---------------------------------------------------------------------------
// JSON

namespace {

DerivationPtr node_from_json(const Signature& sig, const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError("proof: " + where + " must be an object");
  for (const auto& [k, _] : j.items())
    if (k != "rule" && k != "conclusion" && k != "premises" && k != "label" && k != "attrs")
      throw ParseError("proof: unknown key '" + k + "' at " + where);
  if (!j.contains("rule") || !j["rule"].is_string())
    throw ParseError("proof: missing rule name at " + where);
  auto rule = rule_from_name(j["rule"].get<std::string>());
  if (!rule)
    throw ParseError("proof: unknown rule '" + j["rule"].get<std::string>() + "' at " + where);
  if (!j.contains("conclusion") || !j["conclusion"].is_string())
    throw ParseError("proof: missing conclusion at " + where);

  auto d = std::make_shared<Derivation>();
  d->rule = *rule;
  d->conclusion = parse_formula(sig, j["conclusion"].get<std::string>());

  if (j.contains("label")) {
    if (!j["label"].is_number_integer())
      throw ParseError("proof: label must be an integer at " + where);
    d->label = j["label"].get<int>();
  }

  if (j.contains("attrs")) {
    const json& a = j["attrs"];
    if (!a.is_object()) throw ParseError("proof: attrs must be an object at " + where);
    for (const auto& [k, _] : a.items())
      if (k != "discharge" && k != "template" && k != "var" && k != "eigen" && k != "index")
        throw ParseError("proof: unknown attribute '" + k + "' at " + where);
    if (a.contains("discharge")) {
      const json& dis = a["discharge"];
      if (!dis.is_array() || dis.size() != 1 || !dis[0].is_number_integer())
        throw ParseError("proof: discharge must be an array of one integer label at " + where);
      d->discharge = dis[0].get<int>();
    }
    if (a.contains("var")) {
      if (!a["var"].is_string()) throw ParseError("proof: var must be a string at " + where);
      d->var = a["var"].get<std::string>();
    }
    if (a.contains("template")) {
      if (!a["template"].is_string())
        throw ParseError("proof: template must be a string at " + where);
      if (d->var.empty())
        throw ParseError("proof: template requires a 'var' attribute at " + where);
      d->tmpl = parse_formula(sig, a["template"].get<std::string>(), {d->var});
    }
    if (a.contains("eigen")) {
      if (!a["eigen"].is_string()) throw ParseError("proof: eigen must be a string at " + where);
      d->eigen = a["eigen"].get<std::string>();
    }
    if (a.contains("index")) {
      if (!a["index"].is_number_integer())
        throw ParseError("proof: index must be an integer at " + where);
      d->index = a["index"].get<int>();
    }
  }

  if (j.contains("premises")) {
    if (!j["premises"].is_array())
      throw ParseError("proof: premises must be an array at " + where);
    size_t i = 0;
    for (const auto& p : j["premises"]) {
      d->premises.push_back(node_from_json(sig, p, where + ".premises[" + std::to_string(i) + "]"));
      ++i;
    }
  }
  return d;
}

json node_to_json(const DerivationPtr& d) {
  json out;
  out["rule"] = rule_name(d->rule);
  out["conclusion"] = render(d->conclusion);
  if (d->rule == Rule::Hyp) out["label"] = d->label;
  json attrs = json::object();
  if (d->discharge) attrs["discharge"] = json::array({*d->discharge});
  if (d->tmpl) attrs["template"] = render(d->tmpl);
  if (!d->var.empty()) attrs["var"] = d->var;
  if (!d->eigen.empty()) attrs["eigen"] = d->eigen;
  if (d->index) attrs["index"] = *d->index;
  if (!attrs.empty()) out["attrs"] = attrs;
  if (!d->premises.empty()) {
    out["premises"] = json::array();
    for (const auto& p : d->premises) out["premises"].push_back(node_to_json(p));
  }
  return out;
}

}  // namespace

DerivationPtr proof_from_json(const Signature& sig, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("proof: invalid JSON: ") + e.what());
  }
  return node_from_json(sig, j, "root");
}

std::string proof_to_json(const DerivationPtr& d) {
  return node_to_json(d).dump(2) + "\n";
}

}  // namespace ffde
