// Acceptance suite: seven end-to-end checks over the engine, one line each.
//
// Every expectation is exact (bit-for-bit on values, byte-for-byte on golden
// files); each criterion also carries a wall-clock budget, pinned below, and
// fails when exceeded.
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ffde/kripke.hpp"
#include "ffde/oracle.hpp"
#include "ffde/proof.hpp"
#include "ffde/search.hpp"
#include "ffde/syntax.hpp"
#include "ffde/valuation.hpp"
#include "test_util.hpp"
#include "json.hpp"

using namespace ffde;
using nlohmann::json;

namespace {

struct Checker {
  int checks = 0;
  std::string first_failure;
  void expect(bool cond, const std::string& label) {
    ++checks;
    if (!cond && first_failure.empty()) first_failure = label;
  }
  bool ok() const { return first_failure.empty(); }
};

Signature load_sig(const std::string& name) {
  return signature_from_json(read_file(fixture_path(name)));
}

std::pair<Signature, KripkeModel> load_pair(const std::string& sig_name,
                                            const std::string& model_name) {
  Signature sig = load_sig(sig_name);
  KripkeModel m = model_from_json(sig, read_file(fixture_path(model_name)));
  return {std::move(sig), std::move(m)};
}

std::string fv(FourValue v) { return four_value_name(v); }

// Replaces every occurrence of the named constant by a (free) variable; the
// inverse of substitute, used to build open templates from sampled sentences.
FormulaPtr abstract_constant(const FormulaPtr& f, const std::string& cname,
                             const std::string& var) {
  auto at = [&](const Term& t) {
    if (t.kind == TermKind::Constant && t.name == cname) return Term::variable(var);
    return t;
  };
  switch (f->kind) {
    case Conn::Atom: {
      std::vector<Term> args;
      for (const auto& t : f->terms) args.push_back(at(t));
      return mk_atom(f->name, std::move(args));
    }
    case Conn::Id:
      return mk_id(at(f->terms[0]), at(f->terms[1]));
    case Conn::Def:
      return mk_def(at(f->terms[0]));
    case Conn::Neg:
      return mk_neg(abstract_constant(f->left, cname, var));
    case Conn::And:
      return mk_and(abstract_constant(f->left, cname, var),
                    abstract_constant(f->right, cname, var));
    case Conn::Or:
      return mk_or(abstract_constant(f->left, cname, var),
                   abstract_constant(f->right, cname, var));
    case Conn::Imp:
      return mk_imp(abstract_constant(f->left, cname, var),
                    abstract_constant(f->right, cname, var));
    case Conn::Forall:
      return mk_forall(f->name, abstract_constant(f->left, cname, var));
    case Conn::Exists:
      return mk_exists(f->name, abstract_constant(f->left, cname, var));
  }
  return f;
}

// ---------------------------------------------------------------------------
// 1. The four handbook models validate and every listed evaluation is exact.

Checker criterion_models() {
  Checker c;

  {
    auto [sig, m] = load_pair("sig-growth.json", "model-growth.json");
    c.expect(validate(sig, m).ok(), "growth model validates");
    auto f = [&](const char* t) { return parse_formula(sig, t); };
    c.expect(!eval(sig, m, f("P(c)"), "w1"), "growth: P(c) unsupported at w1");
    c.expect(eval(sig, m, f("P(c)"), "w2"), "growth: P(c) supported at w2");
    c.expect(fv(four_valued(sig, m, f("P(c)"), "w1")) == "N", "growth: P(c)@w1 = N");
    c.expect(fv(four_valued(sig, m, f("P(c)"), "w2")) == "T", "growth: P(c)@w2 = T");
    c.expect(fv(four_valued(sig, m, f("Q(c)"), "w1")) == "T", "growth: Q(c)@w1 = T");
    c.expect(fv(four_valued(sig, m, f("Q(c)"), "w2")) == "B", "growth: Q(c)@w2 = B");
    c.expect(fv(four_valued(sig, m, f("c = c"), "w1")) == "T", "growth: c=c@w1 = T");
    c.expect(fv(four_valued(sig, m, f("c = c"), "w2")) == "B", "growth: c=c@w2 = B");
  }

  {
    auto [sig, m] = load_pair("sig-constant-domain.json", "model-constant-domain.json");
    c.expect(validate(sig, m).ok(), "constant-domain model validates");
    const FormulaPtr a = parse_formula(sig, "forall x. (exists y. ~P(y)) | P(x)");
    const FormulaPtr b = parse_formula(sig, "(exists y. ~P(y)) | forall x. P(x)");
    c.expect(eval(sig, m, a, "w1"), "constant-domain: quantified disjunction holds at w1");
    c.expect(!eval(sig, m, b, "w1"), "constant-domain: distributed form fails at w1");
    c.expect(eval(sig, m, b, "w2"), "constant-domain: distributed form holds at w2");
    const auto cex = counterexample_stage(sig, m, {a}, b);
    c.expect(cex.has_value() && *cex == "w1", "constant-domain: counterexample stage is w1");
    c.expect(!counterexample_stage(sig, m, {b}, a).has_value(),
             "constant-domain: converse has no counterexample here");
  }

  {
    auto [sig, m] = load_pair("sig-defined-identity.json", "model-defined-identity.json");
    c.expect(validate(sig, m).ok(), "defined-identity model validates");
    auto f = [&](const char* t) { return parse_formula(sig, t); };
    c.expect(eval(sig, m, f("exists x. x = c"), "w1"), "defined-identity: witness exists");
    c.expect(eval(sig, m, f("~exists x. x = c"), "w1"),
             "defined-identity: negation also holds");
    c.expect(fv(four_valued(sig, m, f("exists x. x = c"), "w1")) == "B",
             "defined-identity: existence claim is a glut");
    c.expect(eval(sig, m, f("D(c)"), "w1"), "defined-identity: D(c) holds");
    c.expect(!eval(sig, m, f("~D(c)"), "w1"), "defined-identity: ~D(c) fails");
  }

  {
    auto [sig, m] = load_pair("sig-diversity-pair.json", "model-diversity-pair.json");
    c.expect(validate(sig, m).ok(), "diversity-pair model validates");
    auto v = [&](const char* t) { return fv(four_valued(sig, m, parse_formula(sig, t), "w1")); };
    c.expect(v("c1 = c2") == "N", "diversity-pair: c1=c2 = N");
    c.expect(v("c1 = c1") == "T", "diversity-pair: c1=c1 = T");
    c.expect(v("c2 = c2") == "B", "diversity-pair: c2=c2 = B");
    c.expect(v("P(c1)") == "T", "diversity-pair: P(c1) = T");
    c.expect(v("Q(c2)") == "B", "diversity-pair: Q(c2) = B");
    c.expect(v("Q(c1)") == "N", "diversity-pair: Q(c1) = N");
  }

  return c;
}

// ---------------------------------------------------------------------------
// 2. Proof fixtures and the generalized identity rules.

Checker criterion_proofs() {
  Checker c;
  const Signature sig = load_sig("sig-proofs.json");

  auto strict_sequent = [&](const char* file) {
    return render_sequent(check(sig, proof_from_json(sig, read_file(fixture_path(file))),
                                CheckMode::Strict));
  };
  c.expect(strict_sequent("forall-self-identity.json") == "⊢ forall x. x = x",
           "self-identity derivation");
  c.expect(strict_sequent("forall-self-identity-inverse.json") ==
               "D(c), forall x. x = x ⊢ c = c",
           "self-identity instance derivation");
  c.expect(strict_sequent("def-to-exists.json") == "D(c) ⊢ exists x. x = c",
           "definedness to existence");
  c.expect(strict_sequent("exists-to-def.json") == "exists x. x = c ⊢ D(c)",
           "existence to definedness");
  c.expect(strict_sequent("sym-neq.json") == "c2 != c1 ⊢ c1 != c2", "diversity symmetry");

  // The definedness-template derivation is rejected strictly, accepted
  // permissively, with the advertised sequent.
  const DerivationPtr gated =
      proof_from_json(sig, read_file(fixture_path("neg-exists-from-neg-def.json")));
  bool strict_rejected = false;
  std::string kind;
  try {
    check(sig, gated, CheckMode::Strict);
  } catch (const ProofError& e) {
    strict_rejected = true;
    kind = e.error().kind;
  }
  c.expect(strict_rejected && kind == "ModeViolation",
           "negated-existence derivation rejected in strict mode");
  c.expect(render_sequent(check(sig, gated, CheckMode::Permissive)) ==
               "~D(c) ⊢ ~exists x. x = c",
           "negated-existence derivation accepted permissively");

  // Generalized rewriting: every recursion case of the template builder.
  const Term c1 = Term::constant("c1"), c2 = Term::constant("c2");
  auto eq_case = [&](const Signature& s, const char* text) {
    const FormulaPtr tmpl = parse_formula(s, text, {"x"});
    const CheckedSequent seq = check(s, gen_eq_e(s, tmpl, "x", c1, c2), CheckMode::Strict);
    const bool good = seq.assumptions.size() == 2 &&
                      seq.assumptions.count(substitute(tmpl, "x", c1)) > 0 &&
                      seq.assumptions.count(mk_id(c1, c2)) > 0 &&
                      equal(seq.conclusion, substitute(tmpl, "x", c2));
    c.expect(good, std::string("rewrite case ") + text);
  };
  for (const char* t :
       {"P(x)", "x = c", "x = x", "D(x)", "~P(x)", "~(x = c)", "~D(x)", "~~P(x)",
        "P(x) & x = c", "P(x) | D(x)", "~(P(x) & x = c)", "~(P(x) | P(x))",
        "forall y. x = y", "exists y. y = x", "~forall y. P(x)", "~exists y. x = y"})
    eq_case(sig, t);
  Signature fn4 = sig;
  fn4.logic = Logic::FN4;
  eq_case(fn4, "P(x) -> D(x)");
  eq_case(fn4, "~(P(x) -> x = c)");

  auto neq_case = [&](const char* text) {
    const FormulaPtr tmpl = parse_formula(sig, text, {"x"});
    const CheckedSequent seq = check(sig, gen_neq_i(sig, tmpl, "x", c1, c2), CheckMode::Strict);
    const bool good = seq.assumptions.size() == 2 &&
                      seq.assumptions.count(substitute(tmpl, "x", c1)) > 0 &&
                      seq.assumptions.count(mk_neg(substitute(tmpl, "x", c2))) > 0 &&
                      equal(seq.conclusion, mk_neg(mk_id(c1, c2)));
    c.expect(good, std::string("diversity case ") + text);
  };
  for (const char* t : {"P(x)", "x = c", "~P(x)", "~~P(x)", "P(x) & x = c", "P(x) | x = c",
                        "forall y. x = y", "exists y. y = x", "~(P(x) & P(x))"})
    neq_case(t);

  c.expect(render_sequent(check(sig, sym_neq(sig, c1, c2), CheckMode::Strict)) ==
               "c2 != c1 ⊢ c1 != c2",
           "diversity symmetry macro");
  return c;
}

// ---------------------------------------------------------------------------
// 3. Persistence: exhaustive over a small cell, then randomized.

Checker criterion_persistence() {
  Checker c;
  const Signature sig =
      signature_from_json(R"({"logic":"ffde","constants":["c"],"predicates":{"P":1}})");

  // Pinned sentence family: a base layer (atoms over {x, c} plus single
  // binary combinations) under up to three prefix operators from
  // {~, forall x, exists x}; only the closed results are kept.
  const std::vector<std::string> bases = {
      "P(c)", "D(c)", "c = c", "P(x)", "D(x)", "x = x", "x = c",
      "P(x) & D(x)", "P(x) | D(x)", "P(x) & P(c)", "P(x) | P(c)",
      "x = c & P(x)", "x = c | D(x)", "D(c) & P(x)", "D(c) | P(x)",
      "P(c) & D(c)", "P(c) | D(c)"};
  std::map<std::string, FormulaPtr> family;
  std::vector<std::function<FormulaPtr(FormulaPtr)>> ops = {
      [](FormulaPtr f) { return mk_neg(std::move(f)); },
      [](FormulaPtr f) { return mk_forall("x", std::move(f)); },
      [](FormulaPtr f) { return mk_exists("x", std::move(f)); }};
  for (const auto& b : bases) {
    const FormulaPtr base = parse_formula(sig, b, {"x"});
    std::vector<FormulaPtr> layer = {base};
    for (int depth = 0; depth <= 3; ++depth) {
      for (const auto& f : layer)
        if (is_sentence(f)) family.emplace(render(f), f);
      if (depth == 3) break;
      std::vector<FormulaPtr> next;
      for (const auto& f : layer)
        for (const auto& op : ops) next.push_back(op(f));
      layer = std::move(next);
    }
  }

  std::uint64_t models = 0, sweeps = 0;
  std::string violation;
  enumerate_models(sig, Bounds{2, 2, true}, [&](const KripkeModel& m) {
    ++models;
    for (const auto& [text, f] : family) {
      ++sweeps;
      if (!is_persistent(sig, m, f)) {
        violation = text + " in " + model_to_json(m);
        return false;
      }
    }
    return true;
  });
  c.expect(violation.empty(), "exhaustive persistence: " + violation);
  c.expect(models > 0 && sweeps == models * family.size(), "exhaustive sweep completed");

  std::uint64_t random_checks = 0;
  for (std::uint64_t seed = 0; seed < 100 && violation.empty(); ++seed) {
    const KripkeModel m = random_model(sig, Bounds{3, 3, true}, seed);
    std::mt19937_64 rng(10000 + seed);
    for (int i = 0; i < 200; ++i) {
      const FormulaPtr f = random_sentence(sig, 3, rng);
      ++random_checks;
      if (!is_persistent(sig, m, f)) {
        violation = render(f) + " on random model seed " + std::to_string(seed);
        break;
      }
    }
  }
  c.expect(violation.empty(), "random persistence: " + violation);
  c.expect(random_checks == 20000 || !violation.empty(), "random sweep completed");
  std::fprintf(stderr, "    [persistence: %llu models x %zu sentences + %llu random checks]\n",
               static_cast<unsigned long long>(models), family.size(),
               static_cast<unsigned long long>(random_checks));
  return c;
}

// ---------------------------------------------------------------------------
// 4. Soundness fuzzing: strict clean, permissive caught with replayable
//    witnesses.

Checker criterion_fuzz() {
  Checker c;
  const Signature sig =
      signature_from_json(R"({"logic":"ffde","constants":["c","e"],"predicates":{"P":1}})");

  FuzzOptions opts;
  opts.iterations = 500;
  opts.seed = 42;
  opts.bounds = Bounds{2, 2, true};
  opts.max_depth = 5;

  opts.mode = CheckMode::Strict;
  const FuzzReport strict = fuzz_soundness(sig, opts);
  c.expect(strict.trees == 500, "strict run synthesized 500 derivations");
  c.expect(strict.violations.empty(), "strict mode produced zero soundness violations");

  opts.mode = CheckMode::Permissive;
  const FuzzReport perm = fuzz_soundness(sig, opts);
  c.expect(!perm.violations.empty(), "permissive mode produced at least one violation");
  for (const auto& v : perm.violations) {
    const DerivationPtr tree = proof_from_json(sig, v.proof_json);
    const CheckedSequent seq = check(sig, tree, CheckMode::Permissive);
    c.expect(render_sequent(seq) == v.sequent, "witness proof re-checks to the same sequent");
    const KripkeModel m = model_from_json(sig, v.model_json);
    c.expect(validate(sig, m).ok(), "witness model validates");
    bool premises_hold = true;
    for (const auto& a : seq.assumptions) premises_hold = premises_hold && eval(sig, m, a, v.stage);
    c.expect(premises_hold, "witness premises hold at the reported stage");
    c.expect(!eval(sig, m, seq.conclusion, v.stage), "witness conclusion fails at the stage");
  }
  std::fprintf(stderr,
               "    [fuzz: strict %llu/%llu accepted, permissive %llu accepted, %zu violations]\n",
               static_cast<unsigned long long>(strict.accepted),
               static_cast<unsigned long long>(strict.trees),
               static_cast<unsigned long long>(perm.accepted), perm.violations.size());
  return c;
}

// ---------------------------------------------------------------------------
// 5. Decision queries with golden countermodels and exhaustion counts.

Checker criterion_decide() {
  Checker c;

  auto gamma_of = [](const Signature& sig, const std::string& fixture) {
    const json arr = json::parse(read_file(fixture_path(fixture)));
    std::vector<FormulaPtr> out;
    for (const auto& s : arr) out.push_back(parse_formula(sig, s.get<std::string>()));
    return out;
  };
  auto model_bytes = [](const SearchVerdict& v) {
    return json::parse(verdict_to_json(v))["model"].dump(2) + "\n";
  };

  struct Query {
    const char* name;
    const char* sig;
    const char* gamma;      // nullptr for empty
    const char* goal;
    const char* golden;     // nullptr when exhaustion is expected
    std::uint64_t checked;  // pinned count for exhaustion queries
    bool fn4 = false;
  };
  const Query queries[] = {
      {"explosion", "sig-prop.json", "gamma-explosion.json", "q",
       "countermodel-explosion.json", 0},
      {"excluded middle", "sig-prop.json", nullptr, "p | ~p",
       "countermodel-excluded-middle.json", 0},
      {"constant domain", "sig-constant-domain.json", "gamma-constant-domain.json",
       "(exists y. ~P(y)) | forall x. P(x)", "countermodel-constant-domain.json", 0},
      {"negated existence", "sig-defined-identity.json", "gamma-neg-exists.json", "~D(c)",
       "countermodel-neg-exists-def.json", 0},
      {"definedness dilemma", "sig-defined-identity.json", nullptr, "D(c) | ~D(c)", nullptr,
       1959},
      {"modus ponens", "sig-prop.json", "gamma-fn4-mp.json", "q", nullptr, 69738, true},
  };

  for (const auto& qr : queries) {
    Signature sig = load_sig(qr.sig);
    if (qr.fn4) sig.logic = Logic::FN4;
    const std::vector<FormulaPtr> gamma =
        qr.gamma ? gamma_of(sig, qr.gamma) : std::vector<FormulaPtr>{};
    const FormulaPtr goal = parse_formula(sig, qr.goal);
    const SearchVerdict v = find_countermodel(sig, gamma, goal, Bounds{2, 2, true});
    if (qr.golden) {
      c.expect(v.found, std::string(qr.name) + ": countermodel found");
      if (v.found) {
        c.expect(model_bytes(v) == read_file(golden_path(qr.golden)),
                 std::string(qr.name) + ": countermodel matches golden file");
        const SearchVerdict again = find_countermodel(sig, gamma, goal, Bounds{2, 2, true});
        c.expect(verdict_to_json(again) == verdict_to_json(v),
                 std::string(qr.name) + ": verdict stable across runs");
      }
    } else {
      c.expect(!v.found, std::string(qr.name) + ": bounds exhausted");
      c.expect(v.models_checked == qr.checked,
               std::string(qr.name) + ": checked exactly " + std::to_string(qr.checked));
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// 6. The propositional oracle agrees with the Kripke evaluator.

Checker criterion_oracle() {
  Checker c;
  const CrossCheckReport rep = compare_with_kripke(2, 3);
  c.expect(rep.mismatches == 0, "cross-check mismatches");
  c.expect(rep.formulas > 0 && rep.cases == rep.formulas * 16, "cross-check coverage");

  const Signature sig = signature_from_json(R"({"logic":"ffde","predicates":{"p":0,"q":0}})");
  const OracleVerdict v = fde_consequence(
      {parse_formula(sig, "p"), parse_formula(sig, "~p")}, parse_formula(sig, "q"));
  c.expect(!v.valid, "explosion is not a consequence");
  c.expect(v.assignments_checked == 13, "explosion witness found at assignment 13");
  const bool witness_ok = v.witness.has_value() &&
                          v.witness->at("p") == PairValue{true, true} &&
                          v.witness->at("q") == PairValue{false, false};
  c.expect(witness_ok, "witness assigns p the glut and q the gap");
  std::fprintf(stderr, "    [oracle: %llu formulas x 16 assignments, %llu mismatches]\n",
               static_cast<unsigned long long>(rep.formulas),
               static_cast<unsigned long long>(rep.mismatches));
  return c;
}

// ---------------------------------------------------------------------------
// 7. Substitution identities on random models.

Checker criterion_substitution() {
  Checker c;
  const Signature sig = load_sig("sig-diversity-pair.json");
  const Term c1 = Term::constant("c1"), c2 = Term::constant("c2");

  std::uint64_t diagram_checks = 0, repoint_checks = 0;
  std::string failure;
  for (std::uint64_t seed = 0; seed < 100 && failure.empty(); ++seed) {
    const KripkeModel m = random_model(sig, Bounds{3, 3, true}, seed);
    const auto [dsig, dm] = diagram(sig, m);
    std::mt19937_64 rng(7000 + seed);
    for (int i = 0; i < 100 && failure.empty(); ++i) {
      // Identity 1: replacing a variable by a constant or by the diagram
      // name of that constant's value evaluates identically.
      const FormulaPtr s1 = random_sentence(sig, 3, rng);
      const std::string cname = rng_below(rng, 2) == 0 ? "c1" : "c2";
      const FormulaPtr tmpl = abstract_constant(s1, cname, "z0");
      for (const auto& stage : m.stages) {
        const auto value = m.constant_at(cname, stage);
        if (!value) continue;
        ++diagram_checks;
        const FormulaPtr via_diagram = substitute(tmpl, "z0", Term::diagram(*value));
        if (eval(sig, m, s1, stage) != eval(dsig, dm, via_diagram, stage) ||
            eval_neg(sig, m, s1, stage) != eval_neg(dsig, dm, via_diagram, stage)) {
          failure = "diagram identity: " + render(s1) + " vs " + render(via_diagram) +
                    " at " + stage + " (seed " + std::to_string(seed) + ")";
          break;
        }
      }

      // Identity 2: after re-pointing c1 to c2's interpretation, templates
      // instantiated with c1 and with c2 evaluate identically.
      const FormulaPtr s2_c1_free =
          substitute(abstract_constant(random_sentence(sig, 3, rng), "c1", "z9"), "z9", c2);
      const FormulaPtr tmpl2 = abstract_constant(s2_c1_free, "c2", "z0");
      KripkeModel m2 = m;
      if (m.constants.count("c2"))
        m2.constants["c1"] = m.constants.at("c2");
      else
        m2.constants.erase("c1");
      const FormulaPtr with_c1 = substitute(tmpl2, "z0", c1);
      const FormulaPtr with_c2 = substitute(tmpl2, "z0", c2);
      for (const auto& stage : m2.stages) {
        ++repoint_checks;
        if (eval(sig, m2, with_c1, stage) != eval(sig, m2, with_c2, stage) ||
            eval_neg(sig, m2, with_c1, stage) != eval_neg(sig, m2, with_c2, stage)) {
          failure = "re-pointing identity: " + render(with_c1) + " vs " + render(with_c2) +
                    " at " + stage + " (seed " + std::to_string(seed) + ")";
          break;
        }
      }
    }
  }
  c.expect(failure.empty(), failure);
  c.expect(diagram_checks > 1000, "enough defined-constant cases exercised");
  c.expect(repoint_checks > 10000, "enough re-pointing cases exercised");
  std::fprintf(stderr, "    [substitution: %llu diagram checks, %llu re-pointing checks]\n",
               static_cast<unsigned long long>(diagram_checks),
               static_cast<unsigned long long>(repoint_checks));
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;
    Checker (*run)();
  };
  const Criterion criteria[] = {
      {"handbook models and evaluations", 1.0, criterion_models},
      {"proof fixtures and generalized rules", 1.0, criterion_proofs},
      {"persistence sweeps", 300.0, criterion_persistence},
      {"soundness fuzzing", 600.0, criterion_fuzz},
      {"decision queries and goldens", 120.0, criterion_decide},
      {"oracle agreement", 60.0, criterion_oracle},
      {"substitution identities", 120.0, criterion_substitution},
  };

  int failures = 0;
  int idx = 0;
  for (const auto& cr : criteria) {
    ++idx;
    const auto start = std::chrono::steady_clock::now();
    Checker result;
    try {
      result = cr.run();
    } catch (const std::exception& e) {
      result.expect(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = secs < cr.budget_seconds;
    const bool pass = result.ok() && in_budget;
    if (!pass) ++failures;
    std::string note;
    if (!result.ok())
      note = result.first_failure;
    else if (!in_budget)
      note = "over budget";
    std::printf("%s  %d. %s — %d checks in %.2fs (budget %.0fs)%s%s\n",
                pass ? "PASS" : "FAIL", idx, cr.name, result.checks, secs, cr.budget_seconds,
                note.empty() ? "" : ": ", note.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
