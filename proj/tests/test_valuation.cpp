// Stage-relative evaluation: connective clauses, quantifiers, definedness.
#include <string>

#include "doctest.h"
#include "ffde/kripke.hpp"
#include "ffde/syntax.hpp"
#include "ffde/valuation.hpp"
#include "test_util.hpp"

using namespace ffde;

namespace {

struct Loaded {
  Signature sig;
  KripkeModel model;
};

Loaded load(const std::string& sig_name, const std::string& model_name) {
  auto sig = signature_from_json(read_file(fixture_path(sig_name)));
  auto model = model_from_json(sig, read_file(fixture_path(model_name)));
  REQUIRE(validate(sig, model).ok());
  return {std::move(sig), std::move(model)};
}

}  // namespace

TEST_CASE("growth model: gaps become truths, truths become gluts") {
  auto [sig, m] = load("sig-growth.json", "model-growth.json");
  Evaluator ev(sig, m);
  auto f = [&](const char* s) { return parse_formula(sig, s); };

  CHECK(!ev.eval(f("P(c)"), "w1"));
  CHECK(!ev.eval_neg(f("P(c)"), "w1"));
  CHECK(ev.four_valued(f("P(c)"), "w1") == FourValue::N);
  CHECK(ev.eval(f("P(c)"), "w2"));
  CHECK(ev.four_valued(f("P(c)"), "w2") == FourValue::T);

  CHECK(ev.eval(f("Q(c)"), "w1"));
  CHECK(!ev.eval_neg(f("Q(c)"), "w1"));
  CHECK(ev.four_valued(f("Q(c)"), "w1") == FourValue::T);
  CHECK(ev.eval(f("Q(c)"), "w2"));
  CHECK(ev.eval_neg(f("Q(c)"), "w2"));
  CHECK(ev.four_valued(f("Q(c)"), "w2") == FourValue::B);

  // Identity goes glut at w2 as well.
  CHECK(ev.four_valued(f("c = c"), "w1") == FourValue::T);
  CHECK(ev.four_valued(f("c = c"), "w2") == FourValue::B);

  CHECK(ev.eval(f("D(c)"), "w1"));
  CHECK(!ev.eval_neg(f("D(c)"), "w1"));

  // Universal truth sweeps later stages; existential truth is local.
  CHECK(ev.eval(f("forall x. Q(x)"), "w1"));
  CHECK(!ev.eval(f("forall x. P(x)"), "w1"));
  CHECK(ev.eval(f("forall x. P(x)"), "w2"));
  CHECK(!ev.eval(f("exists x. P(x)"), "w1"));
  CHECK(ev.eval(f("exists x. P(x)"), "w2"));
  // Falsity of an existential also sweeps later stages.
  CHECK(!ev.eval_neg(f("exists x. P(x)"), "w1"));
  CHECK(!ev.eval_neg(f("forall x. Q(x)"), "w1"));
}

TEST_CASE("semantic De Morgan and double negation") {
  auto [sig, m] = load("sig-growth.json", "model-growth.json");
  Evaluator ev(sig, m);
  auto f = [&](const char* s) { return parse_formula(sig, s); };

  for (const auto* w : {"w1", "w2"}) {
    CHECK(ev.eval(f("~(P(c) & Q(c))"), w) == ev.eval(f("~P(c) | ~Q(c)"), w));
    CHECK(ev.eval(f("~(P(c) | Q(c))"), w) == ev.eval(f("~P(c) & ~Q(c)"), w));
    CHECK(ev.eval(f("~~Q(c)"), w) == ev.eval(f("Q(c)"), w));
    CHECK(ev.eval(f("~~~Q(c)"), w) == ev.eval(f("~Q(c)"), w));
    // eval_neg(A) is exactly eval(~A).
    for (const auto* s : {"P(c)", "Q(c)", "P(c) & Q(c)", "forall x. P(x)"}) {
      CHECK(ev.eval_neg(f(s), w) == ev.eval(mk_neg(f(s)), w));
    }
    // Negated quantifiers read as quantified negations with flipped kind.
    CHECK(ev.eval(f("~forall x. Q(x)"), w) == ev.eval(f("exists x. ~Q(x)"), w));
    CHECK(ev.eval(f("~exists x. P(x)"), w) == ev.eval(f("forall x. ~P(x)"), w));
  }
}

TEST_CASE("constant-domain counterexample") {
  auto [sig, m] = load("sig-constant-domain.json", "model-constant-domain.json");
  auto a = parse_formula(sig, "forall x. (exists y. ~P(y)) | P(x)");
  auto b = parse_formula(sig, "(exists y. ~P(y)) | forall x. P(x)");
  CHECK(eval(sig, m, a, "w1"));
  CHECK(!eval(sig, m, b, "w1"));
  CHECK(eval(sig, m, b, "w2"));
  CHECK(counterexample_stage(sig, m, {a}, b) == "w1");
  CHECK(counterexample_stage(sig, m, {b}, a) == std::nullopt);
}

TEST_CASE("defined identity can be glutted") {
  auto [sig, m] = load("sig-defined-identity.json", "model-defined-identity.json");
  auto f = [&](const char* s) { return parse_formula(sig, s); };
  CHECK(eval(sig, m, f("exists x. x = c"), "w1"));
  CHECK(eval(sig, m, f("~exists x. x = c"), "w1"));  // glut, not a gap
  CHECK(four_valued(sig, m, f("exists x. x = c"), "w1") == FourValue::B);
  CHECK(eval(sig, m, f("D(c)"), "w1"));
  CHECK(!eval(sig, m, f("~D(c)"), "w1"));
  CHECK(four_valued(sig, m, f("c = c"), "w1") == FourValue::B);
}

TEST_CASE("diversity pair: identity value table") {
  auto [sig, m] = load("sig-diversity-pair.json", "model-diversity-pair.json");
  auto f = [&](const char* s) { return parse_formula(sig, s); };
  CHECK(four_valued(sig, m, f("c1 = c2"), "w1") == FourValue::N);
  CHECK(four_valued(sig, m, f("c1 = c1"), "w1") == FourValue::T);
  CHECK(four_valued(sig, m, f("c2 = c2"), "w1") == FourValue::B);
  CHECK(four_valued(sig, m, f("P(c1)"), "w1") == FourValue::T);
  CHECK(four_valued(sig, m, f("Q(c2)"), "w1") == FourValue::B);
  CHECK(four_valued(sig, m, f("Q(c1)"), "w1") == FourValue::N);
}

TEST_CASE("undefined terms make atoms and identities gap") {
  auto sig = signature_from_json(R"({"constants":["c"],"predicates":{"P":1}})");
  auto m = model_from_json(sig, R"({
    "stages": ["w1"],
    "domains": {"w1": ["a"]},
    "predicates": {"P": {"w1": {"pos": [["a"]], "neg": [["a"]]}}},
    "id_neg": {"w1": [["a","a"]]}
  })");
  REQUIRE(validate(sig, m).ok());
  auto f = [&](const char* s) { return parse_formula(sig, s); };
  // c is undefined: even a glutted predicate yields neither truth nor falsity.
  CHECK(four_valued(sig, m, f("P(c)"), "w1") == FourValue::N);
  CHECK(four_valued(sig, m, f("c = c"), "w1") == FourValue::N);
  CHECK(four_valued(sig, m, f("D(c)"), "w1") == FourValue::F);
  CHECK(eval(sig, m, f("~D(c)"), "w1"));
  // Variables always denote, so quantified definedness holds.
  CHECK(eval(sig, m, f("forall x. D(x)"), "w1"));
  CHECK(eval(sig, m, f("exists x. P(x)"), "w1"));
}

TEST_CASE("implication sweeps later stages; its negation is local") {
  auto sig = signature_from_json(R"({"logic":"fn4","constants":[],"predicates":{"p":0,"q":0}})");
  auto m = model_from_json(sig, R"({
    "stages": ["w1", "w2"],
    "order": [["w1", "w2"]],
    "domains": {"w1": [], "w2": []},
    "predicates": {"p": {"w1": {"pos": []}, "w2": {"pos": [[]]}}}
  })");
  REQUIRE(validate(sig, m).ok());
  auto f = [&](const char* s) { return parse_formula(sig, s); };

  CHECK(eval(sig, m, f("p -> p"), "w1"));
  // p becomes true at w2 while q never does, so p -> q already fails at w1.
  CHECK(!eval(sig, m, f("p -> q"), "w1"));
  CHECK(!eval(sig, m, f("p -> q"), "w2"));
  CHECK(eval(sig, m, f("q -> p"), "w1"));
  // Falsity of an implication needs a true antecedent and false consequent here.
  CHECK(!eval(sig, m, f("~(p -> q)"), "w1"));  // p not true at w1
  CHECK(!eval(sig, m, f("~(p -> q)"), "w2"));  // q not false at w2
  CHECK(four_valued(sig, m, f("p -> q"), "w2") == FourValue::N);
}

TEST_CASE("diagram constants evaluate as their elements") {
  auto [sig, m] = load("sig-growth.json", "model-growth.json");
  auto f = [&](const char* s) { return parse_formula(sig, s); };
  CHECK(!eval(sig, m, f("P(@a1)"), "w1"));
  CHECK(eval(sig, m, f("P(@a1)"), "w2"));
  CHECK(eval(sig, m, f("@a1 = c"), "w1"));
  CHECK_THROWS_AS(eval(sig, m, f("P(@zz)"), "w1"), InvalidArgument);
}

TEST_CASE("evaluation errors") {
  auto [sig, m] = load("sig-growth.json", "model-growth.json");
  Evaluator ev(sig, m);
  CHECK_THROWS_AS(ev.eval(parse_formula(sig, "P(c)"), "w9"), InvalidArgument);
  CHECK_THROWS_AS(ev.eval(parse_formula(sig, "P(x)", {"x"}), "w1"), InvalidArgument);
}

TEST_CASE("persistence helpers") {
  auto [sig, m] = load("sig-growth.json", "model-growth.json");
  auto f = [&](const char* s) { return parse_formula(sig, s); };
  CHECK(holds_at_all_stages(sig, m, f("Q(c)")));
  CHECK(!holds_at_all_stages(sig, m, f("P(c)")));
  CHECK(is_persistent(sig, m, f("P(c)")));
  CHECK(is_persistent(sig, m, f("~Q(c)")));
  CHECK(is_persistent(sig, m, f("~exists x. P(x)")));

  // Late definedness (allowed when not persistence-safe) breaks persistence
  // of the negated definedness claim; nothing else can.
  auto lax = model_from_json(sig, R"({
    "stages": ["w1", "w2"],
    "order": [["w1", "w2"]],
    "domains": {"w1": ["a1"], "w2": ["a1"]},
    "constants": {"c": {"w2": "a1"}},
    "persistence_safe": false
  })");
  REQUIRE(validate(sig, lax).ok());
  CHECK(eval(sig, lax, f("~D(c)"), "w1"));
  CHECK(!eval(sig, lax, f("~D(c)"), "w2"));
  CHECK(!is_persistent(sig, lax, f("~D(c)")));
}

TEST_CASE("counterexample_stage reports the first refuting stage in order") {
  auto [sig, m] = load("sig-growth.json", "model-growth.json");
  auto f = [&](const char* s) { return parse_formula(sig, s); };
  CHECK(counterexample_stage(sig, m, {}, f("P(c)")) == "w1");
  CHECK(counterexample_stage(sig, m, {f("P(c)")}, f("Q(c)")) == std::nullopt);
  CHECK(counterexample_stage(sig, m, {f("Q(c)")}, f("P(c)")) == "w1");
  CHECK(counterexample_stage(sig, m, {f("Q(c)")}, f("Q(c)")) == std::nullopt);
}
