// The C interface and the command-line front end built on it.
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ffde/ffde.h"
#include "ffde/kripke.hpp"
#include "ffde/proof.hpp"
#include "ffde/syntax.hpp"
#include "test_util.hpp"
#include "json.hpp"

using nlohmann::json;

namespace {

// RAII wrappers so failed CHECKs cannot leak handles.
struct Str {
  char* p = nullptr;
  ~Str() { ffde_string_free(p); }
  std::string get() const { return p ? p : ""; }
};

struct SigH {
  ffde_signature* p = nullptr;
  ~SigH() { ffde_signature_free(p); }
};
struct ModelH {
  ffde_model* p = nullptr;
  ~ModelH() { ffde_model_free(p); }
};
struct FormulaH {
  ffde_formula* p = nullptr;
  ~FormulaH() { ffde_formula_free(p); }
};
struct ProofH {
  ffde_proof* p = nullptr;
  ~ProofH() { ffde_proof_free(p); }
};

void parse_sig(SigH& sig, const std::string& text) {
  Str err;
  REQUIRE(ffde_signature_parse(text.c_str(), &sig.p, &err.p) == FFDE_OK);
}

void load_fixture_sig(SigH& sig, const std::string& name) {
  parse_sig(sig, read_file(fixture_path(name)));
}

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = std::string("/tmp/") + name;
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
  return path;
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return s;
}

CliResult run_cli(const std::string& args) {
  const std::string out_path = "/tmp/ffde_cli_stdout.txt";
  const std::string err_path = "/tmp/ffde_cli_stderr.txt";
  const std::string cmd = std::string("FFDE_COLOR=0 ") + FFDE_CLI_PATH + " " + args + " > " +
                          out_path + " 2> " + err_path;
  const int rc = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

std::string q(const std::string& s) { return "'" + s + "'"; }

}  // namespace

TEST_CASE("c api: version and string lifetime") {
  CHECK(std::string(ffde_version()) == "1.0.0");
  ffde_string_free(nullptr);  // must be a no-op
}

TEST_CASE("c api: signature parse, logic override, and errors") {
  SigH sig;
  parse_sig(sig, R"({"logic":"ffde","predicates":{"p":0,"q":0}})");

  Str err;
  ffde_signature* bad = nullptr;
  CHECK(ffde_signature_parse("{not json", &bad, &err.p) == FFDE_ERROR_PARSE);
  REQUIRE(err.p != nullptr);
  const json e = json::parse(err.get());
  CHECK(e["error"]["kind"] == "parse");
  CHECK(e["error"].contains("message"));

  CHECK(ffde_signature_parse(nullptr, &bad, nullptr) == FFDE_ERROR_ARGUMENT);

  CHECK(ffde_signature_set_logic(sig.p, "fn4", nullptr) == FFDE_OK);
  Str err2;
  CHECK(ffde_signature_set_logic(sig.p, "classical", &err2.p) == FFDE_ERROR_ARGUMENT);
  CHECK(json::parse(err2.get())["error"]["kind"] == "argument");
}

TEST_CASE("c api: formula parse and render round trip") {
  SigH sig;
  parse_sig(sig, R"({"logic":"ffde","predicates":{"p":0,"q":0}})");

  FormulaH f;
  Str err;
  REQUIRE(ffde_formula_parse(sig.p, "p & ~q", &f.p, &err.p) == FFDE_OK);
  Str text;
  REQUIRE(ffde_formula_render(f.p, &text.p) == FFDE_OK);
  CHECK(text.get() == "p & ~q");

  FormulaH bad;
  Str err2;
  CHECK(ffde_formula_parse(sig.p, "r", &bad.p, &err2.p) == FFDE_ERROR_PARSE);
  Str err3;
  CHECK(ffde_formula_parse(sig.p, "p -> q", &bad.p, &err3.p) == FFDE_ERROR_PARSE);

  CHECK(ffde_signature_set_logic(sig.p, "fn4", nullptr) == FFDE_OK);
  FormulaH imp;
  Str err4;
  REQUIRE(ffde_formula_parse(sig.p, "p -> q", &imp.p, &err4.p) == FFDE_OK);
  Str itext;
  REQUIRE(ffde_formula_render(imp.p, &itext.p) == FFDE_OK);
  CHECK(itext.get() == "p -> q");
}

TEST_CASE("c api: model parse, canonical json, validation, saturation") {
  SigH sig;
  load_fixture_sig(sig, "sig-growth.json");
  const std::string model_text = read_file(fixture_path("model-growth.json"));

  ModelH m;
  Str err;
  REQUIRE(ffde_model_parse(sig.p, model_text.c_str(), &m.p, &err.p) == FFDE_OK);

  Str out;
  REQUIRE(ffde_model_to_json(m.p, &out.p) == FFDE_OK);
  const ffde::Signature cs = ffde::signature_from_json(read_file(fixture_path("sig-growth.json")));
  CHECK(out.get() == ffde::model_to_json(ffde::model_from_json(cs, model_text)));

  int ok = -1;
  Str report;
  REQUIRE(ffde_model_validate(sig.p, m.p, 1, &ok, &report.p) == FFDE_OK);
  CHECK(ok == 1);
  CHECK(json::parse(report.get())["valid"] == true);

  // A late-defined constant flips with the persistence flag.
  SigH csig;
  parse_sig(csig, R"({"logic":"ffde","constants":["c"]})");
  const std::string late = R"({
    "stages": ["w1", "w2"],
    "order": [["w1", "w2"]],
    "domains": {"w1": ["a1"], "w2": ["a1"]},
    "constants": {"c": {"w2": "a1"}}
  })";
  ModelH lm;
  Str lerr;
  REQUIRE(ffde_model_parse(csig.p, late.c_str(), &lm.p, &lerr.p) == FFDE_OK);
  int strict_ok = -1, lax_ok = -1;
  Str rep1, rep2;
  REQUIRE(ffde_model_validate(csig.p, lm.p, 1, &strict_ok, &rep1.p) == FFDE_OK);
  REQUIRE(ffde_model_validate(csig.p, lm.p, 0, &lax_ok, &rep2.p) == FFDE_OK);
  CHECK(strict_ok == 0);
  CHECK(lax_ok == 1);
  CHECK(rep1.get().find("CONST_DEFINEDNESS_NOT_PERSISTENT") != std::string::npos);

  // Saturation through the C API matches the core library.
  SigH dsig;
  load_fixture_sig(dsig, "sig-diversity-pair.json");
  const std::string divm = read_file(fixture_path("model-diversity-pair.json"));
  ModelH dm;
  Str derr;
  REQUIRE(ffde_model_parse(dsig.p, divm.c_str(), &dm.p, &derr.p) == FFDE_OK);
  ModelH saturated;
  Str serr;
  REQUIRE(ffde_model_saturate(dsig.p, dm.p, &saturated.p, &serr.p) == FFDE_OK);
  Str sat_json;
  REQUIRE(ffde_model_to_json(saturated.p, &sat_json.p) == FFDE_OK);
  const ffde::Signature dcs =
      ffde::signature_from_json(read_file(fixture_path("sig-diversity-pair.json")));
  CHECK(sat_json.get() == ffde::model_to_json(ffde::saturate(dcs, ffde::model_from_json(dcs, divm))));
}

TEST_CASE("c api: evaluation and four-valued verdicts") {
  SigH sig;
  load_fixture_sig(sig, "sig-growth.json");
  ModelH m;
  Str err;
  REQUIRE(ffde_model_parse(sig.p, read_file(fixture_path("model-growth.json")).c_str(), &m.p,
                           &err.p) == FFDE_OK);
  FormulaH pc;
  Str ferr;
  REQUIRE(ffde_formula_parse(sig.p, "P(c)", &pc.p, &ferr.p) == FFDE_OK);

  int value = -1;
  REQUIRE(ffde_eval(sig.p, m.p, pc.p, "w1", 0, &value, nullptr) == FFDE_OK);
  CHECK(value == 0);
  REQUIRE(ffde_eval(sig.p, m.p, pc.p, "w2", 0, &value, nullptr) == FFDE_OK);
  CHECK(value == 1);
  REQUIRE(ffde_eval(sig.p, m.p, pc.p, "w1", 1, &value, nullptr) == FFDE_OK);
  CHECK(value == 0);  // no anti-support either: a gap

  Str name;
  REQUIRE(ffde_four_valued(sig.p, m.p, pc.p, "w1", &name.p, nullptr) == FFDE_OK);
  CHECK(name.get() == "N");
  FormulaH qc;
  Str qerr;
  REQUIRE(ffde_formula_parse(sig.p, "Q(c)", &qc.p, &qerr.p) == FFDE_OK);
  Str name2;
  REQUIRE(ffde_four_valued(sig.p, m.p, qc.p, "w2", &name2.p, nullptr) == FFDE_OK);
  CHECK(name2.get() == "B");

  Str eerr;
  CHECK(ffde_four_valued(sig.p, m.p, pc.p, "w9", &name.p, &eerr.p) == FFDE_ERROR_ARGUMENT);
  CHECK(json::parse(eerr.get())["error"]["kind"] == "argument");
}

TEST_CASE("c api: proof parse, check, and mode split") {
  SigH sig;
  load_fixture_sig(sig, "sig-proofs.json");

  ProofH good;
  Str err;
  REQUIRE(ffde_proof_parse(sig.p, read_file(fixture_path("forall-self-identity.json")).c_str(),
                           &good.p, &err.p) == FFDE_OK);
  Str round;
  REQUIRE(ffde_proof_to_json(good.p, &round.p) == FFDE_OK);
  const ffde::Signature cs =
      ffde::signature_from_json(read_file(fixture_path("sig-proofs.json")));
  CHECK(round.get() ==
        ffde::proof_to_json(
            ffde::proof_from_json(cs, read_file(fixture_path("forall-self-identity.json")))));

  Str sequent;
  REQUIRE(ffde_proof_check(sig.p, good.p, 0, &sequent.p, nullptr) == FFDE_OK);
  CHECK(sequent.get() == "⊢ forall x. x = x");

  ProofH gated;
  Str perr;
  REQUIRE(ffde_proof_parse(sig.p,
                           read_file(fixture_path("neg-exists-from-neg-def.json")).c_str(),
                           &gated.p, &perr.p) == FFDE_OK);
  Str seq2, cerr;
  CHECK(ffde_proof_check(sig.p, gated.p, 0, &seq2.p, &cerr.p) == FFDE_ERROR_PROOF);
  const json ce = json::parse(cerr.get());
  CHECK(ce["error"]["kind"] == "ModeViolation");
  CHECK(ce["error"].contains("path"));
  Str seq3;
  REQUIRE(ffde_proof_check(sig.p, gated.p, 1, &seq3.p, nullptr) == FFDE_OK);
  CHECK(seq3.get() == "~D(c) ⊢ ~exists x. x = c");

  ProofH broken;
  Str berr;
  CHECK(ffde_proof_parse(sig.p, R"({"rule":"NoSuchRule","conclusion":"c = c"})", &broken.p,
                         &berr.p) == FFDE_ERROR_PARSE);
}

TEST_CASE("c api: proof check with an allowed premise set") {
  SigH sig;
  load_fixture_sig(sig, "sig-proofs.json");
  ProofH proof;
  Str err;
  REQUIRE(ffde_proof_parse(sig.p, read_file(fixture_path("def-to-exists.json")).c_str(),
                           &proof.p, &err.p) == FFDE_OK);

  const char* allowed[] = {"D(c)"};
  Str seq;
  REQUIRE(ffde_proof_check_with_premises(sig.p, proof.p, 0, allowed, 1, &seq.p, nullptr) ==
          FFDE_OK);
  CHECK(seq.get() == "D(c) ⊢ exists x. x = c");

  const char* wrong[] = {"forall x. x = x"};
  Str seq2, cerr;
  CHECK(ffde_proof_check_with_premises(sig.p, proof.p, 0, wrong, 1, &seq2.p, &cerr.p) ==
        FFDE_ERROR_PROOF);
  CHECK(json::parse(cerr.get())["error"]["kind"] == "open-assumptions");

  Str seq3, cerr2;
  CHECK(ffde_proof_check_with_premises(sig.p, proof.p, 0, nullptr, 0, &seq3.p, &cerr2.p) ==
        FFDE_ERROR_PROOF);
}

TEST_CASE("c api: decide") {
  SigH sig;
  load_fixture_sig(sig, "sig-prop.json");
  const char* gamma[] = {"p", "~p"};
  int found = -1;
  Str verdict, err;
  REQUIRE(ffde_decide(sig.p, gamma, 2, "q", 2, 2, 1, &found, &verdict.p, &err.p) == FFDE_OK);
  CHECK(found == 1);
  const json v = json::parse(verdict.get());
  CHECK(v["verdict"] == "countermodel");
  CHECK(v["stage"] == "w1");
  CHECK(v["model"].is_object());

  SigH csig;
  load_fixture_sig(csig, "sig-defined-identity.json");
  int found2 = -1;
  Str verdict2;
  REQUIRE(ffde_decide(csig.p, nullptr, 0, "D(c) | ~D(c)", 2, 2, 1, &found2, &verdict2.p,
                      nullptr) == FFDE_OK);
  CHECK(found2 == 0);
  CHECK(json::parse(verdict2.get())["models_checked"] == 1959);

  int found3 = -1;
  Str verdict3, err3;
  CHECK(ffde_decide(sig.p, nullptr, 0, "r", 2, 2, 1, &found3, &verdict3.p, &err3.p) ==
        FFDE_ERROR_PARSE);
  Str verdict4, err4;
  CHECK(ffde_decide(sig.p, nullptr, 0, "q", 9, 2, 1, &found3, &verdict4.p, &err4.p) ==
        FFDE_ERROR_ARGUMENT);
}

TEST_CASE("c api: fuzz") {
  SigH sig;
  parse_sig(sig, R"({"logic":"ffde","constants":["c","e"],"predicates":{"P":1}})");

  int violations = -1;
  Str report, err;
  REQUIRE(ffde_fuzz(sig.p, 1, 42, 2, 2, 1, 1, 5, &violations, &report.p, &err.p) == FFDE_OK);
  CHECK(violations == 1);
  const json rep = json::parse(report.get());
  CHECK(rep["trees"] == 1);
  CHECK(rep["accepted"] == 1);
  CHECK(rep["violations"].size() == 1);
  CHECK(rep["violations"][0]["sequent"] == "D(e), ~D(c) ⊢ e != c");

  int violations2 = -1;
  Str report2;
  REQUIRE(ffde_fuzz(sig.p, 1, 42, 2, 2, 1, 0, 5, &violations2, &report2.p, nullptr) == FFDE_OK);
  CHECK(violations2 == 0);
  const json rep2 = json::parse(report2.get());
  CHECK(rep2["rejected"] == 1);
  CHECK(rep2["violations"].empty());

  int v3 = -1;
  Str r3, e3;
  CHECK(ffde_fuzz(sig.p, -1, 0, 2, 2, 1, 0, 5, &v3, &r3.p, &e3.p) == FFDE_ERROR_ARGUMENT);
}

TEST_CASE("c api: propositional oracle") {
  const char* gamma[] = {"p", "~p"};
  int valid = -1;
  Str verdict;
  REQUIRE(ffde_oracle(gamma, 2, "q", &valid, &verdict.p, nullptr) == FFDE_OK);
  CHECK(valid == 0);
  const json v = json::parse(verdict.get());
  CHECK(v["valid"] == false);
  CHECK(v["assignments_checked"] == 13);
  CHECK(v["witness"]["p"] == "B");
  CHECK(v["witness"]["q"] == "N");

  const char* conj[] = {"p & q"};
  int valid2 = -1;
  Str verdict2;
  REQUIRE(ffde_oracle(conj, 1, "p", &valid2, &verdict2.p, nullptr) == FFDE_OK);
  CHECK(valid2 == 1);
  CHECK(!json::parse(verdict2.get()).contains("witness"));

  int valid3 = -1;
  Str verdict3, err3;
  CHECK(ffde_oracle(nullptr, 0, "p -> q", &valid3, &verdict3.p, &err3.p) == FFDE_ERROR_PARSE);
  Str verdict4, err4;
  CHECK(ffde_oracle(nullptr, 0, "P(c)", &valid3, &verdict4.p, &err4.p) == FFDE_ERROR_PARSE);
}

TEST_CASE("cli: validate-model") {
  const auto ok = run_cli("validate-model -s " + q(fixture_path("sig-growth.json")) + " -m " +
                          q(fixture_path("model-growth.json")));
  CHECK(ok.exit_code == 0);
  CHECK(json::parse(ok.out)["valid"] == true);

  const std::string bad_model = write_temp("ffde_bad_model.json", R"({
    "stages": ["w1", "w2"],
    "order": [["w1", "w2"]],
    "domains": {"w1": ["a1"], "w2": ["a1"]},
    "predicates": {"P": {"w1": {"pos": [["a1"]], "neg": []}, "w2": {"pos": [], "neg": []}}}
  })");
  const auto bad = run_cli("validate-model -s " + q(fixture_path("sig-constant-domain.json")) +
                           " -m " + q(bad_model));
  CHECK(bad.exit_code == 1);
  const json rep = json::parse(bad.out);
  CHECK(rep["valid"] == false);
  CHECK(rep.dump().find("PRED_NOT_MONOTONE") != std::string::npos);

  const std::string csig = write_temp("ffde_csig.json", R"({"logic":"ffde","constants":["c"]})");
  const std::string late = write_temp("ffde_late_model.json", R"({
    "stages": ["w1", "w2"],
    "order": [["w1", "w2"]],
    "domains": {"w1": ["a1"], "w2": ["a1"]},
    "constants": {"c": {"w2": "a1"}}
  })");
  CHECK(run_cli("validate-model -s " + q(csig) + " -m " + q(late)).exit_code == 1);
  CHECK(run_cli("validate-model -s " + q(csig) + " -m " + q(late) + " --no-persistence-safe")
            .exit_code == 0);

  const auto missing = run_cli("validate-model -s /tmp/ffde_no_such_file.json -m " + q(late));
  CHECK(missing.exit_code == 2);
  CHECK(json::parse(missing.err)["error"]["kind"] == "io");
}

TEST_CASE("cli: eval") {
  const std::string base = "eval -s " + q(fixture_path("sig-growth.json")) + " -m " +
                           q(fixture_path("model-growth.json"));
  auto r = run_cli(base + " -w w1 -f 'P(c)'");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "0\n");
  r = run_cli(base + " -w w2 -f 'P(c)'");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "1\n");
  r = run_cli(base + " -w w2 -f 'Q(c)' --four");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "B\n");
  r = run_cli(base + " -w w1 -f 'forall x. Q(x)' --four");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "T\n");

  r = run_cli(base + " -w w1 -f 'P('");
  CHECK(r.exit_code == 2);
  CHECK(json::parse(r.err)["error"]["kind"] == "parse");
  CHECK(r.err.find("\x1b[") == std::string::npos);  // FFDE_COLOR=0: no ANSI

  r = run_cli(base + " -w w9 -f 'P(c)'");
  CHECK(r.exit_code == 2);
  CHECK(json::parse(r.err)["error"]["kind"] == "argument");
}

TEST_CASE("cli: check-proof") {
  const std::string sig = q(fixture_path("sig-proofs.json"));
  auto r = run_cli("check-proof -s " + sig + " -p " + q(fixture_path("forall-self-identity.json")));
  CHECK(r.exit_code == 0);
  CHECK(r.out == "⊢ forall x. x = x\n");

  r = run_cli("check-proof -s " + sig + " -p " +
              q(fixture_path("neg-exists-from-neg-def.json")));
  CHECK(r.exit_code == 1);
  CHECK(json::parse(r.out)["error"]["kind"] == "ModeViolation");

  r = run_cli("check-proof -s " + sig + " -p " +
              q(fixture_path("neg-exists-from-neg-def.json")) + " --mode permissive");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "~D(c) ⊢ ~exists x. x = c\n");

  const std::string premises = write_temp("ffde_premises.json", R"js(["D(c)"])js");
  r = run_cli("check-proof -s " + sig + " -p " + q(fixture_path("def-to-exists.json")) +
              " --premises " + q(premises));
  CHECK(r.exit_code == 0);
  CHECK(r.out == "D(c) ⊢ exists x. x = c\n");

  const std::string none = write_temp("ffde_premises_empty.json", "[]");
  r = run_cli("check-proof -s " + sig + " -p " + q(fixture_path("def-to-exists.json")) +
              " --premises " + q(none));
  CHECK(r.exit_code == 1);
  CHECK(json::parse(r.out)["error"]["kind"] == "open-assumptions");

  r = run_cli("check-proof -s " + sig + " -p " + q(fixture_path("sig-prop.json")));
  CHECK(r.exit_code == 2);  // not a proof file
}

TEST_CASE("cli: decide with golden countermodel output") {
  const std::string out_model = "/tmp/ffde_decide_out.json";
  auto r = run_cli("decide -s " + q(fixture_path("sig-prop.json")) + " --gamma " +
                   q(fixture_path("gamma-explosion.json")) + " --goal q --out " + q(out_model));
  CHECK(r.exit_code == 1);
  const json v = json::parse(r.out);
  CHECK(v["verdict"] == "countermodel");
  CHECK(v["stage"] == "w1");
  CHECK(slurp(out_model) == read_file(golden_path("countermodel-explosion.json")));

  r = run_cli("decide -s " + q(fixture_path("sig-defined-identity.json")) +
              " --goal 'D(c) | ~D(c)'");
  CHECK(r.exit_code == 0);
  const json ex = json::parse(r.out);
  CHECK(ex["verdict"] == "exhausted");
  CHECK(ex["models_checked"] == 1959);
  CHECK(ex["bounds"]["max_stages"] == 2);

  // FN4 override makes implication goals parseable.
  r = run_cli("decide -s " + q(fixture_path("sig-prop.json")) + " --logic fn4 --goal 'p -> p'");
  CHECK(r.exit_code == 0);
  CHECK(json::parse(r.out)["verdict"] == "exhausted");
  r = run_cli("decide -s " + q(fixture_path("sig-prop.json")) + " --goal 'p -> p'");
  CHECK(r.exit_code == 2);

  r = run_cli("decide -s " + q(fixture_path("sig-prop.json")) + " --goal q --stages 9");
  CHECK(r.exit_code == 2);
  CHECK(json::parse(r.err)["error"]["kind"] == "argument");
}

TEST_CASE("cli: fuzz") {
  const std::string sig = write_temp(
      "ffde_fuzz_sig.json", R"({"logic":"ffde","constants":["c","e"],"predicates":{"P":1}})");
  auto r = run_cli("fuzz -s " + q(sig) + " -n 1 --seed 42 --mode permissive");
  CHECK(r.exit_code == 1);
  const json rep = json::parse(r.out);
  CHECK(rep["violations"].size() == 1);
  CHECK(rep["violations"][0]["mode"] == "permissive");

  r = run_cli("fuzz -s " + q(sig) + " -n 1 --seed 42 --mode strict");
  CHECK(r.exit_code == 0);
  CHECK(json::parse(r.out)["rejected"] == 1);
}

TEST_CASE("cli: oracle") {
  auto r = run_cli("oracle --goal 'p | ~p'");
  CHECK(r.exit_code == 1);
  const json v = json::parse(r.out);
  CHECK(v["valid"] == false);
  CHECK(v["witness"]["p"] == "N");

  r = run_cli("oracle --gamma " + q(fixture_path("gamma-explosion.json")) + " --goal q");
  CHECK(r.exit_code == 1);
  CHECK(json::parse(r.out)["witness"]["p"] == "B");

  const std::string gamma = write_temp("ffde_oracle_gamma.json", R"(["p"])");
  r = run_cli("oracle --gamma " + q(gamma) + " --goal 'p | q'");
  CHECK(r.exit_code == 0);
  CHECK(json::parse(r.out)["valid"] == true);
}

TEST_CASE("cli: usage errors exit 2") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("no-such-command").exit_code == 2);
  const auto r = run_cli("eval --bogus-flag");
  CHECK(r.exit_code == 2);
  CHECK(json::parse(r.err)["error"]["kind"] == "usage");
}
