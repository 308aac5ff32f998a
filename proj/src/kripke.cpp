#include "ffde/kripke.hpp"

#include <algorithm>

#include "json.hpp"

namespace ffde {

using nlohmann::json;

namespace {
const std::set<std::string> kEmptyDomain;

std::string tuple_str(const Tuple& t) {
  std::string s = "(";
  for (size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += t[i];
  }
  return s + ")";
}

std::string pair_str(const std::pair<std::string, std::string>& p) {
  return "(" + p.first + "," + p.second + ")";
}
}  // namespace

const std::set<std::string>& KripkeModel::domain(const std::string& stage) const {
  auto it = domains.find(stage);
  return it == domains.end() ? kEmptyDomain : it->second;
}

std::optional<std::string> KripkeModel::constant_at(const std::string& c,
                                                    const std::string& stage) const {
  auto it = constants.find(c);
  if (it == constants.end()) return std::nullopt;
  auto jt = it->second.find(stage);
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

std::set<std::string> KripkeModel::all_elements() const {
  std::set<std::string> out;
  for (const auto& [_, dom] : domains) out.insert(dom.begin(), dom.end());
  return out;
}

PairSet order_closure_pairs(const KripkeModel& m) {
  const size_t n = m.stages.size();
  std::map<std::string, size_t> idx;
  for (size_t i = 0; i < n; ++i) idx[m.stages[i]] = i;
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (size_t i = 0; i < n; ++i) r[i][i] = true;
  for (const auto& [a, b] : m.order) {
    auto ia = idx.find(a), ib = idx.find(b);
    if (ia == idx.end() || ib == idx.end()) continue;  // unknown stages reported by validate
    r[ia->second][ib->second] = true;
  }
  for (size_t k = 0; k < n; ++k)
    for (size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = true;
  PairSet out;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (r[i][j]) out.emplace(m.stages[i], m.stages[j]);
  return out;
}

KripkeModel order_closure(const KripkeModel& m) {
  KripkeModel out = m;
  out.order.clear();
  for (const auto& p : order_closure_pairs(m))
    if (p.first != p.second) out.order.insert(p);
  return out;
}

bool ValidationReport::ok() const {
  return std::none_of(violations.begin(), violations.end(),
                      [](const Violation& v) { return v.severity == Severity::Error; });
}

// ---------------------------------------------------------------------------
// Validation

namespace {

struct Reporter {
  ValidationReport& rep;
  void operator()(std::string code, Severity sev, std::string stage, std::string subject,
                  std::string message) const {
    rep.violations.push_back(
        {std::move(code), sev, std::move(stage), std::move(subject), std::move(message)});
  }
};

// Diversity: tuples witnessing the extension and anti-extension that agree
// everywhere except (at most) position k force a negative-identity pair.
void forced_diversity_pairs(const std::set<Tuple>& pos, const std::set<Tuple>& neg,
                            PairSet& out) {
  for (const auto& tp : pos)
    for (const auto& tn : neg) {
      if (tp.size() != tn.size()) continue;
      const size_t m = tp.size();
      for (size_t k = 0; k < m; ++k) {
        bool agree_elsewhere = true;
        for (size_t j = 0; j < m && agree_elsewhere; ++j)
          if (j != k && tp[j] != tn[j]) agree_elsewhere = false;
        if (agree_elsewhere) {
          out.emplace(tp[k], tn[k]);
          out.emplace(tn[k], tp[k]);
        }
      }
    }
}

std::set<Tuple> pairs_as_tuples(const PairSet& ps) {
  std::set<Tuple> out;
  for (const auto& [a, b] : ps) out.insert(Tuple{a, b});
  return out;
}

}  // namespace

ValidationReport validate(const Signature& sig, const KripkeModel& m) {
  ValidationReport rep;
  Reporter report{rep};

  if (m.stages.empty())
    report("NO_STAGES", Severity::Error, "", "", "a model needs at least one stage");
  std::set<std::string> stage_set(m.stages.begin(), m.stages.end());
  if (stage_set.size() != m.stages.size())
    report("DUPLICATE_STAGE", Severity::Error, "", "", "stage names must be unique");

  auto known_stage = [&](const std::string& w) { return stage_set.count(w) > 0; };
  for (const auto& [a, b] : m.order)
    for (const auto& w : {a, b})
      if (!known_stage(w))
        report("UNKNOWN_STAGE", Severity::Error, w, "order", "order references unknown stage");
  for (const auto& [w, _] : m.domains)
    if (!known_stage(w))
      report("UNKNOWN_STAGE", Severity::Error, w, "domains", "domain for unknown stage");
  for (const auto& [c, per_stage] : m.constants)
    for (const auto& [w, _] : per_stage)
      if (!known_stage(w))
        report("UNKNOWN_STAGE", Severity::Error, w, c, "constant interpretation at unknown stage");
  for (const auto& [p, per_stage] : m.predicates)
    for (const auto& [w, _] : per_stage)
      if (!known_stage(w))
        report("UNKNOWN_STAGE", Severity::Error, w, p, "predicate interpretation at unknown stage");
  for (const auto* rel : {&m.id_pos, &m.id_neg})
    for (const auto& [w, _] : *rel)
      if (!known_stage(w))
        report("UNKNOWN_STAGE", Severity::Error, w, "identity", "identity relation at unknown stage");

  const PairSet leq = order_closure_pairs(m);

  // Domain growth.
  for (const auto& [w, w2] : leq) {
    if (w == w2) continue;
    const auto& dw = m.domain(w);
    const auto& dw2 = m.domain(w2);
    for (const auto& a : dw)
      if (!dw2.count(a)) {
        report("DOMAIN_SHRINK", Severity::Error, w + "<=" + w2, a,
               "element leaves the domain along the order");
        break;
      }
  }

  // Constants: membership, rigidity, definedness along the order.
  for (const auto& [c, per_stage] : m.constants) {
    if (!sig.has_constant(c) && !is_minted_constant(c) && !(c.size() > 1 && c[0] == '@'))
      report("UNKNOWN_CONSTANT", Severity::Error, "", c, "interpretation for undeclared constant");
    for (const auto& [w, a] : per_stage)
      if (known_stage(w) && !m.domain(w).count(a))
        report("CONST_VALUE_OUTSIDE_DOMAIN", Severity::Error, w, c,
               "constant denotes an element outside the stage's domain");
    for (const auto& [w, w2] : leq) {
      if (w == w2) continue;
      auto at = m.constant_at(c, w), at2 = m.constant_at(c, w2);
      if (at && !at2)
        report("CONST_DEFINEDNESS_DROPPED", Severity::Error, w + "<=" + w2, c,
               "constant defined at a stage but undefined later");
      else if (at && at2 && *at != *at2)
        report("CONST_NOT_RIGID", Severity::Error, w + "<=" + w2, c,
               "constant changes denotation along the order");
      if (!at && at2)
        report("CONST_DEFINEDNESS_NOT_PERSISTENT",
               m.persistence_safe ? Severity::Error : Severity::Warning, w + "<=" + w2, c,
               "constant undefined at a stage becomes defined later");
    }
  }

  // Predicates: declaredness, arity, domain membership, monotonicity.
  for (const auto& [p, per_stage] : m.predicates) {
    int arity = sig.predicate_arity(p);
    if (arity < 0) {
      report("UNKNOWN_PREDICATE", Severity::Error, "", p, "interpretation for undeclared predicate");
      continue;
    }
    for (const auto& [w, interp] : per_stage) {
      for (const auto* side : {&interp.pos, &interp.neg})
        for (const auto& t : *side) {
          if (static_cast<int>(t.size()) != arity)
            report("TUPLE_ARITY_MISMATCH", Severity::Error, w, p + tuple_str(t),
                   "tuple arity differs from the declared arity");
          else if (known_stage(w))
            for (const auto& a : t)
              if (!m.domain(w).count(a)) {
                report("TUPLE_OUTSIDE_DOMAIN", Severity::Error, w, p + tuple_str(t),
                       "tuple mentions an element outside the stage's domain");
                break;
              }
        }
    }
    for (const auto& [w, w2] : leq) {
      if (w == w2) continue;
      auto at = per_stage.find(w);
      if (at == per_stage.end()) continue;
      auto at2 = per_stage.find(w2);
      const PredInterp empty;
      const PredInterp& late = at2 == per_stage.end() ? empty : at2->second;
      for (const auto& t : at->second.pos)
        if (!late.pos.count(t))
          report("PRED_NOT_MONOTONE", Severity::Error, w + "<=" + w2, p + tuple_str(t),
                 "extension loses a tuple along the order");
      for (const auto& t : at->second.neg)
        if (!late.neg.count(t))
          report("PRED_NOT_MONOTONE", Severity::Error, w + "<=" + w2, p + "~" + tuple_str(t),
                 "anti-extension loses a tuple along the order");
    }
  }

  auto id_at = [&](const std::map<std::string, PairSet>& rel, const std::string& w) -> PairSet {
    auto it = rel.find(w);
    return it == rel.end() ? PairSet{} : it->second;
  };

  // Identity relations: membership, id_pos equivalence + congruence.
  for (const auto& w : m.stages) {
    const auto& dom = m.domain(w);
    const PairSet ip = id_at(m.id_pos, w);
    const PairSet in = id_at(m.id_neg, w);
    for (const auto* rel : {&ip, &in})
      for (const auto& pr : *rel)
        if (!dom.count(pr.first) || !dom.count(pr.second))
          report("ID_PAIR_OUTSIDE_DOMAIN", Severity::Error, w, pair_str(pr),
                 "identity pair mentions an element outside the stage's domain");
    for (const auto& a : dom)
      if (!ip.count({a, a})) {
        report("ID_POS_NOT_EQUIVALENCE", Severity::Error, w, a, "positive identity not reflexive");
        break;
      }
    for (const auto& [a, b] : ip)
      if (!ip.count({b, a})) {
        report("ID_POS_NOT_EQUIVALENCE", Severity::Error, w, pair_str({a, b}),
               "positive identity not symmetric");
        break;
      }
    bool trans_ok = true;
    for (const auto& [a, b] : ip) {
      for (const auto& [b2, c] : ip)
        if (b2 == b && !ip.count({a, c})) {
          report("ID_POS_NOT_EQUIVALENCE", Severity::Error, w, pair_str({a, c}),
                 "positive identity not transitive");
          trans_ok = false;
          break;
        }
      if (!trans_ok) break;
    }
    // Congruence: replacing one argument by an id_pos-related one preserves
    // membership in every declared extension/anti-extension (both directions).
    for (const auto& [p, per_stage] : m.predicates) {
      if (sig.predicate_arity(p) < 1) continue;
      auto at = per_stage.find(w);
      if (at == per_stage.end()) continue;
      for (const auto* side : {&at->second.pos, &at->second.neg}) {
        for (const auto& t : *side)
          for (size_t j = 0; j < t.size(); ++j)
            for (const auto& [a, b] : ip) {
              std::string b2;
              if (t[j] == a) b2 = b;
              else if (t[j] == b) b2 = a;  // symmetric pair may be listed once
              else continue;
              Tuple t2 = t;
              t2[j] = b2;
              if (!side->count(t2)) {
                report("ID_POS_NOT_CONGRUENCE", Severity::Error, w,
                       p + tuple_str(t) + "~" + tuple_str(t2),
                       "positive identity fails to be a congruence for a predicate");
                goto congruence_done;
              }
            }
      }
    }
  congruence_done:;

    // Diversity: forced negative-identity pairs must be present. Identity
    // itself participates with id_pos as extension and id_neg as anti-extension.
    PairSet forced;
    for (const auto& [p, per_stage] : m.predicates) {
      auto at = per_stage.find(w);
      if (at == per_stage.end()) continue;
      forced_diversity_pairs(at->second.pos, at->second.neg, forced);
    }
    forced_diversity_pairs(pairs_as_tuples(ip), pairs_as_tuples(in), forced);
    for (const auto& pr : forced)
      if (!in.count(pr))
        report("DIVERSITY_UNSAT", Severity::Error, w, pair_str(pr),
               "required negative-identity pair is missing");
  }

  // Identity monotonicity.
  for (const auto& [w, w2] : leq) {
    if (w == w2) continue;
    const PairSet ip = id_at(m.id_pos, w), ip2 = id_at(m.id_pos, w2);
    const PairSet in = id_at(m.id_neg, w), in2 = id_at(m.id_neg, w2);
    for (const auto& pr : ip)
      if (!ip2.count(pr)) {
        report("ID_POS_NOT_MONOTONE", Severity::Error, w + "<=" + w2, pair_str(pr),
               "positive identity loses a pair along the order");
        break;
      }
    for (const auto& pr : in)
      if (!in2.count(pr)) {
        report("ID_NEG_NOT_MONOTONE", Severity::Error, w + "<=" + w2, pair_str(pr),
               "negative identity loses a pair along the order");
        break;
      }
  }

  return rep;
}

std::string report_to_json(const ValidationReport& r) {
  json out;
  out["valid"] = r.ok();
  out["violations"] = json::array();
  for (const auto& v : r.violations) {
    json item;
    item["code"] = v.code;
    item["severity"] = v.severity == Severity::Error ? "error" : "warning";
    if (!v.stage.empty()) item["stage"] = v.stage;
    if (!v.subject.empty()) item["subject"] = v.subject;
    item["message"] = v.message;
    out["violations"].push_back(item);
  }
  return out.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Diagram

std::pair<Signature, KripkeModel> diagram(const Signature& sig, const KripkeModel& m) {
  Signature out_sig = sig;
  KripkeModel out = m;
  for (const auto& a : m.all_elements()) {
    const std::string name = "@" + a;
    std::map<std::string, std::string> want;
    for (const auto& w : m.stages)
      if (m.domain(w).count(a)) want[w] = a;
    if (out_sig.has_constant(name)) {
      auto it = out.constants.find(name);
      if (it == out.constants.end() || it->second != want)
        throw InvalidArgument("diagram: declared constant '" + name +
                              "' collides with a diagram constant");
      continue;  // already diagrammed
    }
    out_sig.constants.push_back(name);
    out.constants[name] = std::move(want);
  }
  std::sort(out_sig.constants.begin(), out_sig.constants.end());
  return {std::move(out_sig), std::move(out)};
}

// ---------------------------------------------------------------------------
// Saturation

KripkeModel saturate(const Signature& sig, const KripkeModel& m) {
  (void)sig;
  KripkeModel out = m;
  const PairSet leq = order_closure_pairs(m);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& w : out.stages) {
      PairSet forced;
      for (const auto& [p, per_stage] : out.predicates) {
        auto at = per_stage.find(w);
        if (at == per_stage.end()) continue;
        forced_diversity_pairs(at->second.pos, at->second.neg, forced);
      }
      forced_diversity_pairs(pairs_as_tuples(out.id_pos[w]), pairs_as_tuples(out.id_neg[w]),
                             forced);
      auto& in = out.id_neg[w];
      for (const auto& pr : forced)
        if (in.insert(pr).second) changed = true;
    }
    for (const auto& [w, w2] : leq) {
      if (w == w2) continue;
      auto& late = out.id_neg[w2];
      for (const auto& pr : out.id_neg[w])
        if (late.insert(pr).second) changed = true;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

KripkeModel model_from_json(const Signature& sig, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("model: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("model: expected a JSON object");
  for (const auto& [k, _] : j.items())
    if (k != "stages" && k != "order" && k != "domains" && k != "constants" &&
        k != "predicates" && k != "id_pos" && k != "id_neg" && k != "persistence_safe")
      throw ParseError("model: unknown key '" + k + "'");

  KripkeModel m;
  if (!j.contains("stages") || !j["stages"].is_array())
    throw ParseError("model: 'stages' must be an array of stage names");
  for (const auto& w : j["stages"]) {
    if (!w.is_string()) throw ParseError("model: stage names must be strings");
    m.stages.push_back(w.get<std::string>());
  }
  std::set<std::string> stage_set(m.stages.begin(), m.stages.end());
  if (stage_set.size() != m.stages.size()) throw ParseError("model: duplicate stage name");
  auto need_stage = [&](const std::string& w, const char* where) {
    if (!stage_set.count(w))
      throw ParseError(std::string("model: ") + where + " references unknown stage '" + w + "'");
  };

  if (j.contains("persistence_safe")) {
    if (!j["persistence_safe"].is_boolean())
      throw ParseError("model: persistence_safe must be a boolean");
    m.persistence_safe = j["persistence_safe"].get<bool>();
  }

  if (j.contains("order")) {
    if (!j["order"].is_array()) throw ParseError("model: 'order' must be an array of pairs");
    for (const auto& pr : j["order"]) {
      if (!pr.is_array() || pr.size() != 2 || !pr[0].is_string() || !pr[1].is_string())
        throw ParseError("model: order entries must be [stage, stage] pairs");
      need_stage(pr[0], "order");
      need_stage(pr[1], "order");
      m.order.emplace(pr[0].get<std::string>(), pr[1].get<std::string>());
    }
  }

  for (const auto& w : m.stages) m.domains[w] = {};
  if (j.contains("domains")) {
    if (!j["domains"].is_object()) throw ParseError("model: 'domains' must be an object");
    for (const auto& [w, elems] : j["domains"].items()) {
      need_stage(w, "domains");
      if (!elems.is_array()) throw ParseError("model: domain of '" + w + "' must be an array");
      for (const auto& a : elems) {
        if (!a.is_string()) throw ParseError("model: elements must be strings");
        m.domains[w].insert(a.get<std::string>());
      }
    }
  }

  if (j.contains("constants")) {
    if (!j["constants"].is_object()) throw ParseError("model: 'constants' must be an object");
    for (const auto& [c, per_stage] : j["constants"].items()) {
      if (!sig.has_constant(c))
        throw ParseError("model: interpretation for undeclared constant '" + c + "'");
      if (!per_stage.is_object())
        throw ParseError("model: interpretation of '" + c + "' must map stages to elements");
      for (const auto& [w, a] : per_stage.items()) {
        need_stage(w, "constants");
        if (!a.is_string()) throw ParseError("model: constant values must be element strings");
        m.constants[c][w] = a.get<std::string>();
      }
    }
  }

  for (const auto& [p, _] : sig.predicates)
    for (const auto& w : m.stages) m.predicates[p][w] = {};
  if (j.contains("predicates")) {
    if (!j["predicates"].is_object()) throw ParseError("model: 'predicates' must be an object");
    for (const auto& [p, per_stage] : j["predicates"].items()) {
      int arity = sig.predicate_arity(p);
      if (arity < 0) throw ParseError("model: interpretation for undeclared predicate '" + p + "'");
      if (!per_stage.is_object())
        throw ParseError("model: interpretation of '" + p + "' must map stages to {pos, neg}");
      for (const auto& [w, interp] : per_stage.items()) {
        need_stage(w, "predicates");
        if (!interp.is_object())
          throw ParseError("model: stage interpretation of '" + p + "' must be an object");
        for (const auto& [key, tuples] : interp.items()) {
          if (key != "pos" && key != "neg")
            throw ParseError("model: predicate interpretation keys are 'pos' and 'neg'");
          if (!tuples.is_array())
            throw ParseError("model: '" + key + "' of '" + p + "' must be an array of tuples");
          for (const auto& tup : tuples) {
            if (!tup.is_array())
              throw ParseError("model: tuples must be arrays of element strings");
            Tuple t;
            for (const auto& a : tup) {
              if (!a.is_string()) throw ParseError("model: elements must be strings");
              t.push_back(a.get<std::string>());
            }
            if (static_cast<int>(t.size()) != arity)
              throw ParseError("model: tuple arity mismatch for predicate '" + p + "'");
            (key == "pos" ? m.predicates[p][w].pos : m.predicates[p][w].neg).insert(std::move(t));
          }
        }
      }
    }
  }

  auto read_pairs = [&](const char* key, std::map<std::string, PairSet>& into) {
    if (!j.contains(key)) return;
    if (!j[key].is_object())
      throw ParseError(std::string("model: '") + key + "' must map stages to pair arrays");
    for (const auto& [w, pairs] : j[key].items()) {
      need_stage(w, key);
      if (!pairs.is_array())
        throw ParseError(std::string("model: '") + key + "' entries must be arrays");
      into[w];  // explicit, possibly empty
      for (const auto& pr : pairs) {
        if (!pr.is_array() || pr.size() != 2 || !pr[0].is_string() || !pr[1].is_string())
          throw ParseError(std::string("model: '") + key + "' pairs must be [element, element]");
        into[w].emplace(pr[0].get<std::string>(), pr[1].get<std::string>());
      }
    }
  };
  read_pairs("id_pos", m.id_pos);
  read_pairs("id_neg", m.id_neg);
  // Unlisted stages default to the domain diagonal (id_pos) / empty (id_neg).
  for (const auto& w : m.stages) {
    if (!m.id_pos.count(w)) {
      auto& diag = m.id_pos[w];
      for (const auto& a : m.domains[w]) diag.emplace(a, a);
    }
    m.id_neg[w];
  }
  return m;
}

std::string model_to_json(const KripkeModel& m) {
  json out;
  out["stages"] = m.stages;
  out["order"] = json::array();
  {
    KripkeModel closed = order_closure(m);
    for (const auto& [a, b] : closed.order) out["order"].push_back(json::array({a, b}));
  }
  out["domains"] = json::object();
  for (const auto& [w, dom] : m.domains)
    out["domains"][w] = std::vector<std::string>(dom.begin(), dom.end());
  out["constants"] = json::object();
  for (const auto& [c, per_stage] : m.constants) {
    if (per_stage.empty()) continue;
    json cs = json::object();
    for (const auto& [w, a] : per_stage) cs[w] = a;
    out["constants"][c] = cs;
  }
  out["predicates"] = json::object();
  for (const auto& [p, per_stage] : m.predicates) {
    json ps = json::object();
    for (const auto& [w, interp] : per_stage) {
      json side = json::object();
      side["pos"] = json::array();
      for (const auto& t : interp.pos) side["pos"].push_back(t);
      side["neg"] = json::array();
      for (const auto& t : interp.neg) side["neg"].push_back(t);
      ps[w] = side;
    }
    out["predicates"][p] = ps;
  }
  auto write_pairs = [&](const char* key, const std::map<std::string, PairSet>& rel) {
    out[key] = json::object();
    for (const auto& [w, pairs] : rel) {
      json arr = json::array();
      for (const auto& [a, b] : pairs) arr.push_back(json::array({a, b}));
      out[key][w] = arr;
    }
  };
  write_pairs("id_pos", m.id_pos);
  write_pairs("id_neg", m.id_neg);
  out["persistence_safe"] = m.persistence_safe;
  return out.dump(2) + "\n";
}

}  // namespace ffde
