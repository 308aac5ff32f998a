#include "ffde/search.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ffde/valuation.hpp"
#include "json.hpp"

namespace ffde {

namespace {

using u64 = std::uint64_t;
using json = nlohmann::json;

constexpr int kMaxStages = 6;     // stage indices fit the fixed leq stride
constexpr int kMaxElems = 6;      // element indices fit the fixed pair stride
constexpr int kMaxEnumElems = 4;  // identity pair space stays enumerable
constexpr int kMaxEnumBits = 20;  // largest per-stage mask space we sweep

inline bool leq_bit(u64 leq, int i, int j) { return (leq >> (i * kMaxStages + j)) & 1; }
inline int pair_bit(int a, int b) { return a * kMaxElems + b; }

// m^r; safe for the enumerable ranges (guarded by callers).
u64 tuple_space(int m, int r) {
  u64 s = 1;
  for (int k = 0; k < r; ++k) s *= static_cast<u64>(m);
  return s;
}

// Deposits the low bits of x into the set-bit positions of mask (ascending),
// so x -> result is monotone: sweeping x enumerates submasks in ascending
// numeric order.
u64 spread(u64 x, u64 mask) {
  u64 out = 0;
  for (u64 rest = mask; rest; rest &= rest - 1) {
    if (x & 1) out |= rest & (~rest + 1);
    x >>= 1;
  }
  return out;
}

void decode_tuple(u64 idx, int m, int r, int* out) {
  for (int k = r - 1; k >= 0; --k) {
    out[k] = static_cast<int>(idx % static_cast<u64>(m));
    idx /= static_cast<u64>(m);
  }
}

bool transitive(u64 leq, int n) {
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!leq_bit(leq, i, j)) continue;
      for (int k = 0; k < n; ++k)
        if (leq_bit(leq, j, k) && !leq_bit(leq, i, k)) return false;
    }
  return true;
}

struct SigIndex {
  std::vector<std::string> consts;                 // sorted
  std::vector<std::pair<std::string, int>> preds;  // sorted name -> arity
};

SigIndex make_index(const Signature& sig) {
  SigIndex si;
  si.consts = sig.constants;
  for (const auto& [p, r] : sig.predicates) si.preds.emplace_back(p, r);
  return si;
}

// Bit-packed model over stage indices 0..n-1 and element indices 0..m-1.
struct Compact {
  int n = 1, m = 0;
  u64 leq = 0;                                      // closure incl. diagonal
  std::array<u64, kMaxStages> dom{};                // element masks
  std::vector<std::array<int, kMaxStages>> cval;    // per constant, -1 = undefined
  std::vector<std::array<u64, kMaxStages>> pos, neg;  // per predicate, tuple masks
  std::array<u64, kMaxStages> idp{}, idn{};         // pair masks (pair_bit)
};

// Pairs forced into id_neg at one stage by one predicate's extensions: tuples
// agreeing everywhere except one position force the differing components, in
// both orientations.  (Equal tuples force the diagonal at every position.)
u64 forced_from_pred(u64 posmask, u64 negmask, int m, int r) {
  if (r == 0 || posmask == 0 || negmask == 0) return 0;
  u64 out = 0;
  int a[8], b[8];
  for (u64 pm = posmask; pm; pm &= pm - 1) {
    decode_tuple(static_cast<u64>(std::countr_zero(pm)), m, r, a);
    for (u64 nm = negmask; nm; nm &= nm - 1) {
      decode_tuple(static_cast<u64>(std::countr_zero(nm)), m, r, b);
      for (int k = 0; k < r; ++k) {
        bool agree_elsewhere = true;
        for (int j = 0; j < r && agree_elsewhere; ++j)
          if (j != k && a[j] != b[j]) agree_elsewhere = false;
        if (agree_elsewhere)
          out |= (u64{1} << pair_bit(a[k], b[k])) | (u64{1} << pair_bit(b[k], a[k]));
      }
    }
  }
  return out;
}

// Identity's own diversity interaction: id_pos pairs act as positive 2-tuples
// against id_neg pairs as negative ones.
u64 forced_from_identity(u64 idp, u64 idn) {
  u64 out = 0;
  for (u64 pm = idp; pm; pm &= pm - 1) {
    const int pb = std::countr_zero(pm);
    const int a1 = pb / kMaxElems, b1 = pb % kMaxElems;
    for (u64 nm = idn; nm; nm &= nm - 1) {
      const int nb = std::countr_zero(nm);
      const int a2 = nb / kMaxElems, b2 = nb % kMaxElems;
      if (b1 == b2) out |= (u64{1} << pair_bit(a1, a2)) | (u64{1} << pair_bit(a2, a1));
      if (a1 == a2) out |= (u64{1} << pair_bit(b1, b2)) | (u64{1} << pair_bit(b2, b1));
    }
  }
  return out;
}

// All equivalence relations (as pair masks, incl. the diagonal) on the
// elements of dommask, ascending.
std::vector<u64> partition_masks(u64 dommask) {
  std::vector<int> elems;
  for (u64 dm = dommask; dm; dm &= dm - 1) elems.push_back(std::countr_zero(dm));
  std::vector<u64> out;
  std::vector<std::vector<int>> blocks;
  auto rec = [&](auto&& self, size_t i) -> void {
    if (i == elems.size()) {
      u64 mask = 0;
      for (const auto& blk : blocks)
        for (int x : blk)
          for (int y : blk) mask |= u64{1} << pair_bit(x, y);
      out.push_back(mask);
      return;
    }
    for (auto& blk : blocks) {
      blk.push_back(elems[i]);
      self(self, i + 1);
      blk.pop_back();
    }
    blocks.push_back({elems[i]});
    self(self, i + 1);
    blocks.pop_back();
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end());
  return out;
}

std::string stage_name(int i) { return "w" + std::to_string(i + 1); }
std::string elem_name(int e) { return "a" + std::to_string(e + 1); }

KripkeModel to_kripke(const Compact& cm, const SigIndex& si, bool persistence_safe) {
  KripkeModel km;
  km.persistence_safe = persistence_safe;
  for (int i = 0; i < cm.n; ++i) km.stages.push_back(stage_name(i));
  for (int i = 0; i < cm.n; ++i)
    for (int j = 0; j < cm.n; ++j)
      if (i != j && leq_bit(cm.leq, i, j)) km.order.emplace(stage_name(i), stage_name(j));
  for (int i = 0; i < cm.n; ++i) {
    auto& d = km.domains[stage_name(i)];
    for (u64 dm = cm.dom[static_cast<size_t>(i)]; dm; dm &= dm - 1)
      d.insert(elem_name(std::countr_zero(dm)));
  }
  for (size_t ci = 0; ci < si.consts.size(); ++ci)
    for (int i = 0; i < cm.n; ++i) {
      const int v = cm.cval[ci][static_cast<size_t>(i)];
      if (v >= 0) km.constants[si.consts[ci]][stage_name(i)] = elem_name(v);
    }
  int comp[8];
  for (size_t pi = 0; pi < si.preds.size(); ++pi) {
    const int r = si.preds[pi].second;
    for (int i = 0; i < cm.n; ++i) {
      PredInterp& interp = km.predicates[si.preds[pi].first][stage_name(i)];
      for (int side = 0; side < 2; ++side) {
        const u64 mask = (side == 0 ? cm.pos : cm.neg)[pi][static_cast<size_t>(i)];
        for (u64 tm = mask; tm; tm &= tm - 1) {
          decode_tuple(static_cast<u64>(std::countr_zero(tm)), std::max(cm.m, 1), r, comp);
          Tuple t;
          for (int k = 0; k < r; ++k) t.push_back(elem_name(comp[k]));
          (side == 0 ? interp.pos : interp.neg).insert(std::move(t));
        }
      }
    }
  }
  for (int i = 0; i < cm.n; ++i) {
    PairSet &ip = km.id_pos[stage_name(i)], &in = km.id_neg[stage_name(i)];
    for (u64 pm = cm.idp[static_cast<size_t>(i)]; pm; pm &= pm - 1) {
      const int b = std::countr_zero(pm);
      ip.emplace(elem_name(b / kMaxElems), elem_name(b % kMaxElems));
    }
    for (u64 nm = cm.idn[static_cast<size_t>(i)]; nm; nm &= nm - 1) {
      const int b = std::countr_zero(nm);
      in.emplace(elem_name(b / kMaxElems), elem_name(b % kMaxElems));
    }
  }
  return km;
}

// ---------------------------------------------------------------------------
// Canonical enumeration: models are built dimension by dimension, each stage
// column filtered against the already-assigned stages, so only valid models
// reach the callback.

struct Enumerator {
  const SigIndex& si;
  const Bounds& b;
  const std::function<bool(const Compact&)>& visit;
  u64 count = 0;
  bool stop = false;
  Compact cm;

  std::vector<std::pair<int, int>> offdiag;           // pair per order bit
  std::array<u64, kMaxStages> dompairs{};             // per stage
  std::vector<std::array<u64, kMaxStages>> allowed;   // per pred, per stage
  std::vector<std::vector<u64>> parts;                // per stage
  std::array<u64, kMaxStages> forced_pred{};          // per stage

  Enumerator(const SigIndex& s, const Bounds& bb, const std::function<bool(const Compact&)>& v)
      : si(s), b(bb), visit(v) {
    cm.cval.resize(si.consts.size());
    cm.pos.resize(si.preds.size());
    cm.neg.resize(si.preds.size());
    allowed.resize(si.preds.size());
  }

  void run() {
    for (int n = 1; n <= b.max_stages && !stop; ++n) {
      cm.n = n;
      offdiag.clear();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) offdiag.emplace_back(i, j);
      for (int m = 0; m <= b.max_elements && !stop; ++m) {
        cm.m = m;
        const u64 omax = u64{1} << offdiag.size();
        for (u64 om = 0; om < omax && !stop; ++om) {
          u64 leq = 0;
          for (int i = 0; i < n; ++i) leq |= u64{1} << (i * kMaxStages + i);
          for (size_t t = 0; t < offdiag.size(); ++t)
            if ((om >> t) & 1)
              leq |= u64{1} << (offdiag[t].first * kMaxStages + offdiag[t].second);
          if (!transitive(leq, n)) continue;
          cm.leq = leq;
          domains_rec(0);
        }
      }
    }
  }

  void domains_rec(int s) {
    if (stop) return;
    if (s == cm.n) {
      u64 all = 0;
      for (int i = 0; i < cm.n; ++i) all |= cm.dom[static_cast<size_t>(i)];
      if (all != (u64{1} << cm.m) - 1) return;  // every pool element is used
      prepare_domain_caches();
      const_rec(0, 0);
      return;
    }
    const u64 full = (u64{1} << cm.m) - 1;
    for (u64 mask = 0; mask <= full && !stop; ++mask) {
      bool ok = true;
      for (int t = 0; t < s && ok; ++t) {
        if (leq_bit(cm.leq, t, s) && (cm.dom[static_cast<size_t>(t)] & ~mask)) ok = false;
        if (leq_bit(cm.leq, s, t) && (mask & ~cm.dom[static_cast<size_t>(t)])) ok = false;
      }
      if (!ok) continue;
      cm.dom[static_cast<size_t>(s)] = mask;
      domains_rec(s + 1);
      if (cm.m == 0) break;  // full == 0: single empty mask
    }
  }

  void prepare_domain_caches() {
    parts.assign(static_cast<size_t>(cm.n), {});
    for (int s = 0; s < cm.n; ++s) {
      const u64 d = cm.dom[static_cast<size_t>(s)];
      u64 dp = 0;
      for (u64 am = d; am; am &= am - 1)
        for (u64 bm = d; bm; bm &= bm - 1)
          dp |= u64{1} << pair_bit(std::countr_zero(am), std::countr_zero(bm));
      dompairs[static_cast<size_t>(s)] = dp;
      parts[static_cast<size_t>(s)] = partition_masks(d);
    }
    int comp[8];
    for (size_t pi = 0; pi < si.preds.size(); ++pi) {
      const int r = si.preds[pi].second;
      const u64 space = tuple_space(cm.m, r);
      for (int s = 0; s < cm.n; ++s) {
        u64 ok = 0;
        for (u64 idx = 0; idx < space; ++idx) {
          decode_tuple(idx, std::max(cm.m, 1), r, comp);
          bool inside = true;
          for (int k = 0; k < r && inside; ++k)
            if (!((cm.dom[static_cast<size_t>(s)] >> comp[k]) & 1)) inside = false;
          if (inside) ok |= u64{1} << idx;
        }
        allowed[pi][static_cast<size_t>(s)] = ok;
      }
    }
  }

  void const_rec(size_t ci, int s) {
    if (stop) return;
    if (ci == si.consts.size()) {
      pred_rec(0, 0, 0);
      return;
    }
    if (s == cm.n) {
      const_rec(ci + 1, 0);
      return;
    }
    auto try_value = [&](int v) {
      for (int t = 0; t < s; ++t) {
        const int u = cm.cval[ci][static_cast<size_t>(t)];
        if (leq_bit(cm.leq, t, s)) {
          if (u >= 0 && v != u) return;                          // dropped or not rigid
          if (u < 0 && v >= 0 && b.persistence_safe) return;     // defined late
        }
        if (leq_bit(cm.leq, s, t)) {
          if (v >= 0 && u != v) return;
          if (v < 0 && u >= 0 && b.persistence_safe) return;
        }
      }
      cm.cval[ci][static_cast<size_t>(s)] = v;
      const_rec(ci, s + 1);
    };
    try_value(-1);
    for (u64 dm = cm.dom[static_cast<size_t>(s)]; dm && !stop; dm &= dm - 1)
      try_value(std::countr_zero(dm));
  }

  void pred_rec(size_t pi, int side, int s) {
    if (stop) return;
    if (pi == si.preds.size()) {
      idp_rec(0);
      return;
    }
    if (s == cm.n) {
      if (side == 0)
        pred_rec(pi, 1, 0);
      else
        pred_rec(pi + 1, 0, 0);
      return;
    }
    auto& col = (side == 0 ? cm.pos : cm.neg)[pi];
    const u64 avail = allowed[pi][static_cast<size_t>(s)];
    const int k = std::popcount(avail);
    for (u64 x = 0; x < (u64{1} << k) && !stop; ++x) {
      const u64 mask = spread(x, avail);
      bool ok = true;
      for (int t = 0; t < s && ok; ++t) {
        if (leq_bit(cm.leq, t, s) && (col[static_cast<size_t>(t)] & ~mask)) ok = false;
        if (leq_bit(cm.leq, s, t) && (mask & ~col[static_cast<size_t>(t)])) ok = false;
      }
      if (!ok) continue;
      col[static_cast<size_t>(s)] = mask;
      pred_rec(pi, side, s + 1);
    }
  }

  bool congruent_at(int s, u64 idp) const {
    int comp[8];
    for (u64 pm = idp; pm; pm &= pm - 1) {
      const int pb = std::countr_zero(pm);
      const int a = pb / kMaxElems, b2 = pb % kMaxElems;
      if (a == b2) continue;
      for (size_t pi = 0; pi < si.preds.size(); ++pi) {
        const int r = si.preds[pi].second;
        if (r == 0) continue;
        for (int side = 0; side < 2; ++side) {
          const u64 mask = (side == 0 ? cm.pos : cm.neg)[pi][static_cast<size_t>(s)];
          for (u64 tm = mask; tm; tm &= tm - 1) {
            decode_tuple(static_cast<u64>(std::countr_zero(tm)), std::max(cm.m, 1), r, comp);
            for (int k = 0; k < r; ++k) {
              if (comp[k] != a) continue;
              u64 idx = 0;
              for (int j = 0; j < r; ++j)
                idx = idx * static_cast<u64>(std::max(cm.m, 1)) +
                      static_cast<u64>(j == k ? b2 : comp[j]);
              if (!((mask >> idx) & 1)) return false;
            }
          }
        }
      }
    }
    return true;
  }

  void idp_rec(int s) {
    if (stop) return;
    if (s == cm.n) {
      for (int i = 0; i < cm.n; ++i) {
        u64 f = 0;
        for (size_t pi = 0; pi < si.preds.size(); ++pi)
          f |= forced_from_pred(cm.pos[pi][static_cast<size_t>(i)],
                                cm.neg[pi][static_cast<size_t>(i)], std::max(cm.m, 1),
                                si.preds[pi].second);
        forced_pred[static_cast<size_t>(i)] = f;
      }
      idn_rec(0);
      return;
    }
    for (u64 mask : parts[static_cast<size_t>(s)]) {
      if (stop) return;
      bool ok = true;
      for (int t = 0; t < s && ok; ++t) {
        if (leq_bit(cm.leq, t, s) && (cm.idp[static_cast<size_t>(t)] & ~mask)) ok = false;
        if (leq_bit(cm.leq, s, t) && (mask & ~cm.idp[static_cast<size_t>(t)])) ok = false;
      }
      if (!ok || !congruent_at(s, mask)) continue;
      cm.idp[static_cast<size_t>(s)] = mask;
      idp_rec(s + 1);
    }
  }

  void idn_rec(int s) {
    if (stop) return;
    if (s == cm.n) {
      ++count;
      if (!visit(cm)) stop = true;
      return;
    }
    const u64 avail = dompairs[static_cast<size_t>(s)];
    const int k = std::popcount(avail);
    for (u64 x = 0; x < (u64{1} << k) && !stop; ++x) {
      const u64 mask = spread(x, avail);
      bool ok = true;
      for (int t = 0; t < s && ok; ++t) {
        if (leq_bit(cm.leq, t, s) && (cm.idn[static_cast<size_t>(t)] & ~mask)) ok = false;
        if (leq_bit(cm.leq, s, t) && (mask & ~cm.idn[static_cast<size_t>(t)])) ok = false;
      }
      if (!ok) continue;
      const u64 forced = forced_pred[static_cast<size_t>(s)] |
                         forced_from_identity(cm.idp[static_cast<size_t>(s)], mask);
      if (forced & ~mask) continue;
      cm.idn[static_cast<size_t>(s)] = mask;
      idn_rec(s + 1);
    }
  }
};

void check_enum_bounds(const SigIndex& si, const Bounds& b) {
  if (b.max_stages < 1 || b.max_stages > kMaxStages)
    throw InvalidArgument("search: max_stages must be between 1 and 6");
  if (b.max_elements < 0 || b.max_elements > kMaxEnumElems)
    throw InvalidArgument("search: max_elements must be between 0 and 4 for enumeration");
  for (const auto& [p, r] : si.preds)
    if (tuple_space(b.max_elements, r) > kMaxEnumBits)
      throw InvalidArgument("search: tuple space of predicate '" + p +
                            "' is too large to enumerate");
}

u64 enumerate_compact(const SigIndex& si, const Bounds& b,
                      const std::function<bool(const Compact&)>& visit) {
  check_enum_bounds(si, b);
  Enumerator e(si, b, visit);
  e.run();
  return e.count;
}

// ---------------------------------------------------------------------------
// Formulas compiled against a SigIndex, evaluated directly on Compact models.

struct CTerm {
  bool is_var = false;
  int idx = -1;  // variable slot or constant index
};

struct CNode {
  Conn kind = Conn::Atom;
  int pred = -1;
  int arity = 0;
  std::vector<CTerm> terms;
  int slot = -1;
  std::unique_ptr<CNode> l, r;
};

struct Compiled {
  std::unique_ptr<CNode> root;
  int slots = 0;
};

std::unique_ptr<CNode> compile_node(const SigIndex& si, const FormulaPtr& f,
                                    std::map<std::string, int>& active, int& next_slot) {
  auto nd = std::make_unique<CNode>();
  nd->kind = f->kind;
  auto cterm = [&](const Term& t) -> CTerm {
    switch (t.kind) {
      case TermKind::Variable:
        return {true, active.at(t.name)};
      case TermKind::Constant: {
        const auto it = std::find(si.consts.begin(), si.consts.end(), t.name);
        if (it == si.consts.end())
          throw InvalidArgument("search: unknown constant '" + t.name + "'");
        return {false, static_cast<int>(it - si.consts.begin())};
      }
      case TermKind::DiagramConstant:
        throw InvalidArgument("search: diagram constants name elements of one specific model "
                              "and cannot be searched over");
    }
    throw InvalidArgument("search: bad term");
  };
  switch (f->kind) {
    case Conn::Atom: {
      for (size_t pi = 0; pi < si.preds.size(); ++pi)
        if (si.preds[pi].first == f->name) {
          nd->pred = static_cast<int>(pi);
          nd->arity = si.preds[pi].second;
        }
      if (nd->pred < 0) throw InvalidArgument("search: unknown predicate '" + f->name + "'");
      for (const auto& t : f->terms) nd->terms.push_back(cterm(t));
      break;
    }
    case Conn::Id:
    case Conn::Def:
      for (const auto& t : f->terms) nd->terms.push_back(cterm(t));
      break;
    case Conn::Neg:
      nd->l = compile_node(si, f->left, active, next_slot);
      break;
    case Conn::And:
    case Conn::Or:
    case Conn::Imp:
      nd->l = compile_node(si, f->left, active, next_slot);
      nd->r = compile_node(si, f->right, active, next_slot);
      break;
    case Conn::Forall:
    case Conn::Exists: {
      nd->slot = next_slot++;
      const auto prev = active.find(f->name);
      std::optional<int> saved;
      if (prev != active.end()) saved = prev->second;
      active[f->name] = nd->slot;
      nd->l = compile_node(si, f->left, active, next_slot);
      if (saved)
        active[f->name] = *saved;
      else
        active.erase(f->name);
      break;
    }
  }
  return nd;
}

Compiled compile_formula(const SigIndex& si, const FormulaPtr& f) {
  Compiled c;
  std::map<std::string, int> active;
  c.root = compile_node(si, f, active, c.slots);
  return c;
}

bool ceval(const Compact& cm, const CNode& nd, int w, bool neg, std::vector<int>& env) {
  auto tval = [&](const CTerm& t) -> int {
    if (t.is_var) return env[static_cast<size_t>(t.idx)];
    const int v = cm.cval[static_cast<size_t>(t.idx)][static_cast<size_t>(w)];
    return v;
  };
  switch (nd.kind) {
    case Conn::Def: {
      const int v = tval(nd.terms[0]);
      return neg ? v < 0 : v >= 0;
    }
    case Conn::Id: {
      const int a = tval(nd.terms[0]), b = tval(nd.terms[1]);
      if (a < 0 || b < 0) return false;
      const u64 rel = (neg ? cm.idn : cm.idp)[static_cast<size_t>(w)];
      return (rel >> pair_bit(a, b)) & 1;
    }
    case Conn::Atom: {
      u64 idx = 0;
      for (const auto& t : nd.terms) {
        const int v = tval(t);
        if (v < 0) return false;
        idx = idx * static_cast<u64>(std::max(cm.m, 1)) + static_cast<u64>(v);
      }
      const u64 mask = (neg ? cm.neg : cm.pos)[static_cast<size_t>(nd.pred)][static_cast<size_t>(w)];
      return (mask >> idx) & 1;
    }
    case Conn::Neg:
      return ceval(cm, *nd.l, w, !neg, env);
    case Conn::And:
      if (neg) return ceval(cm, *nd.l, w, true, env) || ceval(cm, *nd.r, w, true, env);
      return ceval(cm, *nd.l, w, false, env) && ceval(cm, *nd.r, w, false, env);
    case Conn::Or:
      if (neg) return ceval(cm, *nd.l, w, true, env) && ceval(cm, *nd.r, w, true, env);
      return ceval(cm, *nd.l, w, false, env) || ceval(cm, *nd.r, w, false, env);
    case Conn::Imp: {
      if (neg) return ceval(cm, *nd.l, w, false, env) && ceval(cm, *nd.r, w, true, env);
      for (int w2 = 0; w2 < cm.n; ++w2) {
        if (!leq_bit(cm.leq, w, w2)) continue;
        if (ceval(cm, *nd.l, w2, false, env) && !ceval(cm, *nd.r, w2, false, env)) return false;
      }
      return true;
    }
    case Conn::Forall:
    case Conn::Exists: {
      const bool universal = (nd.kind == Conn::Forall) != neg;
      if (universal) {
        for (int w2 = 0; w2 < cm.n; ++w2) {
          if (!leq_bit(cm.leq, w, w2)) continue;
          for (u64 dm = cm.dom[static_cast<size_t>(w2)]; dm; dm &= dm - 1) {
            env[static_cast<size_t>(nd.slot)] = std::countr_zero(dm);
            if (!ceval(cm, *nd.l, w2, neg, env)) return false;
          }
        }
        return true;
      }
      for (u64 dm = cm.dom[static_cast<size_t>(w)]; dm; dm &= dm - 1) {
        env[static_cast<size_t>(nd.slot)] = std::countr_zero(dm);
        if (ceval(cm, *nd.l, w, neg, env)) return true;
      }
      return false;
    }
  }
  return false;
}

void collect_predicates(const FormulaPtr& f, std::set<std::string>& out) {
  switch (f->kind) {
    case Conn::Atom:
      out.insert(f->name);
      return;
    case Conn::Neg:
    case Conn::Forall:
    case Conn::Exists:
      collect_predicates(f->left, out);
      return;
    case Conn::And:
    case Conn::Or:
    case Conn::Imp:
      collect_predicates(f->left, out);
      collect_predicates(f->right, out);
      return;
    case Conn::Id:
    case Conn::Def:
      return;
  }
}

}  // namespace

std::uint64_t enumerate_models(const Signature& sig, const Bounds& bounds,
                               const std::function<bool(const KripkeModel&)>& visit) {
  const SigIndex si = make_index(sig);
  return enumerate_compact(si, bounds, [&](const Compact& cm) {
    return visit(to_kripke(cm, si, bounds.persistence_safe));
  });
}

SearchVerdict find_countermodel(const Signature& sig, const std::vector<FormulaPtr>& gamma,
                                const FormulaPtr& goal, const Bounds& bounds) {
  for (const auto& g : gamma) check_sentence(sig, g);
  check_sentence(sig, goal);

  // Only the symbols the query mentions span search dimensions.
  std::set<std::string> used_consts = constants_of(goal), used_preds;
  collect_predicates(goal, used_preds);
  for (const auto& g : gamma) {
    const auto cs = constants_of(g);
    used_consts.insert(cs.begin(), cs.end());
    collect_predicates(g, used_preds);
  }
  Signature proj;
  proj.logic = sig.logic;
  proj.constants.assign(used_consts.begin(), used_consts.end());
  for (const auto& p : used_preds) proj.predicates[p] = sig.predicate_arity(p);

  const SigIndex si = make_index(proj);
  std::vector<Compiled> cgamma;
  for (const auto& g : gamma) cgamma.push_back(compile_formula(si, g));
  Compiled cgoal = compile_formula(si, goal);
  int slots = cgoal.slots;
  for (const auto& c : cgamma) slots = std::max(slots, c.slots);
  std::vector<int> env(static_cast<size_t>(slots), -1);

  SearchVerdict v;
  v.bounds = bounds;
  v.models_checked = enumerate_compact(si, bounds, [&](const Compact& cm) {
    for (int w = 0; w < cm.n; ++w) {
      bool premises_hold = true;
      for (const auto& c : cgamma)
        if (!ceval(cm, *c.root, w, false, env)) {
          premises_hold = false;
          break;
        }
      if (!premises_hold || ceval(cm, *cgoal.root, w, false, env)) continue;
      v.found = true;
      v.model = to_kripke(cm, si, bounds.persistence_safe);
      v.stage = stage_name(w);
      return false;
    }
    return true;
  });
  return v;
}

std::string verdict_to_json(const SearchVerdict& v) {
  json out;
  if (v.found) {
    out["verdict"] = "countermodel";
    out["stage"] = v.stage;
    out["model"] = json::parse(model_to_json(v.model));
  } else {
    out["verdict"] = "exhausted";
    out["bounds"] = {{"max_stages", v.bounds.max_stages},
                     {"max_elements", v.bounds.max_elements},
                     {"persistence_safe", v.bounds.persistence_safe}};
    out["models_checked"] = v.models_checked;
  }
  return out.dump(2) + "\n";
}

std::uint64_t rng_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw InvalidArgument("rng_below: n must be positive");
  const u64 max = std::numeric_limits<u64>::max();
  const u64 span = max - max % n;  // largest multiple of n representable
  u64 x;
  do {
    x = rng();
  } while (x >= span);
  return x % n;
}

int rng_int(std::mt19937_64& rng, int lo, int hi) {
  if (hi < lo) throw InvalidArgument("rng_int: empty range");
  return lo + static_cast<int>(rng_below(rng, static_cast<u64>(hi - lo) + 1));
}

KripkeModel random_model(const Signature& sig, const Bounds& bounds, std::uint64_t seed) {
  if (bounds.max_stages < 1 || bounds.max_stages > kMaxStages)
    throw InvalidArgument("random_model: max_stages must be between 1 and 6");
  if (bounds.max_elements < 0 || bounds.max_elements > kMaxElems)
    throw InvalidArgument("random_model: max_elements must be between 0 and 6");
  std::mt19937_64 rng(seed);
  const int n = 1 + static_cast<int>(rng_below(rng, static_cast<u64>(bounds.max_stages)));
  const int m = static_cast<int>(rng_below(rng, static_cast<u64>(bounds.max_elements) + 1));

  KripkeModel km;
  km.persistence_safe = bounds.persistence_safe;
  for (int i = 0; i < n; ++i) km.stages.push_back(stage_name(i));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && rng_below(rng, 4) == 0) km.order.emplace(stage_name(i), stage_name(j));
  const PairSet clo = order_closure_pairs(km);
  auto leq = [&](int i, int j) {
    return clo.count({stage_name(i), stage_name(j)}) > 0;
  };

  // Domains: random, then closed upward.
  std::vector<u64> dm(static_cast<size_t>(n));
  const u64 full = (u64{1} << m) - 1;
  for (auto& d : dm) d = rng() & full;
  for (bool changed = true; changed;) {
    changed = false;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (leq(i, j) && (dm[static_cast<size_t>(i)] & ~dm[static_cast<size_t>(j)])) {
          dm[static_cast<size_t>(j)] |= dm[static_cast<size_t>(i)];
          changed = true;
        }
  }
  for (int i = 0; i < n; ++i) {
    auto& d = km.domains[stage_name(i)];
    for (u64 x = dm[static_cast<size_t>(i)]; x; x &= x - 1) d.insert(elem_name(std::countr_zero(x)));
  }

  // Comparability components of the stage order.
  std::vector<int> comp(static_cast<size_t>(n), -1);
  int ncomp = 0;
  for (int i = 0; i < n; ++i) {
    if (comp[static_cast<size_t>(i)] >= 0) continue;
    comp[static_cast<size_t>(i)] = ncomp;
    std::vector<int> queue{i};
    while (!queue.empty()) {
      const int x = queue.back();
      queue.pop_back();
      for (int j = 0; j < n; ++j)
        if (comp[static_cast<size_t>(j)] < 0 && (leq(x, j) || leq(j, x))) {
          comp[static_cast<size_t>(j)] = ncomp;
          queue.push_back(j);
        }
    }
    ++ncomp;
  }

  // Constants: pick a definedness region (component-closed when persistence is
  // enforced, upward-closed otherwise) and one value per comparable component.
  for (const auto& c : sig.constants) {
    std::vector<bool> defined(static_cast<size_t>(n), false);
    if (bounds.persistence_safe) {
      std::vector<bool> take(static_cast<size_t>(ncomp));
      for (int k = 0; k < ncomp; ++k) take[static_cast<size_t>(k)] = rng_below(rng, 2) == 1;
      for (int i = 0; i < n; ++i) defined[static_cast<size_t>(i)] = take[static_cast<size_t>(comp[static_cast<size_t>(i)])];
    } else {
      for (int i = 0; i < n; ++i) defined[static_cast<size_t>(i)] = rng_below(rng, 3) == 0;
      for (bool changed = true; changed;) {
        changed = false;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            if (leq(i, j) && defined[static_cast<size_t>(i)] && !defined[static_cast<size_t>(j)]) {
              defined[static_cast<size_t>(j)] = true;
              changed = true;
            }
      }
    }
    // Components of the region, in stage order; each needs a common element.
    std::vector<int> rcomp(static_cast<size_t>(n), -1);
    int nr = 0;
    for (int i = 0; i < n; ++i) {
      if (!defined[static_cast<size_t>(i)] || rcomp[static_cast<size_t>(i)] >= 0) continue;
      rcomp[static_cast<size_t>(i)] = nr;
      std::vector<int> queue{i};
      while (!queue.empty()) {
        const int x = queue.back();
        queue.pop_back();
        for (int j = 0; j < n; ++j)
          if (defined[static_cast<size_t>(j)] && rcomp[static_cast<size_t>(j)] < 0 &&
              (leq(x, j) || leq(j, x))) {
            rcomp[static_cast<size_t>(j)] = nr;
            queue.push_back(j);
          }
      }
      ++nr;
    }
    for (int k = 0; k < nr; ++k) {
      u64 options = full;
      for (int i = 0; i < n; ++i)
        if (rcomp[static_cast<size_t>(i)] == k) options &= dm[static_cast<size_t>(i)];
      if (options == 0) continue;  // no common element: leave the component undefined
      const int nopt = std::popcount(options);
      int pick = static_cast<int>(rng_below(rng, static_cast<u64>(nopt)));
      int value = -1;
      for (u64 x = options; x; x &= x - 1)
        if (pick-- == 0) value = std::countr_zero(x);
      for (int i = 0; i < n; ++i)
        if (rcomp[static_cast<size_t>(i)] == k) km.constants[c][stage_name(i)] = elem_name(value);
    }
  }

  // Predicates: a few random in-domain tuples per stage, closed upward.
  for (const auto& [p, r] : sig.predicates) {
    for (int i = 0; i < n; ++i) km.predicates[p][stage_name(i)] = {};
    for (int i = 0; i < n; ++i) {
      std::vector<int> elems;
      for (u64 x = dm[static_cast<size_t>(i)]; x; x &= x - 1) elems.push_back(std::countr_zero(x));
      if (elems.empty() && r > 0) continue;
      PredInterp& interp = km.predicates[p][stage_name(i)];
      for (int side = 0; side < 2; ++side) {
        const int count = static_cast<int>(rng_below(rng, 4));
        for (int t = 0; t < count; ++t) {
          Tuple tup;
          for (int k = 0; k < r; ++k)
            tup.push_back(elem_name(elems[rng_below(rng, elems.size())]));
          (side == 0 ? interp.pos : interp.neg).insert(std::move(tup));
        }
      }
    }
  }

  // Identity extension: random pairs over the diagonal, closed to a monotone
  // equivalence, with predicate extensions closed under its orbits so it is
  // a congruence.
  std::vector<u64> idp(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    for (u64 x = dm[static_cast<size_t>(i)]; x; x &= x - 1) {
      const int e = std::countr_zero(x);
      idp[static_cast<size_t>(i)] |= u64{1} << pair_bit(e, e);
    }
    std::vector<int> elems;
    for (u64 x = dm[static_cast<size_t>(i)]; x; x &= x - 1) elems.push_back(std::countr_zero(x));
    if (elems.size() >= 2) {
      const int extra = static_cast<int>(rng_below(rng, 3));
      for (int t = 0; t < extra; ++t) {
        const int a = elems[rng_below(rng, elems.size())];
        const int b = elems[rng_below(rng, elems.size())];
        idp[static_cast<size_t>(i)] |= (u64{1} << pair_bit(a, b)) | (u64{1} << pair_bit(b, a));
      }
    }
  }
  auto close_equiv = [&](u64 rel) {
    for (bool changed = true; changed;) {
      changed = false;
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          if (!((rel >> pair_bit(a, b)) & 1)) continue;
          for (int c2 = 0; c2 < m; ++c2)
            if (((rel >> pair_bit(b, c2)) & 1) && !((rel >> pair_bit(a, c2)) & 1)) {
              rel |= u64{1} << pair_bit(a, c2);
              changed = true;
            }
        }
    }
    return rel;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (auto& rel : idp) {
      const u64 closed = close_equiv(rel);
      if (closed != rel) {
        rel = closed;
        changed = true;
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (leq(i, j) && (idp[static_cast<size_t>(i)] & ~idp[static_cast<size_t>(j)])) {
          idp[static_cast<size_t>(j)] |= idp[static_cast<size_t>(i)];
          changed = true;
        }
  }
  for (int i = 0; i < n; ++i) {
    auto& ip = km.id_pos[stage_name(i)];
    ip.clear();
    for (u64 x = idp[static_cast<size_t>(i)]; x; x &= x - 1) {
      const int b = std::countr_zero(x);
      ip.emplace(elem_name(b / kMaxElems), elem_name(b % kMaxElems));
    }
    km.id_neg[stage_name(i)];
  }
  // Orbit-close predicate extensions (and keep them monotone).
  for (bool changed = true; changed;) {
    changed = false;
    for (auto& [p, per_stage] : km.predicates) {
      for (int i = 0; i < n; ++i) {
        PredInterp& interp = per_stage[stage_name(i)];
        const u64 rel = idp[static_cast<size_t>(i)];
        for (auto* side : {&interp.pos, &interp.neg}) {
          std::vector<Tuple> add;
          for (const auto& t : *side)
            for (size_t k = 0; k < t.size(); ++k) {
              const int a = std::stoi(t[k].substr(1)) - 1;
              for (int b = 0; b < m; ++b)
                if ((rel >> pair_bit(a, b)) & 1) {
                  Tuple t2 = t;
                  t2[k] = elem_name(b);
                  if (!side->count(t2)) add.push_back(std::move(t2));
                }
            }
          if (!add.empty()) changed = true;
          for (auto& t : add) side->insert(std::move(t));
        }
      }
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (!leq(i, j) || i == j) continue;
          PredInterp& lo = per_stage[stage_name(i)];
          PredInterp& hi = per_stage[stage_name(j)];
          for (const auto& t : lo.pos)
            if (hi.pos.insert(t).second) changed = true;
          for (const auto& t : lo.neg)
            if (hi.neg.insert(t).second) changed = true;
        }
    }
  }

  // Seed id_neg with a few random pairs, then saturate for diversity and
  // monotonicity.
  for (int i = 0; i < n; ++i) {
    std::vector<int> elems;
    for (u64 x = dm[static_cast<size_t>(i)]; x; x &= x - 1) elems.push_back(std::countr_zero(x));
    if (elems.empty()) continue;
    const int extra = static_cast<int>(rng_below(rng, 3));
    auto& in = km.id_neg[stage_name(i)];
    for (int t = 0; t < extra; ++t) {
      const int a = elems[rng_below(rng, elems.size())];
      const int b = elems[rng_below(rng, elems.size())];
      in.emplace(elem_name(a), elem_name(b));
    }
  }
  km = saturate(sig, km);

  const ValidationReport rep = validate(sig, km);
  if (!rep.ok())
    throw std::logic_error("random_model: sampled model failed validation: " +
                           report_to_json(rep));
  return km;
}

FormulaPtr random_sentence(const Signature& sig, int max_depth, std::mt19937_64& rng) {
  std::vector<std::string> bound;
  int var_counter = 0;
  auto gen = [&](auto&& self, int depth) -> FormulaPtr {
    const bool have_terms = !sig.constants.empty() || !bound.empty();
    auto term = [&]() -> Term {
      const std::size_t total = sig.constants.size() + bound.size();
      const std::size_t i = rng_below(rng, total);
      if (i < bound.size()) return Term::variable(bound[i]);
      return Term::constant(sig.constants[i - bound.size()]);
    };
    using Gen = std::function<FormulaPtr()>;
    std::vector<std::pair<int, Gen>> opts;
    for (const auto& [p, r] : sig.predicates) {
      if (r > 0 && !have_terms) continue;
      opts.push_back({1, [&, p = p, r = r] {
                        std::vector<Term> args;
                        for (int k = 0; k < r; ++k) args.push_back(term());
                        return mk_atom(p, std::move(args));
                      }});
    }
    if (have_terms) {
      opts.push_back({1, [&] { return mk_def(term()); }});
      opts.push_back({1, [&] {
                        const Term a = term();
                        const Term b = term();
                        return mk_id(a, b);
                      }});
    }
    if (depth > 0) {
      opts.push_back({2, [&, depth] { return mk_neg(self(self, depth - 1)); }});
      opts.push_back({1, [&, depth] {
                        FormulaPtr l = self(self, depth - 1);
                        FormulaPtr r = self(self, depth - 1);
                        return mk_and(std::move(l), std::move(r));
                      }});
      opts.push_back({1, [&, depth] {
                        FormulaPtr l = self(self, depth - 1);
                        FormulaPtr r = self(self, depth - 1);
                        return mk_or(std::move(l), std::move(r));
                      }});
      if (sig.logic == Logic::FN4)
        opts.push_back({1, [&, depth] {
                          FormulaPtr l = self(self, depth - 1);
                          FormulaPtr r = self(self, depth - 1);
                          return mk_imp(std::move(l), std::move(r));
                        }});
      opts.push_back({2, [&, depth] {
                        const std::string v = "x" + std::to_string(++var_counter);
                        bound.push_back(v);
                        FormulaPtr body = self(self, depth - 1);
                        bound.pop_back();
                        return rng_below(rng, 2) == 0 ? mk_forall(v, std::move(body))
                                                      : mk_exists(v, std::move(body));
                      }});
    }
    if (opts.empty()) {
      const std::string v = "x" + std::to_string(++var_counter);
      return mk_forall(v, mk_def(Term::variable(v)));
    }
    int total = 0;
    for (const auto& [w, _] : opts) total += w;
    int pick = static_cast<int>(rng_below(rng, static_cast<u64>(total)));
    for (const auto& [w, g] : opts) {
      pick -= w;
      if (pick < 0) return g();
    }
    return opts.back().second();
  };
  return gen(gen, max_depth);
}

namespace {

DerivationPtr make_node(Rule rule, FormulaPtr conclusion, std::vector<DerivationPtr> premises,
                        std::optional<int> discharge = std::nullopt, std::string eigen = "",
                        FormulaPtr tmpl = nullptr, std::string var = "",
                        std::optional<int> index = std::nullopt) {
  auto d = std::make_shared<Derivation>();
  d->rule = rule;
  d->conclusion = std::move(conclusion);
  d->premises = std::move(premises);
  d->discharge = discharge;
  d->eigen = std::move(eigen);
  d->tmpl = std::move(tmpl);
  d->var = std::move(var);
  d->index = index;
  return d;
}

// Replaces every occurrence of the named constant by a variable; the inverse
// of substitute for the abstraction templates the fuzzer builds.
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

// Random derivation synthesis: goal-directed, introduction-biased, with
// occasional elimination detours and hypothesis leaves.  Quantifier and
// identity rules carry double weight.  Trees are *candidate* derivations;
// the checker is the judge, and rejected trees are part of the exercise.
struct Synth {
  const Signature& sig;
  std::mt19937_64& rng;
  Synth(const Signature& s, std::mt19937_64& r) : sig(s), rng(r) {}
  int next_discharge = 1;
  int next_mint = 1;
  int next_tvar = 0;
  int nodes = 0;
  std::vector<std::pair<FormulaPtr, int>> avail;  // dischargeable hypotheses

  static constexpr int kNodeBudget = 80;

  int open_label() { return 1000 + static_cast<int>(rng_below(rng, 3)); }
  std::string mint_eigen() { return "e#" + std::to_string(next_mint++); }
  std::string mint_var() { return "y" + std::to_string(++next_tvar); }

  std::optional<Term> ground() {
    if (sig.constants.empty()) return std::nullopt;
    return Term::constant(sig.constants[rng_below(rng, sig.constants.size())]);
  }

  // Small open formula in `var`: a definedness claim, a predicate
  // application, or an identity with a ground term.
  FormulaPtr open_template(const std::string& var) {
    const Term x = Term::variable(var);
    std::vector<FormulaPtr> pool;
    pool.push_back(mk_def(x));
    for (const auto& [p, r] : sig.predicates) {
      if (r == 1) pool.push_back(mk_atom(p, {x}));
      if (r == 2 && !sig.constants.empty()) {
        const auto g = *ground();
        pool.push_back(mk_atom(p, {x, g}));
        pool.push_back(mk_atom(p, {g, x}));
      }
    }
    if (auto g = ground()) pool.push_back(mk_id(x, *g));
    return pool[rng_below(rng, pool.size())];
  }

  DerivationPtr prove(const FormulaPtr& goal, int depth) {
    ++nodes;
    if (nodes > kNodeBudget) return hyp(goal, open_label());
    using Builder = std::function<DerivationPtr()>;
    std::vector<std::pair<int, Builder>> cands;

    for (auto it = avail.rbegin(); it != avail.rend(); ++it)
      if (equal(it->first, goal)) {
        const int lbl = it->second;
        cands.push_back({6, [this, goal, lbl] { return hyp(goal, lbl); }});
        break;
      }
    cands.push_back({depth == 0 ? 8 : 1, [this, goal] { return hyp(goal, open_label()); }});

    if (depth > 0) {
      add_intros(cands, goal, depth);
      add_elims(cands, goal, depth);
    }

    int total = 0;
    for (const auto& [w, _] : cands) total += w;
    int pick = static_cast<int>(rng_below(rng, static_cast<u64>(total)));
    for (const auto& [w, b] : cands) {
      pick -= w;
      if (pick < 0) return b();
    }
    return cands.back().second();
  }

  void add_intros(std::vector<std::pair<int, std::function<DerivationPtr()>>>& cands,
                  const FormulaPtr& goal, int depth) {
    const int d2 = depth - 1;
    switch (goal->kind) {
      case Conn::And:
        cands.push_back({2, [this, goal, d2] {
                           auto l = prove(goal->left, d2);
                           auto r = prove(goal->right, d2);
                           return make_node(Rule::AndI, goal, {std::move(l), std::move(r)});
                         }});
        break;
      case Conn::Or: {
        cands.push_back({1, [this, goal, d2] {
                           return make_node(Rule::OrI_L, goal, {prove(goal->left, d2)});
                         }});
        cands.push_back({1, [this, goal, d2] {
                           return make_node(Rule::OrI_R, goal, {prove(goal->right, d2)});
                         }});
        const bool pem = goal->left->kind == Conn::Def && goal->right->kind == Conn::Neg &&
                         goal->right->left->kind == Conn::Def &&
                         goal->left->terms[0] == goal->right->left->terms[0];
        if (pem) cands.push_back({4, [goal] { return make_node(Rule::PEM_D, goal, {}); }});
        break;
      }
      case Conn::Imp:
        cands.push_back({3, [this, goal, d2] {
                           const int lbl = next_discharge++;
                           avail.emplace_back(goal->left, lbl);
                           auto p = prove(goal->right, d2);
                           avail.pop_back();
                           return make_node(Rule::ImpI, goal, {std::move(p)}, lbl);
                         }});
        break;
      case Conn::Def:
        if (auto g = ground())
          cands.push_back({2, [this, goal, d2, g = *g] {
                             auto p = prove(mk_id(goal->terms[0], g), d2);
                             return make_node(Rule::DefI, goal, {std::move(p)}, std::nullopt, "",
                                              nullptr, "", 1);
                           }});
        break;
      case Conn::Id:
        if (goal->terms[0] == goal->terms[1])
          cands.push_back({5, [this, goal, d2] {
                             return make_node(Rule::EqI, goal, {prove(mk_def(goal->terms[0]), d2)});
                           }});
        break;
      case Conn::Forall:
        cands.push_back({4, [this, goal, d2] {
                           const std::string e = mint_eigen();
                           const int lbl = next_discharge++;
                           avail.emplace_back(mk_def(Term::constant(e)), lbl);
                           auto p = prove(substitute(goal->left, goal->name, Term::constant(e)), d2);
                           avail.pop_back();
                           return make_node(Rule::AllI_D, goal, {std::move(p)}, lbl, e);
                         }});
        break;
      case Conn::Exists:
        if (auto g = ground())
          cands.push_back({4, [this, goal, d2, g = *g] {
                             auto p = prove(substitute(goal->left, goal->name, g), d2);
                             auto dp = prove(mk_def(g), d2);
                             return make_node(Rule::ExI_D, goal, {std::move(p), std::move(dp)});
                           }});
        break;
      case Conn::Neg: {
        const FormulaPtr inner = goal->left;
        switch (inner->kind) {
          case Conn::And:
            cands.push_back({1, [this, goal, inner, d2] {
                               return make_node(Rule::NegAndI_L, goal,
                                                {prove(mk_neg(inner->left), d2)});
                             }});
            cands.push_back({1, [this, goal, inner, d2] {
                               return make_node(Rule::NegAndI_R, goal,
                                                {prove(mk_neg(inner->right), d2)});
                             }});
            break;
          case Conn::Or:
            cands.push_back({2, [this, goal, inner, d2] {
                               auto l = prove(mk_neg(inner->left), d2);
                               auto r = prove(mk_neg(inner->right), d2);
                               return make_node(Rule::NegOrI, goal, {std::move(l), std::move(r)});
                             }});
            break;
          case Conn::Neg:
            cands.push_back({2, [this, goal, inner, d2] {
                               return make_node(Rule::DNI, goal, {prove(inner->left, d2)});
                             }});
            break;
          case Conn::Imp:
            cands.push_back({2, [this, goal, inner, d2] {
                               auto l = prove(inner->left, d2);
                               auto r = prove(mk_neg(inner->right), d2);
                               return make_node(Rule::NegImpI, goal, {std::move(l), std::move(r)});
                             }});
            break;
          case Conn::Forall:
            if (auto g = ground())
              cands.push_back({4, [this, goal, inner, d2, g = *g] {
                                 auto p = prove(mk_neg(substitute(inner->left, inner->name, g)), d2);
                                 auto dp = prove(mk_def(g), d2);
                                 return make_node(Rule::NegAllI_D, goal,
                                                  {std::move(p), std::move(dp)});
                               }});
            break;
          case Conn::Exists:
            cands.push_back({4, [this, goal, inner, d2] {
                               const std::string e = mint_eigen();
                               const int lbl = next_discharge++;
                               avail.emplace_back(mk_def(Term::constant(e)), lbl);
                               auto p = prove(
                                   mk_neg(substitute(inner->left, inner->name, Term::constant(e))),
                                   d2);
                               avail.pop_back();
                               return make_node(Rule::NegExI_D, goal, {std::move(p)}, lbl, e);
                             }});
            break;
          case Conn::Id:
            cands.push_back({4, [this, goal, inner, d2] {
                               const std::string v = mint_var();
                               const FormulaPtr T = open_template(v);
                               auto p1 = prove(substitute(T, v, inner->terms[0]), d2);
                               auto p2 = prove(mk_neg(substitute(T, v, inner->terms[1])), d2);
                               return make_node(Rule::NeqI, goal, {std::move(p1), std::move(p2)},
                                                std::nullopt, "", T, v);
                             }});
            break;
          default:
            break;
        }
        break;
      }
      default:
        break;
    }
  }

  void add_elims(std::vector<std::pair<int, std::function<DerivationPtr()>>>& cands,
                 const FormulaPtr& goal, int depth) {
    const int d2 = depth - 1;
    cands.push_back({1, [this, goal, d2] {
                       auto side = random_sentence(sig, 1, rng);
                       return make_node(Rule::AndE_L, goal, {prove(mk_and(goal, side), d2)});
                     }});
    cands.push_back({1, [this, goal, d2] {
                       auto side = random_sentence(sig, 1, rng);
                       return make_node(Rule::AndE_R, goal, {prove(mk_and(side, goal), d2)});
                     }});
    cands.push_back({1, [this, goal, d2] {
                       return make_node(Rule::DNE, goal, {prove(mk_neg(mk_neg(goal)), d2)});
                     }});
    if (auto g = ground()) {
      cands.push_back({2, [this, goal, d2, g = *g] {
                         auto p1 = prove(mk_def(g), d2);
                         auto p2 = prove(mk_neg(mk_def(g)), d2);
                         return make_node(Rule::PEX_D, goal, {std::move(p1), std::move(p2)});
                       }});
      cands.push_back({4, [this, goal, d2, g = *g] {
                         const std::string v = mint_var();
                         const FormulaPtr T = abstract_constant(goal, g.name, v);
                         auto maj = prove(mk_forall(v, T), d2);
                         auto min = prove(mk_def(g), d2);
                         return make_node(Rule::AllE_D, goal, {std::move(maj), std::move(min)});
                       }});
      cands.push_back({2, [this, goal, d2] {
                         const std::string v = mint_var();
                         const FormulaPtr B = open_template(v);
                         const std::string e = mint_eigen();
                         const int lbl = next_discharge++;
                         auto maj = prove(mk_exists(v, B), d2);
                         avail.emplace_back(substitute(B, v, Term::constant(e)), lbl);
                         avail.emplace_back(mk_def(Term::constant(e)), lbl);
                         auto min = prove(goal, d2);
                         avail.pop_back();
                         avail.pop_back();
                         return make_node(Rule::ExE_D, goal, {std::move(maj), std::move(min)}, lbl,
                                          e);
                       }});
    }
    cands.push_back({2, [this, goal, d2] {
                       auto side = random_sentence(sig, 1, rng);
                       const int lbl = next_discharge++;
                       auto maj = prove(mk_or(goal, side), d2);
                       avail.emplace_back(goal, lbl);
                       auto min1 = prove(goal, d2);
                       avail.pop_back();
                       avail.emplace_back(side, lbl);
                       auto min2 = prove(goal, d2);
                       avail.pop_back();
                       return make_node(Rule::OrE, goal,
                                        {std::move(maj), std::move(min1), std::move(min2)}, lbl);
                     }});
    if (sig.logic == Logic::FN4)
      cands.push_back({2, [this, goal, d2] {
                         auto side = random_sentence(sig, 1, rng);
                         auto maj = prove(mk_imp(side, goal), d2);
                         auto min = prove(side, d2);
                         return make_node(Rule::ImpE, goal, {std::move(maj), std::move(min)});
                       }});
    // Identity elimination: rewrite the goal along an equation.
    const Formula* core = goal.get();
    if (core->kind == Conn::Neg) core = core->left.get();
    if (core->kind == Conn::Atom || core->kind == Conn::Id || core->kind == Conn::Def) {
      const auto cs = constants_of(goal);
      if (!cs.empty() && !sig.constants.empty()) {
        std::vector<std::string> names(cs.begin(), cs.end());
        const std::string c2 = names[rng_below(rng, names.size())];
        const Term c1 = *ground();
        cands.push_back({4, [this, goal, d2, c2, c1] {
                           const std::string v = mint_var();
                           const FormulaPtr T = abstract_constant(goal, c2, v);
                           auto p1 = prove(substitute(T, v, c1), d2);
                           auto p2 = prove(mk_id(c1, Term::constant(c2)), d2);
                           return make_node(Rule::EqE, goal, {std::move(p1), std::move(p2)},
                                            std::nullopt, "", T, v);
                         }});
      }
    }
  }
};

DerivationPtr seeded_definedness_neq(const Signature& sig) {
  const Term c1 = Term::constant(sig.constants[1]);
  const Term c2 = Term::constant(sig.constants[0]);
  return make_node(Rule::NeqI, mk_neg(mk_id(c1, c2)),
                   {hyp(mk_def(c1), 1), hyp(mk_neg(mk_def(c2)), 2)}, std::nullopt, "",
                   mk_def(Term::variable("x")), "x");
}

}  // namespace

FuzzReport fuzz_soundness(const Signature& sig, const FuzzOptions& opts) {
  if (sig.predicates.size() > 2)
    throw InvalidArgument("fuzz_soundness: at most 2 predicates are supported");
  for (const auto& [p, r] : sig.predicates)
    if (r > 2)
      throw InvalidArgument("fuzz_soundness: predicate '" + p + "' exceeds arity 2");
  if (sig.constants.size() > 2)
    throw InvalidArgument("fuzz_soundness: at most 2 constants are supported");
  check_enum_bounds(make_index(sig), opts.bounds);

  FuzzReport rep;
  std::mt19937_64 rng(opts.seed);
  std::map<std::string, bool> refuted;  // sequent -> countermodel found

  for (int it = 0; it < opts.iterations; ++it) {
    DerivationPtr tree;
    if (it == 0 && sig.constants.size() >= 2) {
      tree = seeded_definedness_neq(sig);
    } else {
      Synth sy{sig, rng};
      const FormulaPtr goal = random_sentence(sig, opts.max_depth, rng);
      tree = sy.prove(goal, opts.max_depth);
    }
    ++rep.trees;

    CheckedSequent seq;
    try {
      seq = check(sig, tree, opts.mode);
    } catch (const ProofError&) {
      ++rep.rejected;
      continue;
    }
    ++rep.accepted;

    const std::string key = render_sequent(seq);
    const auto hit = refuted.find(key);
    if (hit != refuted.end()) continue;
    ++rep.unique_sequents;
    const std::vector<FormulaPtr> gamma(seq.assumptions.begin(), seq.assumptions.end());
    const SearchVerdict v = find_countermodel(sig, gamma, seq.conclusion, opts.bounds);
    rep.models_checked += v.models_checked;
    refuted[key] = v.found;
    if (v.found) {
      FuzzViolation viol;
      viol.mode = opts.mode == CheckMode::Strict ? "strict" : "permissive";
      viol.sequent = key;
      viol.proof_json = proof_to_json(tree);
      viol.model_json = model_to_json(v.model);
      viol.stage = v.stage;
      rep.violations.push_back(std::move(viol));
    }
  }
  return rep;
}

std::string fuzz_report_to_json(const FuzzReport& r) {
  std::string out;
  for (const auto& v : r.violations) {
    json line = {{"mode", v.mode},
                 {"sequent", v.sequent},
                 {"stage", v.stage},
                 {"proof", json::parse(v.proof_json)},
                 {"model", json::parse(v.model_json)}};
    out += line.dump() + "\n";
  }
  return out;
}

}  // namespace ffde
