#include "prefset/csp_core.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <set>
#include <stdexcept>

#include "prefset/formula.hpp"

namespace prefset {

InstanceProfile instance_profile(const Catalog& catalog,
                                 const PropertySet& props) {
  InstanceProfile p;
  p.n = static_cast<int>(catalog.size());
  const AttributeSchema& schema = catalog.schema();
  p.a = static_cast<int>(schema.size());
  p.m = static_cast<int>(props.size());
  for (const SetProperty& sp : props.props) {
    p.k = std::max(p.k, sp.connective_budget());
  }
  for (int ai = 0; ai < p.a; ++ai) {
    const AttributeDef& def = schema.at(ai);
    std::unordered_map<long, long> counts;
    for (int ii = 0; ii < catalog.size(); ++ii) {
      ++counts[catalog.item(ii).values[ai]];
    }
    int distinct = def.kind == AttrKind::categorical
                       ? static_cast<int>(def.domain.size())
                       : static_cast<int>(counts.size());
    p.d = std::max(p.d, distinct);
    for (const auto& [value, count] : counts) {
      p.mu = std::max(p.mu, count);
    }
  }
  return p;
}

void CspUniverse::finalize() {
  int f = static_cast<int>(formula_items.size());
  item_formulas.assign(num_items, {});
  for (int fi = 0; fi < f; ++fi) {
    for (int item : formula_items[fi]) {
      item_formulas[item].push_back(fi);
    }
  }
  pair_common.assign(f, std::vector<int>(f, 0));
  for (int item = 0; item < num_items; ++item) {
    const std::vector<int>& mem = item_formulas[item];
    for (std::size_t x = 0; x < mem.size(); ++x) {
      for (std::size_t y = 0; y < mem.size(); ++y) {
        ++pair_common[mem[x]][mem[y]];
      }
    }
  }
}

bool monotonic_prune(const CspConstraint& c, long current, long remaining_neg) {
  if (c.rel == Rel::le || c.rel == Rel::eq) {
    return current - remaining_neg > c.bound;
  }
  return false;
}

bool forward_check(const CspConstraint& c, long current, long remaining_pos,
                   long remaining_neg) {
  switch (c.rel) {
    case Rel::ge:
    case Rel::eq:
      return current + remaining_pos >= c.bound;
    case Rel::ne:
      return !(remaining_pos == 0 && remaining_neg == 0 &&
               current == c.bound);
    default:
      return true;
  }
}

bool can_must_check(const CspConstraint& need, const CspConstraint& cap,
                    const CanMustState& state) {
  long p = 0;
  if (need.rel == Rel::ge || need.rel == Rel::eq) {
    p = need.bound - state.need_current;
  } else if (need.rel == Rel::ne) {
    p = state.need_current == need.bound ? 1 : 0;
  }
  if (p <= 0) {
    return false;
  }
  long q = cap.bound - state.cap_current;
  return p > q && state.remaining_need == state.remaining_common;
}

std::size_t NoGoodStore::KeyHash::operator()(
    const std::vector<int>& key) const {
  std::size_t h = 1469598103934665603ull;
  for (int v : key) {
    h ^= static_cast<std::size_t>(static_cast<unsigned>(v));
    h *= 1099511628211ull;
  }
  return h;
}

NoGoodStore::NoGoodStore(std::size_t capacity) : capacity_(capacity) {}

int NoGoodStore::intern_space(const std::string& key) {
  auto [it, inserted] = spaces_.emplace(key, static_cast<int>(spaces_.size()));
  return it->second;
}

void NoGoodStore::record(int space, const std::vector<int>& influence,
                         int depth) {
  std::vector<int> key;
  key.reserve(influence.size() + 1);
  key.push_back(space);
  key.insert(key.end(), influence.begin(), influence.end());
  auto it = entries_.find(key);
  if (it != entries_.end()) {
    it->second = std::min(it->second, depth);
    return;
  }
  if (entries_.size() >= capacity_ && !fifo_.empty()) {
    entries_.erase(fifo_.front());
    fifo_.pop_front();
  }
  entries_.emplace(key, depth);
  fifo_.push_back(std::move(key));
}

bool NoGoodStore::match(const std::vector<int>& spaces,
                        const std::vector<int>& influence, int depth) const {
  if (entries_.empty()) {
    return false;
  }
  std::vector<int> key;
  key.reserve(influence.size() + 1);
  key.push_back(0);
  key.insert(key.end(), influence.begin(), influence.end());
  for (int space : spaces) {
    key[0] = space;
    auto it = entries_.find(key);
    if (it != entries_.end() && it->second <= depth) {
      return true;
    }
  }
  return false;
}

std::optional<int> NoGoodStore::recorded_depth(
    int space, const std::vector<int>& influence) const {
  std::vector<int> key;
  key.reserve(influence.size() + 1);
  key.push_back(space);
  key.insert(key.end(), influence.begin(), influence.end());
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    return std::nullopt;
  }
  return it->second;
}

namespace {

struct Backtracker {
  const CspProblem& prob;
  const CspSolveConfig& cfg;
  const CspUniverse& uni;
  std::vector<int> order;  // labeling order over live items only
  std::vector<int> fpos;   // full-order position of each live slot
  int num_items;
  int n;  // live item count
  int f;
  bool use_nogoods;
  bool use_pairs;
  int warm_cut;  // first full-order position whose warm pick is dead
  std::vector<std::pair<int, int>> pairs;  // (need, cap) constraint indices
  std::vector<int> sel;
  std::vector<int> un;
  std::vector<std::vector<int>> un_common;
  std::vector<uint8_t> value;
  std::vector<uint8_t> tried;  // per depth: values consumed so far
  CspSolveStats stats;

  Backtracker(const CspProblem& p, const CspSolveConfig& c)
      : prob(p),
        cfg(c),
        uni(*p.universe),
        num_items(uni.num_items),
        f(static_cast<int>(uni.formula_items.size())) {
    use_nogoods = cfg.nogoods && cfg.store != nullptr;
    // A lower demand that fills the whole capacity admits only its own
    // satisfiers: |phi and S| >= c with |S| <= c forces S inside phi.
    // Such items can never be picked, so they are dropped from the
    // labeling order and from every remaining-count up front.
    std::vector<uint8_t> live(num_items, 1);
    long cap_bound = -1;
    for (const CspConstraint& cc : prob.constraints) {
      if (cc.neg_formula < 0 && (cc.rel == Rel::le || cc.rel == Rel::eq) &&
          static_cast<int>(uni.formula_items[cc.pos_formula].size()) ==
              num_items) {
        cap_bound = cap_bound < 0 ? cc.bound : std::min(cap_bound, cc.bound);
      }
    }
    if (cap_bound >= 0) {
      std::vector<uint8_t> in_phi(num_items, 0);
      for (const CspConstraint& cc : prob.constraints) {
        if (cc.neg_formula >= 0 || cc.bound <= 0 || cc.bound < cap_bound ||
            (cc.rel != Rel::ge && cc.rel != Rel::eq)) {
          continue;
        }
        std::fill(in_phi.begin(), in_phi.end(), 0);
        for (int item : uni.formula_items[cc.pos_formula]) {
          in_phi[item] = 1;
        }
        for (int item = 0; item < num_items; ++item) {
          if (!in_phi[item]) {
            live[item] = 0;
          }
        }
      }
    }
    order.reserve(num_items);
    fpos.reserve(num_items);
    const std::vector<int>& full = *p.var_order;
    for (int pos = 0; pos < static_cast<int>(full.size()); ++pos) {
      if (live[full[pos]]) {
        order.push_back(full[pos]);
        fpos.push_back(pos);
      }
    }
    n = static_cast<int>(order.size());
    warm_cut = num_items;
    if (cfg.warm_leaf != nullptr) {
      for (int pos = 0; pos < static_cast<int>(full.size()); ++pos) {
        if (!live[full[pos]] && (*cfg.warm_leaf)[full[pos]] != 0) {
          warm_cut = pos;
          break;
        }
      }
    }
    sel.assign(f, 0);
    un.assign(f, 0);
    for (int fi = 0; fi < f; ++fi) {
      for (int item : uni.formula_items[fi]) {
        if (live[item]) {
          ++un[fi];
        }
      }
    }
    for (std::size_t a = 0; a < prob.constraints.size(); ++a) {
      const CspConstraint& ca = prob.constraints[a];
      if (ca.neg_formula >= 0 ||
          (ca.rel != Rel::ge && ca.rel != Rel::eq && ca.rel != Rel::ne)) {
        continue;
      }
      for (std::size_t b = 0; b < prob.constraints.size(); ++b) {
        const CspConstraint& cb = prob.constraints[b];
        if (a == b || cb.neg_formula >= 0 ||
            (cb.rel != Rel::le && cb.rel != Rel::eq)) {
          continue;
        }
        pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
      }
    }
    use_pairs = cfg.can_must && !pairs.empty();
    if (use_pairs) {
      un_common = uni.pair_common;
      for (int item = 0; item < num_items; ++item) {
        if (live[item]) {
          continue;
        }
        const std::vector<int>& mem = uni.item_formulas[item];
        for (std::size_t x = 0; x < mem.size(); ++x) {
          for (std::size_t y = x + 1; y < mem.size(); ++y) {
            --un_common[mem[x]][mem[y]];
            --un_common[mem[y]][mem[x]];
          }
        }
      }
    }
    value.assign(num_items, 0);
    tried.assign(n + 1, 0);
  }

  void apply(int item, bool pick) {
    value[item] = pick ? 1 : 0;
    const std::vector<int>& mem = uni.item_formulas[item];
    for (int fi : mem) {
      --un[fi];
      if (pick) {
        ++sel[fi];
      }
    }
    if (use_pairs) {
      for (std::size_t x = 0; x < mem.size(); ++x) {
        for (std::size_t y = x + 1; y < mem.size(); ++y) {
          --un_common[mem[x]][mem[y]];
          --un_common[mem[y]][mem[x]];
        }
      }
    }
  }

  void undo(int item) {
    bool pick = value[item] != 0;
    const std::vector<int>& mem = uni.item_formulas[item];
    for (int fi : mem) {
      ++un[fi];
      if (pick) {
        --sel[fi];
      }
    }
    if (use_pairs) {
      for (std::size_t x = 0; x < mem.size(); ++x) {
        for (std::size_t y = x + 1; y < mem.size(); ++y) {
          ++un_common[mem[x]][mem[y]];
          ++un_common[mem[y]][mem[x]];
        }
      }
    }
  }

  long current_of(const CspConstraint& c) const {
    long cur = sel[c.pos_formula];
    if (c.neg_formula >= 0) {
      cur -= sel[c.neg_formula];
    }
    return cur;
  }

  void check_influence(int depth) const {
    std::vector<int> expect(f, 0);
    for (int d = 0; d < depth; ++d) {
      int item = order[d];
      if (value[item]) {
        for (int fi : uni.item_formulas[item]) {
          ++expect[fi];
        }
      }
    }
    if (expect != sel) {
      throw std::logic_error("influence counters out of sync");
    }
  }

  bool can_improve(int depth) {
    if (cfg.verify_influence) {
      check_influence(depth);
    }
    for (const CspConstraint& c : prob.constraints) {
      long cur = current_of(c);
      long rn = c.neg_formula >= 0 ? un[c.neg_formula] : 0;
      if (cfg.monotonic && monotonic_prune(c, cur, rn)) {
        ++stats.monotonic_prunes;
        return false;
      }
      if (cfg.fc && !forward_check(c, cur, un[c.pos_formula], rn)) {
        ++stats.fc_prunes;
        return false;
      }
    }
    if (use_pairs) {
      for (const auto& [a, b] : pairs) {
        const CspConstraint& need = prob.constraints[a];
        const CspConstraint& cap = prob.constraints[b];
        CanMustState st;
        st.need_current = sel[need.pos_formula];
        st.cap_current = sel[cap.pos_formula];
        st.remaining_need = un[need.pos_formula];
        st.remaining_common = need.pos_formula == cap.pos_formula
                                  ? un[need.pos_formula]
                                  : un_common[need.pos_formula][cap.pos_formula];
        if (can_must_check(need, cap, st)) {
          ++stats.can_must_prunes;
          return false;
        }
      }
    }
    // Nogood depths live in full-order positions so they stay comparable
    // between solves whose live sets differ.
    if (use_nogoods &&
        cfg.store->match(cfg.match_spaces, sel, fpos[depth])) {
      ++stats.nogood_hits;
      return false;
    }
    return true;
  }

  bool leaf_ok() const {
    for (const CspConstraint& c : prob.constraints) {
      if (!rel_holds(current_of(c), c.rel, c.bound)) {
        return false;
      }
    }
    return true;
  }

  void record_nogood(int depth) {
    if (!use_nogoods) {
      return;
    }
    cfg.store->record(cfg.record_space, sel, fpos[depth]);
    ++stats.nogoods_recorded;
  }

  CspSolveResult run() {
    CspSolveResult result;
    int i = 0;
    if (cfg.warm_leaf != nullptr) {
      // A warm leaf picking a now-dead item is not representable; resume
      // from the first live leaf after it, which keeps the prior values up
      // to the dead pick and restarts enumeration past it.
      for (int d = 0; d < n; ++d) {
        int item = order[d];
        bool pick =
            fpos[d] > warm_cut ? true : (*cfg.warm_leaf)[item] != 0;
        tried[d] = pick ? 1 : 2;
        apply(item, pick);
      }
      i = n;
    }
    while (true) {
      if (i == n) {
        if (leaf_ok()) {
          result.outcome = CspOutcome::sat;
          result.assign = value;
          result.stats = stats;
          return result;
        }
      } else if (tried[i] < 2 && can_improve(i)) {
        if (cfg.node_budget >= 0 && stats.nodes >= cfg.node_budget) {
          result.outcome = CspOutcome::budget;
          result.stats = stats;
          return result;
        }
        if (cfg.deadline != std::chrono::steady_clock::time_point{} &&
            (stats.nodes & 0xfff) == 0 &&
            std::chrono::steady_clock::now() >= cfg.deadline) {
          result.outcome = CspOutcome::budget;
          result.stats = stats;
          return result;
        }
        bool pick = tried[i] == 0;
        ++tried[i];
        apply(order[i], pick);
        ++stats.nodes;
        ++i;
        tried[i] = 0;
        continue;
      } else {
        record_nogood(i);
      }
      if (i == 0) {
        result.outcome = CspOutcome::unsat;
        result.stats = stats;
        return result;
      }
      --i;
      undo(order[i]);
      ++stats.backtracks;
    }
  }
};

}  // namespace

CspSolveResult solve_csp(const CspProblem& problem, const CspSolveConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  CspSolveResult result;
  if (problem.trivially_unsat) {
    result.outcome = CspOutcome::unsat;
  } else {
    Backtracker bt(problem, cfg);
    result = bt.run();
  }
  auto end = std::chrono::steady_clock::now();
  result.stats.wall_ms =
      std::chrono::duration<double, std::milli>(end - start).count();
  return result;
}

std::vector<int> static_order(int num_items,
                              const std::vector<std::vector<int>>& scopes,
                              const std::vector<double>& tie_scores) {
  std::vector<int> scope_count(num_items, 0);
  for (const std::vector<int>& scope : scopes) {
    for (int item : scope) {
      ++scope_count[item];
    }
  }
  std::vector<int> order(num_items);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int lhs, int rhs) {
    if (scope_count[lhs] != scope_count[rhs]) {
      return scope_count[lhs] > scope_count[rhs];
    }
    double ls = lhs < static_cast<int>(tie_scores.size()) ? tie_scores[lhs] : 0;
    double rs = rhs < static_cast<int>(tie_scores.size()) ? tie_scores[rhs] : 0;
    if (ls != rs) {
      return ls > rs;
    }
    return lhs < rhs;
  });
  return order;
}

}  // namespace prefset
