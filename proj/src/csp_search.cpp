#include "prefset/csp_search.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>

#include "prefset/subset_search.hpp"

namespace prefset {
namespace {

std::vector<int> to_subset(const std::vector<uint8_t>& assign) {
  std::vector<int> subset;
  for (std::size_t i = 0; i < assign.size(); ++i) {
    if (assign[i]) {
      subset.push_back(static_cast<int>(i));
    }
  }
  return subset;
}

struct PinnedConstraint {
  std::optional<CspConstraint> constraint;
  bool unsat = false;
};

struct Engine {
  const Catalog& catalog;
  const PropertySet& props;
  const PreferenceModel& model;
  const CspConfig& cfg;
  int n;
  int m;

  GAIFunction compiled;
  const GAIFunction* eff = nullptr;
  const TCPNet* net = nullptr;  // set for ranking models
  CspUniverse uni;
  std::vector<int> phi_formula;
  std::vector<int> psi_formula;
  int truth_formula = -1;
  std::vector<int> prop_order;
  std::vector<int> var_order;
  NoGoodStore store;
  std::map<std::pair<int, long>, PinnedConstraint> pin_cache;

  SearchStats stats;
  long labels_used = 0;
  bool aborted = false;
  std::chrono::steady_clock::time_point start;

  std::vector<std::pair<int, PropertyValue>> pins;
  PropertyAssignment alpha;

  bool have_answer = false;       // ranking mode
  std::vector<uint8_t> answer;

  bool have_incumbent = false;    // additive mode
  double inc_value = 0;
  PropertyAssignment inc_assign;
  std::vector<int> inc_subset;

  Engine(const Catalog& cat, const PropertySet& ps, const PreferenceModel& mdl,
         const CspConfig& config)
      : catalog(cat),
        props(ps),
        model(mdl),
        cfg(config),
        n(static_cast<int>(cat.size())),
        m(ps.size()),
        alpha(ps.size()),
        inc_assign(ps.size()) {
    if (cfg.mode == CspMode::tcp && model.kind != ModelKind::tcp) {
      throw std::invalid_argument("ranking mode needs a ranking model");
    }
    if (model.kind == ModelKind::tcp) {
      compiled = compile_tcpnet_to_gai(model.net, props, n);
      eff = &compiled;
      net = &model.net;
    } else {
      eff = &model.gai;
    }
    build_universe();
    prop_order = cfg.mode == CspMode::tcp ? topo_property_order(*net)
                                          : span_order();
    var_order = pick_var_order();
  }

  void build_universe() {
    std::map<std::vector<uint8_t>, int> classes;
    auto intern = [&](const std::vector<uint8_t>& flags) {
      auto [it, inserted] =
          classes.emplace(flags, static_cast<int>(classes.size()));
      if (inserted) {
        std::vector<int> items;
        for (int i = 0; i < n; ++i) {
          if (flags[i]) {
            items.push_back(i);
          }
        }
        uni.formula_items.push_back(std::move(items));
      }
      return it->second;
    };
    uni.num_items = n;
    phi_formula.resize(m);
    psi_formula.assign(m, -1);
    for (int p = 0; p < m; ++p) {
      phi_formula[p] = intern(satisfier_flags(props.at(p).phi, catalog));
      if (props.at(p).kind == PropertyKind::count_vs_count) {
        psi_formula[p] = intern(satisfier_flags(props.at(p).psi, catalog));
      }
    }
    if (model.cardinality.has_value()) {
      truth_formula = intern(std::vector<uint8_t>(n, 1));
    }
    uni.finalize();
  }

  std::vector<int> span_order() const {
    std::vector<double> span_sum(m, 0);
    for (const GaiFactor& factor : eff->factors) {
      double span = factor.max_value() - factor.min_value();
      for (int p : factor.scope) {
        span_sum[p] += span;
      }
    }
    std::vector<int> order(m);
    for (int p = 0; p < m; ++p) {
      order[p] = p;
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return span_sum[a] > span_sum[b];
    });
    return order;
  }

  std::vector<int> pick_var_order() const {
    if (cfg.var_order_override.has_value()) {
      if (static_cast<int>(cfg.var_order_override->size()) != n) {
        throw std::invalid_argument("item order override has the wrong size");
      }
      return *cfg.var_order_override;
    }
    std::vector<std::vector<int>> scopes;
    for (int p = 0; p < m; ++p) {
      std::vector<int> scope = uni.formula_items[phi_formula[p]];
      if (psi_formula[p] >= 0) {
        const std::vector<int>& psi = uni.formula_items[psi_formula[p]];
        scope.insert(scope.end(), psi.begin(), psi.end());
        std::sort(scope.begin(), scope.end());
        scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
      }
      scopes.push_back(std::move(scope));
    }
    if (truth_formula >= 0) {
      scopes.push_back(uni.formula_items[truth_formula]);
    }
    return static_order(n, scopes, extension_scores(catalog, props, *eff, {}));
  }

  const PinnedConstraint& pinned(int p, const PropertyValue& value) {
    auto key = std::make_pair(p, value.v);
    auto it = pin_cache.find(key);
    if (it != pin_cache.end()) {
      return it->second;
    }
    PinnedConstraint entry;
    std::vector<CardinalityConstraint> built =
        property_to_constraints(props.at(p), value, catalog);
    const CardinalityConstraint& cc = built.front();
    if (cc.constant.has_value()) {
      entry.unsat = !*cc.constant;
    } else {
      CspConstraint c;
      c.id = cc.id;
      c.pos_formula = phi_formula[p];
      c.neg_formula = psi_formula[p];
      c.rel = cc.rel;
      c.bound = cc.bound;
      entry.constraint = c;
    }
    return pin_cache.emplace(key, std::move(entry)).first->second;
  }

  bool out_of_time() {
    if (cfg.wall_ms_budget < 0) {
      return false;
    }
    double ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    return ms >= cfg.wall_ms_budget;
  }

  CspSolveResult attempt(const std::vector<CspConstraint>& cs, bool unsat_flag,
                         const std::vector<uint8_t>* warm,
                         const std::vector<int>& spaces, int record_space) {
    CspProblem prob;
    prob.universe = &uni;
    prob.var_order = &var_order;
    prob.constraints = cs;
    prob.trivially_unsat = unsat_flag;
    CspSolveConfig sc;
    sc.monotonic = cfg.monotonic;
    sc.fc = cfg.fc;
    sc.can_must = cfg.can_must;
    sc.nogoods = cfg.nogoods;
    sc.store = cfg.nogoods ? &store : nullptr;
    sc.match_spaces = spaces;
    sc.record_space = record_space;
    sc.warm_leaf = cfg.warm_start ? warm : nullptr;
    if (cfg.node_budget >= 0) {
      sc.node_budget = std::max(0L, cfg.node_budget - labels_used);
    }
    if (cfg.wall_ms_budget >= 0) {
      sc.deadline = start + std::chrono::duration_cast<
                                std::chrono::steady_clock::duration>(
                                std::chrono::duration<double, std::milli>(
                                    cfg.wall_ms_budget));
    }
    CspSolveResult res = solve_csp(prob, sc);
    labels_used += res.stats.nodes;
    ++stats.csps_solved;
    stats.item_backtracks += res.stats.backtracks;
    stats.nogoods_recorded += res.stats.nogoods_recorded;
    stats.nogood_hits += res.stats.nogood_hits;
    stats.fc_prunes += res.stats.fc_prunes;
    stats.can_must_prunes += res.stats.can_must_prunes;
    stats.monotonic_prunes += res.stats.monotonic_prunes;
    if (res.outcome == CspOutcome::budget) {
      aborted = true;
      stats.timed_out = true;
    }
    return res;
  }

  void trace_node(CspTraceEntry::Outcome outcome, double ub,
                  std::vector<int> witness, long backtracks) {
    if (cfg.trace == nullptr) {
      return;
    }
    CspTraceEntry entry;
    entry.alpha = pins;
    entry.outcome = outcome;
    entry.ub = ub;
    entry.witness = std::move(witness);
    entry.item_backtracks = backtracks;
    cfg.trace->push_back(std::move(entry));
  }

  void check_witness(const std::vector<uint8_t>& witness) const {
    std::vector<int> subset = to_subset(witness);
    for (const auto& [p, v] : pins) {
      if (!(eval_property(props.at(p), catalog, subset) == v)) {
        throw std::logic_error("witness disagrees with its pinned properties");
      }
    }
  }

  double pinned_ub() const {
    ReachableValues reach;
    reach.per_property.resize(m);
    for (int q = 0; q < m; ++q) {
      if (alpha.values[q].has_value()) {
        reach.per_property[q] = {*alpha.values[q]};
      } else {
        reach.per_property[q] = value_domain(props.at(q), n);
      }
    }
    return upper_bound(*eff, reach);
  }

  void update_incumbent(const std::vector<uint8_t>& witness) {
    std::vector<int> subset = to_subset(witness);
    PropertyAssignment full(m);
    for (int q = 0; q < m; ++q) {
      full.values[q] = eval_property(props.at(q), catalog, subset);
    }
    double value = gai_value(*eff, full);
    if (!have_incumbent ||
        assignment_better(full, value, inc_assign, inc_value, net, props, n)) {
      have_incumbent = true;
      inc_value = value;
      inc_assign = std::move(full);
      inc_subset = std::move(subset);
      stats.nodes_until_opt = stats.nodes_generated;
    }
  }

  // Ranking mode: the first satisfiable full assignment along the
  // preferred-value tree is the answer.
  bool tcp_descend(int level, std::vector<CspConstraint>& cs,
                   const std::vector<uint8_t>& witness,
                   std::vector<int>& spaces, const std::string& key) {
    if (aborted) {
      return false;
    }
    if (level == m) {
      answer = witness;
      have_answer = true;
      return true;
    }
    ++stats.nodes_expanded;
    int p = prop_order[level];
    std::vector<PropertyValue> values =
        preferred_value_order(*net, p, alpha, props, n);
    std::vector<int> wit_subset = to_subset(witness);
    bool prev_failed = false;
    bool found = false;
    for (const PropertyValue& v : values) {
      if (aborted || out_of_time()) {
        aborted = true;
        break;
      }
      ++stats.nodes_generated;
      const PinnedConstraint& pin = pinned(p, v);
      pins.emplace_back(p, v);
      alpha.values[p] = v;
      std::size_t cs_size = cs.size();
      if (pin.constraint.has_value()) {
        cs.push_back(*pin.constraint);
      }
      std::string child_key =
          key + "|" + std::to_string(p) + "=" + std::to_string(v.v);
      int space = cfg.nogoods ? store.intern_space(child_key) : 0;
      spaces.push_back(space);

      bool child_sat = false;
      std::vector<uint8_t> child_witness;
      if (cfg.sibling && prev_failed && props.at(p).boolean() &&
          eval_property(props.at(p), catalog, wit_subset) == v) {
        child_sat = true;
        child_witness = witness;
        ++stats.sibling_hits;
        trace_node(CspTraceEntry::Outcome::inherited, 0, wit_subset, 0);
      } else {
        CspSolveResult res = attempt(cs, pin.unsat, &witness, spaces, space);
        if (res.outcome == CspOutcome::sat) {
          child_sat = true;
          child_witness = std::move(res.assign);
          if (cfg.verify_witnesses) {
            check_witness(child_witness);
          }
          trace_node(CspTraceEntry::Outcome::sat, 0, to_subset(child_witness),
                     res.stats.backtracks);
        } else if (res.outcome == CspOutcome::unsat) {
          ++stats.property_backtracks;
          prev_failed = true;
          trace_node(CspTraceEntry::Outcome::unsat, 0, {},
                     res.stats.backtracks);
        } else {
          trace_node(CspTraceEntry::Outcome::budget, 0, {},
                     res.stats.backtracks);
        }
      }
      if (child_sat) {
        found = tcp_descend(level + 1, cs, child_witness, spaces, child_key);
      }
      cs.resize(cs_size);
      spaces.pop_back();
      pins.pop_back();
      alpha.values[p].reset();
      if (found) {
        return true;
      }
    }
    return false;
  }

  // Additive mode: branch and bound over the property tree; every witness
  // feeds the incumbent through its full evaluation.
  void gai_descend(int level, std::vector<CspConstraint>& cs,
                   const std::vector<uint8_t>& witness,
                   std::vector<int>& spaces, const std::string& key) {
    if (aborted || level == m) {
      return;
    }
    ++stats.nodes_expanded;
    int p = prop_order[level];
    std::vector<PropertyValue> domain = value_domain(props.at(p), n);
    std::vector<std::pair<double, int>> ranked;
    for (int vi = 0; vi < static_cast<int>(domain.size()); ++vi) {
      alpha.values[p] = domain[vi];
      ranked.emplace_back(pinned_ub(), vi);
      alpha.values[p].reset();
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) {
                       return a.first > b.first;
                     });
    std::vector<int> wit_subset = to_subset(witness);
    bool prev_failed = false;
    for (const auto& [ub, vi] : ranked) {
      if (aborted || out_of_time()) {
        aborted = true;
        break;
      }
      const PropertyValue& v = domain[vi];
      ++stats.nodes_generated;
      pins.emplace_back(p, v);
      alpha.values[p] = v;
      if (ub <= inc_value + kValueEps) {
        trace_node(CspTraceEntry::Outcome::pruned, ub, {}, 0);
        pins.pop_back();
        alpha.values[p].reset();
        continue;
      }
      const PinnedConstraint& pin = pinned(p, v);
      std::size_t cs_size = cs.size();
      if (pin.constraint.has_value()) {
        cs.push_back(*pin.constraint);
      }
      std::string child_key =
          key + "|" + std::to_string(p) + "=" + std::to_string(v.v);
      int space = cfg.nogoods ? store.intern_space(child_key) : 0;
      spaces.push_back(space);

      bool child_sat = false;
      std::vector<uint8_t> child_witness;
      if (cfg.sibling && prev_failed && props.at(p).boolean() &&
          eval_property(props.at(p), catalog, wit_subset) == v) {
        child_sat = true;
        child_witness = witness;
        ++stats.sibling_hits;
        trace_node(CspTraceEntry::Outcome::inherited, ub, wit_subset, 0);
      } else {
        CspSolveResult res = attempt(cs, pin.unsat, &witness, spaces, space);
        if (res.outcome == CspOutcome::sat) {
          child_sat = true;
          child_witness = std::move(res.assign);
          if (cfg.verify_witnesses) {
            check_witness(child_witness);
          }
          trace_node(CspTraceEntry::Outcome::sat, ub, to_subset(child_witness),
                     res.stats.backtracks);
        } else if (res.outcome == CspOutcome::unsat) {
          ++stats.property_backtracks;
          prev_failed = true;
          trace_node(CspTraceEntry::Outcome::unsat, ub, {},
                     res.stats.backtracks);
        } else {
          trace_node(CspTraceEntry::Outcome::budget, ub, {},
                     res.stats.backtracks);
        }
      }
      if (child_sat) {
        update_incumbent(child_witness);
        gai_descend(level + 1, cs, child_witness, spaces, child_key);
      }
      cs.resize(cs_size);
      spaces.pop_back();
      pins.pop_back();
      alpha.values[p].reset();
    }
  }

  struct QueueNode {
    std::vector<std::optional<PropertyValue>> values;
    std::vector<uint8_t> witness;
    double ub = 0;
    long seq = 0;
    int level = 0;
  };
  struct QueueWorse {
    bool operator()(const QueueNode& a, const QueueNode& b) const {
      if (a.ub != b.ub) {
        return a.ub < b.ub;
      }
      return a.seq > b.seq;
    }
  };

  // Reconstructs the constraint stack and nogood namespaces for a node
  // addressed by its pinned values.
  void rebuild(const QueueNode& node, std::vector<CspConstraint>& cs,
               std::vector<int>& spaces, std::string& key) {
    cs.clear();
    spaces.clear();
    pins.clear();
    for (int q = 0; q < m; ++q) {
      alpha.values[q].reset();
    }
    if (truth_formula >= 0) {
      cs.push_back(card_constraint());
    }
    key = "";
    spaces.push_back(cfg.nogoods ? store.intern_space(key) : 0);
    for (int lv = 0; lv < node.level; ++lv) {
      int p = prop_order[lv];
      const PropertyValue& v = *node.values[p];
      pins.emplace_back(p, v);
      alpha.values[p] = v;
      const PinnedConstraint& pin = pinned(p, v);
      if (pin.constraint.has_value()) {
        cs.push_back(*pin.constraint);
      }
      key += "|" + std::to_string(p) + "=" + std::to_string(v.v);
      spaces.push_back(cfg.nogoods ? store.intern_space(key) : 0);
    }
  }

  void gai_best_first(const std::vector<uint8_t>& root_witness,
                      double root_ub) {
    std::priority_queue<QueueNode, std::vector<QueueNode>, QueueWorse> queue;
    long seq = 0;
    QueueNode root;
    root.values.resize(m);
    root.witness = root_witness;
    root.ub = root_ub;
    root.seq = seq++;
    queue.push(std::move(root));
    std::vector<CspConstraint> cs;
    std::vector<int> spaces;
    std::string key;
    while (!queue.empty() && !aborted) {
      if (out_of_time()) {
        aborted = true;
        break;
      }
      QueueNode node = queue.top();
      queue.pop();
      if (node.level == m || node.ub <= inc_value + kValueEps) {
        continue;
      }
      ++stats.nodes_expanded;
      rebuild(node, cs, spaces, key);
      int p = prop_order[node.level];
      for (const PropertyValue& v : value_domain(props.at(p), n)) {
        if (aborted || out_of_time()) {
          aborted = true;
          break;
        }
        ++stats.nodes_generated;
        pins.emplace_back(p, v);
        alpha.values[p] = v;
        double ub = pinned_ub();
        if (ub <= inc_value + kValueEps) {
          trace_node(CspTraceEntry::Outcome::pruned, ub, {}, 0);
          pins.pop_back();
          alpha.values[p].reset();
          continue;
        }
        const PinnedConstraint& pin = pinned(p, v);
        std::size_t cs_size = cs.size();
        if (pin.constraint.has_value()) {
          cs.push_back(*pin.constraint);
        }
        std::string child_key =
            key + "|" + std::to_string(p) + "=" + std::to_string(v.v);
        int space = cfg.nogoods ? store.intern_space(child_key) : 0;
        spaces.push_back(space);
        CspSolveResult res =
            attempt(cs, pin.unsat, &node.witness, spaces, space);
        if (res.outcome == CspOutcome::sat) {
          if (cfg.verify_witnesses) {
            check_witness(res.assign);
          }
          trace_node(CspTraceEntry::Outcome::sat, ub, to_subset(res.assign),
                     res.stats.backtracks);
          update_incumbent(res.assign);
          QueueNode child;
          child.values = node.values;
          child.values[p] = v;
          child.witness = std::move(res.assign);
          child.ub = ub;
          child.seq = seq++;
          child.level = node.level + 1;
          if (child.level < m) {
            queue.push(std::move(child));
          }
        } else if (res.outcome == CspOutcome::unsat) {
          ++stats.property_backtracks;
          trace_node(CspTraceEntry::Outcome::unsat, ub, {},
                     res.stats.backtracks);
        } else {
          trace_node(CspTraceEntry::Outcome::budget, ub, {},
                     res.stats.backtracks);
        }
        cs.resize(cs_size);
        spaces.pop_back();
        pins.pop_back();
        alpha.values[p].reset();
      }
    }
  }

  CspConstraint card_constraint() const {
    CspConstraint c;
    c.id = "cardinality";
    c.pos_formula = truth_formula;
    c.rel = Rel::eq;
    c.bound = *model.cardinality;
    return c;
  }

  SearchResult run() {
    start = std::chrono::steady_clock::now();
    std::vector<CspConstraint> cs;
    if (truth_formula >= 0) {
      cs.push_back(card_constraint());
    }
    std::vector<int> spaces;
    std::string root_key;
    spaces.push_back(cfg.nogoods ? store.intern_space(root_key) : 0);
    ++stats.nodes_generated;
    CspSolveResult root = attempt(cs, false, nullptr, spaces, spaces.back());
    SearchResult result;
    if (root.outcome != CspOutcome::sat) {
      result.assignment = PropertyAssignment(m);
      result.feasible = root.outcome != CspOutcome::unsat;
      result.diagnostic = root.outcome == CspOutcome::unsat
                              ? "the hard cardinality bound cannot be met"
                              : "stopped inside the first subproblem";
      finish(result);
      return result;
    }
    trace_node(CspTraceEntry::Outcome::sat, 0, to_subset(root.assign),
               root.stats.backtracks);
    if (cfg.mode == CspMode::tcp) {
      tcp_descend(0, cs, root.assign, spaces, root_key);
      if (have_answer) {
        result.subset = to_subset(answer);
        result.assignment = PropertyAssignment(m);
        for (int q = 0; q < m; ++q) {
          result.assignment.values[q] =
              eval_property(props.at(q), catalog, result.subset);
        }
        result.value = gai_value(*eff, result.assignment);
        result.proven_optimal = !aborted;
      } else {
        result.assignment = PropertyAssignment(m);
        result.diagnostic = "stopped before an answer was proven";
      }
    } else {
      update_incumbent(root.assign);
      if (cfg.best_first_tree) {
        gai_best_first(root.assign, pinned_ub());
      } else {
        gai_descend(0, cs, root.assign, spaces, root_key);
      }
      result.subset = inc_subset;
      result.assignment = inc_assign;
      result.value = inc_value;
      result.proven_optimal = !aborted;
    }
    finish(result);
    return result;
  }

  void finish(SearchResult& result) {
    stats.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    result.stats = stats;
  }
};

}  // namespace

SearchResult solve_csp_bnb(const Catalog& catalog, const PropertySet& props,
                           const PreferenceModel& model, const CspConfig& cfg) {
  Engine engine(catalog, props, model, cfg);
  return engine.run();
}

}  // namespace prefset
