#include "prefset/subset_search.hpp"

#include <algorithm>
#include <chrono>
#include <queue>

namespace prefset {
namespace {

struct PropsCache {
  std::vector<std::vector<uint8_t>> phi_flags;
  std::vector<std::vector<uint8_t>> psi_flags;

  PropsCache(const Catalog& catalog, const PropertySet& props) {
    phi_flags.resize(props.size());
    psi_flags.resize(props.size());
    for (int p = 0; p < props.size(); ++p) {
      phi_flags[p] = satisfier_flags(props.at(p).phi, catalog);
      if (props.at(p).kind == PropertyKind::count_vs_count) {
        psi_flags[p] = satisfier_flags(props.at(p).psi, catalog);
      }
    }
  }
};

PropertyValue value_from_counts(const SetProperty& p, long cphi, long cpsi) {
  switch (p.kind) {
    case PropertyKind::count_vs_const:
      return PropertyValue::of_bool(rel_holds(cphi, p.rel, p.k));
    case PropertyKind::count_vs_count:
      return PropertyValue::of_bool(rel_holds(cphi, p.rel, cpsi));
    default:
      return PropertyValue::of_count(cphi);
  }
}

PropertyAssignment assignment_from_counts(const PropertySet& props,
                                          const std::vector<long>& cphi,
                                          const std::vector<long>& cpsi) {
  PropertyAssignment assign(props.size());
  for (int p = 0; p < props.size(); ++p) {
    assign.values[p] = value_from_counts(props.at(p), cphi[p], cpsi[p]);
  }
  return assign;
}

struct Node {
  std::vector<int> subset;
  std::vector<long> cphi;
  std::vector<long> cpsi;
  double internal_value = 0;
  double ub = 0;
  long seq = 0;
};

struct BfsWorse {
  bool operator()(const Node& a, const Node& b) const {
    if (a.ub != b.ub) {
      return a.ub < b.ub;
    }
    return a.seq > b.seq;
  }
};

struct Search {
  const Catalog& catalog;
  const PropertySet& props;
  const SubsetConfig& cfg;
  const GAIFunction& gai;
  const TCPNet* net;
  std::optional<long> card;
  double card_bonus = 0;
  PropsCache cache;
  int n;

  SearchStats stats;
  Node incumbent;
  PropertyAssignment incumbent_assign;
  long seq_counter = 0;
  bool out_of_budget = false;
  std::chrono::steady_clock::time_point start;

  Search(const Catalog& cat, const PropertySet& ps, const SubsetConfig& c,
         const GAIFunction& g, const TCPNet* tie_net, std::optional<long> k)
      : catalog(cat),
        props(ps),
        cfg(c),
        gai(g),
        net(tie_net),
        card(k),
        cache(cat, ps),
        n(static_cast<int>(cat.size())) {
    if (card.has_value()) {
      double spread = 0;
      for (const GaiFactor& factor : gai.factors) {
        spread += factor.max_value() - factor.min_value();
      }
      card_bonus = 1 + spread;
    }
  }

  double internal_value_of(const Node& node,
                           const PropertyAssignment& assign) const {
    double value = gai_value(gai, assign);
    if (card.has_value() &&
        static_cast<long>(node.subset.size()) == *card) {
      value += card_bonus;
    }
    return value;
  }

  std::vector<int> remaining_of(const Node& node) const {
    std::vector<int> rest;
    rest.reserve(n - node.subset.size());
    std::size_t at = 0;
    for (int item = 0; item < n; ++item) {
      if (at < node.subset.size() && node.subset[at] == item) {
        ++at;
      } else {
        rest.push_back(item);
      }
    }
    return rest;
  }

  double bound_of(const Node& node) const {
    std::vector<int> rest = remaining_of(node);
    ReachableValues reach;
    reach.per_property.resize(props.size());
    for (int p = 0; p < props.size(); ++p) {
      reach.per_property[p] =
          reachable_values(props.at(p), catalog, node.subset, rest);
    }
    double bound = upper_bound(gai, reach);
    if (card.has_value()) {
      long size = static_cast<long>(node.subset.size());
      if (size <= *card && *card <= size + static_cast<long>(rest.size())) {
        bound += card_bonus;
      }
    }
    return bound;
  }

  // Evaluates a fresh node and folds it into the incumbent.
  void admit(Node& node) {
    ++stats.nodes_generated;
    node.seq = seq_counter++;
    PropertyAssignment assign = assignment_from_counts(props, node.cphi,
                                                       node.cpsi);
    node.internal_value = internal_value_of(node, assign);
    node.ub = bound_of(node);
    if (stats.nodes_generated == 1 ||
        assignment_better(assign, node.internal_value, incumbent_assign,
                          incumbent.internal_value, net, props, n)) {
      incumbent = node;
      incumbent_assign = assign;
      stats.nodes_until_opt = stats.nodes_generated;
    }
  }

  Node child_of(const Node& parent, int item) const {
    Node child;
    child.subset = parent.subset;
    child.subset.push_back(item);
    child.cphi = parent.cphi;
    child.cpsi = parent.cpsi;
    for (int p = 0; p < props.size(); ++p) {
      if (cache.phi_flags[p][item]) {
        ++child.cphi[p];
      }
      if (!cache.psi_flags[p].empty() && cache.psi_flags[p][item]) {
        ++child.cpsi[p];
      }
    }
    return child;
  }

  bool budget_hit() {
    if (cfg.node_budget >= 0 && stats.nodes_generated >= cfg.node_budget) {
      return true;
    }
    if (cfg.wall_ms_budget >= 0 && (stats.nodes_generated & 255) == 0) {
      double ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
      if (ms >= cfg.wall_ms_budget) {
        return true;
      }
    }
    return false;
  }

  // Children in heuristic order, already admitted; callers push them.
  std::vector<Node> expand(const Node& node) {
    ++stats.nodes_expanded;
    int first = node.subset.empty() ? 0 : node.subset.back() + 1;
    std::vector<double> scores =
        extension_scores(catalog, props, gai, node.subset);
    std::vector<int> candidates;
    for (int item = first; item < n; ++item) {
      candidates.push_back(item);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](int a, int b) { return scores[a] > scores[b]; });
    std::vector<Node> kept;
    for (int item : candidates) {
      if (budget_hit()) {
        out_of_budget = true;
        break;
      }
      Node child = child_of(node, item);
      admit(child);
      if (child.ub > incumbent.internal_value + kValueEps) {
        kept.push_back(std::move(child));
      }
    }
    return kept;
  }

  SearchResult finish() {
    SearchResult result;
    result.subset = incumbent.subset;
    result.assignment = incumbent_assign;
    result.value = gai_value(gai, incumbent_assign);
    result.proven_optimal = !out_of_budget;
    if (card.has_value() &&
        static_cast<long>(incumbent.subset.size()) != *card) {
      result.feasible = false;
      result.diagnostic =
          *card > n ? "cardinality exceeds catalog size"
                    : "no subset of the requested cardinality was reached";
    }
    stats.timed_out = out_of_budget;
    stats.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    result.stats = stats;
    return result;
  }

  SearchResult run_dfs() {
    std::vector<Node> stack;
    Node root;
    root.cphi.assign(props.size(), 0);
    root.cpsi.assign(props.size(), 0);
    admit(root);
    if (root.ub > incumbent.internal_value + kValueEps) {
      stack.push_back(std::move(root));
    }
    while (!stack.empty() && !out_of_budget) {
      Node node = std::move(stack.back());
      stack.pop_back();
      if (node.ub <= incumbent.internal_value + kValueEps) {
        continue;
      }
      double before = incumbent.internal_value;
      std::vector<Node> kept = expand(node);
      for (auto it = kept.rbegin(); it != kept.rend(); ++it) {
        stack.push_back(std::move(*it));
      }
      if (cfg.line5_prune && incumbent.internal_value > before + kValueEps) {
        std::erase_if(stack, [&](const Node& entry) {
          return entry.ub <= incumbent.internal_value + kValueEps;
        });
      }
    }
    return finish();
  }

  SearchResult run_bfs() {
    std::priority_queue<Node, std::vector<Node>, BfsWorse> queue;
    Node root;
    root.cphi.assign(props.size(), 0);
    root.cpsi.assign(props.size(), 0);
    admit(root);
    if (root.ub > incumbent.internal_value + kValueEps) {
      queue.push(std::move(root));
    }
    while (!queue.empty() && !out_of_budget) {
      Node node = queue.top();
      queue.pop();
      if (node.ub <= incumbent.internal_value + kValueEps) {
        continue;
      }
      for (Node& child : expand(node)) {
        queue.push(std::move(child));
      }
    }
    return finish();
  }
};

}  // namespace

std::vector<double> extension_scores(const Catalog& catalog,
                                     const PropertySet& props,
                                     const GAIFunction& gai,
                                     const std::vector<int>& subset) {
  int n = static_cast<int>(catalog.size());
  std::vector<double> scores(n, 0);
  std::vector<int> rest;
  {
    std::vector<uint8_t> in(n, 0);
    for (int item : subset) {
      in[item] = 1;
    }
    for (int item = 0; item < n; ++item) {
      if (!in[item]) {
        rest.push_back(item);
      }
    }
  }
  PropertyAssignment assign(props.size());
  for (int p = 0; p < props.size(); ++p) {
    assign.values[p] = eval_property(props.at(p), catalog, subset);
  }
  double base = gai_value(gai, assign);
  for (int p = 0; p < props.size(); ++p) {
    const SetProperty& prop = props.at(p);
    if (!prop.boolean()) {
      continue;
    }
    PropertyValue flipped = PropertyValue::of_bool(!assign.values[p]->as_bool());
    std::vector<PropertyValue> reach =
        reachable_values(prop, catalog, subset, rest);
    if (std::find(reach.begin(), reach.end(), flipped) == reach.end()) {
      continue;
    }
    PropertyAssignment alt = assign;
    alt.values[p] = flipped;
    double gain = gai_value(gai, alt) - base;
    if (gain <= kValueEps) {
      continue;
    }
    std::vector<uint8_t> flags = satisfier_flags(prop.phi, catalog);
    for (int item : rest) {
      if (flags[item]) {
        scores[item] += gain;
      }
    }
  }
  return scores;
}

SearchResult solve_subset_bnb(const Catalog& catalog, const PropertySet& props,
                              const PreferenceModel& model,
                              const SubsetConfig& cfg) {
  GAIFunction compiled;
  const GAIFunction* gai = &model.gai;
  const TCPNet* net = nullptr;
  if (model.kind == ModelKind::tcp) {
    compiled = compile_tcpnet_to_gai(model.net, props,
                                     static_cast<int>(catalog.size()));
    gai = &compiled;
    net = &model.net;
  }
  Search search(catalog, props, cfg, *gai, net, model.cardinality);
  search.start = std::chrono::steady_clock::now();
  return cfg.strategy == SubsetStrategy::dfs ? search.run_dfs()
                                             : search.run_bfs();
}

}  // namespace prefset
