#pragma once

#include "prefset/prefmodel.hpp"
#include "prefset/search_result.hpp"

namespace prefset {

enum class SubsetStrategy { dfs, bfs };

struct SubsetConfig {
  SubsetStrategy strategy = SubsetStrategy::dfs;
  long node_budget = 1'000'000;
  double wall_ms_budget = -1;  // < 0: unlimited
  // Sweep frontier entries whose bound fell under the incumbent. Only
  // observable for dfs; bfs pops in bound order and checks at pop time.
  bool line5_prune = true;
};

// Best-first/depth-first branch and bound over subsets. Children extend a
// subset with items of larger index only, so each subset is generated
// once. Ranking models are compiled to additive form internally.
SearchResult solve_subset_bnb(const Catalog& catalog, const PropertySet& props,
                              const PreferenceModel& model,
                              const SubsetConfig& cfg);

// Child-ordering heuristic: per candidate item, the summed value gain of
// the boolean properties it helps flip to a better reachable value.
std::vector<double> extension_scores(const Catalog& catalog,
                                     const PropertySet& props,
                                     const GAIFunction& gai,
                                     const std::vector<int>& subset);

}  // namespace prefset
