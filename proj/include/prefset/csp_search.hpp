#pragma once

#include <optional>

#include "prefset/csp_core.hpp"
#include "prefset/prefmodel.hpp"
#include "prefset/search_result.hpp"

namespace prefset {

// tcp: depth-first over property values in conditionally-preferred order,
// stopping at the first satisfiable full assignment. gai: branch and
// bound over the same tree with additive bounds.
enum class CspMode { tcp, gai };

// One record per tree node the engine touched, in visit order.
struct CspTraceEntry {
  enum class Outcome { sat, unsat, inherited, pruned, budget };
  std::vector<std::pair<int, PropertyValue>> alpha;  // property, pinned value
  Outcome outcome = Outcome::sat;
  double ub = 0;                // bound at the prune decision (gai mode)
  std::vector<int> witness;     // selected items when available
  long item_backtracks = 0;     // backtracks spent solving this node
};

struct CspConfig {
  CspMode mode = CspMode::gai;
  bool warm_start = true;
  bool sibling = true;
  bool nogoods = true;
  bool fc = true;
  bool can_must = true;
  bool monotonic = true;
  bool best_first_tree = false;  // gai only; disables sibling inference
  std::optional<std::vector<int>> var_order_override;
  long node_budget = -1;         // total item labelings across solves
  double wall_ms_budget = -1;
  bool verify_witnesses = true;
  std::vector<CspTraceEntry>* trace = nullptr;
};

SearchResult solve_csp_bnb(const Catalog& catalog, const PropertySet& props,
                           const PreferenceModel& model, const CspConfig& cfg);

}  // namespace prefset
