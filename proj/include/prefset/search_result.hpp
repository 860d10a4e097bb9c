#pragma once

#include <string>
#include <vector>

#include "prefset/properties.hpp"

namespace prefset {

struct SearchStats {
  long nodes_generated = 0;   // subsets or tree nodes created
  long nodes_expanded = 0;
  long nodes_until_opt = 0;   // generation count when the final incumbent appeared
  long csps_solved = 0;
  long property_backtracks = 0;
  long item_backtracks = 0;
  long sibling_hits = 0;
  long nogoods_recorded = 0;
  long nogood_hits = 0;
  long fc_prunes = 0;
  long can_must_prunes = 0;
  long monotonic_prunes = 0;
  double wall_ms = 0;
  bool timed_out = false;
};

struct SearchResult {
  std::vector<int> subset;        // item indices, ascending
  PropertyAssignment assignment;  // full evaluation of the subset
  double value = 0;
  bool proven_optimal = false;
  bool feasible = true;           // false only for an unattainable hard cardinality
  std::string diagnostic;
  SearchStats stats;
};

}  // namespace prefset
