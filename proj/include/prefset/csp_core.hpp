#pragma once

#include <chrono>
#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "prefset/properties.hpp"

namespace prefset {

// Instance-size parameters used for reporting and class checks.
struct InstanceProfile {
  int n = 0;   // items
  int a = 0;   // attributes
  int m = 0;   // properties
  int k = 0;   // largest connective count over property formulas
  int d = 0;   // largest attribute domain (distinct values for integers)
  long mu = 0; // largest attribute-value multiplicity
};

InstanceProfile instance_profile(const Catalog& catalog,
                                 const PropertySet& props);

// Shared, immutable per-run data: the tracked formulas with their
// satisfier lists. Influence vectors are indexed against this table.
struct CspUniverse {
  int num_items = 0;
  std::vector<std::vector<int>> formula_items;   // formula -> items, ascending
  std::vector<std::vector<int>> item_formulas;   // derived
  std::vector<std::vector<int>> pair_common;     // |items in f and g|

  void finalize();
};

// sum(formula pos) - sum(formula neg) rel bound, with rel already
// normalized to eq/ne/le/ge.
struct CspConstraint {
  std::string id;
  int pos_formula = -1;
  int neg_formula = -1;  // -1 for single-formula constraints
  Rel rel = Rel::ge;
  long bound = 0;
};

struct CspProblem {
  const CspUniverse* universe = nullptr;
  const std::vector<int>* var_order = nullptr;  // permutation of items
  std::vector<CspConstraint> constraints;
  bool trivially_unsat = false;
};

// Dead once the selected count cannot come back under the bound; counts
// only grow on the positive side, so only the negative scope gives slack.
bool monotonic_prune(const CspConstraint& c, long current, long remaining_neg);
// False when the constraint still needs more satisfiers than remain.
bool forward_check(const CspConstraint& c, long current, long remaining_pos,
                   long remaining_neg);

struct CanMustState {
  long need_current = 0;
  long cap_current = 0;
  long remaining_need = 0;     // unassigned items in the need scope
  long remaining_common = 0;   // unassigned items in both scopes
};

// True when `need` must add more items than `cap` tolerates and every
// remaining need-satisfier would also count against cap.
bool can_must_check(const CspConstraint& need, const CspConstraint& cap,
                    const CanMustState& state);

// Influence-vector store. A recorded vector says: no extension of a
// partial state with these per-formula selection counts, backtracked at
// `depth`, satisfies the constraints of the recording context. Contexts
// are interned namespaces; matching consults the namespaces whose
// constraint set is contained in the current one.
class NoGoodStore {
 public:
  explicit NoGoodStore(std::size_t capacity = 1'000'000);

  int intern_space(const std::string& key);
  void record(int space, const std::vector<int>& influence, int depth);
  bool match(const std::vector<int>& spaces, const std::vector<int>& influence,
             int depth) const;
  std::optional<int> recorded_depth(int space,
                                    const std::vector<int>& influence) const;
  std::size_t size() const { return entries_.size(); }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<int>& key) const;
  };
  std::unordered_map<std::string, int> spaces_;
  // Key layout: [space, influence...].
  std::unordered_map<std::vector<int>, int, KeyHash> entries_;
  std::deque<std::vector<int>> fifo_;
  std::size_t capacity_;
};

struct CspSolveStats {
  long nodes = 0;        // labeling steps
  long backtracks = 0;   // unlabeling steps
  long nogoods_recorded = 0;
  long nogood_hits = 0;
  long fc_prunes = 0;
  long can_must_prunes = 0;
  long monotonic_prunes = 0;
  double wall_ms = 0;
  InstanceProfile profile;  // filled by callers for reporting
};

struct CspSolveConfig {
  bool monotonic = true;
  bool fc = true;
  bool can_must = true;
  bool nogoods = true;
  NoGoodStore* store = nullptr;        // required when nogoods is on
  std::vector<int> match_spaces;       // namespaces valid for matching
  int record_space = 0;
  // Resume position: enumeration skips every leaf before this one.
  const std::vector<uint8_t>* warm_leaf = nullptr;
  long node_budget = -1;               // < 0: unlimited
  // Wall-clock cutoff, polled every few thousand labels; zero means none.
  std::chrono::steady_clock::time_point deadline{};
  bool verify_influence = false;
};

enum class CspOutcome { sat, unsat, budget };

struct CspSolveResult {
  CspOutcome outcome = CspOutcome::unsat;
  std::vector<uint8_t> assign;  // per item, set when sat
  CspSolveStats stats;
};

// Chronological backtracking over the items in var_order, value order
// 1-then-0, consistency judged against counts with unassigned treated as
// zero. Returns the first satisfying assignment at or after the warm
// position in enumeration order.
CspSolveResult solve_csp(const CspProblem& problem, const CspSolveConfig& cfg);

// Items ordered by how many constraint scopes contain them, then by the
// caller's heuristic score, then by index.
std::vector<int> static_order(int num_items,
                              const std::vector<std::vector<int>>& scopes,
                              const std::vector<double>& tie_scores);

}  // namespace prefset
