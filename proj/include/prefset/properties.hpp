#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prefset/formula.hpp"

namespace prefset {

// Value a set property takes on a concrete subset: boolean for the
// comparison kinds, a count for counters.
struct PropertyValue {
  bool integral = false;
  long v = 0;

  static PropertyValue of_bool(bool b) { return {false, b ? 1 : 0}; }
  static PropertyValue of_count(long c) { return {true, c}; }
  bool as_bool() const { return v != 0; }
  long as_count() const { return v; }
  bool operator==(const PropertyValue&) const = default;
};

std::string to_string(const PropertyValue& value);

enum class PropertyKind { count_vs_const, count_vs_count, counter };

struct SetProperty {
  std::string id;
  PropertyKind kind = PropertyKind::count_vs_const;
  Formula phi;
  Rel rel = Rel::ge;   // count_vs_const / count_vs_count
  long k = 0;          // count_vs_const
  Formula psi;         // count_vs_count

  bool boolean() const { return kind != PropertyKind::counter; }
  // Largest connective count over this property's formulas; instance
  // profiles take the maximum across properties as their size parameter.
  int connective_budget() const;
};

struct PropertySet {
  std::vector<SetProperty> props;

  int size() const { return static_cast<int>(props.size()); }
  const SetProperty& at(int i) const { return props.at(i); }
  int index_of(const std::string& id) const;
};

// Partial assignment of property values, aligned with a PropertySet.
struct PropertyAssignment {
  std::vector<std::optional<PropertyValue>> values;

  explicit PropertyAssignment(int size = 0) : values(size) {}
  bool assigned(int p) const { return values[p].has_value(); }
  bool full() const;
  bool operator==(const PropertyAssignment&) const = default;
};

// Candidate value sets per property, in domain order.
struct ReachableValues {
  std::vector<std::vector<PropertyValue>> per_property;
};

// Domain in canonical order: booleans true-first, counters 0..n.
std::vector<PropertyValue> value_domain(const SetProperty& p, int catalog_size);

PropertyValue eval_property(const SetProperty& p, const Catalog& catalog,
                            const std::vector<int>& subset);

// Values p can still take over supersets of `current` drawn from
// `remaining`; exact for every kind.
std::vector<PropertyValue> reachable_values(const SetProperty& p,
                                            const Catalog& catalog,
                                            const std::vector<int>& current,
                                            const std::vector<int>& remaining);

// Linear cardinality constraint over item selection variables:
//   sum(pos) - sum(neg)  rel  bound
// Strict relations are normalized away (rel is eq/ne/le/ge); a constraint
// whose bound falls outside the achievable sum resolves to `constant`.
struct CardinalityConstraint {
  std::string id;
  std::vector<int> pos;
  std::vector<int> neg;
  Rel rel = Rel::ge;
  long bound = 0;
  std::optional<bool> constant;

  bool satisfied_by_sum(long sum) const { return rel_holds(sum, rel, bound); }
};

std::vector<CardinalityConstraint> property_to_constraints(
    const SetProperty& p, const PropertyValue& value, const Catalog& catalog);

// Pairwise relationship of two count-vs-const properties over the same
// formula, judged over all non-negative counts.
enum class ConflictKind {
  compatible,
  first_subsumes_second,   // second is redundant
  second_subsumes_first,   // first is redundant
  equivalent,
  mutually_exclusive,
};

struct ConflictEntry {
  int first = -1;
  int second = -1;
  ConflictKind kind = ConflictKind::compatible;
  // For mutual exclusion: the later property is forced to false whenever
  // the earlier one holds. For subsumption: the redundant one is forced
  // to true by the stronger one.
  std::optional<std::pair<int, bool>> forced;
};

struct ConflictReport {
  std::vector<ConflictEntry> entries;
};

// Pre: every property is a single-formula count-vs-const; properties are
// grouped by syntactic formula equality and classified pairwise.
ConflictReport resolve_offline_conflicts(const std::vector<SetProperty>& props);

}  // namespace prefset
