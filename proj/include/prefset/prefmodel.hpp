#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prefset/properties.hpp"

namespace prefset {

// Order over a property's values, best first. Counters can use the
// ascending/descending shorthand so the order stays catalog-independent.
struct ValueOrderSpec {
  enum class Kind { explicit_list, ascending, descending };
  Kind kind = Kind::explicit_list;
  std::vector<PropertyValue> list;

  static ValueOrderSpec of(std::vector<PropertyValue> values) {
    return {Kind::explicit_list, std::move(values)};
  }
  static ValueOrderSpec asc() { return {Kind::ascending, {}}; }
  static ValueOrderSpec desc() { return {Kind::descending, {}}; }
};

struct CpRow {
  std::vector<PropertyValue> context;  // over cp-parents, node order
  ValueOrderSpec order;
};

// Conditional-preference net with unconditional importance arcs. Nodes
// are property indices into the accompanying PropertySet; node_order is
// the declaration order used for tie-breaks.
struct TCPNet {
  std::vector<int> node_order;
  std::vector<std::pair<int, int>> cp_arcs;  // parent -> child
  std::vector<std::pair<int, int>> i_arcs;   // more important -> less
  std::map<int, std::vector<CpRow>> tables;  // one per node

  std::vector<int> cp_parents(int node) const;  // node order
};

struct GaiFactor {
  std::vector<int> scope;  // property indices
  std::vector<std::pair<std::vector<PropertyValue>, double>> table;

  double value_of(const std::vector<PropertyValue>& assign) const;
  double max_value() const;
  double min_value() const;
};

struct GAIFunction {
  std::vector<GaiFactor> factors;
};

enum class ModelKind { tcp, gai };

struct PreferenceModel {
  ModelKind kind = ModelKind::gai;
  TCPNet net;        // kind == tcp
  GAIFunction gai;   // kind == gai
  std::optional<long> cardinality;
};

// Structural checks: node cover, acyclicity over cp+i arcs, table
// completeness (each context exactly once, orders are domain
// permutations). Returns problems found, empty when valid.
std::vector<std::string> validate_tcpnet(const TCPNet& net,
                                         const PropertySet& props,
                                         int catalog_size);

std::vector<std::string> validate_gai(const GAIFunction& gai,
                                      const PropertySet& props,
                                      int catalog_size);

// Topological order over cp+i arcs; ties resolved by declaration order.
std::vector<int> topo_property_order(const TCPNet& net);

// Best-first value order for p under the cp-parent values in ctx.
std::vector<PropertyValue> preferred_value_order(const TCPNet& net, int p,
                                                 const PropertyAssignment& ctx,
                                                 const PropertySet& props,
                                                 int catalog_size);

double gai_value(const GAIFunction& gai, const PropertyAssignment& assign);

// Admissible bound: per-factor maximum over table rows whose every
// component is individually reachable.
double upper_bound(const GAIFunction& gai, const ReachableValues& reach);

// One factor per node over {node} + cp-parents; in-context scores follow
// CP rank and each node's weight dominates the spans of everything it
// can influence, so CP statements and importance arcs both survive the
// translation.
GAIFunction compile_tcpnet_to_gai(const TCPNet& net, const PropertySet& props,
                                  int catalog_size);

// Comparison tolerance for GAI values (compiled tables are integral).
inline constexpr double kValueEps = 1e-9;

// True when a is strictly better: higher value, or equal value and
// earlier in the deterministic assignment order (conditional-lex when a
// net is available, encoding order otherwise).
bool assignment_better(const PropertyAssignment& a, double value_a,
                       const PropertyAssignment& b, double value_b,
                       const TCPNet* net, const PropertySet& props,
                       int catalog_size);

}  // namespace prefset
