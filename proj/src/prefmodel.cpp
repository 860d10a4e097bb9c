#include "prefset/prefmodel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace prefset {

std::vector<int> TCPNet::cp_parents(int node) const {
  std::vector<int> parents;
  for (auto [from, to] : cp_arcs)
    if (to == node) parents.push_back(from);
  // Node-order position decides the context layout.
  std::vector<int> position(node_order.size());
  for (size_t i = 0; i < node_order.size(); ++i) position[node_order[i]] = i;
  std::sort(parents.begin(), parents.end(),
            [&](int a, int b) { return position[a] < position[b]; });
  return parents;
}

double GaiFactor::value_of(const std::vector<PropertyValue>& assign) const {
  for (const auto& [key, v] : table)
    if (key == assign) return v;
  throw std::out_of_range("factor table has no entry for this assignment");
}

double GaiFactor::max_value() const {
  double best = table.at(0).second;
  for (const auto& [key, v] : table) best = std::max(best, v);
  return best;
}

double GaiFactor::min_value() const {
  double worst = table.at(0).second;
  for (const auto& [key, v] : table) worst = std::min(worst, v);
  return worst;
}

namespace {

std::vector<PropertyValue> materialize_order(const ValueOrderSpec& spec,
                                             const SetProperty&,
                                             int catalog_size) {
  switch (spec.kind) {
    case ValueOrderSpec::Kind::explicit_list:
      return spec.list;
    case ValueOrderSpec::Kind::ascending: {
      std::vector<PropertyValue> out;
      for (long c = 0; c <= catalog_size; ++c)
        out.push_back(PropertyValue::of_count(c));
      return out;
    }
    case ValueOrderSpec::Kind::descending: {
      std::vector<PropertyValue> out;
      for (long c = catalog_size; c >= 0; --c)
        out.push_back(PropertyValue::of_count(c));
      return out;
    }
  }
  return {};
}

bool is_domain_permutation(const std::vector<PropertyValue>& order,
                           const std::vector<PropertyValue>& domain) {
  if (order.size() != domain.size()) return false;
  for (const PropertyValue& v : domain)
    if (std::count(order.begin(), order.end(), v) != 1) return false;
  return true;
}

// DFS cycle check + reachability helper over cp+i arcs.
std::vector<std::vector<int>> adjacency(const TCPNet& net, int m) {
  std::vector<std::vector<int>> adj(m);
  for (auto [from, to] : net.cp_arcs) adj[from].push_back(to);
  for (auto [from, to] : net.i_arcs) adj[from].push_back(to);
  return adj;
}

bool has_cycle(const std::vector<std::vector<int>>& adj) {
  int m = adj.size();
  std::vector<int> state(m, 0);  // 0 unseen, 1 on stack, 2 done
  std::vector<std::pair<int, size_t>> stack;
  for (int s = 0; s < m; ++s) {
    if (state[s]) continue;
    stack.push_back({s, 0});
    state[s] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < adj[node].size()) {
        int to = adj[node][next++];
        if (state[to] == 1) return true;
        if (state[to] == 0) {
          state[to] = 1;
          stack.push_back({to, 0});
        }
      } else {
        state[node] = 2;
        stack.pop_back();
      }
    }
  }
  return false;
}

}  // namespace

std::vector<std::string> validate_tcpnet(const TCPNet& net,
                                         const PropertySet& props,
                                         int catalog_size) {
  std::vector<std::string> problems;
  int m = props.size();
  auto in_range = [&](int p) { return p >= 0 && p < m; };

  if (static_cast<int>(net.node_order.size()) != m) {
    problems.push_back("node order must list every property exactly once");
    return problems;
  }
  std::set<int> seen(net.node_order.begin(), net.node_order.end());
  if (static_cast<int>(seen.size()) != m || !in_range(*seen.begin()) ||
      !in_range(*seen.rbegin())) {
    problems.push_back("node order must list every property exactly once");
    return problems;
  }
  for (auto [from, to] : net.cp_arcs)
    if (!in_range(from) || !in_range(to) || from == to)
      problems.push_back("cp-arc endpoints out of range");
  for (auto [from, to] : net.i_arcs)
    if (!in_range(from) || !in_range(to) || from == to)
      problems.push_back("i-arc endpoints out of range");
  if (!problems.empty()) return problems;

  if (has_cycle(adjacency(net, m)))
    problems.push_back("cp/i arcs form a cycle");

  for (int p = 0; p < m; ++p) {
    const std::string& id = props.at(p).id;
    auto it = net.tables.find(p);
    if (it == net.tables.end()) {
      problems.push_back("property " + id + " has no cp-table");
      continue;
    }
    std::vector<int> parents = net.cp_parents(p);
    std::vector<std::vector<PropertyValue>> parent_domains;
    long combos = 1;
    for (int parent : parents) {
      parent_domains.push_back(value_domain(props.at(parent), catalog_size));
      combos *= static_cast<long>(parent_domains.back().size());
    }
    std::vector<PropertyValue> domain = value_domain(props.at(p), catalog_size);
    std::set<std::vector<std::pair<bool, long>>> contexts;
    for (const CpRow& row : it->second) {
      if (row.context.size() != parents.size()) {
        problems.push_back("property " + id +
                           ": cp-row context size disagrees with its parents");
        continue;
      }
      bool ok = true;
      for (size_t i = 0; i < parents.size(); ++i)
        if (std::count(parent_domains[i].begin(), parent_domains[i].end(),
                       row.context[i]) != 1)
          ok = false;
      if (!ok) {
        problems.push_back("property " + id +
                           ": cp-row context value outside the parent domain");
        continue;
      }
      std::vector<std::pair<bool, long>> key;
      for (const PropertyValue& v : row.context)
        key.push_back({v.integral, v.v});
      if (!contexts.insert(key).second)
        problems.push_back("property " + id + ": duplicate cp-row context");
      std::vector<PropertyValue> order =
          materialize_order(row.order, props.at(p), catalog_size);
      if (!is_domain_permutation(order, domain))
        problems.push_back("property " + id +
                           ": cp-row order is not a domain permutation");
    }
    if (static_cast<long>(contexts.size()) != combos)
      problems.push_back("property " + id + ": cp-table misses " +
                         std::to_string(combos - contexts.size()) +
                         " parent context(s)");
  }
  return problems;
}

std::vector<std::string> validate_gai(const GAIFunction& gai,
                                      const PropertySet& props,
                                      int catalog_size) {
  std::vector<std::string> problems;
  int m = props.size();
  std::vector<bool> covered(m, false);
  for (size_t f = 0; f < gai.factors.size(); ++f) {
    const GaiFactor& factor = gai.factors[f];
    const std::string where = "factor " + std::to_string(f);
    if (factor.scope.empty()) {
      problems.push_back(where + " has an empty scope");
      continue;
    }
    bool scope_ok = true;
    long combos = 1;
    for (int p : factor.scope) {
      if (p < 0 || p >= m) {
        problems.push_back(where + " scope out of range");
        scope_ok = false;
        break;
      }
      covered[p] = true;
      combos *= static_cast<long>(value_domain(props.at(p), catalog_size).size());
    }
    if (!scope_ok) continue;
    std::set<std::vector<std::pair<bool, long>>> keys;
    for (const auto& [key, value] : factor.table) {
      (void)value;
      if (key.size() != factor.scope.size()) {
        problems.push_back(where + " has a row of the wrong width");
        continue;
      }
      std::vector<std::pair<bool, long>> k;
      for (const PropertyValue& v : key) k.push_back({v.integral, v.v});
      if (!keys.insert(k).second)
        problems.push_back(where + " repeats a row");
    }
    if (static_cast<long>(keys.size()) != combos)
      problems.push_back(where + " is missing " +
                         std::to_string(combos - keys.size()) + " row(s)");
  }
  for (int p = 0; p < m; ++p)
    if (!covered[p])
      problems.push_back("property " + props.at(p).id +
                         " appears in no factor scope");
  return problems;
}

std::vector<int> topo_property_order(const TCPNet& net) {
  int m = net.node_order.size();
  std::vector<std::vector<int>> adj = adjacency(net, m);
  std::vector<int> indegree(m, 0);
  for (int u = 0; u < m; ++u)
    for (int v : adj[u]) ++indegree[v];
  std::vector<int> order;
  std::vector<bool> emitted(m, false);
  // Kahn's algorithm; among ready nodes, declaration order wins.
  while (static_cast<int>(order.size()) < m) {
    int picked = -1;
    for (int node : net.node_order)
      if (!emitted[node] && indegree[node] == 0) {
        picked = node;
        break;
      }
    if (picked < 0) throw std::logic_error("cp/i arcs form a cycle");
    emitted[picked] = true;
    order.push_back(picked);
    for (int v : adj[picked]) --indegree[v];
  }
  return order;
}

std::vector<PropertyValue> preferred_value_order(const TCPNet& net, int p,
                                                 const PropertyAssignment& ctx,
                                                 const PropertySet& props,
                                                 int catalog_size) {
  auto it = net.tables.find(p);
  if (it == net.tables.end())
    throw std::logic_error("property " + props.at(p).id + " has no cp-table");
  std::vector<int> parents = net.cp_parents(p);
  std::vector<PropertyValue> key;
  for (int parent : parents) {
    if (!ctx.assigned(parent))
      throw std::logic_error("cp-parent " + props.at(parent).id +
                             " is unassigned in the context");
    key.push_back(*ctx.values[parent]);
  }
  for (const CpRow& row : it->second)
    if (row.context == key)
      return materialize_order(row.order, props.at(p), catalog_size);
  throw std::logic_error("no cp-row matches the context of " + props.at(p).id);
}

double gai_value(const GAIFunction& gai, const PropertyAssignment& assign) {
  double total = 0;
  std::vector<PropertyValue> key;
  for (const GaiFactor& factor : gai.factors) {
    key.clear();
    for (int p : factor.scope) {
      if (!assign.assigned(p))
        throw std::logic_error("gai_value needs a full assignment");
      key.push_back(*assign.values[p]);
    }
    total += factor.value_of(key);
  }
  return total;
}

double upper_bound(const GAIFunction& gai, const ReachableValues& reach) {
  double total = 0;
  for (const GaiFactor& factor : gai.factors) {
    bool any = false;
    double best = 0;
    for (const auto& [key, value] : factor.table) {
      bool admissible = true;
      for (size_t i = 0; i < factor.scope.size() && admissible; ++i) {
        const auto& allowed = reach.per_property.at(factor.scope[i]);
        admissible = std::count(allowed.begin(), allowed.end(), key[i]) > 0;
      }
      if (admissible && (!any || value > best)) {
        any = true;
        best = value;
      }
    }
    if (!any)
      throw std::logic_error("factor has no row over the reachable values");
    total += best;
  }
  return total;
}

GAIFunction compile_tcpnet_to_gai(const TCPNet& net, const PropertySet& props,
                                  int catalog_size) {
  int m = net.node_order.size();
  std::vector<int> topo = topo_property_order(net);

  // Each node's weight exceeds the summed spans of every node after it in
  // topo order, so the compiled sum ranks assignments exactly like the
  // conditional-lex comparator: the first topo position where two
  // assignments differ decides the sign of the difference.
  std::vector<GaiFactor> factor_of(m);
  std::vector<double> span(m, 0);
  double tail_span = 0;
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    int p = *it;
    double weight = 1 + tail_span;

    std::vector<int> parents = net.cp_parents(p);
    GaiFactor factor;
    factor.scope.push_back(p);
    for (int parent : parents) factor.scope.push_back(parent);
    for (const CpRow& row : net.tables.at(p)) {
      std::vector<PropertyValue> order =
          materialize_order(row.order, props.at(p), catalog_size);
      long rank = static_cast<long>(order.size()) - 1;  // best first
      for (const PropertyValue& v : order) {
        std::vector<PropertyValue> key{v};
        key.insert(key.end(), row.context.begin(), row.context.end());
        factor.table.push_back({std::move(key), weight * rank});
        --rank;
      }
    }
    span[p] = factor.max_value() - factor.min_value();
    tail_span += span[p];
    factor_of[p] = std::move(factor);
  }

  GAIFunction gai;
  for (int node : net.node_order) gai.factors.push_back(std::move(factor_of[node]));
  return gai;
}

namespace {

// a strictly before b under conditional-lex order (preferred values first,
// properties in topo order).
bool cond_lex_before(const PropertyAssignment& a, const PropertyAssignment& b,
                     const TCPNet& net, const PropertySet& props,
                     int catalog_size) {
  for (int p : topo_property_order(net)) {
    if (*a.values[p] == *b.values[p]) continue;
    std::vector<PropertyValue> order =
        preferred_value_order(net, p, a, props, catalog_size);
    for (const PropertyValue& v : order) {
      if (*a.values[p] == v) return true;
      if (*b.values[p] == v) return false;
    }
    return false;
  }
  return false;
}

bool encoding_before(const PropertyAssignment& a, const PropertyAssignment& b,
                     const PropertySet& props, int catalog_size) {
  for (int p = 0; p < props.size(); ++p) {
    if (*a.values[p] == *b.values[p]) continue;
    std::vector<PropertyValue> domain =
        value_domain(props.at(p), catalog_size);
    for (const PropertyValue& v : domain) {
      if (*a.values[p] == v) return true;
      if (*b.values[p] == v) return false;
    }
    return false;
  }
  return false;
}

}  // namespace

bool assignment_better(const PropertyAssignment& a, double value_a,
                       const PropertyAssignment& b, double value_b,
                       const TCPNet* net, const PropertySet& props,
                       int catalog_size) {
  if (value_a > value_b + kValueEps) return true;
  if (value_b > value_a + kValueEps) return false;
  if (net) return cond_lex_before(a, b, *net, props, catalog_size);
  return encoding_before(a, b, props, catalog_size);
}

}  // namespace prefset
