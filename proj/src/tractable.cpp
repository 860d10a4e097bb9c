#include "prefset/tractable.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>

#include "prefset/formula.hpp"

namespace prefset {
namespace {

// Attribute value an equality atom pins: the domain index for
// categorical attributes, the compared constant for integer ones.
struct AtomRef {
  int attr = -1;
  long code = 0;

  bool operator==(const AtomRef&) const = default;
};

std::optional<AtomRef> atom_of(const Formula& f, int node) {
  const Formula::Node& nd = f.nodes[node];
  if (nd.kind == Formula::Kind::cat_atom) {
    return AtomRef{nd.attr, nd.value_index};
  }
  if (nd.kind == Formula::Kind::int_atom && nd.rel == Rel::eq) {
    return AtomRef{nd.attr, nd.bound};
  }
  return std::nullopt;
}

std::optional<AtomRef> single_atom(const Formula& f) {
  if (f.empty()) {
    return std::nullopt;
  }
  return atom_of(f, f.root);
}

// Atom, or disjunction of exactly two atoms.
std::optional<std::vector<AtomRef>> one_vee_atoms(const Formula& f) {
  if (f.empty()) {
    return std::nullopt;
  }
  const Formula::Node& nd = f.nodes[f.root];
  if (auto atom = atom_of(f, f.root)) {
    return std::vector<AtomRef>{*atom};
  }
  if (nd.kind != Formula::Kind::disj || nd.kids.size() != 2) {
    return std::nullopt;
  }
  auto left = atom_of(f, nd.kids[0]);
  auto right = atom_of(f, nd.kids[1]);
  if (!left.has_value() || !right.has_value()) {
    return std::nullopt;
  }
  return std::vector<AtomRef>{*left, *right};
}

bool item_matches(const Catalog& catalog, int item, const AtomRef& atom) {
  return catalog.item(item).values[atom.attr] == atom.code;
}

void scan_formula(const Formula& f, TractableClassProfile& out) {
  for (const Formula::Node& nd : f.nodes) {
    if (nd.kind == Formula::Kind::neg) {
      out.has_negation = true;
    }
    if (nd.kind == Formula::Kind::int_atom && nd.rel != Rel::eq) {
      out.atoms_equality_only = false;
    }
  }
}

}  // namespace

TractableClassProfile check_class(const Catalog& catalog,
                                  const PropertySet& props,
                                  const PreferenceModel& model) {
  TractableClassProfile profile;
  profile.sizes = instance_profile(catalog, props);
  profile.has_cardinality = model.cardinality.has_value();
  bool all_atomic = true;
  bool all_one_vee = true;
  for (const SetProperty& p : props.props) {
    if (p.kind == PropertyKind::counter) {
      profile.has_counter = true;
    }
    scan_formula(p.phi, profile);
    if (p.kind == PropertyKind::count_vs_count) {
      scan_formula(p.psi, profile);
    }
    if (p.kind != PropertyKind::count_vs_const) {
      all_atomic = false;
      all_one_vee = false;
      continue;
    }
    if (!single_atom(p.phi).has_value()) {
      all_atomic = false;
    }
    if (!one_vee_atoms(p.phi).has_value()) {
      all_one_vee = false;
    }
  }
  profile.greedy_eligible = profile.sizes.a == 1 && !profile.has_counter &&
                            !profile.has_cardinality && all_atomic;
  profile.two_sat_eligible = profile.sizes.a == 1 && !profile.has_counter &&
                             !profile.has_cardinality && profile.sizes.mu <= 1 &&
                             all_one_vee;
  return profile;
}

TwoSatSolution solve_2sat(const TwoSatInstance& instance) {
  int nodes = 2 * instance.num_vars;
  std::vector<std::vector<int>> adj(nodes);
  std::vector<uint8_t> touched(instance.num_vars, 0);
  for (const auto& [a, b] : instance.clauses) {
    adj[a ^ 1].push_back(b);
    adj[b ^ 1].push_back(a);
    touched[a >> 1] = 1;
    touched[b >> 1] = 1;
  }
  std::vector<int> comp(nodes, -1);
  std::vector<int> low(nodes, 0);
  std::vector<int> index(nodes, -1);
  std::vector<int> stack;
  std::vector<uint8_t> on_stack(nodes, 0);
  std::vector<std::pair<int, int>> frames;
  int counter = 0;
  int ncomp = 0;
  for (int s = 0; s < nodes; ++s) {
    if (index[s] != -1) {
      continue;
    }
    index[s] = low[s] = counter++;
    stack.push_back(s);
    on_stack[s] = 1;
    frames.emplace_back(s, 0);
    while (!frames.empty()) {
      int u = frames.back().first;
      if (frames.back().second < static_cast<int>(adj[u].size())) {
        int v = adj[u][frames.back().second++];
        if (index[v] == -1) {
          index[v] = low[v] = counter++;
          stack.push_back(v);
          on_stack[v] = 1;
          frames.emplace_back(v, 0);
        } else if (on_stack[v]) {
          low[u] = std::min(low[u], index[v]);
        }
      } else {
        if (low[u] == index[u]) {
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = ncomp;
            if (w == u) {
              break;
            }
          }
          ++ncomp;
        }
        frames.pop_back();
        if (!frames.empty()) {
          int parent = frames.back().first;
          low[parent] = std::min(low[parent], low[u]);
        }
      }
    }
  }
  TwoSatSolution solution;
  solution.assign.assign(instance.num_vars, 0);
  for (int v = 0; v < instance.num_vars; ++v) {
    if (comp[2 * v] == comp[2 * v + 1]) {
      return solution;  // sat stays false
    }
    if (touched[v]) {
      solution.assign[v] = comp[2 * v] < comp[2 * v + 1] ? 1 : 0;
    }
  }
  solution.sat = true;
  return solution;
}

TranslationResult translate_to_2sat(const SetProperty& p, bool value,
                                    const Catalog& catalog) {
  if (p.kind != PropertyKind::count_vs_const) {
    throw std::invalid_argument("only count comparisons translate to 2-SAT");
  }
  std::vector<int> items;
  std::vector<uint8_t> flags = satisfier_flags(p.phi, catalog);
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i]) {
      items.push_back(static_cast<int>(i));
    }
  }
  if (items.size() > 2) {
    throw std::invalid_argument(
        "property touches more than two items, out of the 2-SAT class");
  }
  int r = static_cast<int>(items.size());
  std::vector<int> admissible;
  for (int t = 0; t <= r; ++t) {
    if (rel_holds(t, p.rel, p.k) == value) {
      admissible.push_back(t);
    }
  }
  TranslationResult result;
  if (admissible.empty()) {
    result.infeasible = true;
    return result;
  }
  auto pos = [](int item) { return 2 * item; };
  auto neg = [](int item) { return 2 * item + 1; };
  auto has = [&](int t) {
    return std::find(admissible.begin(), admissible.end(), t) !=
           admissible.end();
  };
  if (r == 1) {
    int x = items[0];
    if (!has(0)) {
      result.clauses.emplace_back(pos(x), pos(x));
    } else if (!has(1)) {
      result.clauses.emplace_back(neg(x), neg(x));
    }
    return result;
  }
  if (r == 2) {
    int x = items[0];
    int y = items[1];
    bool a0 = has(0);
    bool a1 = has(1);
    bool a2 = has(2);
    if (a0 && a1 && a2) {
      return result;  // any count works
    }
    if (!a0) {
      result.clauses.emplace_back(pos(x), pos(y));
    }
    if (!a2) {
      result.clauses.emplace_back(neg(x), neg(y));
    }
    if (!a1) {
      // counts 0 and 2 only: the two selections must agree
      result.clauses.emplace_back(pos(x), neg(y));
      result.clauses.emplace_back(neg(x), pos(y));
    }
    if (!a1 && !a0) {
      result.clauses.clear();
      result.clauses.emplace_back(pos(x), pos(x));
      result.clauses.emplace_back(pos(y), pos(y));
    }
    if (!a1 && !a2) {
      result.clauses.clear();
      result.clauses.emplace_back(neg(x), neg(x));
      result.clauses.emplace_back(neg(y), neg(y));
    }
    return result;
  }
  return result;  // r == 0: the only count is 0 and it is admissible
}

SearchResult solve_atomic_greedy(const Catalog& catalog,
                                 const PropertySet& props,
                                 const PreferenceModel& model) {
  if (model.kind != ModelKind::tcp) {
    throw std::invalid_argument("the greedy pass needs a ranking model");
  }
  TractableClassProfile profile = check_class(catalog, props, model);
  if (!profile.greedy_eligible) {
    throw std::invalid_argument("instance is outside the greedy class");
  }
  int n = static_cast<int>(catalog.size());
  int m = props.size();
  std::map<std::pair<int, long>, std::vector<int>> key_items;
  for (int p = 0; p < m; ++p) {
    AtomRef atom = *single_atom(props.at(p).phi);
    auto key = std::make_pair(atom.attr, atom.code);
    if (key_items.contains(key)) {
      continue;
    }
    std::vector<int> items;
    for (int i = 0; i < n; ++i) {
      if (item_matches(catalog, i, atom)) {
        items.push_back(i);
      }
    }
    key_items.emplace(key, std::move(items));
  }
  // Admissible selection counts per touched value, narrowed as
  // properties commit.
  std::map<std::pair<int, long>, std::vector<uint8_t>> allowed;
  PropertyAssignment committed(m);
  for (int p : topo_property_order(model.net)) {
    const SetProperty& prop = props.at(p);
    AtomRef atom = *single_atom(prop.phi);
    auto key = std::make_pair(atom.attr, atom.code);
    long avail = static_cast<long>(key_items.at(key).size());
    auto [it, fresh] = allowed.try_emplace(
        key, std::vector<uint8_t>(static_cast<std::size_t>(avail) + 1, 1));
    std::vector<uint8_t>& current = it->second;
    bool placed = false;
    for (const PropertyValue& v :
         preferred_value_order(model.net, p, committed, props, n)) {
      std::vector<uint8_t> narrowed(current.size(), 0);
      bool any = false;
      for (long t = 0; t <= avail; ++t) {
        if (current[t] && rel_holds(t, prop.rel, prop.k) == v.as_bool()) {
          narrowed[t] = 1;
          any = true;
        }
      }
      if (any) {
        current = std::move(narrowed);
        committed.values[p] = v;
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw std::logic_error("no value of a boolean property was admissible");
    }
  }
  SearchResult result;
  for (const auto& [key, counts] : allowed) {
    long take = 0;
    while (!counts[take]) {
      ++take;
    }
    const std::vector<int>& items = key_items.at(key);
    result.subset.insert(result.subset.end(), items.begin(),
                         items.begin() + take);
  }
  std::sort(result.subset.begin(), result.subset.end());
  result.assignment = PropertyAssignment(m);
  for (int p = 0; p < m; ++p) {
    result.assignment.values[p] =
        eval_property(props.at(p), catalog, result.subset);
  }
  GAIFunction compiled = compile_tcpnet_to_gai(model.net, props, n);
  result.value = gai_value(compiled, result.assignment);
  result.proven_optimal = true;
  return result;
}

SearchResult solve_onevee(const Catalog& catalog, const PropertySet& props,
                          const PreferenceModel& model) {
  if (model.kind != ModelKind::tcp) {
    throw std::invalid_argument("the 2-SAT pass needs a ranking model");
  }
  TractableClassProfile profile = check_class(catalog, props, model);
  if (!profile.two_sat_eligible) {
    throw std::invalid_argument("instance is outside the 2-SAT class");
  }
  int n = static_cast<int>(catalog.size());
  int m = props.size();
  PropertyAssignment committed(m);
  std::vector<std::pair<int, bool>> pins;
  auto feasible = [&](const std::vector<std::pair<int, bool>>& trial,
                      TwoSatSolution* out) {
    TwoSatInstance instance;
    instance.num_vars = n;
    for (const auto& [q, val] : trial) {
      TranslationResult tr = translate_to_2sat(props.at(q), val, catalog);
      if (tr.infeasible) {
        return false;
      }
      for (const auto& clause : tr.clauses) {
        instance.clauses.push_back(clause);
      }
    }
    TwoSatSolution solution = solve_2sat(instance);
    if (solution.sat && out != nullptr) {
      *out = std::move(solution);
    }
    return solution.sat;
  };
  TwoSatSolution last;
  if (!feasible(pins, &last)) {
    throw std::logic_error("the empty commitment must be satisfiable");
  }
  for (int p : topo_property_order(model.net)) {
    bool placed = false;
    for (const PropertyValue& v :
         preferred_value_order(model.net, p, committed, props, n)) {
      pins.emplace_back(p, v.as_bool());
      if (feasible(pins, &last)) {
        committed.values[p] = v;
        placed = true;
        break;
      }
      pins.pop_back();
    }
    if (!placed) {
      throw std::logic_error("no value of a boolean property was feasible");
    }
  }
  SearchResult result;
  for (int i = 0; i < n; ++i) {
    if (last.assign[i]) {
      result.subset.push_back(i);
    }
  }
  result.assignment = PropertyAssignment(m);
  for (int p = 0; p < m; ++p) {
    result.assignment.values[p] =
        eval_property(props.at(p), catalog, result.subset);
  }
  GAIFunction compiled = compile_tcpnet_to_gai(model.net, props, n);
  result.value = gai_value(compiled, result.assignment);
  result.proven_optimal = true;
  return result;
}

}  // namespace prefset
