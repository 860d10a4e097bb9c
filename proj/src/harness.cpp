#include "prefset/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "prefset/csp_search.hpp"
#include "prefset/formula.hpp"
#include "prefset/subset_search.hpp"

namespace prefset {
namespace {

constexpr int kOracleItemCap = 20;

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

struct MaskEval {
  std::vector<std::uint32_t> phi;
  std::vector<std::uint32_t> psi;

  MaskEval(const Catalog& catalog, const PropertySet& props) {
    if (catalog.size() > kOracleItemCap) {
      throw std::invalid_argument(
          "reference enumeration handles at most 20 items");
    }
    phi.resize(props.size(), 0);
    psi.resize(props.size(), 0);
    for (int p = 0; p < props.size(); ++p) {
      std::vector<uint8_t> flags = satisfier_flags(props.at(p).phi, catalog);
      for (int i = 0; i < catalog.size(); ++i) {
        if (flags[i]) {
          phi[p] |= 1u << i;
        }
      }
      if (props.at(p).kind == PropertyKind::count_vs_count) {
        flags = satisfier_flags(props.at(p).psi, catalog);
        for (int i = 0; i < catalog.size(); ++i) {
          if (flags[i]) {
            psi[p] |= 1u << i;
          }
        }
      }
    }
  }

  PropertyAssignment assignment_of(const PropertySet& props,
                                   std::uint32_t mask) const {
    PropertyAssignment assign(props.size());
    for (int p = 0; p < props.size(); ++p) {
      assign.values[p] = value_from_counts(props.at(p),
                                           std::popcount(mask & phi[p]),
                                           std::popcount(mask & psi[p]));
    }
    return assign;
  }
};

std::vector<int> mask_subset(std::uint32_t mask, int n) {
  std::vector<int> subset;
  for (int i = 0; i < n; ++i) {
    if (mask & (1u << i)) {
      subset.push_back(i);
    }
  }
  return subset;
}

const GAIFunction* effective_gai(const PreferenceModel& model,
                                 const PropertySet& props, int n,
                                 GAIFunction& storage) {
  if (model.kind == ModelKind::tcp) {
    storage = compile_tcpnet_to_gai(model.net, props, n);
    return &storage;
  }
  return &model.gai;
}

}  // namespace

OracleResult brute_force_gai(const Catalog& catalog, const PropertySet& props,
                             const PreferenceModel& model) {
  int n = catalog.size();
  MaskEval eval(catalog, props);
  GAIFunction storage;
  const GAIFunction* gai = effective_gai(model, props, n, storage);
  OracleResult best;
  best.feasible = false;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (model.cardinality.has_value() &&
        std::popcount(mask) != *model.cardinality) {
      continue;
    }
    PropertyAssignment assign = eval.assignment_of(props, mask);
    double value = gai_value(*gai, assign);
    if (!best.feasible || value > best.value + kValueEps) {
      best.feasible = true;
      best.value = value;
      best.assignment = std::move(assign);
      best.subset = mask_subset(mask, n);
      best.optimal_count = 1;
    } else if (value >= best.value - kValueEps) {
      ++best.optimal_count;
      std::vector<int> subset = mask_subset(mask, n);
      if (std::lexicographical_compare(subset.begin(), subset.end(),
                                       best.subset.begin(),
                                       best.subset.end())) {
        best.subset = std::move(subset);
        best.assignment = std::move(assign);
      }
    }
  }
  return best;
}

OracleResult brute_force_tcp(const Catalog& catalog, const PropertySet& props,
                             const PreferenceModel& model) {
  if (model.kind != ModelKind::tcp) {
    throw std::invalid_argument("the ranking reference needs a ranking model");
  }
  int n = catalog.size();
  MaskEval eval(catalog, props);
  GAIFunction compiled = compile_tcpnet_to_gai(model.net, props, n);
  OracleResult best;
  best.feasible = false;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (model.cardinality.has_value() &&
        std::popcount(mask) != *model.cardinality) {
      continue;
    }
    PropertyAssignment assign = eval.assignment_of(props, mask);
    if (!best.feasible) {
      best.feasible = true;
      best.assignment = std::move(assign);
      best.subset = mask_subset(mask, n);
      best.optimal_count = 1;
      continue;
    }
    if (assign == best.assignment) {
      ++best.optimal_count;
      std::vector<int> subset = mask_subset(mask, n);
      if (std::lexicographical_compare(subset.begin(), subset.end(),
                                       best.subset.begin(),
                                       best.subset.end())) {
        best.subset = std::move(subset);
      }
    } else if (assignment_better(assign, 0, best.assignment, 0, &model.net,
                                 props, n)) {
      best.assignment = std::move(assign);
      best.subset = mask_subset(mask, n);
      best.optimal_count = 1;
    }
  }
  if (best.feasible) {
    best.value = gai_value(compiled, best.assignment);
  }
  return best;
}

OracleResult brute_force_tcp_by_assignments(const Catalog& catalog,
                                            const PropertySet& props,
                                            const PreferenceModel& model) {
  if (model.kind != ModelKind::tcp) {
    throw std::invalid_argument("the ranking reference needs a ranking model");
  }
  int n = catalog.size();
  int m = props.size();
  MaskEval eval(catalog, props);
  long combos = 1;
  for (int p = 0; p < m; ++p) {
    combos *= static_cast<long>(value_domain(props.at(p), n).size());
    if (combos > 400'000) {
      throw std::invalid_argument("assignment enumeration would be too large");
    }
  }
  // Everything any admissible subset achieves.
  std::vector<PropertyAssignment> achieved;
  std::vector<std::uint32_t> achieved_mask;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (model.cardinality.has_value() &&
        std::popcount(mask) != *model.cardinality) {
      continue;
    }
    achieved.push_back(eval.assignment_of(props, mask));
    achieved_mask.push_back(mask);
  }
  OracleResult best;
  best.feasible = false;
  if (achieved.empty()) {
    return best;
  }
  // Walk every full assignment, keep the ranking-minimal achieved one.
  PropertyAssignment current(m);
  PropertyAssignment winner(m);
  bool have_winner = false;
  std::vector<std::vector<PropertyValue>> domains;
  for (int p = 0; p < m; ++p) {
    domains.push_back(value_domain(props.at(p), n));
  }
  std::vector<std::size_t> at(m, 0);
  while (true) {
    for (int p = 0; p < m; ++p) {
      current.values[p] = domains[p][at[p]];
    }
    bool is_achieved = false;
    for (const PropertyAssignment& a : achieved) {
      if (a == current) {
        is_achieved = true;
        break;
      }
    }
    if (is_achieved &&
        (!have_winner ||
         assignment_better(current, 0, winner, 0, &model.net, props, n))) {
      winner = current;
      have_winner = true;
    }
    int p = m - 1;
    while (p >= 0 && ++at[p] == domains[p].size()) {
      at[p] = 0;
      --p;
    }
    if (p < 0) {
      break;
    }
  }
  best.feasible = true;
  best.assignment = winner;
  for (std::size_t i = 0; i < achieved.size(); ++i) {
    if (achieved[i] == winner) {
      ++best.optimal_count;
      std::vector<int> subset = mask_subset(achieved_mask[i], n);
      if (best.subset.empty() && best.optimal_count == 1) {
        best.subset = std::move(subset);
      } else if (std::lexicographical_compare(subset.begin(), subset.end(),
                                              best.subset.begin(),
                                              best.subset.end())) {
        best.subset = std::move(subset);
      }
    }
  }
  GAIFunction compiled = compile_tcpnet_to_gai(model.net, props, n);
  best.value = gai_value(compiled, best.assignment);
  return best;
}

BuiltInstance gen_vertex_cover(const Graph& graph) {
  int ne = static_cast<int>(graph.edges.size());
  std::vector<AttributeDef> attrs;
  for (int e = 0; e < ne; ++e) {
    attrs.push_back({"e" + std::to_string(e),
                     AttrKind::categorical,
                     {"no", "yes"},
                     std::nullopt});
  }
  AttributeSchema schema(std::move(attrs));
  std::vector<Item> items;
  for (int v = 0; v < graph.num_vertices; ++v) {
    Item item;
    item.id = "v" + std::to_string(v);
    for (int e = 0; e < ne; ++e) {
      bool incident = graph.edges[e].first == v || graph.edges[e].second == v;
      item.values.push_back(incident ? 1 : 0);
    }
    items.push_back(std::move(item));
  }
  BuiltInstance inst;
  inst.catalog = Catalog(schema, std::move(items));
  for (int e = 0; e < ne; ++e) {
    SetProperty p;
    p.id = "edge" + std::to_string(e);
    p.kind = PropertyKind::count_vs_const;
    p.phi = parse_formula("e" + std::to_string(e) + " = yes", schema);
    p.rel = Rel::gt;
    p.k = 0;
    inst.props.props.push_back(std::move(p));
  }
  SetProperty counter;
  counter.id = "picked";
  counter.kind = PropertyKind::counter;
  counter.phi = parse_formula("true", schema);
  inst.props.props.push_back(std::move(counter));
  TCPNet net;
  for (int p = 0; p <= ne; ++p) {
    net.node_order.push_back(p);
  }
  for (int e = 0; e < ne; ++e) {
    net.i_arcs.emplace_back(e, ne);
    net.tables[e] = {{{},
                      ValueOrderSpec::of({PropertyValue::of_bool(true),
                                          PropertyValue::of_bool(false)})}};
  }
  net.tables[ne] = {{{}, ValueOrderSpec::asc()}};
  inst.model.kind = ModelKind::tcp;
  inst.model.net = std::move(net);
  return inst;
}

namespace {

// Shared item/property layout of the satisfiability reductions: two
// opposite literal items per variable, one exactly-one property per
// variable, one clause property per clause.
BuiltInstance sat_base(const CnfFormula& cnf) {
  std::vector<std::string> domain;
  for (int v = 1; v <= cnf.num_vars; ++v) {
    domain.push_back("p" + std::to_string(v));
  }
  for (int v = 1; v <= cnf.num_vars; ++v) {
    domain.push_back("n" + std::to_string(v));
  }
  AttributeSchema schema(
      {{"lit", AttrKind::categorical, domain, std::nullopt}});
  std::vector<Item> items;
  for (int v = 1; v <= cnf.num_vars; ++v) {
    items.push_back({"pos" + std::to_string(v), {v - 1}});
    items.push_back(
        {"neg" + std::to_string(v), {cnf.num_vars + v - 1}});
  }
  BuiltInstance inst;
  inst.catalog = Catalog(schema, std::move(items));
  for (int v = 1; v <= cnf.num_vars; ++v) {
    SetProperty p;
    p.id = "var" + std::to_string(v);
    p.kind = PropertyKind::count_vs_const;
    p.phi = parse_formula(
        "lit = p" + std::to_string(v) + " | lit = n" + std::to_string(v),
        schema);
    p.rel = Rel::eq;
    p.k = 1;
    inst.props.props.push_back(std::move(p));
  }
  for (std::size_t c = 0; c < cnf.clauses.size(); ++c) {
    SetProperty p;
    p.id = "clause" + std::to_string(c);
    p.kind = PropertyKind::count_vs_const;
    std::string text;
    for (int lit : cnf.clauses[c]) {
      if (!text.empty()) {
        text += " | ";
      }
      text += lit > 0 ? "lit = p" + std::to_string(lit)
                      : "lit = n" + std::to_string(-lit);
    }
    p.phi = parse_formula(text, schema);
    p.rel = Rel::ge;
    p.k = 1;
    inst.props.props.push_back(std::move(p));
  }
  return inst;
}

}  // namespace

BuiltInstance gen_ksat(const CnfFormula& cnf) {
  BuiltInstance inst = sat_base(cnf);
  TCPNet net;
  for (int p = 0; p < inst.props.size(); ++p) {
    net.node_order.push_back(p);
    net.tables[p] = {{{},
                      ValueOrderSpec::of({PropertyValue::of_bool(true),
                                          PropertyValue::of_bool(false)})}};
  }
  inst.model.kind = ModelKind::tcp;
  inst.model.net = std::move(net);
  return inst;
}

BuiltInstance gen_max2sat(const CnfFormula& cnf) {
  BuiltInstance inst = sat_base(cnf);
  long penalty = 2 * static_cast<long>(cnf.clauses.size());
  GAIFunction gai;
  for (int v = 0; v < cnf.num_vars; ++v) {
    GaiFactor factor;
    factor.scope = {v};
    factor.table = {{{PropertyValue::of_bool(true)}, 0.0},
                    {{PropertyValue::of_bool(false)},
                     static_cast<double>(-penalty)}};
    gai.factors.push_back(std::move(factor));
  }
  for (std::size_t c = 0; c < cnf.clauses.size(); ++c) {
    GaiFactor factor;
    factor.scope = {cnf.num_vars + static_cast<int>(c)};
    factor.table = {{{PropertyValue::of_bool(true)}, 1.0},
                    {{PropertyValue::of_bool(false)}, 0.0}};
    gai.factors.push_back(std::move(factor));
  }
  inst.model.kind = ModelKind::gai;
  inst.model.gai = std::move(gai);
  return inst;
}

namespace {

struct Rng {
  std::mt19937_64 eng;

  explicit Rng(std::uint64_t seed) : eng(seed) {}
  int below(int n) {
    return static_cast<int>(eng() % static_cast<std::uint64_t>(n));
  }
  double unit() {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
  }
  bool coin(double p) { return unit() < p; }
};

int add_node(Formula& f, Formula::Node node) {
  f.nodes.push_back(std::move(node));
  return static_cast<int>(f.nodes.size()) - 1;
}

Formula random_atom_formula(Rng& rng, const AttributeSchema& schema) {
  Formula f;
  Formula::Node node;
  int attr = rng.below(schema.size());
  const AttributeDef& def = schema.at(attr);
  node.attr = attr;
  if (def.kind == AttrKind::categorical) {
    node.kind = Formula::Kind::cat_atom;
    node.value_index = rng.below(static_cast<int>(def.domain.size()));
    node.value_text = def.domain[node.value_index];
  } else {
    node.kind = Formula::Kind::int_atom;
    node.rel = static_cast<Rel>(rng.below(6));
    node.bound = rng.below(10);
  }
  f.root = add_node(f, std::move(node));
  return f;
}

int random_subformula(Rng& rng, const AttributeSchema& schema, Formula& f,
                      int budget) {
  if (budget == 0 || rng.coin(0.4)) {
    Formula atom = random_atom_formula(rng, schema);
    return add_node(f, atom.nodes[atom.root]);
  }
  int pick = rng.below(3);
  if (pick == 0) {
    int kid = random_subformula(rng, schema, f, budget - 1);
    Formula::Node node;
    node.kind = Formula::Kind::neg;
    node.kids = {kid};
    return add_node(f, std::move(node));
  }
  int left_budget = rng.below(budget);
  int left = random_subformula(rng, schema, f, left_budget);
  int right = random_subformula(rng, schema, f, budget - 1 - left_budget);
  Formula::Node node;
  node.kind = pick == 1 ? Formula::Kind::conj : Formula::Kind::disj;
  node.kids = {left, right};
  return add_node(f, std::move(node));
}

Formula random_formula(Rng& rng, const AttributeSchema& schema,
                       int max_connectives) {
  Formula f;
  int budget = max_connectives > 0 ? rng.below(max_connectives + 1) : 0;
  f.root = random_subformula(rng, schema, f, budget);
  return f;
}

std::vector<std::vector<PropertyValue>> cartesian(
    const std::vector<std::vector<PropertyValue>>& dims) {
  std::vector<std::vector<PropertyValue>> rows{{}};
  for (const std::vector<PropertyValue>& dim : dims) {
    std::vector<std::vector<PropertyValue>> next;
    for (const std::vector<PropertyValue>& row : rows) {
      for (const PropertyValue& v : dim) {
        std::vector<PropertyValue> extended = row;
        extended.push_back(v);
        next.push_back(std::move(extended));
      }
    }
    rows = std::move(next);
  }
  return rows;
}

TCPNet random_net(Rng& rng, const PropertySet& props, int catalog_size) {
  int m = props.size();
  TCPNet net;
  std::vector<int> cp_parent_count(m, 0);
  for (int p = 0; p < m; ++p) {
    net.node_order.push_back(p);
  }
  for (int child = 0; child < m; ++child) {
    for (int parent = 0; parent < child; ++parent) {
      if (props.at(parent).boolean() && cp_parent_count[child] < 2 &&
          rng.coin(0.25)) {
        net.cp_arcs.emplace_back(parent, child);
        ++cp_parent_count[child];
      } else if (rng.coin(0.12)) {
        net.i_arcs.emplace_back(parent, child);
      }
    }
  }
  for (int p = 0; p < m; ++p) {
    std::vector<std::vector<PropertyValue>> parent_domains;
    for (int parent : net.cp_parents(p)) {
      parent_domains.push_back(value_domain(props.at(parent), catalog_size));
    }
    std::vector<CpRow> rows;
    for (std::vector<PropertyValue>& context : cartesian(parent_domains)) {
      CpRow row;
      row.context = std::move(context);
      if (props.at(p).boolean()) {
        bool straight = rng.coin(0.5);
        row.order = ValueOrderSpec::of(
            {PropertyValue::of_bool(straight),
             PropertyValue::of_bool(!straight)});
      } else {
        row.order = rng.coin(0.5) ? ValueOrderSpec::asc()
                                  : ValueOrderSpec::desc();
      }
      rows.push_back(std::move(row));
    }
    net.tables[p] = std::move(rows);
  }
  return net;
}

GAIFunction random_gai(Rng& rng, const PropertySet& props, int catalog_size) {
  int m = props.size();
  GAIFunction gai;
  std::vector<uint8_t> covered(m, 0);
  auto add_factor = [&](std::vector<int> scope) {
    GaiFactor factor;
    std::vector<std::vector<PropertyValue>> dims;
    for (int p : scope) {
      covered[p] = 1;
      dims.push_back(value_domain(props.at(p), catalog_size));
    }
    factor.scope = std::move(scope);
    for (std::vector<PropertyValue>& row : cartesian(dims)) {
      factor.table.emplace_back(std::move(row),
                                static_cast<double>(rng.below(11)));
    }
    gai.factors.push_back(std::move(factor));
  };
  int nf = 1 + rng.below(m);
  for (int f = 0; f < nf; ++f) {
    int a = rng.below(m);
    if (m > 1 && rng.coin(0.5)) {
      int b = rng.below(m);
      while (b == a) {
        b = rng.below(m);
      }
      add_factor({std::min(a, b), std::max(a, b)});
    } else {
      add_factor({a});
    }
  }
  for (int p = 0; p < m; ++p) {
    if (!covered[p]) {
      add_factor({p});
    }
  }
  return gai;
}

void insist_valid(const BuiltInstance& inst) {
  std::vector<std::string> problems =
      inst.model.kind == ModelKind::tcp
          ? validate_tcpnet(inst.model.net, inst.props, inst.catalog.size())
          : validate_gai(inst.model.gai, inst.props, inst.catalog.size());
  if (!problems.empty()) {
    throw std::logic_error("generated model fails validation: " +
                           problems.front());
  }
}

}  // namespace

BuiltInstance gen_random(std::uint64_t seed, const RandomSpec& spec) {
  Rng rng(seed);
  std::vector<AttributeDef> attrs;
  for (int a = 0; a < spec.num_attrs; ++a) {
    AttributeDef def;
    def.name = "a" + std::to_string(a);
    if (rng.coin(0.7)) {
      def.kind = AttrKind::categorical;
      int d = 2 + rng.below(std::max(1, spec.max_domain - 1));
      for (int v = 0; v < d; ++v) {
        def.domain.push_back("v" + std::to_string(v));
      }
    } else {
      def.kind = AttrKind::integer;
      def.range = {0, 9};
    }
    attrs.push_back(std::move(def));
  }
  AttributeSchema schema(std::move(attrs));
  std::vector<Item> items;
  for (int i = 0; i < spec.num_items; ++i) {
    Item item;
    item.id = "o" + std::to_string(i);
    for (int a = 0; a < spec.num_attrs; ++a) {
      if (schema.at(a).kind == AttrKind::categorical) {
        item.values.push_back(
            rng.below(static_cast<int>(schema.at(a).domain.size())));
      } else {
        item.values.push_back(rng.below(10));
      }
    }
    items.push_back(std::move(item));
  }
  BuiltInstance inst;
  inst.catalog = Catalog(schema, std::move(items));
  for (int p = 0; p < spec.num_props; ++p) {
    SetProperty prop;
    prop.id = "p" + std::to_string(p);
    double roll = rng.unit();
    if (spec.allow_counters && roll < 0.18) {
      prop.kind = PropertyKind::counter;
      prop.phi = random_formula(rng, schema, spec.max_connectives);
    } else if (spec.allow_count_vs_count && roll < 0.36) {
      prop.kind = PropertyKind::count_vs_count;
      prop.phi = random_formula(rng, schema, spec.max_connectives);
      prop.psi = random_formula(rng, schema, spec.max_connectives);
      prop.rel = static_cast<Rel>(rng.below(6));
    } else {
      prop.kind = PropertyKind::count_vs_const;
      prop.phi = random_formula(rng, schema, spec.max_connectives);
      prop.rel = static_cast<Rel>(rng.below(6));
      prop.k = rng.below(spec.num_items / 2 + 2);
    }
    inst.props.props.push_back(std::move(prop));
  }
  if (spec.tcp) {
    inst.model.kind = ModelKind::tcp;
    inst.model.net = random_net(rng, inst.props, spec.num_items);
  } else {
    inst.model.kind = ModelKind::gai;
    inst.model.gai = random_gai(rng, inst.props, spec.num_items);
  }
  if (spec.with_cardinality) {
    inst.model.cardinality = rng.below(spec.num_items + 1);
  }
  insist_valid(inst);
  return inst;
}

BuiltInstance gen_tractable_greedy(std::uint64_t seed) {
  Rng rng(seed);
  int n = 6 + rng.below(7);
  int d = 3 + rng.below(4);
  AttributeDef def;
  def.name = "a0";
  def.kind = AttrKind::categorical;
  for (int v = 0; v < d; ++v) {
    def.domain.push_back("v" + std::to_string(v));
  }
  AttributeSchema schema({def});
  std::vector<Item> items;
  for (int i = 0; i < n; ++i) {
    items.push_back({"o" + std::to_string(i), {rng.below(d)}});
  }
  BuiltInstance inst;
  inst.catalog = Catalog(schema, std::move(items));
  int m = 3 + rng.below(4);
  for (int p = 0; p < m; ++p) {
    SetProperty prop;
    prop.id = "p" + std::to_string(p);
    prop.kind = PropertyKind::count_vs_const;
    prop.phi = parse_formula("a0 = v" + std::to_string(rng.below(d)), schema);
    prop.rel = static_cast<Rel>(rng.below(6));
    prop.k = rng.below(4);
    inst.props.props.push_back(std::move(prop));
  }
  inst.model.kind = ModelKind::tcp;
  inst.model.net = random_net(rng, inst.props, n);
  insist_valid(inst);
  return inst;
}

BuiltInstance gen_tractable_onevee(std::uint64_t seed) {
  Rng rng(seed);
  int n = 5 + rng.below(8);
  AttributeDef def;
  def.name = "a0";
  def.kind = AttrKind::categorical;
  for (int v = 0; v < n; ++v) {
    def.domain.push_back("v" + std::to_string(v));
  }
  AttributeSchema schema({def});
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) {
    perm[i] = i;
  }
  for (int i = n - 1; i > 0; --i) {
    std::swap(perm[i], perm[rng.below(i + 1)]);
  }
  std::vector<Item> items;
  for (int i = 0; i < n; ++i) {
    items.push_back({"o" + std::to_string(i), {perm[i]}});
  }
  BuiltInstance inst;
  inst.catalog = Catalog(schema, std::move(items));
  int m = 3 + rng.below(4);
  for (int p = 0; p < m; ++p) {
    SetProperty prop;
    prop.id = "p" + std::to_string(p);
    prop.kind = PropertyKind::count_vs_const;
    if (rng.coin(0.5)) {
      prop.phi =
          parse_formula("a0 = v" + std::to_string(rng.below(n)), schema);
    } else {
      int a = rng.below(n);
      int b = rng.below(n);
      while (b == a) {
        b = rng.below(n);
      }
      prop.phi = parse_formula("a0 = v" + std::to_string(a) + " | a0 = v" +
                                   std::to_string(b),
                               schema);
    }
    prop.rel = static_cast<Rel>(rng.below(6));
    prop.k = rng.below(3);
    inst.props.props.push_back(std::move(prop));
  }
  inst.model.kind = ModelKind::tcp;
  inst.model.net = random_net(rng, inst.props, n);
  insist_valid(inst);
  return inst;
}

namespace {

AttributeSchema movie_schema() {
  return AttributeSchema({
      {"Year", AttrKind::integer, {}, {{1940, 2010}}},
      {"Genre",
       AttrKind::categorical,
       {"Comedy", "Drama", "Thriller", "Action", "Family", "War", "Filmnoir"},
       std::nullopt},
      {"Color", AttrKind::categorical, {"Color", "BW"}, std::nullopt},
      {"Director",
       AttrKind::categorical,
       {"Spielberg", "Other"},
       std::nullopt},
      {"Sound", AttrKind::categorical, {"Stereo", "Mono"}, std::nullopt},
      {"Location",
       AttrKind::categorical,
       {"NA", "Europe", "Asia", "Other"},
       std::nullopt},
      {"Actor", AttrKind::categorical, {"Famous", "Unknown"}, std::nullopt},
      {"NetProfit", AttrKind::integer, {}, {{0, 200'000'000}}},
  });
}

SetProperty movie_prop(const AttributeSchema& schema, const std::string& id,
                       const std::string& phi, Rel rel, long k) {
  SetProperty p;
  p.id = id;
  p.kind = PropertyKind::count_vs_const;
  p.phi = parse_formula(phi, schema);
  p.rel = rel;
  p.k = k;
  return p;
}

int movie_prefix(MovieVariant variant) {
  switch (variant) {
    case MovieVariant::p5:
      return 5;
    case MovieVariant::p9:
      return 9;
    default:
      return 14;
  }
}

}  // namespace

Catalog movie_catalog(int size, std::uint64_t seed) {
  AttributeSchema schema = movie_schema();
  Rng rng(seed);
  std::vector<Item> items;
  for (int i = 0; i < size; ++i) {
    Item item;
    item.id = "m" + std::to_string(i);
    long year = 1950 + static_cast<long>(58 * std::pow(rng.unit(), 0.7));
    double g = rng.unit();
    long genre = g < 0.20   ? 0
                 : g < 0.44 ? 1
                 : g < 0.62 ? 2
                 : g < 0.77 ? 3
                 : g < 0.87 ? 4
                 : g < 0.94 ? 5
                            : 6;
    long color = (year < 1965 ? rng.coin(0.8) : rng.coin(0.05)) ? 1 : 0;
    long director = rng.coin(0.02) ? 0 : 1;
    long sound = (year < 1960 ? rng.coin(0.7) : rng.coin(0.02)) ? 1 : 0;
    double l = rng.unit();
    long location = l < 0.5 ? 0 : l < 0.75 ? 1 : l < 0.9 ? 2 : 3;
    long actor = rng.coin(0.3) ? 0 : 1;
    long profit = rng.coin(0.45)
                      ? rng.below(1'000'000)
                      : 1'000'000 + static_cast<long>(rng.eng() % 99'000'000);
    item.values = {year, genre, color, director, sound, location, actor,
                   profit};
    items.push_back(std::move(item));
  }
  return Catalog(schema, std::move(items));
}

PropertySet movie_properties(MovieVariant variant) {
  AttributeSchema schema = movie_schema();
  PropertySet props;
  props.props.push_back(movie_prop(schema, "sp1", "Year >= 2002", Rel::eq, 5));
  props.props.push_back(
      movie_prop(schema, "sp2", "Genre = Comedy", Rel::ge, 2));
  props.props.push_back(
      movie_prop(schema, "sp3", "Genre = Thriller", Rel::le, 3));
  props.props.push_back(
      movie_prop(schema, "sp4", "Genre = Family", Rel::gt, 1));
  props.props.push_back(movie_prop(schema, "sp5", "Color = BW", Rel::gt, 1));
  if (movie_prefix(variant) == 5) {
    return props;
  }
  props.props.push_back(
      movie_prop(schema, "sp6", "Director = Spielberg", Rel::ge, 1));
  if (variant == MovieVariant::p14_soft) {
    props.props.push_back(
        movie_prop(schema, "sp7s", "Sound = Mono", Rel::le, 1));
  } else {
    props.props.push_back(
        movie_prop(schema, "sp7", "Sound = Mono", Rel::eq, 0));
  }
  if (variant == MovieVariant::p14_tight) {
    props.props.push_back(
        movie_prop(schema, "sp8t", "Genre = Filmnoir", Rel::ge, 4));
  } else {
    props.props.push_back(movie_prop(
        schema, "sp8", "Genre = War | Genre = Filmnoir", Rel::eq, 0));
  }
  props.props.push_back(movie_prop(schema, "sp9", "Location = NA", Rel::gt, 1));
  if (movie_prefix(variant) == 9) {
    return props;
  }
  if (variant == MovieVariant::p14_soft) {
    props.props.push_back(
        movie_prop(schema, "sp10s", "Actor = Famous", Rel::ge, 3));
  } else {
    props.props.push_back(
        movie_prop(schema, "sp10", "Actor = Famous", Rel::eq, 5));
  }
  props.props.push_back(
      movie_prop(schema, "sp11", "NetProfit >= 1000000", Rel::ge, 2));
  props.props.push_back(
      movie_prop(schema, "sp12", "Genre = Drama", Rel::le, 2));
  props.props.push_back(movie_prop(schema, "sp13", "Year < 1970", Rel::le, 1));
  if (variant == MovieVariant::p14_tight) {
    props.props.push_back(
        movie_prop(schema, "sp14t", "NetProfit >= 1000000", Rel::ge, 5));
  } else {
    props.props.push_back(
        movie_prop(schema, "sp14", "Location = Europe", Rel::ge, 1));
  }
  return props;
}

PreferenceModel movie_model(MovieVariant variant) {
  int size = movie_prefix(variant);
  std::vector<std::pair<int, int>> cp = {{0, 1}, {0, 4}, {0, 5}, {1, 3},
                                         {1, 2}, {5, 6}, {7, 8}};
  std::vector<std::pair<int, int>> imp = {{3, 2}, {8, 4}};
  TCPNet net;
  for (int p = 0; p < size; ++p) {
    net.node_order.push_back(p);
  }
  for (const auto& arc : cp) {
    if (arc.first < size && arc.second < size) {
      net.cp_arcs.push_back(arc);
    }
  }
  for (const auto& arc : imp) {
    if (arc.first < size && arc.second < size) {
      net.i_arcs.push_back(arc);
    }
  }
  auto straight = ValueOrderSpec::of(
      {PropertyValue::of_bool(true), PropertyValue::of_bool(false)});
  auto flipped = ValueOrderSpec::of(
      {PropertyValue::of_bool(false), PropertyValue::of_bool(true)});
  auto t_ctx = std::vector<PropertyValue>{PropertyValue::of_bool(true)};
  auto f_ctx = std::vector<PropertyValue>{PropertyValue::of_bool(false)};
  for (int p = 0; p < size; ++p) {
    std::vector<int> parents = net.cp_parents(p);
    if (parents.empty()) {
      net.tables[p] = {{{}, straight}};
      continue;
    }
    // All movie nodes have at most one conditioning parent.
    switch (p) {
      case 4:  // fewer recent films make black and white attractive
        net.tables[p] = {{t_ctx, flipped}, {f_ctx, straight}};
        break;
      case 5:
      case 6:
        net.tables[p] = {{t_ctx, straight}, {f_ctx, straight}};
        break;
      default:
        net.tables[p] = {{t_ctx, straight}, {f_ctx, flipped}};
        break;
    }
  }
  PreferenceModel model;
  model.kind = ModelKind::tcp;
  model.net = std::move(net);
  model.cardinality = 5;
  return model;
}

std::string engine_name(EngineVariant engine) {
  switch (engine) {
    case EngineVariant::subset_dfs:
      return "subset-dfs";
    case EngineVariant::subset_bfs:
      return "subset-bfs";
    case EngineVariant::bb_s:
      return "BB-S";
    case EngineVariant::bb_s_ng:
      return "BB-S+ng";
    case EngineVariant::bb_s_inc:
      return "BB-S+inc";
    default:
      return "BB-S+ng+inc";
  }
}

std::string BenchReport::to_tsv() const {
  std::ostringstream out;
  out << "instance\tengine\twall_ms\tvalue\tcsps\tprop_bt\titem_bt\tnodes"
      << "\tagrees\n";
  for (const BenchRow& row : rows) {
    out << row.instance << '\t' << row.engine << '\t';
    if (row.completed) {
      out << static_cast<long>(row.wall_ms + 0.5);
    } else {
      out << "—";
    }
    out << '\t' << row.value << '\t' << row.csps_solved << '\t'
        << row.property_backtracks << '\t' << row.item_backtracks << '\t'
        << row.nodes << '\t' << (row.matches_reference ? "yes" : "NO") << '\n';
  }
  return out.str();
}

BenchReport run_benchmark(const std::vector<BenchInstance>& instances,
                          const std::vector<EngineVariant>& engines,
                          const BenchSpec& spec) {
  BenchReport report;
  for (const BenchInstance& inst : instances) {
    bool have_reference = false;
    SearchResult reference;
    for (EngineVariant engine : engines) {
      SearchResult result;
      if (engine == EngineVariant::subset_dfs ||
          engine == EngineVariant::subset_bfs) {
        SubsetConfig cfg;
        cfg.strategy = engine == EngineVariant::subset_dfs
                           ? SubsetStrategy::dfs
                           : SubsetStrategy::bfs;
        cfg.node_budget = spec.subset_node_budget;
        cfg.wall_ms_budget = spec.timeout_ms;
        result = solve_subset_bnb(inst.catalog, inst.props, inst.model, cfg);
      } else {
        CspConfig cfg;
        cfg.mode = inst.model.kind == ModelKind::tcp ? CspMode::tcp
                                                     : CspMode::gai;
        cfg.nogoods = engine == EngineVariant::bb_s_ng ||
                      engine == EngineVariant::bb_s_ng_inc;
        bool incremental = engine == EngineVariant::bb_s_inc ||
                           engine == EngineVariant::bb_s_ng_inc;
        cfg.warm_start = incremental;
        cfg.sibling = incremental;
        cfg.wall_ms_budget = spec.timeout_ms;
        cfg.verify_witnesses = false;
        result = solve_csp_bnb(inst.catalog, inst.props, inst.model, cfg);
      }
      BenchRow row;
      row.instance = inst.name;
      row.engine = engine_name(engine);
      row.completed = result.proven_optimal;
      row.wall_ms = result.stats.wall_ms;
      row.value = result.value;
      row.csps_solved = result.stats.csps_solved;
      row.property_backtracks = result.stats.property_backtracks;
      row.item_backtracks = result.stats.item_backtracks;
      row.nodes = result.stats.nodes_generated;
      if (row.completed && !have_reference) {
        have_reference = true;
        reference = result;
      } else if (row.completed && have_reference) {
        row.matches_reference =
            inst.model.kind == ModelKind::tcp
                ? result.assignment == reference.assignment
                : std::abs(result.value - reference.value) <= kValueEps;
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace prefset
