#include "prefset/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "prefset/formula.hpp"

namespace prefset {
namespace {

using nlohmann::json;

std::string quote(const std::string& s) { return "'" + s + "'"; }

json value_to_json(const PropertyValue& v) {
  return v.integral ? json(v.as_count()) : json(v.as_bool());
}

PropertyValue value_from_json(const json& js, const std::string& where) {
  if (js.is_boolean()) {
    return PropertyValue::of_bool(js.get<bool>());
  }
  if (js.is_number_integer()) {
    return PropertyValue::of_count(js.get<long>());
  }
  throw LoadError(where + ": expected a boolean or an integer");
}

Formula parse_or_rethrow(const std::string& text,
                         const AttributeSchema& schema,
                         const std::string& where) {
  try {
    return parse_formula(text, schema);
  } catch (const ParseError& e) {
    throw LoadError(where + ": " + e.what());
  }
}

json must_get(const json& js, const char* key, const std::string& where) {
  if (!js.contains(key)) {
    throw LoadError(where + ": missing " + quote(key));
  }
  return js[key];
}

}  // namespace

PropertySet load_properties(std::istream& in, const AttributeSchema& schema) {
  json js;
  try {
    in >> js;
  } catch (const json::exception& e) {
    throw LoadError(std::string("properties JSON: ") + e.what());
  }
  PropertySet props;
  for (const json& entry :
       must_get(js, "properties", "properties JSON")) {
    SetProperty p;
    p.id = must_get(entry, "id", "property").get<std::string>();
    const std::string where = "property " + quote(p.id);
    if (p.id.empty()) {
      throw LoadError("property with empty id");
    }
    for (const SetProperty& seen : props.props) {
      if (seen.id == p.id) {
        throw LoadError("duplicate property id " + quote(p.id));
      }
    }
    std::string kind = entry.value("kind", "bound");
    p.phi = parse_or_rethrow(must_get(entry, "phi", where).get<std::string>(),
                             schema, where);
    if (kind == "counter") {
      p.kind = PropertyKind::counter;
    } else if (kind == "compare") {
      p.kind = PropertyKind::count_vs_count;
      p.rel = rel_from_text(must_get(entry, "rel", where).get<std::string>());
      p.psi = parse_or_rethrow(
          must_get(entry, "psi", where).get<std::string>(), schema, where);
    } else if (kind == "bound") {
      p.kind = PropertyKind::count_vs_const;
      p.rel = rel_from_text(must_get(entry, "rel", where).get<std::string>());
      p.k = must_get(entry, "k", where).get<long>();
    } else {
      throw LoadError(where + ": unknown kind " + quote(kind));
    }
    props.props.push_back(std::move(p));
  }
  return props;
}

PropertySet load_properties_file(const std::string& path,
                                 const AttributeSchema& schema) {
  std::ifstream in(path);
  if (!in) {
    throw LoadError("cannot open " + quote(path));
  }
  return load_properties(in, schema);
}

namespace {

int prop_index(const PropertySet& props, const json& js,
               const std::string& where) {
  std::string id = js.get<std::string>();
  int at = props.index_of(id);
  if (at < 0) {
    throw LoadError(where + ": unknown property " + quote(id));
  }
  return at;
}

ValueOrderSpec order_from_json(const json& js, const std::string& where) {
  if (js.is_string()) {
    std::string text = js.get<std::string>();
    if (text == "asc") {
      return ValueOrderSpec::asc();
    }
    if (text == "desc") {
      return ValueOrderSpec::desc();
    }
    throw LoadError(where + ": order must be a list, 'asc' or 'desc'");
  }
  if (!js.is_array()) {
    throw LoadError(where + ": order must be a list, 'asc' or 'desc'");
  }
  std::vector<PropertyValue> values;
  for (const json& v : js) {
    values.push_back(value_from_json(v, where));
  }
  return ValueOrderSpec::of(std::move(values));
}

PreferenceModel load_ranking(const json& js, const PropertySet& props) {
  TCPNet net;
  for (int p = 0; p < props.size(); ++p) {
    net.node_order.push_back(p);
  }
  for (const json& arc : js.value("cp_arcs", json::array())) {
    net.cp_arcs.emplace_back(prop_index(props, arc.at(0), "cp arc"),
                             prop_index(props, arc.at(1), "cp arc"));
  }
  for (const json& arc : js.value("i_arcs", json::array())) {
    net.i_arcs.emplace_back(prop_index(props, arc.at(0), "importance arc"),
                            prop_index(props, arc.at(1), "importance arc"));
  }
  json tables = js.value("tables", json::object());
  for (const auto& [id, rows] : tables.items()) {
    int node = props.index_of(id);
    if (node < 0) {
      throw LoadError("table for unknown property " + quote(id));
    }
    const std::string where = "table for " + quote(id);
    std::vector<int> parents = net.cp_parents(node);
    std::vector<CpRow> table;
    for (const json& row : rows) {
      CpRow r;
      json context = row.value("context", json::object());
      if (context.size() != parents.size()) {
        throw LoadError(where + ": context names " +
                        std::to_string(context.size()) + " properties, " +
                        "the node has " + std::to_string(parents.size()) +
                        " conditioning parents");
      }
      for (int parent : parents) {
        const std::string& pid = props.at(parent).id;
        if (!context.contains(pid)) {
          throw LoadError(where + ": context is missing " + quote(pid));
        }
        r.context.push_back(value_from_json(context[pid], where));
      }
      r.order = order_from_json(must_get(row, "order", where), where);
      table.push_back(std::move(r));
    }
    net.tables[node] = std::move(table);
  }
  PreferenceModel model;
  model.kind = ModelKind::tcp;
  model.net = std::move(net);
  return model;
}

PreferenceModel load_additive(const json& js, const PropertySet& props) {
  GAIFunction gai;
  for (const json& entry : js.value("factors", json::array())) {
    GaiFactor factor;
    for (const json& id : must_get(entry, "scope", "factor")) {
      factor.scope.push_back(prop_index(props, id, "factor scope"));
    }
    for (const json& row : must_get(entry, "table", "factor")) {
      std::vector<PropertyValue> assign;
      for (const json& v : must_get(row, "assign", "factor row")) {
        assign.push_back(value_from_json(v, "factor row"));
      }
      factor.table.emplace_back(std::move(assign),
                                must_get(row, "value", "factor row")
                                    .get<double>());
    }
    gai.factors.push_back(std::move(factor));
  }
  PreferenceModel model;
  model.kind = ModelKind::gai;
  model.gai = std::move(gai);
  return model;
}

}  // namespace

PreferenceModel load_model(std::istream& in, const PropertySet& props,
                           int catalog_size) {
  json js;
  try {
    in >> js;
  } catch (const json::exception& e) {
    throw LoadError(std::string("model JSON: ") + e.what());
  }
  std::string kind = must_get(js, "kind", "model JSON").get<std::string>();
  PreferenceModel model;
  if (kind == "ranking") {
    model = load_ranking(js, props);
  } else if (kind == "additive") {
    model = load_additive(js, props);
  } else {
    throw LoadError("model JSON: unknown kind " + quote(kind));
  }
  if (js.contains("cardinality")) {
    model.cardinality = js["cardinality"].get<long>();
  }
  std::vector<std::string> problems =
      model.kind == ModelKind::tcp
          ? validate_tcpnet(model.net, props, catalog_size)
          : validate_gai(model.gai, props, catalog_size);
  if (!problems.empty()) {
    std::string joined;
    for (const std::string& p : problems) {
      if (!joined.empty()) {
        joined += "; ";
      }
      joined += p;
    }
    throw LoadError("model JSON: " + joined);
  }
  return model;
}

PreferenceModel load_model_file(const std::string& path,
                                const PropertySet& props, int catalog_size) {
  std::ifstream in(path);
  if (!in) {
    throw LoadError("cannot open " + quote(path));
  }
  return load_model(in, props, catalog_size);
}

std::string catalog_to_json(const Catalog& catalog) {
  const AttributeSchema& schema = catalog.schema();
  json attrs = json::array();
  for (int a = 0; a < schema.size(); ++a) {
    const AttributeDef& def = schema.at(a);
    json entry = {{"name", def.name}};
    if (def.kind == AttrKind::categorical) {
      entry["kind"] = "categorical";
      entry["domain"] = def.domain;
    } else {
      entry["kind"] = "integer";
      if (def.range) {
        entry["range"] = {def.range->first, def.range->second};
      }
    }
    attrs.push_back(std::move(entry));
  }
  json items = json::array();
  for (int i = 0; i < catalog.size(); ++i) {
    const Item& item = catalog.item(i);
    json values = json::object();
    for (int a = 0; a < schema.size(); ++a) {
      const AttributeDef& def = schema.at(a);
      if (def.kind == AttrKind::categorical) {
        values[def.name] = def.domain[item.values[a]];
      } else {
        values[def.name] = item.values[a];
      }
    }
    items.push_back({{"id", item.id}, {"values", std::move(values)}});
  }
  json js = {{"schema", {{"attributes", std::move(attrs)}}},
             {"items", std::move(items)}};
  return js.dump(2);
}

std::string properties_to_json(const PropertySet& props,
                               const AttributeSchema& schema) {
  json list = json::array();
  for (const SetProperty& p : props.props) {
    json entry = {{"id", p.id}, {"phi", print_formula(p.phi, schema)}};
    switch (p.kind) {
      case PropertyKind::counter:
        entry["kind"] = "counter";
        break;
      case PropertyKind::count_vs_count:
        entry["kind"] = "compare";
        entry["rel"] = rel_text(p.rel);
        entry["psi"] = print_formula(p.psi, schema);
        break;
      default:
        entry["kind"] = "bound";
        entry["rel"] = rel_text(p.rel);
        entry["k"] = p.k;
        break;
    }
    list.push_back(std::move(entry));
  }
  return json{{"properties", std::move(list)}}.dump(2);
}

std::string model_to_json(const PreferenceModel& model,
                          const PropertySet& props) {
  json js;
  if (model.kind == ModelKind::tcp) {
    js["kind"] = "ranking";
    json cp = json::array();
    for (const auto& arc : model.net.cp_arcs) {
      cp.push_back({props.at(arc.first).id, props.at(arc.second).id});
    }
    json imp = json::array();
    for (const auto& arc : model.net.i_arcs) {
      imp.push_back({props.at(arc.first).id, props.at(arc.second).id});
    }
    json tables = json::object();
    for (const auto& [node, rows] : model.net.tables) {
      std::vector<int> parents = model.net.cp_parents(node);
      json out_rows = json::array();
      for (const CpRow& row : rows) {
        json context = json::object();
        for (std::size_t i = 0; i < parents.size(); ++i) {
          context[props.at(parents[i]).id] = value_to_json(row.context[i]);
        }
        json order;
        switch (row.order.kind) {
          case ValueOrderSpec::Kind::ascending:
            order = "asc";
            break;
          case ValueOrderSpec::Kind::descending:
            order = "desc";
            break;
          default:
            order = json::array();
            for (const PropertyValue& v : row.order.list) {
              order.push_back(value_to_json(v));
            }
            break;
        }
        out_rows.push_back(
            {{"context", std::move(context)}, {"order", std::move(order)}});
      }
      tables[props.at(node).id] = std::move(out_rows);
    }
    js["cp_arcs"] = std::move(cp);
    js["i_arcs"] = std::move(imp);
    js["tables"] = std::move(tables);
  } else {
    js["kind"] = "additive";
    json factors = json::array();
    for (const GaiFactor& factor : model.gai.factors) {
      json scope = json::array();
      for (int p : factor.scope) {
        scope.push_back(props.at(p).id);
      }
      json table = json::array();
      for (const auto& [assign, value] : factor.table) {
        json row_assign = json::array();
        for (const PropertyValue& v : assign) {
          row_assign.push_back(value_to_json(v));
        }
        table.push_back(
            {{"assign", std::move(row_assign)}, {"value", value}});
      }
      factors.push_back(
          {{"scope", std::move(scope)}, {"table", std::move(table)}});
    }
    js["factors"] = std::move(factors);
  }
  if (model.cardinality) {
    js["cardinality"] = *model.cardinality;
  }
  return js.dump(2);
}

std::string result_to_json(const SearchResult& result, const Catalog& catalog,
                           const PropertySet& props) {
  json subset = json::array();
  for (int i : result.subset) {
    subset.push_back(catalog.item(i).id);
  }
  json assignment = json::object();
  for (int p = 0; p < props.size(); ++p) {
    const auto& v = result.assignment.values.size() >
                            static_cast<std::size_t>(p)
                        ? result.assignment.values[p]
                        : std::optional<PropertyValue>();
    assignment[props.at(p).id] = v ? value_to_json(*v) : json();
  }
  const SearchStats& s = result.stats;
  json stats = {{"nodes_generated", s.nodes_generated},
                {"nodes_expanded", s.nodes_expanded},
                {"nodes_until_opt", s.nodes_until_opt},
                {"csps_solved", s.csps_solved},
                {"property_backtracks", s.property_backtracks},
                {"item_backtracks", s.item_backtracks},
                {"sibling_hits", s.sibling_hits},
                {"nogoods_recorded", s.nogoods_recorded},
                {"nogood_hits", s.nogood_hits},
                {"fc_prunes", s.fc_prunes},
                {"can_must_prunes", s.can_must_prunes},
                {"monotonic_prunes", s.monotonic_prunes},
                {"wall_ms", s.wall_ms},
                {"timed_out", s.timed_out}};
  json js = {{"feasible", result.feasible},
             {"proven_optimal", result.proven_optimal},
             {"value", result.value},
             {"subset", std::move(subset)},
             {"assignment", std::move(assignment)},
             {"stats", std::move(stats)}};
  if (!result.diagnostic.empty()) {
    js["diagnostic"] = result.diagnostic;
  }
  return js.dump(2);
}

}  // namespace prefset
