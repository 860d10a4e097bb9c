#include <sstream>

#include "doctest.h"
#include "prefset/harness.hpp"
#include "prefset/io.hpp"
#include "test_util.hpp"

using namespace prefset;

namespace {

PropertySet reload_props(const PropertySet& props,
                         const AttributeSchema& schema) {
  std::istringstream in(properties_to_json(props, schema));
  return load_properties(in, schema);
}

PreferenceModel reload_model(const PreferenceModel& model,
                             const PropertySet& props, int catalog_size) {
  std::istringstream in(model_to_json(model, props));
  return load_model(in, props, catalog_size);
}

}  // namespace

TEST_CASE("catalog round trip") {
  Catalog catalog = testutil::senators_catalog();
  std::istringstream in(catalog_to_json(catalog));
  Catalog reloaded = load_catalog(in, CatalogFormat::json, nullptr);
  CHECK(reloaded.schema() == catalog.schema());
  REQUIRE(reloaded.size() == catalog.size());
  for (int i = 0; i < catalog.size(); ++i) {
    CHECK(reloaded.item(i).id == catalog.item(i).id);
    CHECK(reloaded.item(i).values == catalog.item(i).values);
  }
}

TEST_CASE("property round trip covers all kinds") {
  AttributeSchema schema = testutil::senators_schema();
  PropertySet props = testutil::senators_properties();
  SetProperty counter;
  counter.id = "picked";
  counter.kind = PropertyKind::counter;
  counter.phi = parse_formula("true", schema);
  props.props.push_back(counter);
  SetProperty compare;
  compare.id = "lead";
  compare.kind = PropertyKind::count_vs_count;
  compare.phi = parse_formula("Party = Republican", schema);
  compare.rel = Rel::gt;
  compare.psi = parse_formula("Party = Democrat", schema);
  props.props.push_back(compare);

  PropertySet reloaded = reload_props(props, schema);
  REQUIRE(reloaded.size() == props.size());
  Catalog catalog = testutil::senators_catalog();
  for (int p = 0; p < props.size(); ++p) {
    CHECK(reloaded.at(p).id == props.at(p).id);
    CHECK(reloaded.at(p).kind == props.at(p).kind);
    for (unsigned mask = 0; mask < 16; ++mask) {
      std::vector<int> subset;
      for (int i = 0; i < 4; ++i) {
        if (mask & (1u << i)) {
          subset.push_back(i);
        }
      }
      CHECK(eval_property(reloaded.at(p), catalog, subset) ==
            eval_property(props.at(p), catalog, subset));
    }
  }
}

TEST_CASE("ranking model round trip") {
  PropertySet props = testutil::senators_properties();
  PreferenceModel model = testutil::senators_tcp();
  PreferenceModel reloaded = reload_model(model, props, 4);
  CHECK(reloaded.kind == ModelKind::tcp);
  CHECK(reloaded.cardinality == model.cardinality);
  CHECK(reloaded.net.cp_arcs == model.net.cp_arcs);
  CHECK(reloaded.net.i_arcs == model.net.i_arcs);
  // Same conditional orders at every context.
  GAIFunction a = compile_tcpnet_to_gai(model.net, props, 4);
  GAIFunction b = compile_tcpnet_to_gai(reloaded.net, props, 4);
  for (unsigned mask = 0; mask < 8; ++mask) {
    PropertyAssignment assign(3);
    for (int p = 0; p < 3; ++p) {
      assign.values[p] = PropertyValue::of_bool((mask >> p) & 1);
    }
    CHECK(gai_value(a, assign) == doctest::Approx(gai_value(b, assign)));
  }
}

TEST_CASE("counter tables keep their direction shorthand") {
  AttributeSchema schema = testutil::senators_schema();
  SetProperty counter;
  counter.id = "picked";
  counter.kind = PropertyKind::counter;
  counter.phi = parse_formula("true", schema);
  PropertySet props;
  props.props = {counter};
  PreferenceModel model;
  model.kind = ModelKind::tcp;
  model.net.node_order = {0};
  model.net.tables[0] = {{{}, ValueOrderSpec::asc()}};
  PreferenceModel reloaded = reload_model(model, props, 4);
  CHECK(reloaded.net.tables[0][0].order.kind ==
        ValueOrderSpec::Kind::ascending);
  std::string text = model_to_json(model, props);
  CHECK(text.find("\"asc\"") != std::string::npos);
}

TEST_CASE("additive model round trip") {
  PropertySet props = testutil::senators_properties();
  PreferenceModel model = testutil::senators_gai();
  PreferenceModel reloaded = reload_model(model, props, 4);
  CHECK(reloaded.kind == ModelKind::gai);
  CHECK(reloaded.cardinality == model.cardinality);
  for (unsigned mask = 0; mask < 8; ++mask) {
    PropertyAssignment assign(3);
    for (int p = 0; p < 3; ++p) {
      assign.values[p] = PropertyValue::of_bool((mask >> p) & 1);
    }
    CHECK(gai_value(reloaded.gai, assign) ==
          doctest::Approx(gai_value(model.gai, assign)));
  }
}

TEST_CASE("loading rejects broken documents") {
  AttributeSchema schema = testutil::senators_schema();
  PropertySet props = testutil::senators_properties();
  auto load_p = [&](const std::string& text) {
    std::istringstream in(text);
    return load_properties(in, schema);
  };
  CHECK_THROWS_AS(load_p("not json"), LoadError);
  CHECK_THROWS_AS(load_p(R"({"nope": []})"), LoadError);
  CHECK_THROWS_AS(load_p(R"({"properties": [{"id": "p"}]})"), LoadError);
  CHECK_THROWS_AS(
      load_p(R"({"properties": [{"id": "p", "kind": "weird",
                 "phi": "true"}]})"),
      LoadError);
  CHECK_THROWS_AS(
      load_p(R"({"properties": [{"id": "p", "kind": "bound",
                 "phi": "Party = Green", "rel": ">=", "k": 1}]})"),
      LoadError);
  CHECK_THROWS_AS(
      load_p(R"({"properties": [
          {"id": "p", "kind": "bound", "phi": "true", "rel": ">=", "k": 1},
          {"id": "p", "kind": "bound", "phi": "true", "rel": ">=", "k": 1}
      ]})"),
      LoadError);

  auto load_m = [&](const std::string& text) {
    std::istringstream in(text);
    return load_model(in, props, 4);
  };
  CHECK_THROWS_AS(load_m(R"({"kind": "other"})"), LoadError);
  // Arc naming an unknown property.
  CHECK_THROWS_AS(load_m(R"({"kind": "ranking",
      "cp_arcs": [["p1", "zz"]], "tables": {}})"),
                  LoadError);
  // Missing tables altogether.
  CHECK_THROWS_AS(load_m(R"({"kind": "ranking"})"), LoadError);
  // Context for the wrong parent.
  CHECK_THROWS_AS(load_m(R"({"kind": "ranking",
      "cp_arcs": [["p1", "p2"]],
      "tables": {
        "p1": [{"order": [true, false]}],
        "p2": [{"context": {"p3": true}, "order": [true, false]},
               {"context": {"p3": false}, "order": [false, true]}],
        "p3": [{"order": [true, false]}]
      }})"),
                  LoadError);
  // Factor over an unknown property.
  CHECK_THROWS_AS(load_m(R"({"kind": "additive",
      "factors": [{"scope": ["zz"],
                   "table": [{"assign": [true], "value": 1}]}]})"),
                  LoadError);
}

TEST_CASE("result rendering names items and properties") {
  Catalog catalog = testutil::senators_catalog();
  PropertySet props = testutil::senators_properties();
  SearchResult result;
  result.feasible = true;
  result.proven_optimal = true;
  result.value = 11;
  result.subset = {0, 1, 3};
  result.assignment = testutil::bools({true, true, true});
  std::string text = result_to_json(result, catalog, props);
  CHECK(text.find("\"o1\"") != std::string::npos);
  CHECK(text.find("\"o4\"") != std::string::npos);
  CHECK(text.find("\"p3\": true") != std::string::npos);
  CHECK(text.find("\"proven_optimal\": true") != std::string::npos);
  CHECK(text.find("\"value\": 11") != std::string::npos);
}

TEST_CASE("generated instances survive the full round trip") {
  for (std::uint64_t seed : {5ull, 6ull, 7ull}) {
    RandomSpec spec;
    spec.tcp = seed % 2 == 1;
    spec.with_cardinality = true;
    BuiltInstance inst = gen_random(seed, spec);
    std::istringstream cat_in(catalog_to_json(inst.catalog));
    Catalog catalog = load_catalog(cat_in, CatalogFormat::json, nullptr);
    PropertySet props = reload_props(inst.props, catalog.schema());
    PreferenceModel model = reload_model(inst.model, props, catalog.size());
    // The reloaded triple answers exactly like the original.
    OracleResult a = inst.model.kind == ModelKind::tcp
                         ? brute_force_tcp(inst.catalog, inst.props,
                                           inst.model)
                         : brute_force_gai(inst.catalog, inst.props,
                                           inst.model);
    OracleResult b = model.kind == ModelKind::tcp
                         ? brute_force_tcp(catalog, props, model)
                         : brute_force_gai(catalog, props, model);
    REQUIRE(a.feasible == b.feasible);
    if (a.feasible) {
      CHECK(a.assignment == b.assignment);
      CHECK(a.subset == b.subset);
    }
  }
}
