#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "prefset/csp_search.hpp"
#include "prefset/harness.hpp"
#include "prefset/io.hpp"
#include "prefset/subset_search.hpp"
#include "prefset/tractable.hpp"

namespace {

using namespace prefset;

constexpr int kExitInfeasible = 2;
constexpr int kExitUnproven = 3;

struct ProblemFiles {
  std::string catalog_path;
  std::string schema_path;
  std::string props_path;
  std::string model_path;
};

struct Problem {
  Catalog catalog;
  PropertySet props;
  PreferenceModel model;
};

Problem load_problem(const ProblemFiles& files) {
  Problem problem;
  if (!files.schema_path.empty()) {
    AttributeSchema schema = load_schema_file(files.schema_path);
    problem.catalog = load_catalog_file(files.catalog_path, &schema);
  } else {
    problem.catalog = load_catalog_file(files.catalog_path, nullptr);
  }
  problem.props =
      load_properties_file(files.props_path, problem.catalog.schema());
  problem.model = load_model_file(files.model_path, problem.props,
                                  problem.catalog.size());
  return problem;
}

void add_problem_options(CLI::App* cmd, ProblemFiles& files) {
  cmd->add_option("--catalog", files.catalog_path, "catalog JSON or CSV")
      ->required();
  cmd->add_option("--schema", files.schema_path,
                  "schema JSON, required for CSV catalogs");
  cmd->add_option("--props", files.props_path, "set-property JSON")
      ->required();
  cmd->add_option("--model", files.model_path, "preference model JSON")
      ->required();
}

std::string describe_value(const SetProperty& prop, const PropertyValue& v) {
  return prop.boolean() ? (v.as_bool() ? "true" : "false")
                        : std::to_string(v.as_count());
}

void print_human(const SearchResult& result, const Problem& problem) {
  if (!result.feasible) {
    std::cout << "infeasible";
    if (!result.diagnostic.empty()) {
      std::cout << ": " << result.diagnostic;
    }
    std::cout << "\n";
    return;
  }
  std::cout << "value " << result.value
            << (result.proven_optimal ? " (proven)" : " (best found)")
            << "\n";
  std::cout << "subset";
  for (int i : result.subset) {
    std::cout << " " << problem.catalog.item(i).id;
  }
  std::cout << "\n";
  for (int p = 0; p < problem.props.size(); ++p) {
    const auto& v = result.assignment.values[p];
    std::cout << "  " << problem.props.at(p).id << " = "
              << (v ? describe_value(problem.props.at(p), *v) : "?") << "\n";
  }
  const SearchStats& s = result.stats;
  std::cout << "stats: " << s.csps_solved << " subproblems, "
            << s.property_backtracks << " property backtracks, "
            << s.item_backtracks << " item backtracks, " << s.wall_ms
            << " ms\n";
  if (!result.diagnostic.empty()) {
    std::cout << "note: " << result.diagnostic << "\n";
  }
}

int finish(const SearchResult& result, const Problem& problem, bool as_json) {
  if (as_json) {
    std::cout << result_to_json(result, problem.catalog, problem.props)
              << "\n";
  } else {
    print_human(result, problem);
  }
  if (!result.feasible) {
    return kExitInfeasible;
  }
  if (!result.proven_optimal) {
    return kExitUnproven;
  }
  return 0;
}

Graph random_graph(std::uint64_t seed, int vertices, int edges) {
  std::mt19937_64 eng(seed);
  Graph graph;
  graph.num_vertices = vertices;
  std::set<std::pair<int, int>> seen;
  long cap = static_cast<long>(vertices) * (vertices - 1) / 2;
  int want = static_cast<int>(std::min<long>(edges, cap));
  while (static_cast<int>(seen.size()) < want) {
    int a = static_cast<int>(eng() % vertices);
    int b = static_cast<int>(eng() % vertices);
    if (a == b) {
      continue;
    }
    seen.insert({std::min(a, b), std::max(a, b)});
  }
  graph.edges.assign(seen.begin(), seen.end());
  return graph;
}

CnfFormula random_cnf(std::uint64_t seed, int vars, int clauses, int width) {
  std::mt19937_64 eng(seed);
  CnfFormula cnf;
  cnf.num_vars = vars;
  for (int c = 0; c < clauses; ++c) {
    std::vector<int> clause;
    std::set<int> used;
    while (static_cast<int>(clause.size()) < width) {
      int v = 1 + static_cast<int>(eng() % vars);
      if (!used.insert(v).second) {
        continue;
      }
      clause.push_back(eng() % 2 == 0 ? v : -v);
    }
    cnf.clauses.push_back(std::move(clause));
  }
  return cnf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal subset selection over attribute-described items"};
  app.require_subcommand(1);

  ProblemFiles solve_files;
  std::string engine = "auto";
  std::string strategy = "dfs";
  std::string mode;
  bool no_warm = false;
  bool no_sibling = false;
  bool no_nogoods = false;
  bool as_json = false;
  long node_budget = -1;
  double timeout_ms = -1;
  CLI::App* solve = app.add_subcommand("solve", "find the best subset");
  add_problem_options(solve, solve_files);
  solve->add_option("--engine", engine,
                    "auto, subset, csp, greedy or onevee");
  solve->add_option("--strategy", strategy, "subset engine: dfs or bfs");
  solve->add_option("--mode", mode,
                    "csp engine: tcp or gai (default from the model)");
  solve->add_flag("--no-warm-start", no_warm, "csp engine: solve cold");
  solve->add_flag("--no-sibling", no_sibling,
                  "csp engine: no sibling reuse");
  solve->add_flag("--no-nogoods", no_nogoods,
                  "csp engine: no influence records");
  solve->add_option("--node-budget", node_budget, "label/node budget");
  solve->add_option("--timeout", timeout_ms, "wall budget in ms");
  solve->add_flag("--json", as_json, "emit the result as JSON");

  ProblemFiles oracle_files;
  bool oracle_json = false;
  CLI::App* oracle =
      app.add_subcommand("oracle", "exhaustive reference answer");
  add_problem_options(oracle, oracle_files);
  oracle->add_flag("--json", oracle_json, "emit the result as JSON");

  std::string gen_kind = "random";
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int gen_items = 10;
  int gen_attrs = 3;
  int gen_props = 4;
  int gen_vertices = 6;
  int gen_edges = 8;
  int gen_vars = 6;
  int gen_clauses = 10;
  int gen_width = 3;
  std::string variant_name = "p14";
  bool gen_gai = false;
  bool gen_card = false;
  CLI::App* gen = app.add_subcommand("gen", "write a generated instance");
  gen->add_option("--kind", gen_kind,
                  "random, vertex-cover, ksat, max2sat, greedy, onevee, movie")
      ->required();
  gen->add_option("--out-dir", out_dir, "directory for the JSON files");
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--items", gen_items, "random/movie: catalog size");
  gen->add_option("--attrs", gen_attrs, "random: attribute count");
  gen->add_option("--num-props", gen_props, "random: property count");
  gen->add_flag("--additive", gen_gai, "random: additive model");
  gen->add_flag("--cardinality", gen_card, "random: add a size bound");
  gen->add_option("--vertices", gen_vertices, "vertex-cover: vertex count");
  gen->add_option("--edges", gen_edges, "vertex-cover: edge count");
  gen->add_option("--vars", gen_vars, "ksat/max2sat: variable count");
  gen->add_option("--clauses", gen_clauses, "ksat/max2sat: clause count");
  gen->add_option("--width", gen_width, "ksat: literals per clause");
  gen->add_option("--variant", variant_name,
                  "movie: p5, p9, p14, p14_soft or p14_tight");

  int bench_size = 3000;
  std::uint64_t bench_seed = 7;
  double bench_timeout = 60'000;
  bool bench_subset = false;
  std::string bench_out;
  CLI::App* bench =
      app.add_subcommand("bench", "film-selection engine comparison");
  bench->add_option("--size", bench_size, "catalog size");
  bench->add_option("--seed", bench_seed, "catalog seed");
  bench->add_option("--timeout", bench_timeout, "per run wall budget in ms");
  bench->add_flag("--with-subset", bench_subset,
                  "include the direct subset engines");
  bench->add_option("--out", bench_out, "TSV path (default stdout)");

  ProblemFiles class_files;
  CLI::App* explain =
      app.add_subcommand("explain-class", "report the instance class");
  add_problem_options(explain, class_files);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      Problem problem = load_problem(solve_files);
      std::string pick = engine;
      if (pick == "auto") {
        TractableClassProfile profile =
            check_class(problem.catalog, problem.props, problem.model);
        pick = profile.greedy_eligible    ? "greedy"
               : profile.two_sat_eligible ? "onevee"
                                          : "csp";
      }
      SearchResult result;
      if (pick == "greedy") {
        result =
            solve_atomic_greedy(problem.catalog, problem.props, problem.model);
      } else if (pick == "onevee") {
        result = solve_onevee(problem.catalog, problem.props, problem.model);
      } else if (pick == "subset") {
        SubsetConfig cfg;
        cfg.strategy =
            strategy == "bfs" ? SubsetStrategy::bfs : SubsetStrategy::dfs;
        if (node_budget >= 0) {
          cfg.node_budget = node_budget;
        }
        cfg.wall_ms_budget = timeout_ms;
        result =
            solve_subset_bnb(problem.catalog, problem.props, problem.model, cfg);
      } else if (pick == "csp") {
        CspConfig cfg;
        cfg.mode = mode.empty()
                       ? (problem.model.kind == ModelKind::tcp ? CspMode::tcp
                                                               : CspMode::gai)
                       : (mode == "tcp" ? CspMode::tcp : CspMode::gai);
        cfg.warm_start = !no_warm;
        cfg.sibling = !no_sibling;
        cfg.nogoods = !no_nogoods;
        cfg.node_budget = node_budget;
        cfg.wall_ms_budget = timeout_ms;
        result =
            solve_csp_bnb(problem.catalog, problem.props, problem.model, cfg);
      } else {
        std::cerr << "unknown engine '" << pick << "'\n";
        return 1;
      }
      return finish(result, problem, as_json);
    }

    if (oracle->parsed()) {
      Problem problem = load_problem(oracle_files);
      OracleResult answer =
          problem.model.kind == ModelKind::tcp
              ? brute_force_tcp(problem.catalog, problem.props, problem.model)
              : brute_force_gai(problem.catalog, problem.props, problem.model);
      SearchResult result;
      result.feasible = answer.feasible;
      result.proven_optimal = answer.feasible;
      result.value = answer.value;
      result.subset = answer.subset;
      result.assignment = answer.assignment;
      int code = finish(result, problem, oracle_json);
      if (!oracle_json) {
        std::cout << "optima: " << answer.optimal_count << "\n";
      }
      return code;
    }

    if (gen->parsed()) {
      BuiltInstance inst;
      if (gen_kind == "random") {
        RandomSpec spec;
        spec.num_items = gen_items;
        spec.num_attrs = gen_attrs;
        spec.num_props = gen_props;
        spec.tcp = !gen_gai;
        spec.with_cardinality = gen_card;
        inst = gen_random(seed, spec);
      } else if (gen_kind == "vertex-cover") {
        inst = gen_vertex_cover(random_graph(seed, gen_vertices, gen_edges));
      } else if (gen_kind == "ksat") {
        inst = gen_ksat(random_cnf(seed, gen_vars, gen_clauses, gen_width));
      } else if (gen_kind == "max2sat") {
        inst = gen_max2sat(random_cnf(seed, gen_vars, gen_clauses, 2));
      } else if (gen_kind == "greedy") {
        inst = gen_tractable_greedy(seed);
      } else if (gen_kind == "onevee") {
        inst = gen_tractable_onevee(seed);
      } else if (gen_kind == "movie") {
        MovieVariant variant = variant_name == "p5"        ? MovieVariant::p5
                               : variant_name == "p9"      ? MovieVariant::p9
                               : variant_name == "p14_soft"
                                   ? MovieVariant::p14_soft
                               : variant_name == "p14_tight"
                                   ? MovieVariant::p14_tight
                                   : MovieVariant::p14;
        inst.catalog = movie_catalog(gen_items, seed);
        inst.props = movie_properties(variant);
        inst.model = movie_model(variant);
      } else {
        std::cerr << "unknown kind '" << gen_kind << "'\n";
        return 1;
      }
      std::filesystem::create_directories(out_dir);
      auto emit = [&](const std::string& name, const std::string& text) {
        std::ofstream out(out_dir + "/" + name);
        out << text << "\n";
      };
      emit("catalog.json", catalog_to_json(inst.catalog));
      emit("props.json",
           properties_to_json(inst.props, inst.catalog.schema()));
      emit("model.json", model_to_json(inst.model, inst.props));
      std::cout << "wrote catalog.json, props.json, model.json to " << out_dir
                << "\n";
      return 0;
    }

    if (bench->parsed()) {
      std::vector<BenchInstance> instances;
      Catalog catalog = movie_catalog(bench_size, bench_seed);
      for (MovieVariant variant :
           {MovieVariant::p5, MovieVariant::p9, MovieVariant::p14,
            MovieVariant::p14_soft, MovieVariant::p14_tight}) {
        const char* names[] = {"p5", "p9", "p14", "p14_soft", "p14_tight"};
        BenchInstance inst;
        inst.name = std::string("movie_") +
                    names[static_cast<int>(variant)] + "_n" +
                    std::to_string(bench_size);
        inst.catalog = catalog;
        inst.props = movie_properties(variant);
        inst.model = movie_model(variant);
        instances.push_back(std::move(inst));
      }
      std::vector<EngineVariant> engines;
      if (bench_subset) {
        engines.push_back(EngineVariant::subset_dfs);
        engines.push_back(EngineVariant::subset_bfs);
      }
      engines.insert(engines.end(),
                     {EngineVariant::bb_s, EngineVariant::bb_s_ng,
                      EngineVariant::bb_s_inc, EngineVariant::bb_s_ng_inc});
      BenchSpec spec;
      spec.timeout_ms = bench_timeout;
      BenchReport report = run_benchmark(instances, engines, spec);
      if (bench_out.empty()) {
        std::cout << report.to_tsv();
      } else {
        std::ofstream out(bench_out);
        out << report.to_tsv();
        std::cout << "wrote " << bench_out << "\n";
      }
      return 0;
    }

    if (explain->parsed()) {
      Problem problem = load_problem(class_files);
      TractableClassProfile profile =
          check_class(problem.catalog, problem.props, problem.model);
      InstanceProfile sizes = profile.sizes;
      std::cout << "items " << sizes.n << ", attributes " << sizes.a
                << ", properties " << sizes.m << ", max shared items "
                << sizes.mu << "\n";
      std::cout << "counters: " << (profile.has_counter ? "yes" : "no")
                << ", negation: " << (profile.has_negation ? "yes" : "no")
                << ", equality atoms only: "
                << (profile.atoms_equality_only ? "yes" : "no")
                << ", size bound: "
                << (profile.has_cardinality ? "yes" : "no") << "\n";
      std::string pick = profile.greedy_eligible    ? "greedy"
                         : profile.two_sat_eligible ? "onevee"
                                                    : "csp";
      std::cout << "engine: " << pick << "\n";
      return 0;
    }
  } catch (const LoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
