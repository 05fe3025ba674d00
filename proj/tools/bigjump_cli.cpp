// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. All functionality goes through the shared-library
// C API (bigjump.h); this binary only assembles the run config from flags
// and/or a config file, invokes the runner, and writes the outputs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bigjump/bigjump.h"

namespace {

using nlohmann::json;

json parse_kv_params(const std::string& spec) {
  // "alpha=2,beta=1.5" -> {"alpha":2.0,"beta":1.5}
  json out = json::object();
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--params", "expected k=v: " + item);
    out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
  }
  return out;
}

void apply_dotted(json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw CLI::ValidationError("--set", "expected key.path=value: " + assignment);
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);  // numbers, booleans, quoted strings, arrays
  } catch (...) {
    value = raw;  // bare string
  }
  json* node = &cfg;
  std::stringstream ss(path);
  std::string key, next;
  std::getline(ss, key, '.');
  while (std::getline(ss, next, '.')) {
    node = &(*node)[key];
    key = next;
  }
  (*node)[key] = value;
}

int fail_usage(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bigjump: tails of sums of conditionally independent heavy-tailed variables"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bigjump_version()));

  std::string config_path, csv_path, json_path;
  std::string law_name, law_params, model_name, model_params, h_expr, tau_spec, variant_spec;
  std::vector<std::string> sets;
  double x_start = 0, x_stop = 0, eps = 0.5, x0 = 100.0;
  int x_points = 0, n = 0, n_max = 10, example_id = 0, threads = -1;
  std::uint64_t seed = 0, replications = 0, budget = 0;
  std::string estimator;

  app.add_option("--config", config_path, "JSON config file; flags override its keys");
  app.add_option("--csv", csv_path, "write the CSV body here");
  app.add_option("--json", json_path, "write the full JSON report here");
  app.add_option("--seed", seed, "64-bit seed; fully determines stochastic output");
  app.add_option("--replications", replications, "Monte Carlo replications");
  app.add_option("--threads", threads, "worker cap (default: BIGJUMP_THREADS or hardware)");
  app.add_option("--x-start", x_start, "grid start");
  app.add_option("--x-stop", x_stop, "grid stop");
  app.add_option("--x-points", x_points, "grid points");
  app.add_option("--set", sets, "dotted-path config override, e.g. --set x_grid.stop=1e6")
      ->take_all();

  auto* dist = app.add_subcommand("dist", "evaluate a law's tail/hazard table");
  dist->add_option("--law", law_name, "law name");
  dist->add_option("--params", law_params, "law parameters k=v,k=v");

  auto* boundary = app.add_subcommand("boundary", "boundary generator and little-h probes");
  boundary->add_option("--law", law_name, "law name");
  boundary->add_option("--params", law_params, "law parameters k=v,k=v");
  boundary->add_option("--h-expr", h_expr, "candidate h, e.g. 'x^0.5', 'log(x)', 'x/3'");

  auto* check = app.add_subcommand("check", "dependence-condition checks for a model");
  check->add_option("--model", model_name, "model preset name");
  check->add_option("--params", model_params, "model parameters k=v,k=v");

  auto* simulate = app.add_subcommand("simulate", "sum-tail Monte Carlo");
  simulate->add_option("--model", model_name, "model preset name");
  simulate->add_option("--params", model_params, "model parameters k=v,k=v");
  simulate->add_option("--n", n, "number of summands");
  simulate->add_option("--tau", tau_spec, "random count, e.g. geometric:0.5, poisson:2, fixed:3");
  simulate->add_option("--estimator", estimator, "plain | cond_last_step");

  auto* decompose = app.add_subcommand("decompose", "two-summand exceedance decomposition");
  decompose->add_option("--model", model_name, "model preset name");
  decompose->add_option("--params", model_params, "model parameters k=v,k=v");

  auto* kesten = app.add_subcommand("kesten", "geometric-growth probe over n");
  kesten->add_option("--model", model_name, "model preset name");
  kesten->add_option("--params", model_params, "model parameters k=v,k=v");
  kesten->add_option("--eps", eps, "envelope epsilon");
  kesten->add_option("--n-max", n_max, "largest n");
  kesten->add_option("--x0", x0, "lower x cutoff");

  auto* examples = app.add_subcommand("examples", "run the worked examples end to end");
  examples->add_option("--id", example_id, "run a single example (1..6)");
  examples->add_option("--variant", variant_spec, "variant parameters k=v,k=v");
  examples->add_option("--budget", budget, "replications per example (>= 1e6)");

  // Global options (seed, grids, outputs) may appear after the subcommand.
  for (CLI::App* sub : {dist, boundary, check, simulate, decompose, kesten, examples})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the error message
    return code == 0 ? 0 : 1;     // contract: usage errors exit with 1
  }

  json cfg = json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) return fail_usage("cannot read config file: " + config_path);
    try {
      in >> cfg;
    } catch (const std::exception& e) {
      return fail_usage(std::string("config parse: ") + e.what());
    }
  }

  try {
    cfg["command"] = app.get_subcommands().front()->get_name();
    if (!law_name.empty()) cfg["law"] = {{"name", law_name}, {"params", parse_kv_params(law_params)}};
    if (!model_name.empty())
      cfg["model"] = {{"name", model_name}, {"params", parse_kv_params(model_params)}};
    if (!h_expr.empty()) cfg["h_expr"] = h_expr;
    if (seed != 0 || !cfg.contains("seed")) cfg["seed"] = seed == 0 ? 1 : seed;
    if (replications != 0) cfg["replications"] = replications;
    if (threads >= 0) cfg["threads"] = threads;
    if (x_start > 0) cfg["x_grid"]["start"] = x_start;
    if (x_stop > 0) cfg["x_grid"]["stop"] = x_stop;
    if (x_points > 0) cfg["x_grid"]["points"] = x_points;
    if (n > 0) cfg["n"] = n;
    if (!estimator.empty()) cfg["estimator"] = estimator;
    if (!tau_spec.empty()) {
      const auto colon = tau_spec.find(':');
      const std::string kind = tau_spec.substr(0, colon);
      const double param = colon == std::string::npos ? 0.0 : std::stod(tau_spec.substr(colon + 1));
      if (kind == "fixed")
        cfg["tau"] = {{"kind", "fixed"}, {"n", static_cast<int>(param)}};
      else if (kind == "geometric" || kind == "poisson")
        cfg["tau"] = {{"kind", kind}, {"param", param}};
      else
        return fail_usage("unknown tau kind: " + kind);
    }
    if (kesten->parsed()) {
      cfg["eps"] = eps;
      cfg["n_max"] = n_max;
      cfg["x0"] = x0;
    }
    if (example_id > 0) cfg["example_id"] = example_id;
    if (!variant_spec.empty()) cfg["variant"] = parse_kv_params(variant_spec);
    if (budget > 0) cfg["budget"] = budget;
    for (const auto& s : sets) apply_dotted(cfg, s);
  } catch (const std::exception& e) {
    return fail_usage(e.what());
  }

  char* report_cstr = nullptr;
  const bigjump_status st = bigjump_run(cfg.dump().c_str(), &report_cstr);
  if (st != BIGJUMP_OK) return fail_usage(std::string(bigjump_status_name(st)) + ": " + bigjump_last_error());

  json report;
  try {
    report = json::parse(report_cstr);
  } catch (const std::exception& e) {
    bigjump_free_string(report_cstr);
    return fail_usage(std::string("internal: report parse: ") + e.what());
  }
  bigjump_free_string(report_cstr);

  // Output paths from the config file are honored when flags are absent.
  if (csv_path.empty() && cfg.contains("output")) csv_path = cfg["output"].value("csv_path", "");
  if (json_path.empty() && cfg.contains("output")) json_path = cfg["output"].value("json_path", "");

  if (!csv_path.empty()) {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) return fail_usage("cannot write " + csv_path);
    out << report.value("csv", "");
  }
  if (!json_path.empty()) {
    std::ofstream out(json_path, std::ios::binary);
    if (!out) return fail_usage("cannot write " + json_path);
    out << report.dump(2) << "\n";
  }

  // Console summary.
  if (report.contains("error")) std::cerr << "error: " << report["error"].get<std::string>() << "\n";
  if (report.contains("examples")) {
    for (const auto& b : report["examples"]) {
      std::cout << "example " << b["example_id"] << ": conclusion=" << b["conclusion"].get<std::string>()
                << " expected=" << b["expected"].get<std::string>()
                << (b["match"].get<bool>()
                        ? " [match]"
                        : (b["unreliable"].get<bool>() ? " [UNRESOLVED at this budget]"
                                                       : " [MISMATCH]"));
      if (!b["failing_conditions"].empty()) {
        std::cout << " failing:";
        for (const auto& f : b["failing_conditions"]) std::cout << " " << f.get<std::string>();
      }
      std::cout << "\n";
    }
  } else if (report.contains("tables")) {
    for (const auto& t : report["tables"]) {
      const auto& rows = t["rows"];
      if (rows.empty()) continue;
      const auto& last = rows.back();
      std::cout << t["label"].get<std::string>() << " [" << t["estimator"].get<std::string>()
                << "]: x=" << last["x"].get<double>() << " estimate=" << last["estimate"].get<double>();
      if (last.contains("ratio") && last["ratio"].is_number())
        std::cout << " ratio=" << last["ratio"].get<double>();
      std::cout << "\n";
    }
  }
  for (const char* key : {"bound_ok", "overall", "single_big_jump", "slowly_varying"})
    if (report.contains(key) && report[key].is_boolean())
      std::cout << key << "=" << (report[key].get<bool>() ? "true" : "false") << "\n";

  return report.value("exit_code", 0);
}
