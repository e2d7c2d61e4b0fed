// pednav: simulate datasets, run the eight estimators, compare reports.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pednav/errors.hpp"
#include "pednav/pipeline.hpp"
#include "pednav/selftest.hpp"

namespace fs = std::filesystem;
using namespace pednav;

namespace {

enum Exit { kOk = 0, kUsage = 1, kEstimation = 2, kSelftest = 3 };

struct Options {
  std::string dataset;
  std::string method = "all";
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::vector<std::string> reports;
};

// Defaults, then the dataset's generating configuration, then the config file.
PipelineConfig resolve_config(const Options& o, const TrajectoryDataset* ds) {
  std::map<std::string, std::string> kv;
  if (ds) {
    const auto known = PipelineConfig{}.to_key_values();
    for (const auto& [k, v] : ds->metadata) {
      if (known.count(k)) kv[k] = v;
    }
  }
  if (!o.config.empty()) {
    for (const auto& [k, v] : read_key_values(o.config)) kv[k] = v;
  }
  PipelineConfig cfg = PipelineConfig::from_key_values(kv);
  if (o.seed != 0) cfg.sim.set_seed(o.seed);
  return cfg;
}

std::vector<Method> methods_of(const std::string& name) {
  if (name == "all" || name == "ALL") return {kAllMethods.begin(), kAllMethods.end()};
  return {parse_method(name)};
}

TrajectoryDataset dataset_for(const Options& o, PipelineConfig& cfg) {
  if (!o.dataset.empty()) {
    TrajectoryDataset ds = load_dataset(o.dataset);
    cfg = resolve_config(o, &ds);
    return ds;
  }
  if (o.seed == 0) throw CLI::ValidationError("--dataset", "either --dataset or --seed is required");
  cfg = resolve_config(o, nullptr);
  return simulate_dataset(cfg.sim);
}

void print_table(const std::vector<const ErrorReport*>& rows) {
  std::printf("%-18s %-5s %8s %8s %8s %8s %8s %8s %6s\n", "method", "foot", "mean", "rms", "max", "p90", "p95", "p99",
              "viol");
  for (const ErrorReport* r : rows) {
    for (int f = 0; f < 2; ++f) {
      const ErrorStats& s = r->stats[static_cast<std::size_t>(f)];
      std::printf("%-18s %-5s %8.4f %8.4f %8.4f %8.4f %8.4f %8.4f %6.3f\n", r->method.c_str(), f == 0 ? "right" : "left",
                  s.mean, s.rms, s.max, s.p90, s.p95, s.p99, r->violation_frac);
    }
  }
}

std::vector<ErrorReport> run_all(const TrajectoryDataset& ds, const std::vector<Method>& methods,
                                 const PipelineConfig& cfg, const fs::path& out) {
  std::vector<ErrorReport> reports;
  for (Method m : methods) {
    const MethodResult r = run_method(ds, m, cfg);
    write_method_outputs(out / to_string(m), r);
    std::fprintf(stderr, "%-18s right rms %.4f m, left rms %.4f m\n", to_string(m).c_str(), r.report.stats[0].rms,
                 r.report.stats[1].rms);
    reports.push_back(r.report);
  }
  return reports;
}

int cmd_simulate(const Options& o) {
  PipelineConfig cfg = resolve_config(o, nullptr);
  const TrajectoryDataset ds = simulate_dataset(cfg.sim);
  save_dataset(o.out, ds);
  std::fprintf(stderr, "wrote %zu samples, %zu fixes to %s\n", ds.samples(), ds.fixes.size(), o.out.c_str());
  return kOk;
}

int cmd_run(const Options& o) {
  PipelineConfig cfg;
  const TrajectoryDataset ds = dataset_for(o, cfg);
  const auto methods = methods_of(o.method);
  fs::create_directories(o.out);
  write_key_values(fs::path(o.out) / "config.txt", cfg.to_key_values());
  const auto reports = run_all(ds, methods, cfg, o.out);
  std::vector<const ErrorReport*> rows;
  for (const auto& r : reports) rows.push_back(&r);
  print_table(rows.size() > 1 ? rank(reports) : rows);
  return kOk;
}

int cmd_compare(const Options& o) {
  std::vector<ErrorReport> reports;
  if (!o.reports.empty()) {
    if (!o.dataset.empty()) throw CLI::ValidationError("compare", "give either report directories or --dataset");
    for (const auto& dir : o.reports) reports.push_back(read_method_report(dir));
  } else {
    PipelineConfig cfg;
    const TrajectoryDataset ds = dataset_for(o, cfg);
    fs::create_directories(o.out);
    write_key_values(fs::path(o.out) / "config.txt", cfg.to_key_values());
    reports = run_all(ds, methods_of(o.method), cfg, o.out);
  }
  if (reports.size() < 2) throw CLI::ValidationError("compare", "need at least two reports");
  write_comparison(o.out, reports);
  print_table(rank(reports));
  return kOk;
}

int cmd_selftest() {
  const SelftestReport r = run_selftest();
  for (const auto& c : r.checks) {
    std::printf("%s %s: %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
  }
  return r.passed() ? kOk : kSelftest;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual foot-mounted IMU navigation: constrained FGO versus constrained EKF"};
  app.require_subcommand(1);
  Options o;

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset directory");
  sim->add_option("--out", o.out, "Dataset directory to write")->required();
  sim->add_option("--seed", o.seed, "Master seed (>= 1)");
  sim->add_option("--config", o.config, "key=value configuration file")->check(CLI::ExistingFile);

  auto* run = app.add_subcommand("run", "Run one method (or all) on a dataset");
  run->add_option("--dataset", o.dataset, "Dataset directory")->check(CLI::ExistingDirectory);
  run->add_option("--seed", o.seed, "Simulate in memory with this seed instead of loading a dataset");
  run->add_option("--method", o.method, "Method name, e.g. FGO-ZUPT-POS-STEP, or 'all'");
  run->add_option("--config", o.config, "key=value configuration file")->check(CLI::ExistingFile);
  run->add_option("--out", o.out, "Output directory")->required();

  auto* cmp = app.add_subcommand("compare", "Rank reports and export CDFs");
  cmp->add_option("reports", o.reports, "Directories written by 'run'");
  cmp->add_option("--dataset", o.dataset, "Run every method on this dataset first")->check(CLI::ExistingDirectory);
  cmp->add_option("--seed", o.seed, "Simulate in memory with this seed instead of loading a dataset");
  cmp->add_option("--config", o.config, "key=value configuration file")->check(CLI::ExistingFile);
  cmp->add_option("--out", o.out, "Output directory")->required();

  auto* self = app.add_subcommand("selftest", "Quick numerical consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(o);
    if (run->parsed()) return cmd_run(o);
    if (cmp->parsed()) return cmd_compare(o);
    if (self->parsed()) return cmd_selftest();
  } catch (const EstimationError& e) {
    std::cerr << "estimation failed: " << e.what() << "\n";
    return kEstimation;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
