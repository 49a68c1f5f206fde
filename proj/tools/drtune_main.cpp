// drtune: threshold tuning, false-alarm and reachability experiments.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "drtune/error.hpp"
#include "drtune/experiment.hpp"

namespace fs = std::filesystem;
using namespace drtune;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

struct Runner {
  ExperimentConfig cfg;
  fs::path out;
  bool quiet = false;

  void say(const std::string& s) const {
    if (!quiet) std::cout << s;
  }

  TuneTable tune() const {
    TuneTable t = run_tune(cfg);
    write_file(out / "thresholds.csv", t.to_csv());
    char buf[160];
    for (const auto& row : t.rows) {
      if (row.ok()) {
        std::snprintf(buf, sizeof buf, "  %-22s k=%d  alpha=%.6g  worst-case=%.6g\n", to_string(row.result.method).c_str(),
                      row.result.k, row.result.alpha, row.result.achieved_worst_case);
      } else {
        std::snprintf(buf, sizeof buf, "  %-22s k=%d  failed: ", to_string(row.result.method).c_str(), row.result.k);
        std::cerr << buf << row.error << "\n";
        continue;
      }
      say(buf);
    }
    return t;
  }

  void far(const TuneTable& t) const {
    const auto rows = run_far(cfg, t);
    write_file(out / "far.csv", far_csv(rows));
    char buf[160];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, "  alpha=%-10.6g rate=%.5f (se %.5f)\n", r.alpha, r.rate, r.std_error);
      say(buf);
    }
  }

  void attack(const TuneTable& t) const {
    const auto rows = run_attack(cfg, t);
    write_file(out / "attack.csv", attack_csv(rows));
    char buf[160];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, "  alpha=%-10.6g alarms=%ld / %ld\n", r.alpha, r.alarms, r.steps);
      say(buf);
    }
  }

  void reach(const TuneTable& t) const {
    const ReachTable rt = run_reach(cfg, t);
    for (const auto& r : rt.rows) {
      if (r.bound.boundary.front().point.size() == 2) write_file(out / reach_file_name(r.bound.alpha), r.bound.boundary_csv());
    }
    write_file(out / "areas.csv", rt.areas_csv());
    char buf[160];
    for (const auto& e : rt.report.entries) {
      std::snprintf(buf, sizeof buf, "  alpha=%-10.6g area=%.6g\n", e.alpha, e.area);
      say(buf);
    }
    say(std::string("  areas strictly decreasing: ") + (rt.report.areas_strictly_decreasing ? "yes" : "no") +
        ", nested: " + (rt.report.nested ? "yes" : "no") + "\n");
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributionally robust detector tuning from moments"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_flag("--quiet", quiet, "suppress the summary on stdout");

  auto* tune = app.add_subcommand("tune", "tune thresholds, write thresholds.csv");
  auto* far = app.add_subcommand("far", "empirical false-alarm rates, write far.csv");
  auto* reach = app.add_subcommand("reach", "reach-set bounds, write reach_<alpha>.csv and areas.csv");
  auto* all = app.add_subcommand("all", "tune, far, attack and reach");
  for (auto* sub : {tune, far, reach, all}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    Runner run;
    run.cfg = ExperimentConfig::from_file(config_path);
    if (out_dir) run.cfg.output_dir = *out_dir;
    if (seed) run.cfg.seed = *seed;
    run.quiet = quiet;
    run.out = run.cfg.output_dir;
    fs::create_directories(run.out);

    run.say("thresholds:\n");
    const TuneTable table = run.tune();
    if (far->parsed() || all->parsed()) {
      run.say("false-alarm rates:\n");
      run.far(table);
    }
    if (all->parsed()) {
      run.say("zero-alarm attack:\n");
      run.attack(table);
    }
    if (reach->parsed() || all->parsed()) {
      run.say("reach bounds:\n");
      run.reach(table);
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
