#include <fmt/format.h>

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "gisfa/config.hpp"
#include "gisfa/errors.hpp"
#include "gisfa/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gauge-invariant strong-field photodetachment spectra"};
  std::string config_path;
  int workers = 0;
  bool check_gauge = false;
  bool dump = false;
  bool resume = false;
  bool quiet = false;
  std::size_t m1_budget = 0;
  std::string figures;
  std::string output_dir;
  app.add_option("--config", config_path, "Run configuration file");
  app.add_option("--workers", workers, "Worker threads (overrides [run] workers)")->check(CLI::PositiveNumber);
  app.add_flag("--check-gauge", check_gauge, "Run the gauge-invariance audit and exit");
  app.add_option("--figures", figures, "Preset dataset (paper)")->check(CLI::IsMember({"paper"}));
  app.add_flag("--dump-tables", dump, "Write pulse, bound-state and momentum tables and exit");
  app.add_flag("--resume", resume, "Continue M1 sweeps from checkpoints in the output directory");
  app.add_option("--m1-budget", m1_budget, "Stop after this many M1 nodes, keeping checkpoints");
  app.add_option("--output", output_dir, "Output directory (overrides [output] directory)");
  app.add_flag("-q,--quiet", quiet, "No progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (config_path.empty() && figures.empty()) {
      throw gisfa::ConfigError("either --config or --figures paper is required");
    }
    gisfa::RunConfig config = config_path.empty() ? gisfa::RunConfig{} : gisfa::load_config(config_path);
    if (!figures.empty()) config = gisfa::paper_figures_config(config);
    if (workers > 0) config.workers = workers;
    if (!output_dir.empty()) config.output_dir = output_dir;

    if (dump) {
      for (const auto& f : gisfa::dump_tables(config)) std::cout << f.string() << "\n";
      return kExitOk;
    }
    if (check_gauge) {
      const gisfa::GaugeAuditReport report = gisfa::check_gauge(config, std::cout);
      return report.passed() ? kExitOk : kExitNumeric;
    }
    gisfa::RunOptions options;
    options.resume = resume;
    options.m1_budget = m1_budget;
    options.log = quiet ? nullptr : &std::clog;
    const gisfa::RunSummary summary = gisfa::run(config, options);
    if (!summary.complete) {
      std::cout << "incomplete: M1 budget exhausted, rerun with --resume (" << summary.summary_path.string() << ")\n";
      return kExitOk;
    }
    std::cout << "wrote " << summary.files.size() << " spectra and " << summary.summary_path.string() << "\n";
    return kExitOk;
  } catch (const gisfa::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
