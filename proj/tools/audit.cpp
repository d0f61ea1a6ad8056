// audit run --config cfg.json --out dir [--verbose]
//
// Exit status: 0 success, 1 config error, 2 runtime stage error.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "cfair/audit.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Counterfactual fairness audit for tabular predictors"};
  app.require_subcommand(1);
  auto* run = app.add_subcommand("run", "Run an audit described by a JSON config");
  std::string config_path;
  std::string out_dir;
  bool verbose = false;
  run->add_option("--config", config_path, "Audit config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--verbose", verbose, "Log progress to stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  cfair::AuditConfig cfg;
  try {
    cfg = cfair::load_config(config_path);
  } catch (const cfair::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  }

  cfair::AuditLog log;
  if (verbose) log = [](const std::string& m) { std::fprintf(stderr, "[audit] %s\n", m.c_str()); };

  try {
    const auto report = cfair::run_audit(cfg, log);
    const auto files = cfair::emit_report(report, out_dir);
    if (verbose)
      for (const auto& f : files) std::fprintf(stderr, "[audit] wrote %s\n", f.c_str());
  } catch (const cfair::StageError& e) {
    std::fprintf(stderr, "error in stage %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
