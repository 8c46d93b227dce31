#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "romnls/config.hpp"
#include "romnls/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Reduced-order models of wave-packet envelopes (NLS / MNLS)"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;
  int threads = 0;
  auto* run = app.add_subcommand("run", "Run one experiment config");
  run->add_option("--config", config_path, "Config file (or a bundled name such as fig3)")
      ->required();
  run->add_option("--set", overrides, "Override one key, KEY=VALUE (repeatable)");
  run->add_option("--output", output_dir, "Output directory (default: output.dir)");
  run->add_option("--threads", threads, "Worker threads for sweeps")->check(CLI::NonNegativeNumber);

  std::string directory = ROMNLS_CONFIG_DIR;
  auto* list = app.add_subcommand("list", "List bundled experiment configs");
  list->add_option("--dir", directory, "Config directory");

  CLI11_PARSE(app, argc, argv);

  if (*list) {
    const auto entries = romnls::list_experiments(directory);
    for (const auto& e : entries) {
      std::cout << e.name << "\t" << e.description << "\n\t" << e.path << "\n";
    }
    return entries.empty() ? 1 : 0;
  }

  try {
    std::string path = config_path;
    for (const auto& e : romnls::list_experiments(directory)) {
      if (e.name == config_path) path = e.path;
    }
    const romnls::ExperimentConfig cfg = romnls::load_config(path, overrides);
    const std::string out = output_dir.empty() ? cfg.output_dir : output_dir;
    const romnls::ExperimentResult result = romnls::run_experiment(cfg, threads);
    romnls::write_outputs(result, cfg, out);
    std::cout << result.summary;
    for (const auto& f : result.files) {
      if (f.name == "report.txt") std::cout << f.content;
    }
    for (const auto& e : result.events) std::cerr << "event: " << e << "\n";
    std::cout << "outputs written to " << out << "\n";
    return result.status;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
