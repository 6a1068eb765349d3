// Benchmark CLI: configure, run, and report factorization experiments.
//
// Usage examples:
//   hifie_bench --example ex1 --n 64 --eps 1e-6 --scheme hifie --oracle fft
//   hifie_bench --config bench.cfg --out results.csv
//
// Exit code 0 on success, nonzero on any error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hifie/hifie.hpp"

int main(int argc, char** argv) {
  CLI::App app{"kernel-matrix factorization benchmark"};

  std::string config_path, example, scheme, oracle, out, format, n_list, skip_list;
  std::string eps_str, kappa_str;
  std::string seed_str, threads_str, leaf_str;

  app.add_option("--config", config_path, "config file (key = value lines)");
  app.add_option("--example", example, "ex1|ex2|ex3|ex5|ex6|custom");
  app.add_option("--n", n_list, "grid size per axis (comma list)");
  app.add_option("--eps", eps_str, "ID relative precision");
  app.add_option("--scheme", scheme, "rskelf|hifie|hifie_x (comma list)");
  app.add_option("--oracle", oracle, "dense|fft|none");
  app.add_option("--seed", seed_str, "random seed");
  app.add_option("--skip", skip_list, "fractional levels to skip (comma list of ordinals)");
  app.add_option("--out", out, "output path (default: stdout; relative paths land in "
                               "$HIFIE_OUT_DIR when set)");
  app.add_option("--format", format, "csv|json");
  app.add_option("--threads", threads_str, "worker threads within a level");
  app.add_option("--kappa", kappa_str, "wavelengths for ex3 (default n/32)");
  app.add_option("--leaf", leaf_str, "target leaf occupancy (0 = default)");

  CLI11_PARSE(app, argc, argv);

  try {
    hifie::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = hifie::parse_config_file(config_path);
    auto setif = [&](const char* key, const std::string& v) {
      if (!v.empty()) hifie::config_set(cfg, key, v);
    };
    setif("example", example);
    setif("n", n_list);
    setif("eps", eps_str);
    setif("scheme", scheme);
    setif("oracle", oracle);
    setif("seed", seed_str);
    setif("skip", skip_list);
    setif("out", out);
    setif("format", format);
    setif("threads", threads_str);
    setif("kappa", kappa_str);
    setif("leaf", leaf_str);
    cfg.validate();

    const auto rows = hifie::run_experiment(cfg);

    if (cfg.out.empty()) {
      hifie::emit_report(std::cout, rows, cfg.format, cfg);
    } else {
      std::filesystem::path path(cfg.out);
      if (path.is_relative()) {
        if (const char* dir = std::getenv("HIFIE_OUT_DIR")) path = std::filesystem::path(dir) / path;
      }
      hifie::emit_report_file(path.string(), rows, cfg.format, cfg);
      std::cerr << "wrote " << rows.size() << " rows to " << path.string() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
