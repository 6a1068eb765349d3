#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hifie/errors.hpp"

namespace hifie {

/// Benchmark configuration. File format: one `key = value` per line, `#`
/// comments, lists comma-separated. CLI flags override file values.
struct ExperimentConfig {
  std::string example = "ex1";  // ex1|ex2|ex3|ex5|ex6|custom
  std::vector<int> ns = {32};
  double eps = 1e-6;
  std::vector<std::string> schemes = {"hifie"};  // rskelf|hifie|hifie_x
  std::string oracle = "none";                   // dense|fft|none
  std::uint64_t seed = 42;
  std::vector<int> skip;
  std::string out;            // empty = stdout
  std::string format = "csv";  // csv|json
  int threads = 1;
  double kappa = 0;  // ex3; 0 = n/32
  int target_leaf = 0;
  std::string custom_kind = "laplace2d";
  double custom_a = 1.0;
  double custom_b = 0.0;
  double custom_c = 0.0;
  double gmres_tol = 1e-12;
  int gmres_maxit = 200;
  long long dense_cap = 65536;

  void validate() const {
    if (eps <= 0) throw ConfigError("eps must be positive");
    if (ns.empty()) throw ConfigError("at least one n required");
    for (int n : ns)
      if (n <= 0) throw ConfigError("grid size must be positive");
    for (const auto& s : schemes)
      if (s != "rskelf" && s != "hifie" && s != "hifie_x")
        throw ConfigError("unknown scheme: " + s);
    if (oracle != "dense" && oracle != "fft" && oracle != "none")
      throw ConfigError("unknown oracle mode: " + oracle);
    if (format != "csv" && format != "json") throw ConfigError("unknown format: " + format);
    static const char* examples[] = {"ex1", "ex2", "ex3", "ex5", "ex6", "custom"};
    if (std::find_if(std::begin(examples), std::end(examples),
                     [&](const char* e) { return example == e; }) == std::end(examples))
      throw ConfigError("unknown example: " + example);
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace((unsigned char)s[a])) ++a;
  while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::vector<int> int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& v : split_list(s)) out.push_back(std::stoi(v));
  return out;
}

}  // namespace detail

/// Apply one key/value pair onto a config.
inline void config_set(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  try {
    if (key == "example") cfg.example = value;
    else if (key == "n") cfg.ns = detail::int_list(value);
    else if (key == "eps") cfg.eps = std::stod(value);
    else if (key == "scheme") cfg.schemes = detail::split_list(value);
    else if (key == "oracle") cfg.oracle = value;
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "skip") cfg.skip = detail::int_list(value);
    else if (key == "out") cfg.out = value;
    else if (key == "format") cfg.format = value;
    else if (key == "threads") cfg.threads = std::stoi(value);
    else if (key == "kappa") cfg.kappa = std::stod(value);
    else if (key == "leaf") cfg.target_leaf = std::stoi(value);
    else if (key == "custom_kind") cfg.custom_kind = value;
    else if (key == "custom_a") cfg.custom_a = std::stod(value);
    else if (key == "custom_b") cfg.custom_b = std::stod(value);
    else if (key == "custom_c") cfg.custom_c = std::stod(value);
    else if (key == "gmres_tol") cfg.gmres_tol = std::stod(value);
    else if (key == "gmres_maxit") cfg.gmres_maxit = std::stoi(value);
    else if (key == "dense_cap") cfg.dense_cap = std::stoll(value);
    else throw ConfigError("unknown config key: " + key);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("bad value for key '" + key + "': " + value);
  }
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    config_set(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return cfg;
}

}  // namespace hifie
