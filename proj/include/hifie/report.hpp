#pragma once

#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hifie/config.hpp"
#include "hifie/errors.hpp"
#include "hifie/version.hpp"

namespace hifie {

/// One measured benchmark row. Column order is fixed:
/// scheme,N,eps,s_L,t_f,m_f,t_a,t_s,e_a,e_s,n_i,peak_mem
struct ReportRow {
  std::string scheme;
  long long n = 0;
  double eps = 0;
  long long s_l = 0;
  double t_f = 0;       // seconds
  long long m_f = 0;    // bytes
  double t_a = 0;
  double t_s = 0;
  std::optional<double> e_a;
  std::optional<double> e_s;
  std::optional<int> n_i;
  long long peak_mem = 0;  // bytes
};

namespace detail {

inline std::string num(double v) {
  std::ostringstream ss;
  ss << std::setprecision(12) << v;
  return ss.str();
}

}  // namespace detail

inline void emit_csv(std::ostream& os, const std::vector<ReportRow>& rows) {
  os << "scheme,N,eps,s_L,t_f,m_f,t_a,t_s,e_a,e_s,n_i,peak_mem\n";
  for (const auto& r : rows) {
    os << r.scheme << ',' << r.n << ',' << detail::num(r.eps) << ',' << r.s_l << ','
       << detail::num(r.t_f) << ',' << r.m_f << ',' << detail::num(r.t_a) << ','
       << detail::num(r.t_s) << ',';
    if (r.e_a) os << detail::num(*r.e_a);
    os << ',';
    if (r.e_s) os << detail::num(*r.e_s);
    os << ',';
    if (r.n_i) os << *r.n_i;
    os << ',' << r.peak_mem << '\n';
  }
}

inline nlohmann::json config_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["example"] = cfg.example;
  j["n"] = cfg.ns;
  j["eps"] = cfg.eps;
  j["scheme"] = cfg.schemes;
  j["oracle"] = cfg.oracle;
  j["seed"] = cfg.seed;
  j["skip"] = cfg.skip;
  j["format"] = cfg.format;
  j["threads"] = cfg.threads;
  j["kappa"] = cfg.kappa;
  j["leaf"] = cfg.target_leaf;
  j["gmres_tol"] = cfg.gmres_tol;
  j["gmres_maxit"] = cfg.gmres_maxit;
  j["dense_cap"] = cfg.dense_cap;
  if (cfg.example == "custom") {
    j["custom_kind"] = cfg.custom_kind;
    j["custom_a"] = cfg.custom_a;
    j["custom_b"] = cfg.custom_b;
    j["custom_c"] = cfg.custom_c;
  }
  return j;
}

inline void emit_json(std::ostream& os, const std::vector<ReportRow>& rows,
                      const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["library_version"] = HIFIE_VERSION_STRING;
  j["config"] = config_json(cfg);
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row;
    row["scheme"] = r.scheme;
    row["N"] = r.n;
    row["eps"] = r.eps;
    row["s_L"] = r.s_l;
    row["t_f"] = r.t_f;
    row["m_f"] = r.m_f;
    row["t_a"] = r.t_a;
    row["t_s"] = r.t_s;
    if (r.e_a) row["e_a"] = *r.e_a;
    if (r.e_s) row["e_s"] = *r.e_s;
    if (r.n_i) row["n_i"] = *r.n_i;
    row["peak_mem"] = r.peak_mem;
    j["rows"].push_back(row);
  }
  os << j.dump(2) << '\n';
}

/// Write rows in the requested format; rows must be nonempty.
inline void emit_report(std::ostream& os, const std::vector<ReportRow>& rows,
                        const std::string& format, const ExperimentConfig& cfg) {
  if (rows.empty()) throw IoError("emit_report: no rows");
  if (format == "csv")
    emit_csv(os, rows);
  else
    emit_json(os, rows, cfg);
  if (!os) throw IoError("emit_report: stream failure");
}

inline void emit_report_file(const std::string& path, const std::vector<ReportRow>& rows,
                             const std::string& format, const ExperimentConfig& cfg) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open output file: " + path);
  emit_report(os, rows, format, cfg);
}

}  // namespace hifie
