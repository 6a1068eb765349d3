#pragma once

#include <chrono>
#include <string>
#include <vector>

#include <sys/resource.h>

#include "hifie/config.hpp"
#include "hifie/estimators.hpp"
#include "hifie/gmres.hpp"
#include "hifie/report.hpp"
#include "hifie/serialize.hpp"

namespace hifie {

namespace detail {

inline double wall_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

inline long long peak_rss_bytes() {
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  return (long long)ru.ru_maxrss * 1024;  // linux reports KiB
}

template <class S>
ReportRow run_one(const KernelProblem<S>& prob, const std::string& scheme_name_str,
                  const ExperimentConfig& cfg) {
  FactorOptions opt;
  opt.eps = cfg.eps;
  opt.seed = cfg.seed;
  opt.threads = cfg.threads;
  opt.skip = cfg.skip;
  opt.variant = scheme_name_str == "hifie_x" ? Variant::second_kind : Variant::standard;

  ReportRow row;
  row.scheme = scheme_name_str;
  row.n = prob.points.count;
  row.eps = cfg.eps;

  const double t0 = wall_seconds();
  Factorization<S> f = scheme_name_str == "rskelf" ? rsf_factor(prob, opt)
                                                   : hifie_factor(prob, opt);
  row.t_f = wall_seconds() - t0;
  row.s_l = f.terminal_count();
  row.m_f = (long long)serialized_size(f);

  RandomStream rng(cfg.seed ^ 0xbe0ef17ULL);
  const std::vector<S> x = rng.uniform_vector<S>(int(prob.points.count));
  {
    const double ta = wall_seconds();
    volatile double sink = vec_norm(f.apply(x));
    (void)sink;
    row.t_a = wall_seconds() - ta;
    const double ts = wall_seconds();
    sink = vec_norm(f.solve(x));
    row.t_s = wall_seconds() - ts;
  }

  if (cfg.oracle != "none") {
    const LinearOperator<S> op_a = oracle_operator(prob, cfg.oracle, cfg.dense_cap);
    row.e_a = estimate_forward_error(op_a, f, cfg.seed + 17).value;
    row.e_s = estimate_inverse_error(op_a, f, cfg.seed + 23).value;
    const std::vector<S> rhs = RandomStream(cfg.seed + 31).uniform_vector<S>(int(op_a.n));
    const auto res = gmres<S>(
        op_a, rhs, cfg.gmres_tol, cfg.gmres_maxit,
        [&f](const std::vector<S>& v) { return f.solve(v); });
    if (!res.converged)
      throw Error("gmres did not converge within " + std::to_string(cfg.gmres_maxit) +
                  " iterations (scheme " + scheme_name_str + ")");
    row.n_i = res.iterations;
  }
  row.peak_mem = peak_rss_bytes();
  return row;
}

inline GridSpec spec_for(const ExperimentConfig& cfg, int n, int dim) {
  return GridSpec::auto_depth(dim, n, cfg.target_leaf);
}

}  // namespace detail

/// Build, factor, and measure every (scheme, n) pair of the configuration;
/// rows come back scheme-major. Requires oracle mode != none for e_a/e_s/n_i.
inline std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<ReportRow> rows;
  for (const auto& scheme : cfg.schemes) {
    for (int n : cfg.ns) {
      if (cfg.example == "ex1" || cfg.example == "ex2") {
        const auto prob =
            laplace_volume_problem(detail::spec_for(cfg, n, 2), cfg.example == "ex1" ? 0.0 : 1.0);
        rows.push_back(detail::run_one(prob, scheme, cfg));
      } else if (cfg.example == "ex3") {
        const double kappa = cfg.kappa > 0 ? cfg.kappa : n / 32.0;
        const auto prob = lippmann_schwinger_problem(kappa, detail::spec_for(cfg, n, 2));
        rows.push_back(detail::run_one(prob, scheme, cfg));
      } else if (cfg.example == "ex5" || cfg.example == "ex6") {
        const auto prob =
            laplace_volume_problem(detail::spec_for(cfg, n, 3), cfg.example == "ex5" ? 0.0 : 1.0);
        rows.push_back(detail::run_one(prob, scheme, cfg));
      } else {  // custom: constant coefficients over a Laplace kernel
        const int dim = cfg.custom_kind == "laplace3d" ? 3 : 2;
        const KernelKind kind = dim == 3 ? KernelKind::laplace3d : KernelKind::laplace2d;
        const double ca = cfg.custom_a, cb = cfg.custom_b, cc = cfg.custom_c;
        const auto prob = make_kernel_problem<double>(
            kind, detail::spec_for(cfg, n, dim),
            [ca](const std::array<double, 3>&) { return ca; },
            [cb](const std::array<double, 3>&) { return cb; },
            [cc](const std::array<double, 3>&) { return cc; });
        rows.push_back(detail::run_one(prob, scheme, cfg));
      }
    }
  }
  return rows;
}

}  // namespace hifie
