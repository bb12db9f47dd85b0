#pragma once

#include "sticky/errors.hpp"
#include "sticky/expm.hpp"
#include "sticky/generator.hpp"
#include "sticky/grid.hpp"
#include "sticky/model.hpp"
#include "sticky/numerics.hpp"
#include "sticky/solve.hpp"

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace sticky {

struct ConvergenceOptions {
  /// Engine for both the studied grids and the benchmark.
  EngineOptions engine{Engine::Extrapolated, {6, 0.05}};
  /// Coarse grids of strongly drifting models have negative central
  /// difference rates; the study still measures them.
  bool allow_negative_rates = true;
  /// Points whose error is below this multiple of the benchmark's own
  /// error estimate are left out of the slope fit.
  double self_error_factor = 100.0;
};

struct ConvergenceRow {
  Index n = 0;
  double value = std::numeric_limits<double>::quiet_NaN();
  double error = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
  std::size_t negative_rate_rows = 0;
  bool in_fit = false;
  std::string note;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double benchmark = std::numeric_limits<double>::quiet_NaN();
  /// |u(n_ref) - u(n_ref / 2)| / 3, the benchmark's error at second order.
  double benchmark_self_error = std::numeric_limits<double>::quiet_NaN();
  Index n_ref = 0;
  Scheme benchmark_scheme = Scheme::Scheme2;
  std::string benchmark_engine;
  std::vector<std::string> warnings;
};

/// Grid with x as an exact node (uniform when x is l or already a node).
template <typename Scalar>
Grid<Scalar> grid_through(const DiffusionSpec<Scalar>& spec, Index n, Scalar x) {
  const Scalar l = spec.left_boundary(), r = spec.right_boundary();
  if (x == l) return build_uniform(l, r, n);
  return build_with_node(l, r, n, x);
}

/// Bond value u_n(T, x) with f == 1 on a grid of n interior points through x.
template <typename Scalar>
Scalar price_on_grid(const DiffusionSpec<Scalar>& spec, Scalar x, Scalar maturity, Scheme scheme, Index n,
                     const EngineOptions& engine, const GeneratorOptions& gen_opts, std::size_t* negative_rows = nullptr) {
  const auto grid = grid_through(spec, n, x);
  const auto gen = build_generator(spec, grid, scheme, gen_opts);
  if (negative_rows) *negative_rows = gen.negative_rate_rows.size();
  const Index ix = node_index(grid, x);
  return bond_prices(gen, maturity, engine).values[ix];
}

/// Error of u_n(T, x) against a fine Scheme 2 benchmark for each n, and the
/// least-squares slope of log error against log n. n_ref = 0 selects
/// 8 max(ns).
template <typename Scalar>
ConvergenceStudy run_price_convergence(const DiffusionSpec<Scalar>& spec, Scalar x, Scalar maturity, Scheme scheme,
                                       const std::vector<Index>& ns, Index n_ref = 0,
                                       const ConvergenceOptions& opts = {}) {
  if (ns.empty()) throw InvalidArgument("convergence study needs at least one grid size");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (!(ns[i] > ns[i - 1])) throw InvalidArgument("grid sizes must be strictly increasing");
  if (ns.front() < 2) throw InvalidArgument("grid sizes must be at least 2");
  if (!(maturity > Scalar(0))) throw InvalidArgument("maturity must be positive");
  if (n_ref == 0) n_ref = 8 * ns.back();
  if (n_ref < 4 * ns.back()) throw InvalidArgument("benchmark grid must have n_ref >= 4 max(n)");

  GeneratorOptions gen_opts;
  gen_opts.allow_negative_rates = opts.allow_negative_rates;

  ConvergenceStudy study;
  study.n_ref = n_ref;
  study.benchmark_scheme = Scheme::Scheme2;
  study.benchmark_engine = to_string(opts.engine.engine);
  study.benchmark = double(price_on_grid(spec, x, maturity, Scheme::Scheme2, n_ref, opts.engine, gen_opts));
  const double half = double(price_on_grid(spec, x, maturity, Scheme::Scheme2, n_ref / 2, opts.engine, gen_opts));
  study.benchmark_self_error = std::abs(study.benchmark - half) / 3.0;

  std::vector<double> fit_n, fit_err;
  for (Index n : ns) {
    ConvergenceRow row;
    row.n = n;
    const auto start = std::chrono::steady_clock::now();
    try {
      row.value = double(price_on_grid(spec, x, maturity, scheme, n, opts.engine, gen_opts, &row.negative_rate_rows));
      row.error = std::abs(row.value - study.benchmark);
    } catch (const NumericalError& e) {
      row.note = e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!std::isfinite(row.error)) {
      if (row.note.empty()) row.note = "non-finite value";
    } else if (row.error == 0.0) {
      row.note = "zero error (benchmark collision)";
      study.warnings.push_back("n = " + std::to_string(n) + ": zero error excluded from fit");
    } else if (row.error < opts.self_error_factor * study.benchmark_self_error) {
      row.note = "below benchmark noise floor";
    } else {
      row.in_fit = true;
      fit_n.push_back(double(n));
      fit_err.push_back(row.error);
    }
    if (row.negative_rate_rows > 0)
      study.warnings.push_back("n = " + std::to_string(n) + ": " + std::to_string(row.negative_rate_rows) +
                               " rows with negative rates");
    study.rows.push_back(std::move(row));
  }
  if (fit_n.size() >= 2) {
    const auto fit = fit_loglog(fit_n, fit_err);
    study.slope = fit.slope;
    study.intercept = fit.intercept;
  } else {
    study.warnings.push_back("fewer than two usable points; no slope fitted");
  }
  return study;
}

struct EngineTiming {
  Engine engine;
  Index n = 0;
  int stages = 0;
  double seconds = 0.0;
  double value = 0.0;
  double error = 0.0;
};

/// Mean wall time over `repetitions` runs of the bond value at x for each
/// (engine, n), with its error against `benchmark`.
template <typename Scalar>
std::vector<EngineTiming> time_engines(const DiffusionSpec<Scalar>& spec, Scalar x, Scalar maturity, Scheme scheme,
                                       const std::vector<Index>& ns, const std::vector<EngineOptions>& engines,
                                       double benchmark, int repetitions = 10) {
  if (repetitions < 1) throw InvalidArgument("repetitions must be at least 1");
  std::vector<EngineTiming> out;
  for (Index n : ns) {
    const auto grid = grid_through(spec, n, x);
    const auto gen = build_generator(spec, grid, scheme);
    const Index ix = node_index(grid, x);
    for (const auto& eng : engines) {
      EngineTiming row;
      row.engine = eng.engine;
      row.n = n;
      row.stages = eng.engine == Engine::Extrapolated ? eng.extrapolation.stages : 0;
      double total = 0.0;
      for (int rep = 0; rep < repetitions; ++rep) {
        const auto start = std::chrono::steady_clock::now();
        row.value = double(bond_prices(gen, maturity, eng).values[ix]);
        total += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
      row.seconds = total / repetitions;
      row.error = std::abs(row.value - benchmark);
      out.push_back(row);
    }
  }
  return out;
}

}  // namespace sticky
