// Command-line front end: bond prices, yield curves, passage probabilities,
// convergence studies, Monte Carlo and engine timings for the sticky OU
// short-rate model.

#include "sticky/io.hpp"
#include "sticky/sticky.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace sticky;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string model = "1";
  Index n = 1000;
  int scheme = 2;
  std::string engine = "extrap";
  int stages = 2;
  double maturity = 1.0;
  std::string out;
  std::optional<double> rho;
  std::optional<double> x;
  bool allow_negative_rates = false;
};

struct Setup {
  io::ModelConfig model;
  DiffusionSpec<double> spec;
  double x;
  Scheme scheme;
  EngineOptions engine;
  GeneratorOptions gen_opts;
};

Setup make_setup(const Common& c) {
  std::vector<std::string> errors;
  if (c.n < 2) errors.push_back("n: must be at least 2");
  if (c.scheme != 1 && c.scheme != 2) errors.push_back("scheme: must be 1 or 2");
  if (c.stages < 1) errors.push_back("stages: must be at least 1");
  Engine engine = Engine::Extrapolated;
  try {
    engine = engine_from_string(c.engine);
  } catch (const InvalidArgument& e) {
    errors.push_back(std::string("engine: ") + e.what());
  }
  if (c.rho && !(*c.rho >= 0)) errors.push_back("rho: must be nonnegative");
  if (!errors.empty()) throw io::ConfigError(errors);

  auto model = io::resolve_model(c.model);
  if (c.rho) model.params.rho = *c.rho;
  const double x = c.x ? *c.x : model.params.x0;
  if (!(x >= 0 && x < model.r)) throw io::ConfigError({"x: must lie in [0, r)"});
  auto spec = sticky_ou_spec(model.params, model.r);

  EngineOptions opts;
  opts.engine = engine;
  opts.extrapolation.stages = c.stages;
  GeneratorOptions gen_opts;
  gen_opts.allow_negative_rates = c.allow_negative_rates;
  return {model, spec, x, scheme_from_int(c.scheme), opts, gen_opts};
}

json model_json(const io::ModelConfig& m) {
  json j;
  j["kappa"] = m.params.kappa;
  j["theta"] = m.params.theta;
  j["sigma"] = m.params.sigma;
  j["rho"] = std::isinf(m.params.rho) ? json("inf") : json(m.params.rho);
  j["x0"] = m.params.x0;
  j["r"] = m.r;
  return j;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw io::ConfigError({"out: cannot write '" + path + "'"});
  os << text;
}

std::vector<double> parse_double_list(const std::string& text, const char* field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw io::ConfigError({std::string(field) + ": '" + item + "' is not a number"});
    }
  }
  if (out.empty()) throw io::ConfigError({std::string(field) + ": empty list"});
  return out;
}

int cmd_price(const Common& c, const std::string& method, int steps_per_month, const std::string& grid_csv,
              const std::string& generator_csv) {
  if (!(c.maturity >= 0)) throw io::ConfigError({"maturity: must be nonnegative"});
  if (method != "ctmc" && method != "cn") throw io::ConfigError({"method: expected ctmc or cn"});
  const auto s = make_setup(c);
  const auto grid = grid_through(s.spec, c.n, s.x);
  const auto gen = build_generator(s.spec, grid, s.scheme, s.gen_opts);
  const Index ix = node_index(grid, s.x);
  if (!grid_csv.empty()) {
    std::ostringstream os;
    io::write_grid_csv(os, grid);
    write_file(grid_csv, os.str());
  }
  if (!generator_csv.empty()) {
    std::ostringstream os;
    io::write_generator_csv(os, gen);
    write_file(generator_csv, os.str());
  }

  double value;
  std::string engine_tag;
  if (method == "cn") {
    CNConfig cfg;
    cfg.steps_per_month = steps_per_month;
    cfg.validate();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(gen.size());
    value = c.maturity == 0 ? 1.0 : crank_nicolson_solve(gen, ones, c.maturity, cfg).values[ix];
    engine_tag = "cn";
  } else {
    value = bond_prices(gen, c.maturity, s.engine).values[ix];
    engine_tag = to_string(s.engine.engine);
  }
  json j;
  j["t"] = c.maturity;
  j["x"] = s.x;
  j["value"] = value;
  j["yield"] = c.maturity > 0 ? json(-std::log(value) / c.maturity) : json(nullptr);
  j["engine"] = engine_tag;
  if (method == "ctmc" && s.engine.engine == Engine::Extrapolated) j["stages"] = c.stages;
  if (method == "cn") j["steps_per_month"] = steps_per_month;
  j["scheme"] = c.scheme;
  j["n"] = c.n;
  j["negative_rate_rows"] = gen.negative_rate_rows.size();
  j["model"] = model_json(s.model);
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_curve(const Common& c, const std::string& maturities_text) {
  const auto s = make_setup(c);
  const auto maturities =
      maturities_text.empty() ? maturity_ladder(0.25, 30.0) : parse_double_list(maturities_text, "maturities");
  for (double t : maturities)
    if (!(t > 0)) throw io::ConfigError({"maturities: must be positive"});
  const auto grid = grid_through(s.spec, c.n, s.x);
  const auto gen = build_generator(s.spec, grid, s.scheme, s.gen_opts);
  const auto curve = yield_curve(gen, node_index(grid, s.x), maturities, s.engine);
  const auto shape = classify_shape(curve);
  if (!c.out.empty()) {
    std::ostringstream os;
    io::write_curve_csv(os, curve);
    write_file(c.out, os.str());
  }
  json j;
  j["shape"] = to_string(shape);
  j["x"] = s.x;
  j["n"] = c.n;
  j["scheme"] = c.scheme;
  j["engine"] = to_string(s.engine.engine);
  j["maturities"] = curve.size();
  j["yield_first"] = curve.front().yield;
  j["yield_last"] = curve.back().yield;
  j["negative_rate_rows"] = gen.negative_rate_rows.size();
  j["model"] = model_json(s.model);
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_passage(const Common& c, double level, bool place_level) {
  if (!(c.maturity >= 0)) throw io::ConfigError({"maturity: must be nonnegative"});
  const auto s = make_setup(c);
  if (!(level > s.x && level < s.model.r)) throw io::ConfigError({"level: must lie in (x, r)"});
  std::vector<double> nodes{level};
  if (s.x > 0) nodes.push_back(s.x);
  const auto grid = place_level ? build_with_nodes(0.0, s.model.r, c.n, nodes) : build_uniform(0.0, s.model.r, c.n);
  const double p = first_passage_survival(s.spec, grid, level, c.maturity, s.x, s.scheme, s.engine, s.gen_opts);
  json j;
  j["t"] = c.maturity;
  j["x"] = s.x;
  j["level"] = level;
  j["survival"] = p;
  j["engine"] = to_string(s.engine.engine);
  j["scheme"] = c.scheme;
  j["n"] = c.n;
  j["model"] = model_json(s.model);
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_converge(const Common& c, const std::string& ns_text, Index n_ref, int bench_stages, double basic_step) {
  if (!(c.maturity > 0)) throw io::ConfigError({"maturity: must be positive"});
  const auto s = make_setup(c);
  std::vector<Index> ns;
  for (double v : parse_double_list(ns_text, "ns")) {
    if (v != std::floor(v) || v < 2) throw io::ConfigError({"ns: entries must be integers >= 2"});
    ns.push_back(Index(v));
  }
  ConvergenceOptions opts;
  opts.engine.extrapolation.stages = bench_stages;
  opts.engine.extrapolation.max_basic_step = basic_step;
  opts.engine.extrapolation.validate();
  const auto study = run_price_convergence(s.spec, s.x, c.maturity, s.scheme, ns, n_ref, opts);
  if (!c.out.empty()) {
    std::ostringstream os;
    io::write_convergence_csv(os, study);
    write_file(c.out, os.str());
  }
  json j;
  j["t"] = c.maturity;
  j["x"] = s.x;
  j["scheme"] = c.scheme;
  j["slope"] = std::isfinite(study.slope) ? json(study.slope) : json(nullptr);
  j["benchmark"] = study.benchmark;
  j["benchmark_self_error"] = study.benchmark_self_error;
  j["n_ref"] = study.n_ref;
  j["benchmark_engine"] = study.benchmark_engine;
  j["benchmark_stages"] = bench_stages;
  j["basic_step"] = basic_step;
  json rows = json::array();
  for (const auto& r : study.rows) {
    json row;
    row["n"] = r.n;
    row["value"] = std::isfinite(r.value) ? json(r.value) : json(nullptr);
    row["error"] = std::isfinite(r.error) ? json(r.error) : json(nullptr);
    row["in_fit"] = r.in_fit;
    row["negative_rate_rows"] = r.negative_rate_rows;
    if (!r.note.empty()) row["note"] = r.note;
    rows.push_back(row);
  }
  j["rows"] = rows;
  j["warnings"] = study.warnings;
  j["model"] = model_json(s.model);
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_simulate(const Common& c, long long paths, std::uint64_t seed, const std::string& sampler, double dt,
                 double level) {
  if (!(c.maturity > 0)) throw io::ConfigError({"maturity: must be positive"});
  if (paths < 2) throw io::ConfigError({"paths: must be at least 2"});
  if (sampler != "ctmc" && sampler != "euler") throw io::ConfigError({"sampler: expected ctmc or euler"});
  if (!(dt > 0)) throw io::ConfigError({"dt: must be positive"});
  if (!(level > 0 && level < 1)) throw io::ConfigError({"level: must lie in (0, 1)"});
  const auto s = make_setup(c);
  const RandomStream rng(seed);
  const auto unit = [](double) { return 1.0; };
  MCEstimate est;
  if (sampler == "ctmc") {
    const auto grid = grid_through(s.spec, c.n, s.x);
    const auto gen = build_generator(s.spec, grid, s.scheme, s.gen_opts);
    const Index ix = node_index(grid, s.x);
    const double horizon = c.maturity;
    est = mc_estimate([&](RandomStream& r) { return sample_ctmc_path(gen, ix, horizon, r); }, unit, paths, level, rng);
  } else {
    const double horizon = c.maturity;
    const double x0 = s.x;
    est = mc_estimate([&](RandomStream& r) { return sample_euler_path(s.spec, x0, horizon, r, dt); }, unit, paths,
                      level, rng);
  }
  json j;
  j["mean"] = est.mean;
  j["stderr"] = est.std_error;
  j["ci_lo"] = est.lo;
  j["ci_hi"] = est.hi;
  j["level"] = est.level;
  j["paths"] = est.paths;
  j["seed"] = seed;
  j["sampler"] = sampler;
  j["t"] = c.maturity;
  j["x"] = s.x;
  if (sampler == "ctmc") {
    j["n"] = c.n;
    j["scheme"] = c.scheme;
  } else {
    j["dt"] = dt;
  }
  j["model"] = model_json(s.model);
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_bench(const Common& c, const std::string& ns_text, const std::string& engines_text, int repetitions) {
  if (!(c.maturity > 0)) throw io::ConfigError({"maturity: must be positive"});
  if (repetitions < 1) throw io::ConfigError({"repetitions: must be at least 1"});
  const auto s = make_setup(c);
  std::vector<Index> ns;
  for (double v : parse_double_list(ns_text, "ns")) {
    if (v != std::floor(v) || v < 2) throw io::ConfigError({"ns: entries must be integers >= 2"});
    ns.push_back(Index(v));
  }
  std::vector<EngineOptions> engines;
  std::stringstream ss(engines_text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    EngineOptions e = s.engine;
    try {
      e.engine = engine_from_string(item);
    } catch (const InvalidArgument& err) {
      throw io::ConfigError({std::string("engines: ") + err.what()});
    }
    engines.push_back(e);
  }
  ConvergenceOptions bench;
  const Index n_ref = 8 * *std::max_element(ns.begin(), ns.end());
  const double benchmark =
      price_on_grid(s.spec, s.x, c.maturity, Scheme::Scheme2, n_ref, bench.engine, GeneratorOptions{true});
  const auto rows = time_engines(s.spec, s.x, c.maturity, s.scheme, ns, engines, benchmark, repetitions);
  if (!c.out.empty()) {
    std::ostringstream os;
    io::write_timing_csv(os, rows);
    write_file(c.out, os.str());
  }
  json j;
  j["t"] = c.maturity;
  j["x"] = s.x;
  j["benchmark"] = benchmark;
  j["n_ref"] = n_ref;
  j["repetitions"] = repetitions;
  json out = json::array();
  for (const auto& r : rows) {
    json row;
    row["engine"] = to_string(r.engine);
    row["n"] = r.n;
    row["value"] = r.value;
    row["error"] = r.error;
    out.push_back(row);
  }
  j["rows"] = out;
  j["model"] = model_json(s.model);
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_spectrum(const Common& c) {
  const auto s = make_setup(c);
  const auto grid = build_uniform(0.0, s.model.r, c.n);
  const auto gen = build_generator(s.spec, grid, s.scheme, s.gen_opts);
  const auto meas = build_measure(gen);
  const auto dec = decompose(gen, meas);
  if (!c.out.empty()) {
    std::ostringstream os;
    io::write_spectrum_csv(os, dec);
    write_file(c.out, os.str());
  }
  json j;
  j["n"] = c.n;
  j["scheme"] = c.scheme;
  j["lambda_1"] = dec.eigenvalues[0];
  j["lambda_max"] = dec.eigenvalues[dec.size() - 1];
  j["orthonormality_residual"] = orthonormality_residual(dec, meas);
  j["model"] = model_json(s.model);
  std::cout << j.dump(2) << '\n';
  return 0;
}

void print_error(const char* kind, const std::string& message, const std::vector<std::string>& fields = {}) {
  json j;
  j["error"] = kind;
  j["message"] = message;
  if (!fields.empty()) j["fields"] = fields;
  std::cerr << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CTMC approximation of sticky-boundary diffusions"};
  app.require_subcommand(1);
  app.fallthrough();

  Common c;
  double rho = 0, x = 0;
  app.add_option("--model", c.model, "1, 2, 3 or a JSON config path")->capture_default_str();
  app.add_option("--n", c.n, "Interior grid points")->capture_default_str();
  app.add_option("--scheme", c.scheme, "Boundary scheme 1 or 2")->capture_default_str();
  app.add_option("--engine", c.engine, "dense, spectral or extrap")->capture_default_str();
  app.add_option("--stages", c.stages, "Extrapolation stages")->capture_default_str();
  app.add_option("-T,--maturity", c.maturity, "Maturity in years")->capture_default_str();
  app.add_option("--out", c.out, "CSV output path");
  auto* rho_opt = app.add_option("--rho", rho, "Override the stickiness (inf for reflecting)");
  auto* x_opt = app.add_option("--x", x, "Evaluation state (default x0)");
  app.add_flag("--allow-negative-rates", c.allow_negative_rates,
               "Keep going when coarse grids give negative rates");

  auto* price = app.add_subcommand("price", "Zero-coupon bond price at x");
  std::string method = "ctmc";
  int steps_per_month = 5;
  std::string grid_csv, generator_csv;
  price->add_option("--method", method, "ctmc or cn")->capture_default_str();
  price->add_option("--steps-per-month", steps_per_month, "Crank-Nicolson steps per month")->capture_default_str();
  price->add_option("--grid-csv", grid_csv, "Write the grid points here");
  price->add_option("--generator-csv", generator_csv, "Write the generator as row,col,rate here");

  auto* curve = app.add_subcommand("curve", "Yield curve and its shape");
  std::string maturities;
  curve->add_option("--maturities", maturities, "Comma-separated maturities (default 0.25..30)");

  auto* passage = app.add_subcommand("passage", "Probability of staying below a level");
  double level = 0;
  bool place_level = false;
  passage->add_option("--level", level, "Passage level z")->required();
  passage->add_flag("--place-level", place_level, "Build the grid with z (and x) as nodes");

  auto* converge = app.add_subcommand("converge", "Error against a fine-grid benchmark");
  std::string conv_ns = "100,200,400,800,1600";
  Index n_ref = 0;
  int bench_stages = 6;
  double basic_step = 0.05;
  converge->add_option("--ns", conv_ns, "Grid sizes")->capture_default_str();
  converge->add_option("--n-ref", n_ref, "Benchmark grid size (default 8 max n)");
  converge->add_option("--bench-stages", bench_stages, "Extrapolation stages of all runs")->capture_default_str();
  converge->add_option("--basic-step", basic_step, "Largest basic step H")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo bond price");
  long long paths = 1000;
  std::uint64_t seed = 1;
  std::string sampler = "ctmc";
  double dt = 1.0 / 600.0;
  double conf = 0.99;
  simulate->add_option("--paths", paths)->capture_default_str();
  simulate->add_option("--seed", seed)->capture_default_str();
  simulate->add_option("--sampler", sampler, "ctmc or euler")->capture_default_str();
  simulate->add_option("--dt", dt, "Euler time step")->capture_default_str();
  simulate->add_option("--level", conf, "Confidence level")->capture_default_str();

  auto* bench = app.add_subcommand("bench-expm", "Timing of the matrix exponential engines");
  std::string bench_ns = "100,200,400";
  std::string engines = "dense,spectral,extrap";
  int repetitions = 10;
  bench->add_option("--ns", bench_ns)->capture_default_str();
  bench->add_option("--engines", engines)->capture_default_str();
  bench->add_option("--repetitions", repetitions)->capture_default_str();

  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of -G on a uniform grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("config", e.what());
    return kExitConfig;
  }
  if (*rho_opt) c.rho = rho;
  if (*x_opt) c.x = x;

  try {
    if (*price) return cmd_price(c, method, steps_per_month, grid_csv, generator_csv);
    if (*curve) return cmd_curve(c, maturities);
    if (*passage) return cmd_passage(c, level, place_level);
    if (*converge) return cmd_converge(c, conv_ns, n_ref, bench_stages, basic_step);
    if (*simulate) return cmd_simulate(c, paths, seed, sampler, dt, conf);
    if (*bench) return cmd_bench(c, bench_ns, engines, repetitions);
    if (*spectrum) return cmd_spectrum(c);
  } catch (const io::ConfigError& e) {
    print_error("config", e.what(), e.fields());
    return kExitConfig;
  } catch (const OffGridError& e) {
    print_error("off-grid", e.what());
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    print_error("config", e.what());
    return kExitConfig;
  } catch (const NumericalError& e) {
    print_error("numerical", e.what());
    return kExitNumerical;
  }
  return kExitConfig;
}
