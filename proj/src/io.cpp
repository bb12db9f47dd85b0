#include "sticky/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace sticky::io {

namespace {

std::string join_fields(const std::vector<std::string>& fields) {
  std::string out = "invalid configuration:";
  for (const auto& f : fields) out += "\n  " + f;
  return out;
}

bool read_number(const nlohmann::json& doc, const char* key, double& out, std::vector<std::string>& errors,
                 bool allow_inf = false) {
  if (!doc.contains(key)) {
    errors.push_back(std::string(key) + ": missing");
    return false;
  }
  const auto& v = doc.at(key);
  if (v.is_number()) {
    out = v.get<double>();
    if (!std::isfinite(out)) {
      errors.push_back(std::string(key) + ": must be finite");
      return false;
    }
    return true;
  }
  if (allow_inf && v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity")) {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  errors.push_back(std::string(key) + (allow_inf ? ": expected a number or \"inf\"" : ": expected a number"));
  return false;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> fields)
    : InvalidArgument(join_fields(fields)), fields_(std::move(fields)) {}

ModelConfig parse_model_config(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({std::string("document: ") + e.what()});
  }
  if (!doc.is_object()) throw ConfigError({"document: expected a JSON object"});

  std::vector<std::string> errors;
  ModelConfig cfg;
  auto& p = cfg.params;
  if (read_number(doc, "kappa", p.kappa, errors) && !(p.kappa > 0)) errors.push_back("kappa: must be positive");
  read_number(doc, "theta", p.theta, errors);
  if (read_number(doc, "sigma", p.sigma, errors) && !(p.sigma > 0)) errors.push_back("sigma: must be positive");
  if (read_number(doc, "rho", p.rho, errors, true) && !(p.rho >= 0)) errors.push_back("rho: must be nonnegative");
  read_number(doc, "x0", p.x0, errors);
  if (doc.contains("r")) {
    if (read_number(doc, "r", cfg.r, errors) && !(cfg.r > 0)) errors.push_back("r: must be positive");
  }
  for (const auto& [key, value] : doc.items()) {
    static const char* known[] = {"kappa", "theta", "sigma", "rho", "x0", "r"};
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) errors.push_back(key + ": unknown key");
  }
  if (errors.empty()) {
    if (!(cfg.r > p.theta)) errors.push_back("r: must exceed theta");
    if (!(p.x0 >= 0 && p.x0 < cfg.r)) errors.push_back("x0: must lie in [0, r)");
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

ModelConfig read_model_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"model: cannot open '" + path + "'"});
  std::stringstream buf;
  buf << in.rdbuf();
  auto cfg = parse_model_config(buf.str());
  cfg.source = path;
  return cfg;
}

ModelConfig resolve_model(const std::string& model) {
  if (model == "1" || model == "2" || model == "3") {
    ModelConfig cfg;
    cfg.params = sticky_ou_preset<double>(model[0] - '0');
    cfg.r = 1.0;
    cfg.source = "model " + model;
    return cfg;
  }
  return read_model_config(model);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_grid_csv(std::ostream& os, const Grid<double>& grid) {
  for (Index i = 0; i < grid.size(); ++i) os << format_double(grid.point(i)) << '\n';
}

void write_generator_csv(std::ostream& os, const GeneratorMatrix<double>& gen) {
  os << "row,col,rate\n";
  const Index m = gen.size();
  for (Index i = 0; i < m; ++i) {
    if (i > 0) os << i << ',' << i - 1 << ',' << format_double(gen.sub[i]) << '\n';
    os << i << ',' << i << ',' << format_double(gen.diag[i]) << '\n';
    if (i + 1 < m) os << i << ',' << i + 1 << ',' << format_double(gen.sup[i]) << '\n';
  }
  os << m - 1 << ',' << m << ',' << format_double(gen.upper_leak) << '\n';
}

void write_spectrum_csv(std::ostream& os, const SpectralDecomposition<double>& dec) {
  os << "k,lambda\n";
  for (Index k = 0; k < dec.size(); ++k) os << k + 1 << ',' << format_double(dec.eigenvalues[k]) << '\n';
}

void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve) {
  os << "T,price,yield\n";
  for (const auto& p : curve)
    os << format_double(p.maturity) << ',' << format_double(p.price) << ',' << format_double(p.yield) << '\n';
}

void write_convergence_csv(std::ostream& os, const ConvergenceStudy& study) {
  os << "n,value,error,seconds,in_fit\n";
  for (const auto& row : study.rows)
    os << row.n << ',' << format_double(row.value) << ',' << format_double(row.error) << ','
       << format_double(row.seconds) << ',' << (row.in_fit ? 1 : 0) << '\n';
}

void write_timing_csv(std::ostream& os, const std::vector<EngineTiming>& rows) {
  os << "engine,n,stages,seconds,value,error\n";
  for (const auto& r : rows)
    os << to_string(r.engine) << ',' << r.n << ',' << r.stages << ',' << format_double(r.seconds) << ','
       << format_double(r.value) << ',' << format_double(r.error) << '\n';
}

}  // namespace sticky::io
