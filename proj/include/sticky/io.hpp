#pragma once

#include "sticky/convergence.hpp"
#include "sticky/curve.hpp"
#include "sticky/errors.hpp"
#include "sticky/generator.hpp"
#include "sticky/grid.hpp"
#include "sticky/model.hpp"
#include "sticky/spectral.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace sticky::io {

/// Configuration failure; `fields()` lists every offending field.
class ConfigError : public InvalidArgument {
 public:
  explicit ConfigError(std::vector<std::string> fields);
  const std::vector<std::string>& fields() const noexcept { return fields_; }

 private:
  std::vector<std::string> fields_;
};

struct ModelConfig {
  StickyOUParams<double> params;
  double r = 1.0;
  std::string source;
};

/// JSON object with keys kappa, theta, sigma, rho, x0 and optional r
/// (default 1). rho may be the string "inf" for the reflecting limit.
ModelConfig parse_model_config(const std::string& json_text);
ModelConfig read_model_config(const std::string& path);

/// "1", "2", "3" for the presets, otherwise a path to a JSON config.
ModelConfig resolve_model(const std::string& model);

/// One point per line.
void write_grid_csv(std::ostream& os, const Grid<double>& grid);
/// row,col,rate for every stored nonzero, then the leak into x_{n+1}.
void write_generator_csv(std::ostream& os, const GeneratorMatrix<double>& gen);
/// k,lambda with k starting at 1.
void write_spectrum_csv(std::ostream& os, const SpectralDecomposition<double>& dec);
void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve);
void write_convergence_csv(std::ostream& os, const ConvergenceStudy& study);
void write_timing_csv(std::ostream& os, const std::vector<EngineTiming>& rows);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace sticky::io
