#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "compbf/errors.hpp"

namespace compbf {

// One CCDF curve over a dB threshold grid. `kind` names the evaluation route:
// exact | series | bound-lower | bound-upper | approx-lower | approx-upper |
// empirical. `config` carries the generating parameters as ordered key/value
// pairs for the CSV header.
struct SirCcdfCurve {
  std::string kind;
  std::vector<double> gamma_db;
  std::vector<double> value;
  std::vector<std::pair<std::string, std::string>> config;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// Structural invariants: matching lengths, probabilities, nonincreasing in
// gamma (slack covers quadrature noise in analytic curves).
inline void validate_curve(const SirCcdfCurve& curve, double slack = 1e-9) {
  if (curve.gamma_db.size() != curve.value.size())
    throw InvariantError("curve grid/value length mismatch");
  for (std::size_t i = 0; i < curve.value.size(); ++i) {
    const double v = curve.value[i];
    if (!(v >= -slack) || !(v <= 1.0 + slack))
      throw InvariantError("curve value outside [0, 1]");
    if (i > 0) {
      if (!(curve.gamma_db[i] > curve.gamma_db[i - 1]))
        throw InvariantError("curve gamma grid must be strictly ascending");
      if (curve.value[i] > curve.value[i - 1] + slack)
        throw InvariantError("CCDF curve must be nonincreasing");
    }
  }
}

}  // namespace compbf
