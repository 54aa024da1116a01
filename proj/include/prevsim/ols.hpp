#pragma once

#include <span>
#include <vector>

#include "prevsim/matrix.hpp"

namespace prevsim {

struct OlsFit {
  std::vector<double> coefficients;
  std::vector<double> standard_errors;
  std::vector<double> t_statistics;
  std::vector<double> p_values;
  double residual_variance = 0.0;
  std::size_t degrees_of_freedom = 0;
};

/// Least squares via column-pivoted QR. `x` carries its own intercept column.
/// Requires rows > cols and full column rank (Errc::RankDeficient otherwise).
/// A coefficient with zero standard error gets t = +-inf and p = 0, or t = 0
/// and p = 1 when the coefficient itself is 0.
OlsFit ols(std::span<const double> y, const Matrix& x);

/// Convenience: regress y on [1, x].
OlsFit ols_simple(std::span<const double> y, std::span<const double> x);

}  // namespace prevsim
