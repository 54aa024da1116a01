#include "prevsim/ols.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "prevsim/error.hpp"
#include "prevsim/special_functions.hpp"

namespace prevsim {

OlsFit ols(std::span<const double> y, const Matrix& x) {
  const auto n = static_cast<Eigen::Index>(x.rows());
  const auto p = static_cast<Eigen::Index>(x.cols());
  if (y.size() != x.rows()) throw Error(Errc::InvalidArgument, "OLS: y and x differ in rows");
  if (p == 0 || n <= p) throw Error(Errc::InsufficientData, "OLS needs more rows than columns");

  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      design(x.values().data(), n, p);
  const Eigen::Map<const Eigen::VectorXd> response(y.data(), n);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < p) throw Error(Errc::RankDeficient, "OLS design matrix is rank deficient");

  const Eigen::VectorXd beta = qr.solve(response);
  const Eigen::VectorXd residual = response - design * beta;
  OlsFit fit;
  fit.degrees_of_freedom = static_cast<std::size_t>(n - p);
  const auto dof = static_cast<double>(fit.degrees_of_freedom);
  fit.residual_variance = residual.squaredNorm() / dof;

  // (X'X)^-1 = P R^-1 R^-T P^T.
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd cov_perm = r_inv * r_inv.transpose();
  const auto& perm = qr.colsPermutation();
  const Eigen::MatrixXd cov = perm * cov_perm * perm.transpose();

  for (Eigen::Index j = 0; j < p; ++j) {
    const double b = beta(j);
    const double se = std::sqrt(fit.residual_variance * cov(j, j));
    double t = 0.0, pv = 1.0;
    if (se > 0.0) {
      t = b / se;
      pv = special::t_two_sided_p(t, dof);
    } else if (b != 0.0) {
      t = std::copysign(std::numeric_limits<double>::infinity(), b);
      pv = 0.0;
    }
    fit.coefficients.push_back(b);
    fit.standard_errors.push_back(se);
    fit.t_statistics.push_back(t);
    fit.p_values.push_back(pv);
  }
  return fit;
}

OlsFit ols_simple(std::span<const double> y, std::span<const double> x) {
  Matrix design(x.size(), 2);
  for (std::size_t i = 0; i < x.size(); ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = x[i];
  }
  return ols(y, design);
}

}  // namespace prevsim
