#include "carnot/skew.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "carnot/errors.hpp"

namespace carnot {

namespace {

// Truncated Taylor series sum_k coeff(k) J^k. coeff(k+1)/coeff(k) must decay
// at least like 1/(k+1) so the factorial tail argument applies.
Eigen::MatrixXd taylor_series(const Eigen::MatrixXd& j,
                              const std::function<double(int)>& coeff) {
  const int n = static_cast<int>(j.rows());
  Eigen::MatrixXd acc = coeff(0) * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= 64; ++k) {
    power = power * j;
    const Eigen::MatrixXd term = coeff(k) * power;
    acc += term;
    if (term.norm() <= 1e-17 * std::max(1.0, acc.norm())) break;
  }
  return acc;
}

void require_skew(const Eigen::MatrixXd& j, const char* where) {
  if (j.rows() != j.cols())
    throw input_error(std::string(where) + ": not square");
  const double scale = j.size() == 0 ? 0.0 : j.cwiseAbs().maxCoeff();
  if ((j + j.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(scale, 1e-300))
    throw input_error(std::string(where) + ": input not skew-symmetric");
}

}  // namespace

Eigen::MatrixXd skew_matrix_function(const Eigen::MatrixXd& j,
                                     const std::function<double(double)>& a,
                                     const std::function<double(double)>& b) {
  require_skew(j, "skew_matrix_function");
  const int n = static_cast<int>(j.rows());
  const double scale = j.cwiseAbs().maxCoeff();

  Eigen::RealSchur<Eigen::MatrixXd> schur(j);
  const Eigen::MatrixXd& t = schur.matrixT();
  const Eigen::MatrixXd& u = schur.matrixU();

  // For skew input T is block diagonal with 2x2 rotation generators and zeros;
  // anything off those blocks is roundoff.
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, n);
  const double tiny = 1e-12 * std::max(scale, 1e-300);
  int i = 0;
  while (i < n) {
    if (i + 1 < n && std::abs(t(i + 1, i)) > tiny) {
      const double rate = 0.5 * (t(i + 1, i) - t(i, i + 1));
      const double av = a(rate);
      const double bv = b(rate);
      f(i, i) = av;
      f(i + 1, i + 1) = av;
      f(i, i + 1) = -bv;
      f(i + 1, i) = bv;
      i += 2;
    } else {
      f(i, i) = a(0.0);
      i += 1;
    }
  }
  return u * f * u.transpose();
}

Eigen::MatrixXd phi1(const Eigen::MatrixXd& j) {
  require_skew(j, "phi1");
  if (j.norm() <= 0.5) {
    // coeff(k) = 1/(k+1)!
    return taylor_series(j, [](int k) {
      double c = 1.0;
      for (int i = 2; i <= k + 1; ++i) c /= i;
      return c;
    });
  }
  return skew_matrix_function(
      j, [](double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; },
      [](double t) { return t == 0.0 ? 0.0 : (1.0 - std::cos(t)) / t; });
}

Eigen::MatrixXd skew_exp(const Eigen::MatrixXd& j) {
  require_skew(j, "skew_exp");
  if (j.norm() <= 0.5) {
    return taylor_series(j, [](int k) {
      double c = 1.0;
      for (int i = 2; i <= k; ++i) c /= i;
      return c;
    });
  }
  return skew_matrix_function(j, [](double t) { return std::cos(t); },
                              [](double t) { return std::sin(t); });
}

}  // namespace carnot
