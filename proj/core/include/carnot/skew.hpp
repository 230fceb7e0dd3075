#ifndef CARNOT_SKEW_HPP
#define CARNOT_SKEW_HPP

#include <Eigen/Dense>
#include <functional>

namespace carnot {

/// Evaluates a matrix function of a skew-symmetric J through its invariant
/// planes: on a plane where J acts as the rotation generator with rate t, the
/// function acts as a(t) * I + b(t) * R with R the unit generator, and on the
/// kernel as a(0). Requires a even and b odd so the value is independent of
/// the plane orientation. Uses the real Schur form, which is block diagonal
/// for skew input up to roundoff.
Eigen::MatrixXd skew_matrix_function(const Eigen::MatrixXd& j,
                                     const std::function<double(double)>& a,
                                     const std::function<double(double)>& b);

/// (exp(J) - I)/J, extended by 1 at 0. Taylor series below Frobenius norm
/// 0.5, plane decomposition with sin(t)/t and (1 - cos(t))/t above.
Eigen::MatrixXd phi1(const Eigen::MatrixXd& j);

/// exp(J) for skew J, same evaluation strategy as phi1.
Eigen::MatrixXd skew_exp(const Eigen::MatrixXd& j);

}  // namespace carnot

#endif
