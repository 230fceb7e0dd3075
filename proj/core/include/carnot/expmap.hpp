#ifndef CARNOT_EXPMAP_HPP
#define CARNOT_EXPMAP_HPP

#include <Eigen/Dense>

#include "carnot/algebra.hpp"

namespace carnot {

/// Truncation control for the exponential-map series. Every truncation is
/// certified by an analytic factorial-decay tail bound; hitting max_terms
/// first raises convergence_error carrying the outstanding bound.
struct SeriesConfig {
  double tol = 1e-14;
  int max_terms = 256;
};

void require_series_config(const SeriesConfig& cfg);

/// Time-one normal exponential map. First layer through (exp(J) - I)/J
/// applied to xi, second layer as the convergent bracket series summed with
/// compensated accumulation in increasing order.
GroupPoint sexp(const StepTwoAlgebra& alg, const Covector& cov,
                const SeriesConfig& cfg = {});

/// k-th coefficient of the second-layer series of sexp; k = 0 gives zero.
Eigen::VectorXd u_series_term(const StepTwoAlgebra& alg, const Eigen::VectorXd& mu,
                              const Eigen::VectorXd& xi, int k);

/// Differential of sexp at cov, an n x n matrix in block order
/// (first layer, second layer) for both rows and columns. Series route.
Eigen::MatrixXd dsexp(const StepTwoAlgebra& alg, const Covector& cov,
                      const SeriesConfig& cfg = {});

/// Independent finite-difference route for the same differential: central
/// differences of sexp with stride h in every coordinate direction.
Eigen::MatrixXd dsexp_fd(const StepTwoAlgebra& alg, const Covector& cov,
                         const SeriesConfig& cfg = {}, double h = 1e-5);

/// det(dsexp). Exactly zero rows make this vanish when xi = 0.
double jacobian(const StepTwoAlgebra& alg, const Covector& cov,
                const SeriesConfig& cfg = {});

/// (xi, lambda * mu): rescales the second-layer momentum only.
Covector scale_second_layer(double lambda, const Covector& cov);

/// (lambda * xi, mu): rescales the first-layer momentum only; lambda must be
/// nonzero or the map fails to be invertible (input_error).
Covector scale_first_layer(double lambda, const Covector& cov);

/// (lambda * xi, lambda * mu).
Covector scale_covector(double lambda, const Covector& cov);

/// Anisotropic dilation (lambda * x, lambda^2 * u) of the group.
GroupPoint dilate(double lambda, const GroupPoint& p);

}  // namespace carnot

#endif
