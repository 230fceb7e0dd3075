#ifndef CARNOT_CATALOG_HPP
#define CARNOT_CATALOG_HPP

#include <string>

#include "carnot/algebra.hpp"
#include "carnot/exponents.hpp"

namespace carnot {

/// The three-dimensional group with one bracket [X_1, X_2] = Y.
StepTwoAlgebra heisenberg();

/// Free step-two algebra on k generators, k >= 2: [X_i, X_j] = Y_{ij} for
/// i < j, second-layer basis ordered (1,2), (1,3), ..., (k-1,k).
StepTwoAlgebra free_step_two(int k);

/// Star-graph group on k rays, k >= 1: [X_0, X_j] = Y_j. k = 1 coincides
/// with the Heisenberg tensor up to generator labels.
StepTwoAlgebra star_graph(int k);

/// Full-rank m x k pairing of coordinate planes: plane j contributes
/// [X_{2j-1}, X_{2j}] = sum_i A(i,j) Y_i. All second-layer operators commute.
struct PairingMatrix {
  Eigen::MatrixXd a;
  int rows() const { return static_cast<int>(a.rows()); }
  int cols() const { return static_cast<int>(a.cols()); }
};

/// Builds the algebra of a pairing matrix; rank must be m = rows <= cols.
StepTwoAlgebra pairing_group(const PairingMatrix& pairing);

/// sin(s)/s, continued by 1 at 0; degree-8 Taylor below |s| = 1e-2.
double sinc(double s);

/// (sin(s) - s cos(s))/s^3, continued by 1/3 at 0; degree-8 Taylor below
/// |s| = 1e-2. Strictly positive and decreasing on [0, pi].
double sinc3(double s);

/// Closed-form Jacobian of the exponential map on a pairing group:
///   4^{-m} sum_{|S|=m} det(A_S)^2 prod_{j not in S} sinc(v_j/2)^2
///          prod_{j in S} sinc3(v_j/2) sinc(v_j/2) (xi_{2j-1}^2 + xi_{2j}^2)
/// with v_j = mu . A_j. Independent of the series route through dsexp.
double closed_form_jacobian(const PairingMatrix& pairing, const Covector& cov);

/// |det(AB) - sum over m-subsets of det(A_S) det(B_S)| for A m x k, B k x m.
/// Exercises the same subset enumeration closed_form_jacobian sums over.
double cauchy_binet_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Injectivity-domain proxy for pairing groups: the momentum box
/// |mu . A_j| < 2 pi for every plane and closed_form_jacobian positive along
/// (xi, t * mu) for t on a uniform grid of (0, 1]. Sound for exclusion only.
bool in_domain_proxy(const PairingMatrix& pairing, const Covector& cov,
                     int grid = 32);

/// Exact exponents of the catalog families. family is one of "heisenberg",
/// "free", "star" (with k), "ga" (with pairing). The curvature exponent is
/// exact for heisenberg and pairing groups, a lower bound otherwise.
ExponentReport known_exponents(const std::string& family, int k = 0,
                               const PairingMatrix* pairing = nullptr);

}  // namespace carnot

#endif
