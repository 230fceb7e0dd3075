#ifndef CARNOT_ALGEBRA_HPP
#define CARNOT_ALGEBRA_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "carnot/errors.hpp"

namespace carnot {

/// Initial momentum of a normal geodesic, split by layer.
struct Covector {
  Eigen::VectorXd xi;  ///< first-layer component, size v1_dim
  Eigen::VectorXd mu;  ///< second-layer component, size v2_dim
};

/// Point of the group in exponential coordinates, split by layer.
struct GroupPoint {
  Eigen::VectorXd x;  ///< first-layer coordinates
  Eigen::VectorXd u;  ///< second-layer coordinates
};

/// Element of the Lie algebra, split by layer.
struct AlgebraVector {
  Eigen::VectorXd v1;
  Eigen::VectorXd v2;
};

/// Skew-symmetric operator on the first layer. Construction rejects
/// matrices whose symmetric part exceeds 1e-12 relative to the largest entry.
class SkewMap {
 public:
  explicit SkewMap(Eigen::MatrixXd m);
  const Eigen::MatrixXd& matrix() const { return m_; }
  Eigen::VectorXd operator()(const Eigen::VectorXd& v) const { return m_ * v; }

 private:
  Eigen::MatrixXd m_;
};

/// One declared bracket [X_i, X_j] = sum_a coeffs[a] Y_a, indices 0-based, i < j.
struct BracketEntry {
  int i = 0;
  int j = 0;
  Eigen::VectorXd coeffs;
};

/// Step-two nilpotent Lie algebra presented by structure constants on an
/// orthonormal adapted basis. The structure tensor is held as one matrix per
/// second-layer direction: layer_map(a)(i,j) is the Y_a coefficient of [X_i, X_j].
///
/// Construction does not validate; `validate` reports problems so malformed
/// tensors can be inspected. Instances are immutable.
class StepTwoAlgebra {
 public:
  StepTwoAlgebra(int v1_dim, int v2_dim, std::vector<Eigen::MatrixXd> layer_maps,
                 std::string name = "", std::vector<std::vector<int>> v1_blocks = {});

  /// Builds the tensor from brackets given only for i < j; the i > j half is
  /// filled in by antisymmetry, so the result is exactly skew.
  static StepTwoAlgebra from_brackets(int v1_dim, int v2_dim,
                                      const std::vector<BracketEntry>& entries,
                                      std::string name = "",
                                      std::vector<std::vector<int>> v1_blocks = {});

  int v1_dim() const { return q1_; }
  int v2_dim() const { return q2_; }
  /// Topological dimension n = v1_dim + v2_dim.
  int dim() const { return q1_ + q2_; }
  /// Homogeneous dimension Q = v1_dim + 2 * v2_dim.
  int homogeneous_dim() const { return q1_ + 2 * q2_; }

  const std::string& name() const { return name_; }
  const Eigen::MatrixXd& layer_map(int a) const { return c_[a]; }

  /// Coordinate blocks of the first layer used to build sampling strata;
  /// empty means no declared structure (callers fall back to singletons).
  const std::vector<std::vector<int>>& v1_blocks() const { return blocks_; }

  /// Operator norm of the bracket V1 x V1 -> V2, the largest singular value
  /// of the flattened structure tensor. Cached at construction.
  double bracket_norm() const { return bracket_norm_; }

 private:
  int q1_;
  int q2_;
  std::vector<Eigen::MatrixXd> c_;
  std::string name_;
  std::vector<std::vector<int>> blocks_;
  double bracket_norm_;
};

/// [v, w] in second-layer coordinates.
Eigen::VectorXd bracket(const StepTwoAlgebra& alg, const Eigen::VectorXd& v,
                        const Eigen::VectorXd& w);

/// Skew operator on the first layer pairing a second-layer covector with the
/// bracket: <j_map(mu) v, w> = <mu, [v, w]>.
SkewMap j_map(const StepTwoAlgebra& alg, const Eigen::VectorXd& mu);

/// Same operator without the skewness-checking wrapper, for hot paths.
Eigen::MatrixXd j_map_matrix(const StepTwoAlgebra& alg, const Eigen::VectorXd& mu);

struct ValidationIssue {
  std::string kind;    ///< "skew" or "rank"
  int i = 0, j = 0, a = 0;  ///< offending indices, 1-based, for "skew"
  double value = 0.0;  ///< residual for "skew", achieved rank for "rank"
};

struct ValidationReport {
  bool ok = false;
  double skew_residual = 0.0;  ///< max |c(i,j,a) + c(j,i,a)| relative to max |c|
  int bracket_rank = 0;        ///< rank of the flattened i<j tensor, must equal v2_dim
  int n = 0;
  int q_hom = 0;
  std::vector<ValidationIssue> issues;
};

/// Checks skew-symmetry of the tensor and that brackets span the second layer
/// (rank of the v2_dim x (q1(q1-1)/2) flattened tensor, singular values against
/// 1e-12 relative). Reports all failures with witness indices.
ValidationReport validate(const StepTwoAlgebra& alg);

/// Adjoint action of the group element g on the algebra:
/// Ad_g(v1, v2) = (v1, v2 + [x, v1]) where x is the first layer of g.
AlgebraVector adjoint(const StepTwoAlgebra& alg, const GroupPoint& g,
                      const AlgebraVector& v);

/// Gram matrix of the second-layer metric that embeds the layer isometrically
/// into skew operators: entries of inverse(H*) with H*(a,b) = tr(J_a J_b^T).
/// Optional normalization; exponents never depend on it (they count
/// dimensions, not lengths). Throws internal_error if H* is singular, which
/// bracket generation rules out.
Eigen::MatrixXd hs_metric(const StepTwoAlgebra& alg);

/// Group product in exponential coordinates: a*b = a + b + [a,b]/2.
GroupPoint product(const StepTwoAlgebra& alg, const GroupPoint& a, const GroupPoint& b);

/// Group inverse, -g.
GroupPoint inverse(const GroupPoint& g);

/// Throws input_error if any coordinate is missing the declared dimension or
/// is not finite.
void require_covector(const StepTwoAlgebra& alg, const Covector& cov,
                      const char* where);

}  // namespace carnot

#endif
