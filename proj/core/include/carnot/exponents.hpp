#ifndef CARNOT_EXPONENTS_HPP
#define CARNOT_EXPONENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "carnot/algebra.hpp"

namespace carnot {

/// Vanishing order of the exponential-map Jacobian along the second-layer
/// scaling curve. Dedicated infinite state; arithmetic on the infinite case
/// is impossible by construction (value() throws).
class JacOrder {
 public:
  static JacOrder finite(int v) { return JacOrder(v); }
  static JacOrder infinite() { return JacOrder(); }

  bool is_finite() const { return value_.has_value(); }
  int value() const {
    if (!value_) throw internal_error("JacOrder: value() on the infinite order");
    return *value_;
  }

  friend bool operator==(const JacOrder& a, const JacOrder& b) {
    return a.value_ == b.value_;
  }
  /// Infinite compares above every finite order.
  friend bool operator<(const JacOrder& a, const JacOrder& b) {
    if (!a.value_) return false;
    if (!b.value_) return true;
    return *a.value_ < *b.value_;
  }

 private:
  JacOrder() = default;
  explicit JacOrder(int v) : value_(v) {}
  std::optional<int> value_;
};

/// Flag structure of a covector: the chain of momentum Krylov subspaces of
/// the first layer and the induced orthogonal splitting of the second layer.
struct Filtration {
  /// dim of the Krylov chain {0} = U^0 c U^1 c ..., recorded through the
  /// first repeated value; grows by at most 1 per step and stays put after
  /// the first repeat.
  std::vector<int> krylov_dims;
  /// dim W_l for l = 0 .. stabilization-1; the W_l are the orthogonal
  /// complements along the shrinking annihilator chain, and together with
  /// W_inf they split the second layer.
  std::vector<int> w_dims;
  int w_inf_dim = 0;  ///< dim of the stable annihilator
  /// Largest l with W_l nontrivial; empty when every finite W_l is zero.
  std::optional<int> depth;
  /// 2 * sum_l l * dim W_l, infinite when the stable annihilator is nonzero.
  JacOrder order = JacOrder::finite(0);
  std::vector<Eigen::MatrixXd> w_bases;  ///< orthonormal columns per W_l
  Eigen::MatrixXd w_inf_basis;           ///< orthonormal columns of W_inf
  /// Smallest ratio (singular value / threshold) among accepted values and
  /// largest among rejected ones land here; a value within a factor 10 of 1
  /// marks the rank decisions as borderline.
  double rank_margin = 0.0;
  bool borderline = false;
};

/// Computes the filtration by Gram-Schmidt/SVD rank decisions on the Krylov
/// vectors J^i xi with threshold rank_tol relative to the largest singular
/// value.
Filtration filtration(const StepTwoAlgebra& alg, const Covector& cov,
                      double rank_tol = 1e-10);

/// Vanishing order of the Jacobian at cov, read off the filtration.
JacOrder vanishing_order(const StepTwoAlgebra& alg, const Covector& cov,
                         double rank_tol = 1e-10);

/// Leading factor of the differential along the second-layer scaling, an
/// n x n matrix over the basis (first layer, W_0, ..., W_d). Only defined
/// when the stable annihilator vanishes; throws degenerate_covector_error
/// otherwise. Its determinant is the leading coefficient of the Jacobian.
struct ScalingLimit {
  Eigen::MatrixXd matrix;
  double det = 0.0;
};
ScalingLimit scaling_limit_matrix(const StepTwoAlgebra& alg, const Covector& cov,
                                  double rank_tol = 1e-10);

/// Hilbert-weighted Gram matrix of the mixed bracket maps over the splitting
/// W_0 + ... + W_d, block (r, s) scaled by 1/(r+s+3). Symmetric positive
/// definite whenever the stable annihilator vanishes.
struct HilbertGram {
  Eigen::MatrixXd matrix;
  double min_eigenvalue = 0.0;
};
HilbertGram hilbert_gram(const StepTwoAlgebra& alg, const Covector& cov,
                         double rank_tol = 1e-10);

/// Zero-pattern mask: listed coordinates are pinned to zero (or shrunk, for
/// the violation search) before Gaussian fill.
struct StratumMask {
  std::vector<int> zero_xi;
  std::vector<int> zero_mu;
};

/// Default strata: every zero-pattern over the declared first-layer blocks
/// (singletons when the algebra declares none and the layer is small), plus
/// full support. Block counts above 12 fall back to single-block patterns.
std::vector<StratumMask> default_strata(const StepTwoAlgebra& alg);

/// Sampled scaling exponents of a group. All entries are integers by the
/// rigidity of the order; min_order is exact with overwhelming probability
/// (the minimizing stratum has full measure), max_finite_order is a lower
/// bound for the sup over finite orders.
struct ExponentReport {
  int n = 0;
  int q_hom = 0;
  int min_order = 0;
  int max_finite_order = 0;
  int geodesic_dim = 0;          ///< 2Q - n + min_order
  int curvature_exp_lower = 0;   ///< 2Q - n + max_finite_order
  bool curvature_exp_exact = false;
  Covector witness_min;          ///< attains min_order
  Covector witness_max;          ///< attains max_finite_order
  long sample_count = 0;
  std::uint64_t seed = 0;
  std::string provenance;        ///< "sampled(...)" or "closed-form"
};

/// Estimates the group exponents by sampling Gaussian covectors plus the
/// strata patterns. Deterministic: each sample index owns an independent
/// substream of `seed`, so the result is identical for any worker count.
/// Throws input_error when every sample comes out infinite.
ExponentReport group_exponents(const StepTwoAlgebra& alg, long n_samples,
                               const std::vector<StratumMask>& strata,
                               std::uint64_t seed, unsigned workers = 0,
                               double rank_tol = 1e-10);

}  // namespace carnot

#endif
