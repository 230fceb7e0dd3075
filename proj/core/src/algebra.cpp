#include "carnot/algebra.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <utility>

namespace carnot {

namespace {

// Flattens the tensor to the v2_dim x v1_dim^2 matrix whose largest singular
// value is the bracket operator norm.
double flattened_norm(int q1, int q2, const std::vector<Eigen::MatrixXd>& c) {
  if (q2 == 0 || q1 == 0) return 0.0;
  Eigen::MatrixXd flat(q2, q1 * q1);
  for (int a = 0; a < q2; ++a)
    for (int i = 0; i < q1; ++i)
      for (int j = 0; j < q1; ++j) flat(a, i * q1 + j) = c[a](i, j);
  return flat.jacobiSvd().singularValues()(0);
}

}  // namespace

SkewMap::SkewMap(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw input_error("SkewMap: matrix not square");
  const double scale = m_.cwiseAbs().maxCoeff();
  const double residual = (m_ + m_.transpose()).cwiseAbs().maxCoeff();
  if (scale > 0.0 && residual > 1e-12 * scale)
    throw input_error("SkewMap: symmetric part exceeds tolerance");
}

StepTwoAlgebra::StepTwoAlgebra(int v1_dim, int v2_dim,
                               std::vector<Eigen::MatrixXd> layer_maps,
                               std::string name,
                               std::vector<std::vector<int>> v1_blocks)
    : q1_(v1_dim),
      q2_(v2_dim),
      c_(std::move(layer_maps)),
      name_(std::move(name)),
      blocks_(std::move(v1_blocks)) {
  if (q1_ < 1 || q2_ < 1)
    throw input_error("StepTwoAlgebra: layer dimensions must be positive");
  if (static_cast<int>(c_.size()) != q2_)
    throw input_error("StepTwoAlgebra: need one layer map per second-layer direction");
  for (const auto& m : c_)
    if (m.rows() != q1_ || m.cols() != q1_)
      throw input_error("StepTwoAlgebra: layer map has wrong shape");
  for (const auto& block : blocks_)
    for (int idx : block)
      if (idx < 0 || idx >= q1_)
        throw input_error("StepTwoAlgebra: v1 block index out of range");
  bracket_norm_ = flattened_norm(q1_, q2_, c_);
}

StepTwoAlgebra StepTwoAlgebra::from_brackets(int v1_dim, int v2_dim,
                                             const std::vector<BracketEntry>& entries,
                                             std::string name,
                                             std::vector<std::vector<int>> v1_blocks) {
  std::vector<Eigen::MatrixXd> c(std::max(v2_dim, 0),
                                 Eigen::MatrixXd::Zero(std::max(v1_dim, 0),
                                                       std::max(v1_dim, 0)));
  for (const auto& e : entries) {
    if (e.i < 0 || e.j < 0 || e.i >= v1_dim || e.j >= v1_dim)
      throw input_error("from_brackets: index out of range");
    if (e.i >= e.j) throw input_error("from_brackets: entries must have i < j");
    if (e.coeffs.size() != v2_dim)
      throw input_error("from_brackets: coefficient vector has wrong length");
    for (int a = 0; a < v2_dim; ++a) {
      c[a](e.i, e.j) += e.coeffs(a);
      c[a](e.j, e.i) -= e.coeffs(a);
    }
  }
  return StepTwoAlgebra(v1_dim, v2_dim, std::move(c), std::move(name),
                        std::move(v1_blocks));
}

Eigen::VectorXd bracket(const StepTwoAlgebra& alg, const Eigen::VectorXd& v,
                        const Eigen::VectorXd& w) {
  if (v.size() != alg.v1_dim() || w.size() != alg.v1_dim())
    throw input_error("bracket: arguments must lie in the first layer");
  Eigen::VectorXd out(alg.v2_dim());
  for (int a = 0; a < alg.v2_dim(); ++a) out(a) = v.dot(alg.layer_map(a) * w);
  return out;
}

Eigen::MatrixXd j_map_matrix(const StepTwoAlgebra& alg, const Eigen::VectorXd& mu) {
  if (mu.size() != alg.v2_dim())
    throw input_error("j_map: covector must lie in the second layer");
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(alg.v1_dim(), alg.v1_dim());
  for (int a = 0; a < alg.v2_dim(); ++a)
    j.noalias() += mu(a) * alg.layer_map(a).transpose();
  return j;
}

SkewMap j_map(const StepTwoAlgebra& alg, const Eigen::VectorXd& mu) {
  return SkewMap(j_map_matrix(alg, mu));
}

ValidationReport validate(const StepTwoAlgebra& alg) {
  ValidationReport rep;
  rep.n = alg.dim();
  rep.q_hom = alg.homogeneous_dim();

  const int q1 = alg.v1_dim();
  const int q2 = alg.v2_dim();

  double scale = 0.0;
  for (int a = 0; a < q2; ++a)
    scale = std::max(scale, alg.layer_map(a).cwiseAbs().maxCoeff());

  rep.skew_residual = 0.0;
  for (int a = 0; a < q2; ++a) {
    const Eigen::MatrixXd sym =
        alg.layer_map(a) + alg.layer_map(a).transpose();
    for (int i = 0; i < q1; ++i)
      for (int j = i; j < q1; ++j) {
        const double r = std::abs(sym(i, j));
        rep.skew_residual = std::max(rep.skew_residual, r);
        if (scale > 0.0 && r > 1e-12 * scale)
          rep.issues.push_back({"skew", i + 1, j + 1, a + 1, r});
      }
  }
  if (scale > 0.0) rep.skew_residual /= scale;

  // Bracket generation: the i<j columns of the tensor must span the second layer.
  const int pairs = q1 * (q1 - 1) / 2;
  Eigen::MatrixXd flat = Eigen::MatrixXd::Zero(q2, std::max(pairs, 1));
  int col = 0;
  for (int i = 0; i < q1; ++i)
    for (int j = i + 1; j < q1; ++j, ++col)
      for (int a = 0; a < q2; ++a) flat(a, col) = alg.layer_map(a)(i, j);
  const Eigen::VectorXd sv = flat.jacobiSvd().singularValues();
  int rank = 0;
  if (sv.size() > 0 && sv(0) > 0.0)
    for (int k = 0; k < sv.size(); ++k)
      if (sv(k) > 1e-12 * sv(0)) ++rank;
  rep.bracket_rank = rank;
  if (rank != q2)
    rep.issues.push_back({"rank", 0, 0, 0, static_cast<double>(rank)});

  rep.ok = rep.issues.empty();
  return rep;
}

AlgebraVector adjoint(const StepTwoAlgebra& alg, const GroupPoint& g,
                      const AlgebraVector& v) {
  if (g.x.size() != alg.v1_dim() || g.u.size() != alg.v2_dim())
    throw input_error("adjoint: group point has wrong dimensions");
  if (v.v1.size() != alg.v1_dim() || v.v2.size() != alg.v2_dim())
    throw input_error("adjoint: algebra vector has wrong dimensions");
  return {v.v1, v.v2 + bracket(alg, g.x, v.v1)};
}

Eigen::MatrixXd hs_metric(const StepTwoAlgebra& alg) {
  const int q2 = alg.v2_dim();
  Eigen::MatrixXd hstar(q2, q2);
  for (int a = 0; a < q2; ++a) {
    const Eigen::MatrixXd ja = j_map_matrix(alg, Eigen::VectorXd::Unit(q2, a));
    for (int b = a; b < q2; ++b) {
      const Eigen::MatrixXd jb = j_map_matrix(alg, Eigen::VectorXd::Unit(q2, b));
      hstar(a, b) = hstar(b, a) = (ja * jb.transpose()).trace();
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(hstar);
  if (!lu.isInvertible())
    throw internal_error("hs_metric: trace form singular on a bracket-generating algebra");
  return lu.inverse();
}

GroupPoint product(const StepTwoAlgebra& alg, const GroupPoint& a, const GroupPoint& b) {
  return {a.x + b.x, a.u + b.u + 0.5 * bracket(alg, a.x, b.x)};
}

GroupPoint inverse(const GroupPoint& g) { return {-g.x, -g.u}; }

void require_covector(const StepTwoAlgebra& alg, const Covector& cov,
                      const char* where) {
  if (cov.xi.size() != alg.v1_dim() || cov.mu.size() != alg.v2_dim())
    throw input_error(std::string(where) + ": covector has wrong dimensions");
  if (!cov.xi.allFinite() || !cov.mu.allFinite())
    throw input_error(std::string(where) + ": covector has non-finite entries");
}

}  // namespace carnot
