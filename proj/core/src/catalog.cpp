#include "carnot/catalog.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "carnot/expmap.hpp"

namespace carnot {

namespace {

// Calls fn with each size-m subset of {0, ..., k-1} in lexicographic order.
void for_each_subset(int k, int m,
                     const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> pick(m);
  for (int i = 0; i < m; ++i) pick[i] = i;
  if (m == 0) {
    fn(pick);
    return;
  }
  for (;;) {
    fn(pick);
    int i = m - 1;
    while (i >= 0 && pick[i] == k - m + i) --i;
    if (i < 0) return;
    ++pick[i];
    for (int j = i + 1; j < m; ++j) pick[j] = pick[j - 1] + 1;
  }
}

Covector canonical_covector(int q1, int q2, bool zero_first, bool ramp_mu) {
  Covector cov{Eigen::VectorXd::Ones(q1), Eigen::VectorXd::Zero(q2)};
  if (zero_first) cov.xi(0) = 0.0;
  if (ramp_mu)
    for (int a = 0; a < q2; ++a) cov.mu(a) = a + 1.0;
  else
    cov.mu(0) = 1.0;
  return cov;
}

}  // namespace

StepTwoAlgebra heisenberg() {
  BracketEntry e{0, 1, Eigen::VectorXd::Ones(1)};
  return StepTwoAlgebra::from_brackets(2, 1, {e}, "heisenberg");
}

StepTwoAlgebra free_step_two(int k) {
  if (k < 2) throw input_error("free_step_two: need at least two generators");
  const int q2 = k * (k - 1) / 2;
  std::vector<BracketEntry> entries;
  int a = 0;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j, ++a)
      entries.push_back({i, j, Eigen::VectorXd::Unit(q2, a)});
  return StepTwoAlgebra::from_brackets(k, q2, entries, "free:" + std::to_string(k));
}

StepTwoAlgebra star_graph(int k) {
  if (k < 1) throw input_error("star_graph: need at least one ray");
  std::vector<BracketEntry> entries;
  for (int j = 1; j <= k; ++j)
    entries.push_back({0, j, Eigen::VectorXd::Unit(k, j - 1)});
  std::vector<int> rays(k);
  for (int j = 0; j < k; ++j) rays[j] = j + 1;
  return StepTwoAlgebra::from_brackets(k + 1, k, entries,
                                       "star:" + std::to_string(k),
                                       {{0}, rays});
}

StepTwoAlgebra pairing_group(const PairingMatrix& pairing) {
  const int m = pairing.rows();
  const int k = pairing.cols();
  if (m < 1 || k < m) throw input_error("pairing_group: need m x k with 1 <= m <= k");
  if (!pairing.a.allFinite()) throw input_error("pairing_group: non-finite entries");
  const Eigen::VectorXd sv = pairing.a.jacobiSvd().singularValues();
  if (!(sv(m - 1) > 1e-12 * sv(0)))
    throw input_error("pairing_group: pairing matrix is rank deficient");

  std::vector<BracketEntry> entries;
  std::vector<std::vector<int>> planes;
  for (int j = 0; j < k; ++j) {
    entries.push_back({2 * j, 2 * j + 1, pairing.a.col(j)});
    planes.push_back({2 * j, 2 * j + 1});
  }
  return StepTwoAlgebra::from_brackets(
      2 * k, m, entries,
      "ga:" + std::to_string(m) + "x" + std::to_string(k), planes);
}

double sinc(double s) {
  if (std::abs(s) < 1e-2) {
    const double s2 = s * s;
    return 1.0 + s2 * (-1.0 / 6 + s2 * (1.0 / 120 + s2 * (-1.0 / 5040 + s2 / 362880)));
  }
  return std::sin(s) / s;
}

double sinc3(double s) {
  if (std::abs(s) < 1e-2) {
    const double s2 = s * s;
    return 1.0 / 3 +
           s2 * (-1.0 / 30 + s2 * (1.0 / 840 + s2 * (-1.0 / 45360 + s2 / 3991680)));
  }
  return (std::sin(s) - s * std::cos(s)) / (s * s * s);
}

double closed_form_jacobian(const PairingMatrix& pairing, const Covector& cov) {
  const int m = pairing.rows();
  const int k = pairing.cols();
  if (cov.xi.size() != 2 * k || cov.mu.size() != m)
    throw input_error("closed_form_jacobian: covector has wrong dimensions");

  const Eigen::VectorXd v = pairing.a.transpose() * cov.mu;  // v_j = mu . A_j
  std::vector<double> plane_sq(k), f2sq(k), f1f2(k);
  for (int j = 0; j < k; ++j) {
    plane_sq[j] = cov.xi(2 * j) * cov.xi(2 * j) + cov.xi(2 * j + 1) * cov.xi(2 * j + 1);
    const double h = 0.5 * v(j);
    f2sq[j] = sinc(h) * sinc(h);
    f1f2[j] = sinc3(h) * sinc(h);
  }

  double total = 0.0;
  for_each_subset(k, m, [&](const std::vector<int>& s) {
    Eigen::MatrixXd sub(m, m);
    for (int c = 0; c < m; ++c) sub.col(c) = pairing.a.col(s[c]);
    const double d = sub.determinant();
    double term = d * d;
    std::size_t si = 0;
    for (int j = 0; j < k; ++j) {
      if (si < s.size() && s[si] == j) {
        term *= f1f2[j] * plane_sq[j];
        ++si;
      } else {
        term *= f2sq[j];
      }
    }
    total += term;
  });
  return total / std::pow(4.0, m);
}

double cauchy_binet_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const int m = static_cast<int>(a.rows());
  const int k = static_cast<int>(a.cols());
  if (b.rows() != k || b.cols() != m)
    throw input_error("cauchy_binet_residual: shapes must be m x k and k x m");
  if (m > k) throw input_error("cauchy_binet_residual: need m <= k");

  double rhs = 0.0;
  for_each_subset(k, m, [&](const std::vector<int>& s) {
    Eigen::MatrixXd asub(m, m), bsub(m, m);
    for (int c = 0; c < m; ++c) {
      asub.col(c) = a.col(s[c]);
      bsub.row(c) = b.row(s[c]);
    }
    rhs += asub.determinant() * bsub.determinant();
  });
  return std::abs((a * b).determinant() - rhs);
}

bool in_domain_proxy(const PairingMatrix& pairing, const Covector& cov, int grid) {
  if (grid < 8) throw input_error("in_domain_proxy: need at least 8 grid points");
  const Eigen::VectorXd v = pairing.a.transpose() * cov.mu;
  for (int j = 0; j < v.size(); ++j)
    if (!(std::abs(v(j)) < 2.0 * std::numbers::pi)) return false;
  for (int g = 1; g <= grid; ++g) {
    const double t = static_cast<double>(g) / grid;
    if (!(closed_form_jacobian(pairing, scale_second_layer(t, cov)) > 0.0))
      return false;
  }
  return true;
}

ExponentReport known_exponents(const std::string& family, int k,
                               const PairingMatrix* pairing) {
  ExponentReport rep;
  rep.provenance = "closed-form";
  rep.curvature_exp_exact = false;
  rep.sample_count = 0;
  rep.seed = 0;

  if (family == "heisenberg") {
    rep.n = 3;
    rep.q_hom = 4;
    rep.min_order = 0;
    rep.max_finite_order = 0;
    rep.curvature_exp_exact = true;
    rep.witness_min = {Eigen::Vector2d(1, 0), Eigen::VectorXd::Ones(1)};
    rep.witness_max = rep.witness_min;
  } else if (family == "free") {
    if (k < 2) throw input_error("known_exponents: free needs k >= 2");
    const int q2 = k * (k - 1) / 2;
    rep.n = k + q2;
    rep.q_hom = k + 2 * q2;
    rep.min_order = k * (k - 1) * (k - 2) / 3;
    // Every nondegenerate stratum shares the generic order: the splitting
    // dimensions depend only on dim of the stabilized Krylov space, and the
    // stable annihilator vanishes only at full or next-to-full dimension.
    rep.max_finite_order = rep.min_order;
    rep.witness_min = canonical_covector(k, q2, false, true);
    rep.witness_max = rep.witness_min;
  } else if (family == "star") {
    if (k < 1) throw input_error("known_exponents: star needs k >= 1");
    rep.n = 2 * k + 1;
    rep.q_hom = 3 * k + 1;
    rep.min_order = 0;
    rep.max_finite_order = 2 * k - 2;
    rep.witness_min = canonical_covector(k + 1, k, false, false);
    rep.witness_max = canonical_covector(k + 1, k, true, false);
  } else if (family == "ga") {
    if (!pairing) throw input_error("known_exponents: ga needs a pairing matrix");
    const int m = pairing->rows();
    const int kk = pairing->cols();
    rep.n = 2 * kk + m;
    rep.q_hom = 2 * kk + 2 * m;
    rep.min_order = 0;
    rep.max_finite_order = 0;
    rep.curvature_exp_exact = true;
    rep.witness_min = {Eigen::VectorXd::Ones(2 * kk), Eigen::VectorXd::Zero(m)};
    rep.witness_max = rep.witness_min;
  } else {
    throw input_error("known_exponents: unknown family " + family);
  }

  rep.geodesic_dim = 2 * rep.q_hom - rep.n + rep.min_order;
  rep.curvature_exp_lower = 2 * rep.q_hom - rep.n + rep.max_finite_order;
  return rep;
}

}  // namespace carnot
