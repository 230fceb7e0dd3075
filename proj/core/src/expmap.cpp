#include "carnot/expmap.hpp"

#include <cmath>
#include <vector>

#include "carnot/skew.hpp"
#include "det.hpp"

namespace carnot {

namespace {

// r^k / (k+2)! evaluated in log space so large r cannot overflow.
double factorial_tail(double r, int k) {
  if (r <= 0.0) return 0.0;
  return std::exp(k * std::log(r) - std::lgamma(k + 3.0));
}

// 1/0!, 1/1!, ..., 1/(count-1)!; entries underflow to zero harmlessly.
std::vector<double> inverse_factorials(int count) {
  std::vector<double> inv(count);
  inv[0] = 1.0;
  for (int i = 1; i < count; ++i) inv[i] = inv[i - 1] / i;
  return inv;
}

// Kahan accumulator over a fixed-size vector.
struct CompensatedVector {
  Eigen::VectorXd sum;
  Eigen::VectorXd comp;
  explicit CompensatedVector(int n)
      : sum(Eigen::VectorXd::Zero(n)), comp(Eigen::VectorXd::Zero(n)) {}
  void add(const Eigen::VectorXd& term) {
    for (int i = 0; i < sum.size(); ++i) {
      const double y = term(i) - comp(i);
      const double t = sum(i) + y;
      comp(i) = (t - sum(i)) - y;
      sum(i) = t;
    }
  }
};

}  // namespace

void require_series_config(const SeriesConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw input_error("SeriesConfig: tol must be positive");
  if (cfg.max_terms < 8) throw input_error("SeriesConfig: max_terms must be at least 8");
}

Eigen::VectorXd u_series_term(const StepTwoAlgebra& alg, const Eigen::VectorXd& mu,
                              const Eigen::VectorXd& xi, int k) {
  if (k < 0) throw input_error("u_series_term: negative index");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(alg.v2_dim());
  if (k == 0) return out;
  const Eigen::MatrixXd j = j_map_matrix(alg, mu);
  const auto inv = inverse_factorials(k + 2);
  std::vector<Eigen::VectorXd> w(k + 1);
  w[0] = xi;
  for (int m = 1; m <= k; ++m) w[m] = j * w[m - 1];
  for (int m = 0; m <= k; ++m)
    out += inv[m + 1] * inv[k - m] * bracket(alg, w[m], w[k - m]);
  return out / (2.0 * (k + 2));
}

GroupPoint sexp(const StepTwoAlgebra& alg, const Covector& cov,
                const SeriesConfig& cfg) {
  require_series_config(cfg);
  require_covector(alg, cov, "sexp");

  const Eigen::MatrixXd j = j_map_matrix(alg, cov.mu);
  GroupPoint p;
  p.x = phi1(j) * cov.xi;

  // Second layer: sum_k B_k with |B_k| <= C |xi|^2 (2|J|)^k / (k+2)!, so once
  // k >= 2|J| the tail is a ratio-1/2 geometric series.
  const double r = 2.0 * j.norm();
  const double lead = alg.bracket_norm() * cov.xi.squaredNorm();
  const auto inv = inverse_factorials(cfg.max_terms + 3);

  CompensatedVector u(alg.v2_dim());
  std::vector<Eigen::VectorXd> w;
  w.push_back(cov.xi);

  bool converged = (lead == 0.0);
  double residual = 0.0;
  for (int k = 1; !converged && k <= cfg.max_terms; ++k) {
    w.push_back(j * w.back());
    Eigen::VectorXd term = Eigen::VectorXd::Zero(alg.v2_dim());
    for (int m = 0; m <= k; ++m)
      term += inv[m + 1] * inv[k - m] * bracket(alg, w[m], w[k - m]);
    u.add(term / (2.0 * (k + 2)));
    residual = 2.0 * lead * factorial_tail(r, k + 1);
    if (k + 1 >= 2.0 * r && residual < cfg.tol) converged = true;
  }
  if (!converged)
    throw convergence_error("sexp: second-layer series hit max_terms", residual);

  p.u = u.sum;
  return p;
}

Eigen::MatrixXd dsexp(const StepTwoAlgebra& alg, const Covector& cov,
                      const SeriesConfig& cfg) {
  require_series_config(cfg);
  require_covector(alg, cov, "dsexp");

  const int q1 = alg.v1_dim();
  const int q2 = alg.v2_dim();
  const Eigen::MatrixXd j = j_map_matrix(alg, cov.mu);

  // Common majorant for the k-th term of every block:
  //   M_k = 2 max(1,C)^2 (1+|xi|)^2 (k+2)^2 r^k / (k+2)!,  r = 2|J|.
  // Past k >= max(8, 2r) consecutive majorants decay by at least 1/2, so the
  // tail after k is below 2 M_k.
  const double r = 2.0 * j.norm();
  const double cmax = std::max(1.0, alg.bracket_norm());
  const double lead =
      2.0 * cmax * cmax * std::pow(1.0 + cov.xi.norm(), 2);
  const auto majorant = [&](int k) {
    return lead * (k + 2.0) * (k + 2.0) * factorial_tail(r, k);
  };

  int terms = -1;
  double residual = 0.0;
  for (int k = 8; k <= cfg.max_terms; ++k) {
    residual = 2.0 * majorant(k + 1);
    if (k >= 2.0 * r && residual < cfg.tol) {
      terms = k;
      break;
    }
  }
  if (terms < 0)
    throw convergence_error("dsexp: series would exceed max_terms", residual);

  const auto inv = inverse_factorials(terms + 3);

  // w[m] = J^m xi; powers[m] = J^m; d[m] maps v to [v, w[m]] (rows by layer 2).
  std::vector<Eigen::VectorXd> w(terms + 1);
  std::vector<Eigen::MatrixXd> powers(terms + 1);
  std::vector<Eigen::MatrixXd> d(terms + 1);
  w[0] = cov.xi;
  powers[0] = Eigen::MatrixXd::Identity(q1, q1);
  for (int m = 1; m <= terms; ++m) {
    w[m] = j * w[m - 1];
    powers[m] = j * powers[m - 1];
  }
  for (int m = 0; m <= terms; ++m) {
    d[m].resize(q2, q1);
    for (int a = 0; a < q2; ++a)
      d[m].row(a) = (alg.layer_map(a) * w[m]).transpose();
  }

  // s[a][m] = sum_{i=1}^m J^{i-1} J_{e_a} J^{m-i} xi via the recurrence
  // s_m = J s_{m-1} + J_{e_a} w_{m-1}.
  std::vector<std::vector<Eigen::VectorXd>> s(q2);
  for (int a = 0; a < q2; ++a) {
    const Eigen::MatrixXd ja = j_map_matrix(alg, Eigen::VectorXd::Unit(q2, a));
    s[a].resize(terms + 1);
    s[a][0] = Eigen::VectorXd::Zero(q1);
    for (int m = 1; m <= terms; ++m)
      s[a][m] = j * s[a][m - 1] + ja * w[m - 1];
  }

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(q1 + q2, q1 + q2);
  out.topLeftCorner(q1, q1) = phi1(j);

  // First layer by second-layer momentum.
  for (int a = 0; a < q2; ++a) {
    Eigen::VectorXd col = Eigen::VectorXd::Zero(q1);
    for (int k = 1; k <= terms; ++k) col += inv[k + 1] * s[a][k];
    out.block(0, q1 + a, q1, 1) = col;
  }

  // Second layer by first-layer momentum: sum over k of
  // 1/(2(k+2)) sum_m (k-2m)/((m+1)!(k-m+1)!) [J^m v, w_{k-m}].
  Eigen::MatrixXd ux = Eigen::MatrixXd::Zero(q2, q1);
  for (int k = 1; k <= terms; ++k) {
    Eigen::MatrixXd inner = Eigen::MatrixXd::Zero(q2, q1);
    for (int m = 0; m <= k; ++m) {
      const double c = (k - 2.0 * m) * inv[m + 1] * inv[k - m + 1];
      if (c != 0.0) inner.noalias() += c * (d[k - m] * powers[m]);
    }
    ux += inner / (2.0 * (k + 2));
  }
  out.bottomLeftCorner(q2, q1) = ux;

  // Second layer by second-layer momentum: same weights with J^m v replaced
  // by the mixed-insertion sum s[a][m].
  for (int a = 0; a < q2; ++a) {
    Eigen::VectorXd col = Eigen::VectorXd::Zero(q2);
    for (int k = 1; k <= terms; ++k) {
      Eigen::VectorXd inner = Eigen::VectorXd::Zero(q2);
      for (int m = 1; m <= k; ++m) {
        const double c = (k - 2.0 * m) * inv[m + 1] * inv[k - m + 1];
        if (c != 0.0) inner.noalias() += c * (d[k - m] * s[a][m]);
      }
      col += inner / (2.0 * (k + 2));
    }
    out.block(q1, q1 + a, q2, 1) = col;
  }

  return out;
}

Eigen::MatrixXd dsexp_fd(const StepTwoAlgebra& alg, const Covector& cov,
                         const SeriesConfig& cfg, double h) {
  require_series_config(cfg);
  require_covector(alg, cov, "dsexp_fd");
  if (!(h > 0.0)) throw input_error("dsexp_fd: stride must be positive");

  const int q1 = alg.v1_dim();
  const int q2 = alg.v2_dim();
  const int n = q1 + q2;
  Eigen::MatrixXd out(n, n);
  for (int c = 0; c < n; ++c) {
    Covector plus = cov, minus = cov;
    if (c < q1) {
      plus.xi(c) += h;
      minus.xi(c) -= h;
    } else {
      plus.mu(c - q1) += h;
      minus.mu(c - q1) -= h;
    }
    const GroupPoint pp = sexp(alg, plus, cfg);
    const GroupPoint pm = sexp(alg, minus, cfg);
    out.block(0, c, q1, 1) = (pp.x - pm.x) / (2.0 * h);
    out.block(q1, c, q2, 1) = (pp.u - pm.u) / (2.0 * h);
  }
  return out;
}

double jacobian(const StepTwoAlgebra& alg, const Covector& cov,
                const SeriesConfig& cfg) {
  return detail::graded_determinant(dsexp(alg, cov, cfg));
}

Covector scale_second_layer(double lambda, const Covector& cov) {
  return {cov.xi, lambda * cov.mu};
}

Covector scale_first_layer(double lambda, const Covector& cov) {
  if (lambda == 0.0)
    throw input_error("scale_first_layer: zero factor is not invertible");
  return {lambda * cov.xi, cov.mu};
}

Covector scale_covector(double lambda, const Covector& cov) {
  return {lambda * cov.xi, lambda * cov.mu};
}

GroupPoint dilate(double lambda, const GroupPoint& p) {
  return {lambda * p.x, lambda * lambda * p.u};
}

}  // namespace carnot
