#include "carnot/flow.hpp"

#include <cmath>
#include <limits>

#include "carnot/expmap.hpp"

namespace carnot {

namespace {

struct Rhs {
  Eigen::VectorXd dx, du, dxi;
};

Rhs rhs(const StepTwoAlgebra& alg, const Eigen::MatrixXd& j,
        const Eigen::VectorXd& x, const Eigen::VectorXd& xi) {
  return {xi, 0.5 * bracket(alg, x, xi), j * xi};
}

}  // namespace

Trajectory integrate_geodesic(const StepTwoAlgebra& alg, const Covector& cov,
                              double t_end, double step, const GroupPoint* start) {
  require_covector(alg, cov, "integrate_geodesic");
  if (!(t_end > 0.0)) throw input_error("integrate_geodesic: t_end must be positive");
  if (!(step > 0.0)) throw input_error("integrate_geodesic: step must be positive");

  const long steps = std::max(1L, std::lround(t_end / step));
  const double h = t_end / static_cast<double>(steps);
  const Eigen::MatrixXd j = j_map_matrix(alg, cov.mu);

  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);

  Eigen::VectorXd x = start ? start->x : Eigen::VectorXd::Zero(alg.v1_dim());
  Eigen::VectorXd u = start ? start->u : Eigen::VectorXd::Zero(alg.v2_dim());
  if (x.size() != alg.v1_dim() || u.size() != alg.v2_dim())
    throw input_error("integrate_geodesic: start point has wrong dimensions");
  Eigen::VectorXd xi = cov.xi;

  traj.times.push_back(0.0);
  traj.states.push_back({x, u, xi, cov.mu});

  for (long s = 0; s < steps; ++s) {
    const Rhs k1 = rhs(alg, j, x, xi);
    const Rhs k2 = rhs(alg, j, x + 0.5 * h * k1.dx, xi + 0.5 * h * k1.dxi);
    const Rhs k3 = rhs(alg, j, x + 0.5 * h * k2.dx, xi + 0.5 * h * k2.dxi);
    const Rhs k4 = rhs(alg, j, x + h * k3.dx, xi + h * k3.dxi);

    x += (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    u += (h / 6.0) * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du);
    xi += (h / 6.0) * (k1.dxi + 2.0 * k2.dxi + 2.0 * k3.dxi + k4.dxi);

    if (!x.allFinite() || !u.allFinite() || !xi.allFinite())
      throw convergence_error("integrate_geodesic: state diverged",
                              std::numeric_limits<double>::quiet_NaN());

    traj.times.push_back(h * static_cast<double>(s + 1));
    traj.states.push_back({x, u, xi, cov.mu});
  }
  return traj;
}

ConservationReport check_conservation(const StepTwoAlgebra& alg,
                                      const Trajectory& traj) {
  if (traj.states.empty())
    throw input_error("check_conservation: empty trajectory");

  const int q1 = alg.v1_dim();
  const int q2 = alg.v2_dim();
  const auto& init = traj.states.front();
  const double speed0 = init.xi.norm();

  // Reference value of the right-invariant covector at the initial point.
  auto right_invariant = [&](const Trajectory::State& st) {
    Eigen::VectorXd vals(q1 + q2);
    const GroupPoint ginv = inverse(GroupPoint{st.x, st.u});
    for (int i = 0; i < q1; ++i) {
      const AlgebraVector moved =
          adjoint(alg, ginv,
                  {Eigen::VectorXd::Unit(q1, i), Eigen::VectorXd::Zero(q2)});
      vals(i) = st.xi.dot(moved.v1) + st.mu.dot(moved.v2);
    }
    for (int a = 0; a < q2; ++a) vals(q1 + a) = st.mu(a);
    return vals;
  };

  const Eigen::VectorXd ref = right_invariant(init);

  ConservationReport rep;
  for (const auto& st : traj.states) {
    rep.speed_drift = std::max(rep.speed_drift, std::abs(st.xi.norm() - speed0));
    rep.mu_drift =
        std::max(rep.mu_drift, (st.mu - init.mu).cwiseAbs().maxCoeff());
    rep.right_invariant_drift =
        std::max(rep.right_invariant_drift,
                 (right_invariant(st) - ref).cwiseAbs().maxCoeff());
  }
  return rep;
}

SpeedSymmetryReport check_speed_symmetry(const StepTwoAlgebra& alg,
                                         const Covector& cov, double lambda,
                                         double step) {
  if (!(lambda > 0.0))
    throw input_error("check_speed_symmetry: lambda must be positive");

  const Trajectory full =
      integrate_geodesic(alg, scale_covector(lambda, cov), 1.0, step);
  const Trajectory part = integrate_geodesic(alg, cov, lambda, step);

  SpeedSymmetryReport rep;
  rep.rescaled = {full.endpoint().x, full.endpoint().u};
  rep.truncated = {part.endpoint().x, part.endpoint().u};
  const double dx = (rep.rescaled.x - rep.truncated.x).cwiseAbs().maxCoeff();
  const double du = (rep.rescaled.u - rep.truncated.u).cwiseAbs().maxCoeff();
  rep.endpoint_gap = std::max(dx, du);
  return rep;
}

}  // namespace carnot
