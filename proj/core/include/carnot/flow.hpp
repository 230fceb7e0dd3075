#ifndef CARNOT_FLOW_HPP
#define CARNOT_FLOW_HPP

#include <vector>

#include "carnot/algebra.hpp"

namespace carnot {

/// Numerically integrated normal geodesic together with its momentum.
/// times is a uniform grid from 0; states[0] holds the initial data.
struct Trajectory {
  struct State {
    Eigen::VectorXd x, u, xi, mu;
  };
  std::vector<double> times;
  std::vector<State> states;

  const State& endpoint() const { return states.back(); }
};

/// Classical fixed-step RK4 on the geodesic system
///   x' = xi_t,  u' = [x, xi_t]/2,  xi_t' = J xi_t,  mu' = 0.
/// The step is snapped to t_end / round(t_end/step) so the grid lands on
/// t_end exactly. `start` defaults to the identity. Non-finite states abort
/// with convergence_error.
Trajectory integrate_geodesic(const StepTwoAlgebra& alg, const Covector& cov,
                              double t_end, double step,
                              const GroupPoint* start = nullptr);

struct ConservationReport {
  double speed_drift = 0.0;            ///< max | |xi_t| - |xi_0| |
  double mu_drift = 0.0;               ///< max |mu_t - mu_0|, sup norm
  double right_invariant_drift = 0.0;  ///< max drift of cov composed with Ad_{g^-1}
};

/// Evaluates the conserved quantities along the trajectory. The right
/// invariant covector is computed componentwise through `adjoint`.
ConservationReport check_conservation(const StepTwoAlgebra& alg,
                                      const Trajectory& traj);

struct SpeedSymmetryReport {
  double endpoint_gap = 0.0;  ///< sup-norm gap between the two endpoints
  GroupPoint rescaled;        ///< endpoint of the rescaled covector at time 1
  GroupPoint truncated;       ///< endpoint of the original covector at time lambda
};

/// Change of speed: integrating lambda * cov to time 1 must meet integrating
/// cov to time lambda.
SpeedSymmetryReport check_speed_symmetry(const StepTwoAlgebra& alg,
                                         const Covector& cov, double lambda,
                                         double step = 1e-3);

}  // namespace carnot

#endif
