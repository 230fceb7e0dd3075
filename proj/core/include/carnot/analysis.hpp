#ifndef CARNOT_ANALYSIS_HPP
#define CARNOT_ANALYSIS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "carnot/algebra.hpp"
#include "carnot/catalog.hpp"
#include "carnot/expmap.hpp"
#include "carnot/exponents.hpp"

namespace carnot {

/// Jacobian along the second-layer scaling curve: jacobian(xi, lambda * mu).
/// For lambda != 0 this equals jacobian(lambda * cov) / lambda^(2Q - 2n) by
/// the first-layer homogeneity of the Jacobian.
double scaled_jacobian(const StepTwoAlgebra& alg, const Covector& cov,
                       double lambda, const SeriesConfig& cfg = {});

/// Decreasing geometric grid from lambda_max to lambda_min, both included.
/// count = 0 picks the default ratio 10^(-1/4); otherwise count >= 2 points
/// are placed geometrically. lambda_max = lambda_min gives one point.
std::vector<double> geometric_grid(double lambda_max, double lambda_min,
                                   int count = 0);

/// Leading term of the Jacobian expansion along the scaling curve,
/// |scaled_jacobian| ~ coeff * lambda^order, extracted by a log-log fit.
struct LeadingOrder {
  JacOrder order = JacOrder::finite(0);
  double coeff = 0.0;           ///< signed leading coefficient estimate
  double fit_residual = 0.0;    ///< sup norm of the log-space fit residual
  std::vector<double> grid;     ///< points the fit actually used
};

/// Fits log|scaled_jacobian| against log lambda. The two largest lambdas are
/// dropped to stay in the asymptotic regime, and points below `floor` are
/// treated as exact zeros (the determinant noise floor). All points below
/// the floor means the Jacobian vanishes identically along the curve: order
/// comes back infinite. A slope farther than 0.2 from every integer raises
/// convergence_error carrying the deviation; extend the grid downward.
LeadingOrder leading_order(const StepTwoAlgebra& alg, const Covector& cov,
                           const std::vector<double>& grid,
                           double floor = 1e-13, const SeriesConfig& cfg = {});

/// Axis-aligned box of covectors, the integration region for the volume
/// estimates. Widths must be positive in every coordinate.
struct CovectorBox {
  Eigen::VectorXd xi_lo;
  Eigen::VectorXd xi_hi;
  Eigen::VectorXd mu_lo;
  Eigen::VectorXd mu_hi;

  int dim() const { return static_cast<int>(xi_lo.size() + mu_lo.size()); }
  double volume() const;
};

void require_box(const StepTwoAlgebra& alg, const CovectorBox& box);

/// Necessary-condition membership test for the injectivity domain: the
/// Jacobian stays positive along t * cov for t on a uniform grid of (0, 1].
/// When a pairing matrix is supplied its momentum box is enforced first and
/// the closed-form Jacobian replaces the series route. Acceptance does not
/// certify minimality; rejection is sound.
struct DomainProxyOptions {
  int grid = 32;
  const PairingMatrix* pairing = nullptr;
};

bool domain_proxy_accepts(const StepTwoAlgebra& alg, const Covector& cov,
                          const DomainProxyOptions& opts = {},
                          const SeriesConfig& cfg = {});

/// Monte Carlo estimate of the volume of the lambda-intermediate set of the
/// image of a covector box.
struct VolumeEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
  int proxy_probes = 0;    ///< samples spot-checked against the domain proxy
  int proxy_failures = 0;  ///< probes the proxy rejected (warning only)
};

/// vol = lambda^(2Q - n) * vol(box) * mean over uniform covectors of
/// |scaled_jacobian|. Deterministic for a fixed seed: sample i draws from
/// its own substream and the mean is a pairwise sum, so worker count does
/// not affect a single bit of the result.
VolumeEstimate intermediate_volume(const StepTwoAlgebra& alg,
                                   const CovectorBox& box, double lambda,
                                   long n_samples, std::uint64_t seed,
                                   unsigned workers = 0,
                                   const DomainProxyOptions& proxy = {},
                                   const SeriesConfig& cfg = {});

/// Volume estimates over a lambda grid together with the fitted log-log
/// slope, the numeric probe for the geodesic dimension.
struct VolumeScan {
  std::vector<double> lambdas;
  std::vector<double> volumes;
  std::vector<double> std_errors;
  double slope = 0.0;
  double slope_stderr = 0.0;
  CovectorBox region;
  long n_samples = 0;
  std::uint64_t seed = 0;
  int proxy_failures = 0;  ///< summed over the per-lambda probes
};

/// Runs intermediate_volume on every grid point (common random numbers: the
/// same seed, hence the same covectors, at every lambda) and fits the slope
/// of log volume against log lambda with inverse-variance weights, dropping
/// the two largest lambdas. Any volume estimate consistent with zero at
/// three standard errors raises input_error: the region is degenerate for
/// this scaling.
VolumeScan volume_scaling_slope(const StepTwoAlgebra& alg,
                                const CovectorBox& box,
                                const std::vector<double>& lambda_grid,
                                long n_samples, std::uint64_t seed,
                                unsigned workers = 0,
                                const DomainProxyOptions& proxy = {},
                                const SeriesConfig& cfg = {});

/// One evaluation of the curvature-exponent inequality
///   lambda^(2Q - n) |Jac(xi, lambda mu)| >= lambda^N |Jac(xi, mu)|
/// over a grid of lambdas in (0, 1]. `holds` tolerates a relative slack of
/// -1e-12; on failure the first violating lambda and both sides are kept.
struct CeCheck {
  bool holds = true;
  double lambda = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

CeCheck ce_criterion(const StepTwoAlgebra& alg, double n_exponent,
                     const Covector& cov,
                     const std::vector<double>& lambda_grid,
                     const DomainProxyOptions& proxy = {},
                     const SeriesConfig& cfg = {});

/// Search plan for curvature-exponent violations. Candidates cycle through
/// a plain Gaussian draw and every (stratum, shrink) pair: the stratum's
/// coordinates are multiplied by the shrink factor instead of pinned to
/// zero, steering the search toward near-degenerate covectors where the
/// local vanishing order jumps.
struct CeSearchConfig {
  long budget = 10000;
  std::vector<double> lambda_grid;    ///< empty: geometric 1 down to 1e-3
  std::vector<StratumMask> strata;    ///< empty: default_strata(alg)
  std::vector<double> shrink = {1e-1, 1e-2, 1e-3};
  DomainProxyOptions proxy;
  SeriesConfig series;
};

struct CeViolation {
  Covector cov;
  double lambda = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  long sample_index = 0;
};

/// Deterministic serial scan for a violation of the criterion at exponent
/// n_exponent. Proxy-rejected candidates are skipped, and a violation is
/// only reported when it survives re-evaluation with a relative margin of
/// 1e-10. Absence of a violation is a legitimate outcome and never throws.
std::optional<CeViolation> ce_search_violation(const StepTwoAlgebra& alg,
                                               double n_exponent,
                                               const CeSearchConfig& config,
                                               std::uint64_t seed);

}  // namespace carnot

#endif
