#include "carnot/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "carnot/errors.hpp"
#include "carnot/parallel.hpp"
#include "carnot/rng.hpp"

namespace carnot {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

// Weighted least squares of y against x. slope_stderr is 1/sqrt(sum w dx^2),
// the exact slope deviation when the weights are inverse variances of y.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& w) {
  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
  }
  if (!(sw > 0.0)) throw input_error("line fit: nonpositive total weight");
  const double xbar = swx / sw;
  const double ybar = swy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - xbar;
    sxx += w[i] * dx * dx;
    sxy += w[i] * dx * (y[i] - ybar);
  }
  if (!(sxx > 0.0)) throw input_error("line fit: degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  fit.slope_stderr = std::sqrt(1.0 / sxx);
  return fit;
}

std::vector<double> sorted_descending(const std::vector<double>& grid,
                                      const char* where) {
  std::vector<double> out = grid;
  for (double v : out)
    if (!(std::isfinite(v) && v > 0.0))
      throw input_error(std::string(where) + ": grid values must be positive");
  std::sort(out.begin(), out.end(), std::greater<double>());
  return out;
}

Covector box_sample(const CovectorBox& box, SampleStream& stream) {
  Covector cov;
  cov.xi.resize(box.xi_lo.size());
  cov.mu.resize(box.mu_lo.size());
  for (int i = 0; i < box.xi_lo.size(); ++i)
    cov.xi(i) = stream.uniform(box.xi_lo(i), box.xi_hi(i));
  for (int a = 0; a < box.mu_lo.size(); ++a)
    cov.mu(a) = stream.uniform(box.mu_lo(a), box.mu_hi(a));
  return cov;
}

// Shared inner loop of ce_criterion and the violation search; assumes the
// covector already passed the domain proxy.
CeCheck criterion_over_grid(const StepTwoAlgebra& alg, double n_exponent,
                            const Covector& cov,
                            const std::vector<double>& lambda_grid,
                            const SeriesConfig& cfg) {
  const int scale_exp = 2 * alg.homogeneous_dim() - alg.dim();
  const double jac_one = std::abs(jacobian(alg, cov, cfg));
  for (double lambda : lambda_grid) {
    const double lhs = std::pow(lambda, scale_exp) *
                       std::abs(scaled_jacobian(alg, cov, lambda, cfg));
    const double rhs = std::pow(lambda, n_exponent) * jac_one;
    const double slack = lhs - rhs;
    if (slack < -1e-12 * std::max(lhs, rhs)) {
      CeCheck out;
      out.holds = false;
      out.lambda = lambda;
      out.lhs = lhs;
      out.rhs = rhs;
      return out;
    }
  }
  return CeCheck{};
}

void require_lambda_in_unit(const std::vector<double>& grid,
                            const char* where) {
  if (grid.empty())
    throw input_error(std::string(where) + ": empty lambda grid");
  for (double v : grid)
    if (!(std::isfinite(v) && v > 0.0 && v <= 1.0))
      throw input_error(std::string(where) + ": lambda grid must lie in (0, 1]");
}

}  // namespace

double scaled_jacobian(const StepTwoAlgebra& alg, const Covector& cov,
                       double lambda, const SeriesConfig& cfg) {
  if (!std::isfinite(lambda))
    throw input_error("scaled_jacobian: lambda must be finite");
  return jacobian(alg, scale_second_layer(lambda, cov), cfg);
}

std::vector<double> geometric_grid(double lambda_max, double lambda_min,
                                   int count) {
  if (!(std::isfinite(lambda_max) && std::isfinite(lambda_min)))
    throw input_error("geometric_grid: endpoints must be finite");
  if (!(lambda_min > 0.0 && lambda_min <= lambda_max))
    throw input_error("geometric_grid: need 0 < lambda_min <= lambda_max");
  if (count < 0) throw input_error("geometric_grid: negative count");
  if (lambda_max == lambda_min) {
    if (count > 1)
      throw input_error("geometric_grid: equal endpoints admit one point");
    return {lambda_max};
  }
  if (count == 1)
    throw input_error("geometric_grid: distinct endpoints need count >= 2");
  if (count == 0) {
    // Default ratio 10^(-1/4): four points per decade.
    const double decades = std::log10(lambda_max / lambda_min);
    count = static_cast<int>(std::ceil(decades / 0.25 - 1e-9)) + 1;
    count = std::max(count, 2);
  }
  std::vector<double> grid(count);
  const double log_max = std::log(lambda_max);
  const double log_min = std::log(lambda_min);
  for (int i = 0; i < count; ++i)
    grid[i] = std::exp(log_max + (log_min - log_max) * i / (count - 1));
  grid.front() = lambda_max;
  grid.back() = lambda_min;
  return grid;
}

LeadingOrder leading_order(const StepTwoAlgebra& alg, const Covector& cov,
                           const std::vector<double>& grid, double floor,
                           const SeriesConfig& cfg) {
  require_covector(alg, cov, "leading_order");
  if (!(floor > 0.0)) throw input_error("leading_order: floor must be positive");
  if (grid.size() < 8)
    throw input_error("leading_order: need at least 8 grid points");
  const std::vector<double> lambdas = sorted_descending(grid, "leading_order");

  std::vector<double> vals(lambdas.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    vals[i] = scaled_jacobian(alg, cov, lambdas[i], cfg);
    peak = std::max(peak, std::abs(vals[i]));
  }

  LeadingOrder out;
  if (peak < floor) {
    // The Jacobian vanishes identically along the scaling curve to within
    // determinant noise.
    out.order = JacOrder::infinite();
    out.grid = lambdas;
    return out;
  }

  // Tail fit: the two largest lambdas carry the preasymptotic bias, points
  // under the floor carry only roundoff.
  std::vector<double> x, y;
  double last_val = 0.0;
  for (std::size_t i = 2; i < lambdas.size(); ++i) {
    if (std::abs(vals[i]) < floor) continue;
    x.push_back(std::log(lambdas[i]));
    y.push_back(std::log(std::abs(vals[i])));
    last_val = vals[i];
  }
  if (x.size() < 4)
    throw convergence_error(
        "leading_order: fewer than 4 grid points above the floor; widen the "
        "grid toward lambda = 1",
        static_cast<double>(x.size()));

  const std::vector<double> ones(x.size(), 1.0);
  const LineFit fit = fit_line(x, y, ones);
  const double nearest = std::round(fit.slope);
  const double deviation = std::abs(fit.slope - nearest);
  if (deviation > 0.2 || nearest < 0.0)
    throw convergence_error(
        "leading_order: slope " + std::to_string(fit.slope) +
            " is not near an integer; extend the grid to smaller lambda",
        deviation);

  const int order = static_cast<int>(nearest);
  // Re-fit the intercept with the integer slope pinned.
  double log_coeff = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) log_coeff += y[i] - order * x[i];
  log_coeff /= static_cast<double>(x.size());

  double residual = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    residual = std::max(residual, std::abs(y[i] - (log_coeff + order * x[i])));

  out.order = JacOrder::finite(order);
  out.coeff = std::copysign(std::exp(log_coeff), last_val);
  out.fit_residual = residual;
  out.grid.reserve(x.size());
  for (double lx : x) out.grid.push_back(std::exp(lx));
  return out;
}

double CovectorBox::volume() const {
  double v = 1.0;
  for (int i = 0; i < xi_lo.size(); ++i) v *= xi_hi(i) - xi_lo(i);
  for (int a = 0; a < mu_lo.size(); ++a) v *= mu_hi(a) - mu_lo(a);
  return v;
}

void require_box(const StepTwoAlgebra& alg, const CovectorBox& box) {
  if (box.xi_lo.size() != alg.v1_dim() || box.xi_hi.size() != alg.v1_dim() ||
      box.mu_lo.size() != alg.v2_dim() || box.mu_hi.size() != alg.v2_dim())
    throw input_error("covector box: bounds do not match the layer dimensions");
  for (int i = 0; i < box.xi_lo.size(); ++i)
    if (!(std::isfinite(box.xi_lo(i)) && std::isfinite(box.xi_hi(i)) &&
          box.xi_hi(i) > box.xi_lo(i)))
      throw input_error("covector box: first-layer widths must be positive");
  for (int a = 0; a < box.mu_lo.size(); ++a)
    if (!(std::isfinite(box.mu_lo(a)) && std::isfinite(box.mu_hi(a)) &&
          box.mu_hi(a) > box.mu_lo(a)))
      throw input_error("covector box: second-layer widths must be positive");
}

bool domain_proxy_accepts(const StepTwoAlgebra& alg, const Covector& cov,
                          const DomainProxyOptions& opts,
                          const SeriesConfig& cfg) {
  require_covector(alg, cov, "domain_proxy_accepts");
  if (opts.grid < 8)
    throw input_error("domain_proxy_accepts: need at least 8 grid points");
  if (opts.pairing != nullptr) {
    if (2 * opts.pairing->cols() != alg.v1_dim() ||
        opts.pairing->rows() != alg.v2_dim())
      throw input_error("domain_proxy_accepts: pairing shape mismatch");
    return in_domain_proxy(*opts.pairing, cov, opts.grid);
  }
  for (int g = 1; g <= opts.grid; ++g) {
    const double t = static_cast<double>(g) / opts.grid;
    if (!(jacobian(alg, scale_covector(t, cov), cfg) > 0.0)) return false;
  }
  return true;
}

VolumeEstimate intermediate_volume(const StepTwoAlgebra& alg,
                                   const CovectorBox& box, double lambda,
                                   long n_samples, std::uint64_t seed,
                                   unsigned workers,
                                   const DomainProxyOptions& proxy,
                                   const SeriesConfig& cfg) {
  require_box(alg, box);
  if (!(std::isfinite(lambda) && lambda > 0.0))
    throw input_error("intermediate_volume: lambda must be positive");
  if (n_samples < 2)
    throw input_error("intermediate_volume: need at least 2 samples");

  const std::size_t n = static_cast<std::size_t>(n_samples);
  std::vector<double> vals(n);
  parallel_for(n, workers, [&](std::size_t i) {
    SampleStream stream(seed, i);
    const Covector cov = box_sample(box, stream);
    vals[i] = std::abs(scaled_jacobian(alg, cov, lambda, cfg));
  });

  const double mean = pairwise_sum(vals.data(), n) / static_cast<double>(n);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = vals[i] - mean;
    sq[i] = d * d;
  }
  const double var =
      pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
  const double mean_stderr = std::sqrt(var / static_cast<double>(n));

  const int scale_exp = 2 * alg.homogeneous_dim() - alg.dim();
  const double prefactor = std::pow(lambda, scale_exp) * box.volume();

  VolumeEstimate est;
  est.value = prefactor * mean;
  est.std_error = prefactor * mean_stderr;
  est.n_samples = n_samples;

  // Spot check: is the region plausibly inside the injectivity domain. The
  // probes reuse the substreams of the first few samples.
  est.proxy_probes = static_cast<int>(std::min<long>(16, n_samples));
  for (int i = 0; i < est.proxy_probes; ++i) {
    SampleStream stream(seed, static_cast<std::uint64_t>(i));
    const Covector cov = box_sample(box, stream);
    if (!domain_proxy_accepts(alg, cov, proxy, cfg)) ++est.proxy_failures;
  }
  return est;
}

VolumeScan volume_scaling_slope(const StepTwoAlgebra& alg,
                                const CovectorBox& box,
                                const std::vector<double>& lambda_grid,
                                long n_samples, std::uint64_t seed,
                                unsigned workers,
                                const DomainProxyOptions& proxy,
                                const SeriesConfig& cfg) {
  require_box(alg, box);
  if (lambda_grid.size() < 4)
    throw input_error("volume_scaling_slope: need at least 4 lambdas");
  const std::vector<double> lambdas =
      sorted_descending(lambda_grid, "volume_scaling_slope");

  VolumeScan scan;
  scan.lambdas = lambdas;
  scan.region = box;
  scan.n_samples = n_samples;
  scan.seed = seed;
  scan.volumes.resize(lambdas.size());
  scan.std_errors.resize(lambdas.size());

  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    // Same seed at every lambda: common random numbers, so the per-point
    // errors cancel in the slope instead of adding up.
    const VolumeEstimate est = intermediate_volume(
        alg, box, lambdas[i], n_samples, seed, workers, proxy, cfg);
    if (!(est.value > 3.0 * est.std_error))
      throw input_error(
          "volume_scaling_slope: volume estimate consistent with zero at "
          "three standard errors; degenerate region");
    scan.volumes[i] = est.value;
    scan.std_errors[i] = est.std_error;
    if (i == 0) scan.proxy_failures = est.proxy_failures;
  }

  std::vector<double> x, y, w;
  bool all_weighted = true;
  for (std::size_t i = 2; i < lambdas.size(); ++i) {
    x.push_back(std::log(lambdas[i]));
    y.push_back(std::log(scan.volumes[i]));
    const double rel = scan.std_errors[i] / scan.volumes[i];
    if (rel > 0.0)
      w.push_back(1.0 / (rel * rel));
    else
      all_weighted = false;
  }
  if (!all_weighted) w.assign(x.size(), 1.0);
  const LineFit fit = fit_line(x, y, w);
  scan.slope = fit.slope;
  scan.slope_stderr = all_weighted
                          ? fit.slope_stderr
                          : std::numeric_limits<double>::quiet_NaN();
  return scan;
}

CeCheck ce_criterion(const StepTwoAlgebra& alg, double n_exponent,
                     const Covector& cov,
                     const std::vector<double>& lambda_grid,
                     const DomainProxyOptions& proxy,
                     const SeriesConfig& cfg) {
  require_covector(alg, cov, "ce_criterion");
  if (!std::isfinite(n_exponent))
    throw input_error("ce_criterion: exponent must be finite");
  require_lambda_in_unit(lambda_grid, "ce_criterion");
  if (!domain_proxy_accepts(alg, cov, proxy, cfg))
    throw input_error("ce_criterion: covector rejected by the domain proxy");
  return criterion_over_grid(alg, n_exponent, cov, lambda_grid, cfg);
}

std::optional<CeViolation> ce_search_violation(const StepTwoAlgebra& alg,
                                               double n_exponent,
                                               const CeSearchConfig& config,
                                               std::uint64_t seed) {
  if (!std::isfinite(n_exponent))
    throw input_error("ce_search_violation: exponent must be finite");
  if (config.budget < 1)
    throw input_error("ce_search_violation: budget must be positive");
  std::vector<double> grid = config.lambda_grid;
  if (grid.empty()) grid = geometric_grid(1.0, 1e-3);
  require_lambda_in_unit(grid, "ce_search_violation");
  std::vector<StratumMask> strata = config.strata;
  if (strata.empty()) strata = default_strata(alg);
  if (config.shrink.empty())
    throw input_error("ce_search_violation: empty shrink schedule");
  for (double s : config.shrink)
    if (!(s > 0.0 && s <= 1.0))
      throw input_error("ce_search_violation: shrink factors must be in (0, 1]");

  const std::size_t n_shrink = config.shrink.size();
  const std::size_t variants = 1 + strata.size() * n_shrink;

  for (long i = 0; i < config.budget; ++i) {
    SampleStream stream(seed, static_cast<std::uint64_t>(i));
    Covector cov;
    cov.xi.resize(alg.v1_dim());
    cov.mu.resize(alg.v2_dim());
    for (int j = 0; j < alg.v1_dim(); ++j) cov.xi(j) = stream.gaussian();
    for (int a = 0; a < alg.v2_dim(); ++a) cov.mu(a) = stream.gaussian();

    const std::size_t variant =
        static_cast<std::size_t>(i) % variants;
    if (variant > 0) {
      const StratumMask& mask = strata[(variant - 1) / n_shrink];
      const double factor = config.shrink[(variant - 1) % n_shrink];
      for (int j : mask.zero_xi) cov.xi(j) *= factor;
      for (int a : mask.zero_mu) cov.mu(a) *= factor;
    }

    if (!domain_proxy_accepts(alg, cov, config.proxy, config.series)) continue;
    const CeCheck chk =
        criterion_over_grid(alg, n_exponent, cov, grid, config.series);
    if (chk.holds) continue;
    // Only report violations that clear the confirmation margin, so a
    // re-evaluation always reproduces them.
    if (chk.rhs - chk.lhs >= 1e-10 * std::max(chk.lhs, chk.rhs)) {
      CeViolation hit;
      hit.cov = cov;
      hit.lambda = chk.lambda;
      hit.lhs = chk.lhs;
      hit.rhs = chk.rhs;
      hit.sample_index = i;
      return hit;
    }
  }
  return std::nullopt;
}

}  // namespace carnot
