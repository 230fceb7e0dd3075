// Acceptance gate: one line per criterion, nonzero exit on any failure.
// Each criterion states its numeric tolerance and its wall-clock budget;
// exceeding either is a failure. An optional list of criterion ids on the
// command line restricts the run.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "carnot/analysis.hpp"
#include "carnot/catalog.hpp"
#include "carnot/expmap.hpp"
#include "carnot/exponents.hpp"
#include "carnot/flow.hpp"
#include "carnot/parallel.hpp"
#include "carnot/rng.hpp"
#include "test_support.hpp"

using namespace carnot;
using carnot_test::catalog_groups;
using carnot_test::gaussian_covector;
using carnot_test::random_pairing;

namespace {

struct Checker {
  std::atomic<long> checks{0};
  std::atomic<long> failures{0};
  std::mutex mu;
  std::string first;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    ++failures;
    std::lock_guard<std::mutex> lock(mu);
    if (first.empty()) first = what;
  }
};

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)) + 1e-300;
}

// ---- 1: sampled heisenberg exponents -------------------------------------

void criterion_heisenberg(Checker& ck) {
  const StepTwoAlgebra heis = heisenberg();
  const auto rep = group_exponents(heis, 2000, default_strata(heis), 2026, 0);
  const auto known = known_exponents("heisenberg");
  ck.expect(rep.n == 3 && rep.q_hom == 4, "heisenberg dimensions off");
  ck.expect(rep.min_order == 0, "heisenberg generic order nonzero");
  ck.expect(rep.max_finite_order == 0, "heisenberg max finite order nonzero");
  ck.expect(rep.geodesic_dim == known.geodesic_dim,
            "heisenberg geodesic dimension != 5");
  ck.expect(rep.curvature_exp_lower == known.curvature_exp_lower,
            "heisenberg curvature bound != 5");
}

// ---- 2: free group exponents and splittings -------------------------------

void criterion_free(Checker& ck) {
  for (int k : {3, 4}) {
    const StepTwoAlgebra alg = free_step_two(k);
    const auto rep =
        group_exponents(alg, k == 3 ? 800 : 400, default_strata(alg), 2027, 0);
    const auto known = known_exponents("free", k);
    ck.expect(rep.geodesic_dim == known.geodesic_dim,
              "free:" + std::to_string(k) + " geodesic dimension mismatch");
    ck.expect(rep.curvature_exp_lower == known.curvature_exp_lower,
              "free:" + std::to_string(k) + " curvature bound mismatch");
    ck.expect(rep.min_order == known.min_order,
              "free:" + std::to_string(k) + " generic order mismatch");

    for (int repix = 0; repix < 10; ++repix) {
      SampleStream rng(7000 + k, repix);
      const Filtration f = filtration(alg, gaussian_covector(alg, rng));
      bool good = f.order.is_finite() &&
                  static_cast<int>(f.w_dims.size()) >= k - 1;
      for (int l = 0; good && l < k - 1; ++l)
        good = f.w_dims[l] == k - l - 1;
      ck.expect(good, "free:" + std::to_string(k) +
                          " generic splitting is not (k-1, ..., 1)");
    }
  }
}

// ---- 3: star graphs and the violation search ------------------------------

void criterion_star(Checker& ck) {
  for (int k : {2, 3}) {
    const std::string tag = "star:" + std::to_string(k);
    const StepTwoAlgebra star = star_graph(k);
    const auto rep = group_exponents(star, 800, default_strata(star), 2028, 0);
    ck.expect(rep.geodesic_dim == 4 * k + 1, tag + " geodesic dimension");
    ck.expect(rep.curvature_exp_lower == 6 * k - 1, tag + " curvature bound");
    ck.expect(rep.curvature_exp_lower - rep.geodesic_dim == 2 * k - 2,
              tag + " gap != 2k - 2");

    // One above the geodesic dimension the criterion must break within the
    // sampling budget, witnessed by a reproducible covector.
    CeSearchConfig cfg;
    cfg.budget = 10000;
    const auto hit = ce_search_violation(star, rep.geodesic_dim + 1.0, cfg, 2029);
    ck.expect(hit.has_value(), tag + " found no violation in 10000 samples");
    if (hit) {
      const int scale_exp = 2 * star.homogeneous_dim() - star.dim();
      const double lhs =
          std::pow(hit->lambda, scale_exp) *
          std::abs(scaled_jacobian(star, hit->cov, hit->lambda));
      const double rhs = std::pow(hit->lambda, rep.geodesic_dim + 1.0) *
                         std::abs(jacobian(star, hit->cov));
      ck.expect(rhs - lhs >= 1e-10 * std::max(lhs, rhs),
                tag + " violation does not reproduce");
      ck.expect(domain_proxy_accepts(star, hit->cov),
                tag + " witness rejected by the domain proxy");
    }
  }
}

// ---- 4: pairing groups, two jacobian routes and the sharp criterion -------

Covector pairing_box_cov(const StepTwoAlgebra& alg, const PairingMatrix& p,
                         SampleStream& rng) {
  Covector cov;
  cov.xi.resize(alg.v1_dim());
  cov.mu.resize(alg.v2_dim());
  for (;;) {
    for (int i = 0; i < alg.v1_dim(); ++i) cov.xi(i) = rng.gaussian();
    for (int a = 0; a < alg.v2_dim(); ++a) cov.mu(a) = rng.gaussian();
    const double top = (p.a.transpose() * cov.mu).cwiseAbs().maxCoeff();
    if (top < 1e-12) continue;  // essentially impossible; redraw
    cov.mu *= rng.uniform(0.05, 0.95) * 2.0 * std::numbers::pi / top;
    return cov;
  }
}

void criterion_pairing(Checker& ck) {
  const std::vector<double> grid = geometric_grid(1.0, 1e-2, 8);
  for (int m = 1; m <= 4; ++m) {
    for (int k = m; k <= 4; ++k) {
      const double n_exp = 2.0 * k + 3.0 * m;  // the exact exponent
      const std::string tag =
          "ga " + std::to_string(m) + "x" + std::to_string(k);
      for (int inst = 0; inst < 20; ++inst) {
        const PairingMatrix p =
            random_pairing(m, k, 40000 + 100 * (4 * m + k) + inst);
        const StepTwoAlgebra alg = pairing_group(p);
        DomainProxyOptions proxy;
        proxy.pairing = &p;

        // Closed form against the series determinant.
        for (int c = 0; c < 5; ++c) {
          SampleStream rng(41000 + inst, c);
          const Covector cov = pairing_box_cov(alg, p, rng);
          const double closed = closed_form_jacobian(p, cov);
          const double series = jacobian(alg, cov);
          ck.expect(rel_close(closed, series, 1e-9),
                    tag + " closed form and series differ beyond 1e-9");
        }

        // The criterion at the exact exponent holds on every accepted draw;
        // 500 draws per instance make 10^4 per (m, k) class.
        std::atomic<long> accepted{0};
        parallel_for(500, 0, [&](std::size_t i) {
          SampleStream rng(42000 + inst, i);
          const Covector cov = pairing_box_cov(alg, p, rng);
          if (!domain_proxy_accepts(alg, cov, proxy)) return;
          ++accepted;
          try {
            const CeCheck chk = ce_criterion(alg, n_exp, cov, grid, proxy);
            ck.expect(chk.holds, tag + " criterion fails at its exact exponent");
          } catch (const std::exception& e) {
            ck.expect(false, tag + " criterion raised: " + e.what());
          }
        });
        ck.expect(accepted.load() == 500,
                  tag + " proxy rejected an in-box covector");
      }
    }
  }
}

// ---- 5: homogeneity of the map and its jacobian ----------------------------

// Condition number after sup-norm row and column equilibration. A double
// precision determinant comparison carries an error of order eps times this
// number, so draws inside the thin shell around the degenerate locus cannot
// certify a 1e-9 identity and are redrawn; the identity itself is exact.
double equilibrated_condition(Eigen::MatrixXd m) {
  const int n = static_cast<int>(m.rows());
  for (int i = 0; i < n; ++i) {
    const double r = m.row(i).cwiseAbs().maxCoeff();
    if (r == 0.0) return 1e300;
    m.row(i) /= r;
  }
  for (int j = 0; j < n; ++j) {
    const double c = m.col(j).cwiseAbs().maxCoeff();
    if (c == 0.0) return 1e300;
    m.col(j) /= c;
  }
  const auto sv = m.jacobiSvd().singularValues();
  return sv(0) / sv(n - 1);
}

void criterion_homogeneity(Checker& ck) {
  const auto groups = catalog_groups();
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const StepTwoAlgebra& alg = groups[gi].algebra;
    const int two_q2 = 2 * alg.v2_dim();
    int accepted = 0;
    for (int draw = 0; draw < 300 && accepted < 100; ++draw) {
      SampleStream rng(50000 + static_cast<int>(gi), draw);
      Covector cov = gaussian_covector(alg, rng);
      const double lambda = rng.uniform(0.25, 1.75);
      if (equilibrated_condition(dsexp(alg, scale_covector(lambda, cov))) >
          1e6)
        continue;
      ++accepted;

      // Dilation equivariance of the endpoint map.
      const GroupPoint base = sexp(alg, cov);
      const GroupPoint moved = sexp(alg, scale_first_layer(lambda, cov));
      const GroupPoint dilated = dilate(lambda, base);
      const double gap =
          std::max((moved.x - dilated.x).cwiseAbs().maxCoeff(),
                   (moved.u - dilated.u).cwiseAbs().maxCoeff());
      const double scale =
          std::max(1.0, std::max(dilated.x.cwiseAbs().maxCoeff(),
                                 dilated.u.cwiseAbs().maxCoeff()));
      ck.expect(gap <= 1e-9 * scale,
                groups[gi].label + ": endpoint dilation identity beyond 1e-9");

      // First-layer homogeneity of the jacobian, in both scalings.
      const double jac = jacobian(alg, cov);
      const double pow2q2 = std::pow(lambda, two_q2);
      ck.expect(rel_close(jacobian(alg, scale_first_layer(lambda, cov)),
                          pow2q2 * jac, 1e-9),
                groups[gi].label + ": first-layer jacobian homogeneity");
      ck.expect(rel_close(jacobian(alg, scale_covector(lambda, cov)),
                          pow2q2 * scaled_jacobian(alg, cov, lambda), 1e-9),
                groups[gi].label + ": joint scaling jacobian identity");
    }
    ck.expect(accepted == 100,
              groups[gi].label + ": too many draws near the degenerate locus");
  }
}

// ---- 6: fitted vanishing order against the algebraic filtration -----------

void criterion_order_fit(Checker& ck) {
  const auto groups = catalog_groups();
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const StepTwoAlgebra& alg = groups[gi].algebra;
    const auto strata = default_strata(alg);
    int found = 0;
    for (int attempt = 0; attempt < 400 && found < 50; ++attempt) {
      SampleStream rng(60000 + static_cast<int>(gi), attempt);
      Covector cov = gaussian_covector(alg, rng);
      const StratumMask& mask = strata[attempt % strata.size()];
      for (int i : mask.zero_xi) cov.xi(i) = 0.0;
      for (int a : mask.zero_mu) cov.mu(a) = 0.0;
      // Norm 3 on both layers lifts the leading coefficient far above the
      // determinant noise floor even for an order-8 zero.
      if (cov.xi.norm() > 0.0) cov.xi *= 3.0 / cov.xi.norm();
      if (cov.mu.norm() > 0.0) cov.mu *= 3.0 / cov.mu.norm();

      const JacOrder algebraic = vanishing_order(alg, cov);
      if (!algebraic.is_finite()) continue;
      ++found;

      // The floor reflects the relative accuracy of the equilibrated
      // determinant, which tracks an order-8 zero cleanly down to values
      // near 1e-25. A draw close to the boundary of the nondegenerate set
      // has a near-zero of the Jacobian at some draw-dependent lambda and
      // carries corrections that die off only linearly below it, so the
      // window descends (as the fit error suggests) until the fit settles.
      const double floor = 1e-27;
      LeadingOrder lead;
      bool fitted = false;
      std::string last_error;
      for (double top : {0.1, 0.02, 0.004, 0.0008}) {
        try {
          lead = leading_order(alg, cov, geometric_grid(top, top / 50.0, 12),
                               floor);
          fitted = true;
          break;
        } catch (const convergence_error& e) {
          last_error = e.what();
        } catch (const std::exception& e) {
          last_error = e.what();
          break;
        }
      }
      if (!fitted) {
        ck.expect(false, groups[gi].label + ": order fit raised: " + last_error);
        continue;
      }
      ck.expect(lead.order == algebraic,
                groups[gi].label + ": fitted order disagrees with filtration");
    }
    ck.expect(found == 50,
              groups[gi].label + ": fewer than 50 finite-order samples");
  }
}

// ---- 7: leading coefficient product formula --------------------------------

void criterion_limit_formula(Checker& ck) {
  const auto groups = catalog_groups();
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const StepTwoAlgebra& alg = groups[gi].algebra;
    const auto strata = default_strata(alg);
    int found = 0;
    for (int attempt = 0; attempt < 400 && found < 100; ++attempt) {
      SampleStream rng(70000 + static_cast<int>(gi), attempt);
      Covector cov = gaussian_covector(alg, rng);
      const StratumMask& mask = strata[attempt % strata.size()];
      for (int i : mask.zero_xi) cov.xi(i) = 0.0;
      for (int a : mask.zero_mu) cov.mu(a) = 0.0;

      const Filtration f = filtration(alg, cov);
      if (f.w_inf_dim > 0) continue;
      ++found;

      const ScalingLimit lim = scaling_limit_matrix(alg, cov);
      const HilbertGram gram = hilbert_gram(alg, cov);
      ck.expect(gram.min_eigenvalue > 0.0,
                groups[gi].label + ": gram matrix is not positive definite");
      double block = 1.0;
      for (std::size_t l = 0; l < f.w_dims.size(); ++l)
        block *= std::pow((l + 1.0) / std::tgamma(l + 3.0), f.w_dims[l]);
      const double predicted = block * block * gram.matrix.determinant();
      ck.expect(rel_close(lim.det, predicted, 1e-9),
                groups[gi].label + ": limit determinant != block product");
    }
    ck.expect(found >= 50,
              groups[gi].label + ": not enough nondegenerate samples");
  }
}

// ---- 8: volume scaling slopes ----------------------------------------------

void criterion_volume(Checker& ck) {
  struct Probe {
    const char* label;
    StepTwoAlgebra alg;
    double slope;
    double tol;
  };
  const std::vector<Probe> probes = {
      {"heisenberg", heisenberg(), 5.0, 0.05},
      {"free:3", free_step_two(3), 14.0, 0.1},
      {"star:2", star_graph(2), 9.0, 0.1},
  };
  for (const Probe& pr : probes) {
    CovectorBox box;
    box.xi_lo = Eigen::VectorXd::Constant(pr.alg.v1_dim(), 0.9);
    box.xi_hi = Eigen::VectorXd::Constant(pr.alg.v1_dim(), 1.1);
    box.mu_lo = Eigen::VectorXd::Constant(pr.alg.v2_dim(), -0.1);
    box.mu_hi = Eigen::VectorXd::Constant(pr.alg.v2_dim(), 0.1);
    const auto scan = volume_scaling_slope(
        pr.alg, box, geometric_grid(0.1, 1e-3), 100000, 2030, 0);
    ck.expect(std::abs(scan.slope - pr.slope) <= pr.tol,
              std::string(pr.label) + ": volume slope " +
                  std::to_string(scan.slope) + " off target " +
                  std::to_string(pr.slope));
    ck.expect(std::isfinite(scan.slope_stderr),
              std::string(pr.label) + ": slope stderr not finite");
    ck.expect(scan.proxy_failures == 0,
              std::string(pr.label) + ": proxy flagged the volume box");
  }
}

// ---- 9: hamiltonian flow against the series map ----------------------------

void criterion_flow(Checker& ck) {
  const auto groups = catalog_groups();
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const StepTwoAlgebra& alg = groups[gi].algebra;
    for (int rep = 0; rep < 50; ++rep) {
      SampleStream rng(90000 + static_cast<int>(gi), rep);
      const Covector cov = gaussian_covector(alg, rng, /*unit=*/true);
      const Trajectory traj = integrate_geodesic(alg, cov, 1.0, 1e-3);
      const GroupPoint mapped = sexp(alg, cov);
      const double gap =
          std::max((traj.endpoint().x - mapped.x).cwiseAbs().maxCoeff(),
                   (traj.endpoint().u - mapped.u).cwiseAbs().maxCoeff());
      ck.expect(gap < 1e-8,
                groups[gi].label + ": endpoint gap " + std::to_string(gap));

      const ConservationReport cons = check_conservation(alg, traj);
      ck.expect(cons.speed_drift < 1e-8,
                groups[gi].label + ": speed drift beyond 1e-8");
      ck.expect(cons.mu_drift < 1e-8,
                groups[gi].label + ": momentum drift beyond 1e-8");
      ck.expect(cons.right_invariant_drift < 1e-8,
                groups[gi].label + ": invariant covector drift beyond 1e-8");
    }
  }
}

struct Criterion {
  int id;
  const char* label;
  double budget_s;
  void (*run)(Checker&);
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "heisenberg exponents from sampling", 1.0, criterion_heisenberg},
      {2, "free group exponents and splittings", 10.0, criterion_free},
      {3, "star graph gap and violation search", 30.0, criterion_star},
      {4, "pairing groups: dual jacobians, sharp criterion", 120.0,
       criterion_pairing},
      {5, "dilation and homogeneity identities", 10.0, criterion_homogeneity},
      {6, "fitted order matches the filtration", 30.0, criterion_order_fit},
      {7, "limit determinant product formula", 30.0, criterion_limit_formula},
      {8, "volume scaling slopes", 300.0, criterion_volume},
      {9, "flow integration against the series map", 60.0, criterion_flow},
  };

  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0, ran = 0;
  for (const Criterion& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    ++ran;
    Checker ck;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(ck);
    } catch (const std::exception& e) {
      ck.expect(false, std::string("unhandled: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (secs > c.budget_s)
      ck.expect(false, "exceeded the time budget");

    const bool pass = ck.failures.load() == 0;
    if (!pass) ++failed;
    std::printf("[%s] criterion %d: %-48s %6.1fs / %4.0fs  %ld checks%s%s\n",
                pass ? "PASS" : "FAIL", c.id, c.label, secs, c.budget_s,
                ck.checks.load(), pass ? "" : "  -- ",
                pass ? "" : ck.first.c_str());
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
