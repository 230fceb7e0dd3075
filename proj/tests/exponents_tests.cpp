#include <set>

#include "carnot/catalog.hpp"
#include "carnot/exponents.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace carnot;
using carnot_test::catalog_groups;
using carnot_test::gaussian_covector;

TEST_SUITE("exponents") {

TEST_CASE("order type keeps infinite separate from every finite value") {
  const JacOrder zero = JacOrder::finite(0);
  const JacOrder two = JacOrder::finite(2);
  const JacOrder inf = JacOrder::infinite();

  CHECK(zero.is_finite());
  CHECK(zero.value() == 0);
  CHECK(two.value() == 2);
  CHECK_FALSE(inf.is_finite());
  CHECK_THROWS_AS((void)inf.value(), internal_error);

  CHECK(zero == JacOrder::finite(0));
  CHECK_FALSE(zero == two);
  CHECK(inf == JacOrder::infinite());
  CHECK(zero < two);
  CHECK(two < inf);
  CHECK_FALSE(inf < inf);
  CHECK_FALSE(inf < two);
}

TEST_CASE("heisenberg filtration: generic covectors have order zero") {
  const StepTwoAlgebra heis = heisenberg();

  Covector cov{Eigen::Vector2d(0.8, -0.3), Eigen::VectorXd::Constant(1, 0.7)};
  Filtration f = filtration(heis, cov);
  CHECK(f.order == JacOrder::finite(0));
  CHECK(f.w_inf_dim == 0);
  CHECK(f.w_dims == std::vector<int>{1, 0});
  REQUIRE(f.depth.has_value());
  CHECK(*f.depth == 0);
  CHECK(f.krylov_dims == std::vector<int>{0, 1, 2, 2});
  CHECK_FALSE(f.borderline);
  CHECK(f.rank_margin > 10.0);

  // Zero momentum stabilizes one step earlier but the order is unchanged.
  cov.mu(0) = 0.0;
  f = filtration(heis, cov);
  CHECK(f.order == JacOrder::finite(0));
  CHECK(f.w_dims == std::vector<int>{1});
  CHECK(f.krylov_dims == std::vector<int>{0, 1, 1});
}

TEST_CASE("heisenberg filtration: zero horizontal part is degenerate") {
  const StepTwoAlgebra heis = heisenberg();
  Covector cov{Eigen::Vector2d::Zero(), Eigen::VectorXd::Constant(1, 2.0)};
  const Filtration f = filtration(heis, cov);
  CHECK_FALSE(f.order.is_finite());
  CHECK(f.w_inf_dim == 1);
  CHECK(f.w_dims.empty());
  CHECK_FALSE(f.depth.has_value());
  CHECK(f.w_inf_basis.cols() == 1);
}

TEST_CASE("star graph strata: hub coordinate controls the order") {
  for (int k : {2, 3}) {
    CAPTURE(k);
    const StepTwoAlgebra star = star_graph(k);
    const int q1 = k + 1;

    // Hub coordinate alive: order 0, the whole second layer sits in W_0.
    Eigen::VectorXd xi(q1);
    xi(0) = 1.1;
    for (int j = 1; j <= k; ++j) xi(j) = 0.3 + 0.1 * j;
    Eigen::VectorXd mu(k);
    for (int a = 0; a < k; ++a) mu(a) = 1.0 - 0.2 * a;
    Filtration f = filtration(star, {xi, mu});
    CHECK(f.order == JacOrder::finite(0));
    REQUIRE_FALSE(f.w_dims.empty());
    CHECK(f.w_dims.front() == k);
    CHECK(*f.depth == 0);

    // Hub zero, momentum not orthogonal to the rays: order 2k - 2 through
    // the splitting {1, k - 1}.
    xi(0) = 0.0;
    f = filtration(star, {xi, mu});
    REQUIRE(f.order.is_finite());
    CHECK(f.order.value() == 2 * k - 2);
    CHECK(f.w_inf_dim == 0);
    REQUIRE(f.w_dims.size() >= 2);
    CHECK(f.w_dims[0] == 1);
    CHECK(f.w_dims[1] == k - 1);
    CHECK(*f.depth == 1);

    // Hub zero and momentum orthogonal to the rays: the annihilator chain
    // stalls on a nonzero stable part.
    Eigen::VectorXd ray = xi.tail(k);
    Eigen::VectorXd perp = Eigen::VectorXd::Zero(k);
    perp(0) = ray(1);
    perp(1) = -ray(0);
    REQUIRE(std::abs(perp.dot(ray)) < 1e-15);
    f = filtration(star, {xi, perp});
    CHECK_FALSE(f.order.is_finite());
    CHECK(f.w_inf_dim == k - 1);
  }
}

TEST_CASE("free group generic splitting has dim W_l = k - l - 1") {
  for (int k : {3, 4}) {
    CAPTURE(k);
    const StepTwoAlgebra fr = free_step_two(k);
    carnot::SampleStream rng(321 + k, 0);
    const Covector cov = gaussian_covector(fr, rng);
    const Filtration f = filtration(fr, cov);

    REQUIRE(f.order.is_finite());
    int expect_order = 0;
    for (int l = 0; l < k - 1; ++l) expect_order += 2 * l * (k - l - 1);
    CHECK(f.order.value() == expect_order);
    REQUIRE(static_cast<int>(f.w_dims.size()) >= k - 1);
    for (int l = 0; l < k - 1; ++l) CHECK(f.w_dims[l] == k - l - 1);
    CHECK(*f.depth == k - 2);
    CHECK(f.w_inf_dim == 0);
  }
  // Spelled out: k = 3 vanishes to order 2, k = 4 to order 8.
  carnot::SampleStream rng3(9, 4), rng4(9, 5);
  CHECK(vanishing_order(free_step_two(3), gaussian_covector(free_step_two(3), rng3))
            .value() == 2);
  CHECK(vanishing_order(free_step_two(4), gaussian_covector(free_step_two(4), rng4))
            .value() == 8);
}

TEST_CASE("filtration invariants hold on random covectors") {
  for (const auto& entry : catalog_groups()) {
    CAPTURE(entry.label);
    const StepTwoAlgebra& alg = entry.algebra;
    for (int rep = 0; rep < 6; ++rep) {
      carnot::SampleStream rng(42, rep);
      const Covector cov = gaussian_covector(alg, rng);
      const Filtration f = filtration(alg, cov);

      // The wrapper reports the same order.
      CHECK(vanishing_order(alg, cov) == f.order);

      // Krylov chain grows by at most one and ends on a repeat.
      REQUIRE(f.krylov_dims.size() >= 2);
      CHECK(f.krylov_dims.front() == 0);
      for (std::size_t i = 1; i < f.krylov_dims.size(); ++i) {
        const int step = f.krylov_dims[i] - f.krylov_dims[i - 1];
        CHECK(step >= 0);
        CHECK(step <= 1);
      }
      const auto last = f.krylov_dims.size() - 1;
      CHECK(f.krylov_dims[last] == f.krylov_dims[last - 1]);

      // The W_l and the stable part split the second layer.
      int total = f.w_inf_dim;
      for (int d : f.w_dims) total += d;
      CHECK(total == alg.v2_dim());

      // Bases are orthonormal and the blocks match their declared dims.
      for (std::size_t l = 0; l < f.w_dims.size(); ++l) {
        REQUIRE(static_cast<int>(f.w_bases[l].cols()) == f.w_dims[l]);
        if (f.w_dims[l] == 0) continue;
        const Eigen::MatrixXd gram =
            f.w_bases[l].transpose() * f.w_bases[l];
        CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols()))
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
      }
      CHECK(f.borderline == (f.rank_margin < 10.0));
    }
  }
}

TEST_CASE("rank tolerance decides which stratum a near-degenerate covector joins") {
  const StepTwoAlgebra star = star_graph(2);
  Covector cov{Eigen::Vector3d(2e-10, 1.0, 0.0), Eigen::Vector2d(1.0, 0.0)};

  // Keyed well above the hub coordinate the covector reads as hub-zero.
  Filtration coarse = filtration(star, cov, 1e-6);
  REQUIRE(coarse.order.is_finite());
  CHECK(coarse.order.value() == 2);
  CHECK_FALSE(coarse.borderline);

  // Keyed well below it the covector is generic.
  Filtration fine = filtration(star, cov, 1e-14);
  CHECK(fine.order == JacOrder::finite(0));
  CHECK_FALSE(fine.borderline);

  // At the default tolerance the decision is within a factor 10 of the
  // threshold and gets flagged.
  Filtration close = filtration(star, cov, 1e-10);
  CHECK(close.borderline);
  CHECK(close.rank_margin < 10.0);
  CHECK(close.rank_margin > 0.0);

  CHECK_THROWS_AS(filtration(star, cov, 0.0), input_error);
  CHECK_THROWS_AS(filtration(star, cov, -1e-10), input_error);
}

TEST_CASE("scaling limit matrix on the heisenberg group") {
  const StepTwoAlgebra heis = heisenberg();
  const Covector cov{Eigen::Vector2d(1.0, 0.0), Eigen::VectorXd::Zero(1)};
  const ScalingLimit lim = scaling_limit_matrix(heis, cov);

  REQUIRE(lim.matrix.rows() == 3);
  REQUIRE(lim.matrix.cols() == 3);
  CHECK(lim.det == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  CHECK((lim.matrix.topLeftCorner(2, 2) - Eigen::Matrix2d::Identity())
            .cwiseAbs()
            .maxCoeff() == 0.0);
  // Column W_0 against the first layer carries (1/2) J_{w_0} xi; the basis
  // sign is not pinned so compare magnitudes.
  CHECK(std::abs(lim.matrix(0, 2)) < 1e-15);
  CHECK(std::abs(lim.matrix(1, 2)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(lim.matrix(2, 2) == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  // Row W_0 against the first layer vanishes at l = 0.
  CHECK(std::abs(lim.matrix(2, 0)) < 1e-15);
  CHECK(std::abs(lim.matrix(2, 1)) < 1e-15);
}

TEST_CASE("scaling limit and gram reject stable annihilators") {
  const StepTwoAlgebra star = star_graph(2);
  const Covector bad{Eigen::Vector3d(0.0, 1.0, 0.0), Eigen::Vector2d(0.0, 1.0)};
  CHECK_THROWS_AS(scaling_limit_matrix(star, bad), degenerate_covector_error);
  CHECK_THROWS_AS(hilbert_gram(star, bad), degenerate_covector_error);
}

TEST_CASE("hilbert gram is symmetric positive definite off the degenerate set") {
  const StepTwoAlgebra heis = heisenberg();
  const HilbertGram hg =
      hilbert_gram(heis, {Eigen::Vector2d(1.0, 0.0), Eigen::VectorXd::Zero(1)});
  REQUIRE(hg.matrix.rows() == 1);
  CHECK(hg.matrix(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(hg.min_eigenvalue == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  for (const auto& entry : catalog_groups()) {
    CAPTURE(entry.label);
    const StepTwoAlgebra& alg = entry.algebra;
    for (int rep = 0; rep < 4; ++rep) {
      carnot::SampleStream rng(77, rep);
      const Covector cov = gaussian_covector(alg, rng);
      if (!vanishing_order(alg, cov).is_finite()) continue;
      const HilbertGram g = hilbert_gram(alg, cov);
      REQUIRE(g.matrix.rows() == alg.v2_dim());
      const double asym =
          (g.matrix - g.matrix.transpose()).cwiseAbs().maxCoeff();
      const double scale = std::max(1.0, g.matrix.cwiseAbs().maxCoeff());
      CHECK(asym < 1e-10 * scale);
      CHECK(g.min_eigenvalue > 0.0);
    }
  }
}

TEST_CASE("limit determinant equals the block product formula") {
  // Two independent routes to the leading coefficient: the determinant of
  // the assembled limit matrix against the factorial block product times
  // the gram determinant.
  for (const auto& entry : catalog_groups()) {
    CAPTURE(entry.label);
    const StepTwoAlgebra& alg = entry.algebra;
    for (int rep = 0; rep < 4; ++rep) {
      carnot::SampleStream rng(205, rep);
      const Covector cov = gaussian_covector(alg, rng);
      const Filtration f = filtration(alg, cov);
      if (!f.order.is_finite()) continue;

      const ScalingLimit lim = scaling_limit_matrix(alg, cov);
      const HilbertGram g = hilbert_gram(alg, cov);
      double block = 1.0;
      for (std::size_t l = 0; l < f.w_dims.size(); ++l)
        block *= std::pow((l + 1.0) / std::tgamma(l + 3.0), f.w_dims[l]);
      const double predicted = block * block * g.matrix.determinant();
      CHECK(lim.det == doctest::Approx(predicted).epsilon(1e-9));
      CHECK(lim.det != 0.0);
    }
  }
}

TEST_CASE("default strata enumerate the declared block patterns") {
  // Heisenberg declares no blocks; singleton fallback over q1 = 2 gives
  // 2^2 patterns including full support.
  auto heis_strata = default_strata(heisenberg());
  CHECK(heis_strata.size() == 4);
  int full = 0;
  for (const auto& m : heis_strata)
    if (m.zero_xi.empty() && m.zero_mu.empty()) ++full;
  CHECK(full == 1);

  // Star graphs declare hub and rays: 2 blocks, 4 patterns. One of them
  // zeroes exactly the hub coordinate.
  auto star_strata = default_strata(star_graph(3));
  CHECK(star_strata.size() == 4);
  bool hub_only = false;
  for (const auto& m : star_strata)
    if (m.zero_xi == std::vector<int>{0}) hub_only = true;
  CHECK(hub_only);

  CHECK(default_strata(free_step_two(3)).size() == 8);
}

TEST_CASE("sampled exponents: heisenberg") {
  const StepTwoAlgebra heis = heisenberg();
  const auto rep = group_exponents(heis, 64, default_strata(heis), 7, 2);
  CHECK(rep.n == 3);
  CHECK(rep.q_hom == 4);
  CHECK(rep.min_order == 0);
  CHECK(rep.max_finite_order == 0);
  CHECK(rep.geodesic_dim == 5);
  CHECK(rep.curvature_exp_lower == 5);
  CHECK_FALSE(rep.curvature_exp_exact);
  CHECK(rep.sample_count == 64 + 4 * 8);
  CHECK(rep.seed == 7);
  CHECK(rep.provenance.find("sampled") != std::string::npos);
  CHECK(vanishing_order(heis, rep.witness_min) == JacOrder::finite(0));
}

TEST_CASE("sampled exponents: star graph finds the hub stratum") {
  const StepTwoAlgebra star = star_graph(2);
  const auto rep = group_exponents(star, 128, default_strata(star), 11, 2);
  CHECK(rep.n == 5);
  CHECK(rep.q_hom == 7);
  CHECK(rep.min_order == 0);
  CHECK(rep.max_finite_order == 2);
  CHECK(rep.geodesic_dim == 9);
  CHECK(rep.curvature_exp_lower == 11);
  CHECK(vanishing_order(star, rep.witness_max) == JacOrder::finite(2));
  CHECK(rep.witness_max.xi(0) == 0.0);
}

TEST_CASE("sampled exponents are deterministic across worker counts") {
  const StepTwoAlgebra star = star_graph(2);
  const auto strata = default_strata(star);
  const auto a = group_exponents(star, 48, strata, 99, 1);
  const auto b = group_exponents(star, 48, strata, 99, 4);
  CHECK(a.min_order == b.min_order);
  CHECK(a.max_finite_order == b.max_finite_order);
  CHECK((a.witness_min.xi - b.witness_min.xi).norm() == 0.0);
  CHECK((a.witness_min.mu - b.witness_min.mu).norm() == 0.0);
  CHECK((a.witness_max.xi - b.witness_max.xi).norm() == 0.0);
  CHECK((a.witness_max.mu - b.witness_max.mu).norm() == 0.0);

  const auto c = group_exponents(star, 48, strata, 100, 1);
  CHECK((c.witness_min.xi - a.witness_min.xi).norm() != 0.0);
}

TEST_CASE("sampling rejects empty or fully degenerate plans") {
  const StepTwoAlgebra heis = heisenberg();
  CHECK_THROWS_AS(group_exponents(heis, 0, {}, 1), input_error);
  // A huge rank tolerance wipes out every rank decision, so every sample
  // reads as infinite order and the report is refused.
  CHECK_THROWS_AS(group_exponents(heis, 8, {}, 1, 1, 1e12), input_error);
}

}  // TEST_SUITE
