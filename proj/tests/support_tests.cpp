#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "carnot/parallel.hpp"
#include "carnot/rng.hpp"
#include "doctest.h"

using namespace carnot;

TEST_SUITE("support") {

TEST_CASE("parallel_for covers every index exactly once") {
  for (unsigned workers : {0u, 1u, 3u, 8u}) {
    CAPTURE(workers);
    const std::size_t n = 1237;
    std::vector<int> hits(n, 0);
    parallel_for(n, workers, [&](std::size_t i) { ++hits[i]; });
    CHECK(std::accumulate(hits.begin(), hits.end(), 0) ==
          static_cast<int>(n));
    CHECK(*std::min_element(hits.begin(), hits.end()) == 1);
  }

  // Empty ranges are a no-op.
  std::atomic<int> calls{0};
  parallel_for(0, 4, [&](std::size_t) { ++calls; });
  CHECK(calls.load() == 0);
}

TEST_CASE("parallel_for propagates the worker exception") {
  CHECK_THROWS_AS(parallel_for(64, 4,
                               [](std::size_t i) {
                                 if (i == 17)
                                   throw std::runtime_error("boom");
                               }),
                  std::runtime_error);

  // The pool joins before rethrowing: every non-throwing index still ran.
  std::vector<std::atomic<int>> hits(8);
  try {
    parallel_for(8, 2, [&](std::size_t i) {
      if (i == 3) throw std::runtime_error("boom");
      ++hits[i];
    });
  } catch (const std::runtime_error&) {
  }
  int total = 0;
  for (const auto& h : hits) total += h.load();
  CHECK(total == 7);
}

TEST_CASE("resolve_workers maps zero to the hardware parallelism") {
  CHECK(resolve_workers(1) == 1);
  CHECK(resolve_workers(5) == 5);
  CHECK(resolve_workers(0) >= 1);
}

TEST_CASE("pairwise_sum agrees with extended-precision accumulation") {
  SampleStream rng(1234, 0);
  std::vector<double> data(10001);
  long double exact = 0.0L;
  for (auto& v : data) {
    v = rng.gaussian() * 1e6 + 1e-6;
    exact += static_cast<long double>(v);
  }
  const double got = pairwise_sum(data.data(), data.size());
  CHECK(std::abs(got - static_cast<double>(exact)) <
        1e-9 * std::abs(static_cast<double>(exact)) + 1e-6);

  CHECK(pairwise_sum(data.data(), 0) == 0.0);
  CHECK(pairwise_sum(data.data(), 1) == data[0]);
  const double tiny[3] = {1.0, 2.0, 3.0};
  CHECK(pairwise_sum(tiny, 3) == 6.0);
}

TEST_CASE("sample streams are reproducible and index-independent") {
  SampleStream a(99, 7), b(99, 7);
  for (int i = 0; i < 16; ++i) CHECK(a.gaussian() == b.gaussian());

  // Different indices, and different seeds, give different streams.
  SampleStream c(99, 8), d(100, 7), base(99, 7);
  bool index_differs = false, seed_differs = false;
  for (int i = 0; i < 8; ++i) {
    const double r = base.gaussian();
    if (c.gaussian() != r) index_differs = true;
    if (d.gaussian() != r) seed_differs = true;
  }
  CHECK(index_differs);
  CHECK(seed_differs);

  // Drawing from one stream never disturbs another.
  SampleStream e(5, 1), f(5, 2), e2(5, 1);
  (void)f.gaussian();
  (void)f.gaussian();
  for (int i = 0; i < 4; ++i) CHECK(e.gaussian() == e2.gaussian());
}

TEST_CASE("uniform draws respect their bounds") {
  SampleStream rng(321, 4);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 4000; ++i) {
    const double u = rng.uniform(-0.25, 0.75);
    CHECK(u >= -0.25);
    CHECK(u < 0.75);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  // The draws actually spread over the interval.
  CHECK(lo < -0.2);
  CHECK(hi > 0.7);
}

}  // TEST_SUITE
