#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "tvgam/logistic.hpp"
#include "tvgam/parallel.hpp"
#include "tvgam/rng.hpp"
#include "tvgam/stats.hpp"

using namespace tvgam;

TEST_CASE("derive_seed separates purposes and indices") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t purpose = 0; purpose < 8; ++purpose) {
    for (std::uint64_t index = 0; index < 64; ++index) {
      seen.insert(derive_seed(42, purpose, index));
    }
  }
  CHECK(seen.size() == 8 * 64);
  CHECK(derive_seed(42, 3, 5) == derive_seed(42, 3, 5));
  CHECK(derive_seed(42, 3, 5) != derive_seed(43, 3, 5));
}

TEST_CASE("Rng streams are reproducible and in range") {
  Rng a(7), b(7);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next() == b.next());

  Rng r(11);
  std::vector<std::size_t> hits(10, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const auto k = r.below(10);
    REQUIRE(k < 10);
    ++hits[k];
  }
  for (auto h : hits) CHECK(std::abs(static_cast<double>(h) - 10000.0) < 500.0);
  CHECK(r.below(0) == 0);
  CHECK(r.below(1) == 0);
}

TEST_CASE("Rng normal has unit moments") {
  Rng r(3);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("mean, sample_sd and type-7 quantile") {
  const std::vector<double> v = {4.0, 1.0, 3.0, 2.0};
  CHECK(mean(v) == doctest::Approx(2.5));
  CHECK(sample_sd(v) == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(sample_sd(std::vector<double>{1.0}) == 0.0);
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 4.0);
  CHECK(quantile(v, 0.5) == doctest::Approx(2.5));
  // h = (n - 1) q = 0.75 -> 1 + 0.75 * (2 - 1)
  CHECK(quantile(v, 0.25) == doctest::Approx(1.75));
}

TEST_CASE("bag_band switches from normal to percentile bounds") {
  std::vector<double> few(kPercentileMinBags - 1);
  std::iota(few.begin(), few.end(), 0.0);
  const Band normal = bag_band(few);
  CHECK(normal.mean == doctest::Approx(mean(few)));
  CHECK(normal.upper - normal.mean == doctest::Approx(1.96 * sample_sd(few)));
  CHECK(normal.mean - normal.lower == doctest::Approx(1.96 * sample_sd(few)));

  std::vector<double> many(40);
  std::iota(many.begin(), many.end(), 0.0);
  const Band pct = bag_band(many);
  CHECK(pct.lower == doctest::Approx(quantile(many, 0.025)));
  CHECK(pct.upper == doctest::Approx(quantile(many, 0.975)));

  const Band scaled = bag_band(many, 2.0);
  CHECK(scaled.mean == doctest::Approx(pct.mean));
  CHECK(scaled.upper - scaled.mean == doctest::Approx(2.0 * (pct.upper - pct.mean)));
  CHECK(scaled.mean - scaled.lower == doctest::Approx(2.0 * (pct.mean - pct.lower)));
}

TEST_CASE("band contains the mean for skewed replicates") {
  std::vector<double> skew(25, 0.0);
  skew.back() = 100.0;
  const Band b = bag_band(skew);
  CHECK(b.lower <= b.mean);
  CHECK(b.mean <= b.upper);
}

TEST_CASE("logistic helpers are stable at extreme logits") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(std::isfinite(softplus(800.0)));
  CHECK(softplus(800.0) == doctest::Approx(800.0));
  CHECK(softplus(-800.0) == doctest::Approx(0.0));
  CHECK(logistic_loss(1.0, 0.0) == doctest::Approx(std::log(2.0)));
  CHECK(logit(sigmoid(1.3)) == doctest::Approx(1.3));
}

TEST_CASE("logistic residual matches a central difference of the loss") {
  Rng r(5);
  for (int i = 0; i < 200; ++i) {
    const double z = 8.0 * (r.uniform() - 0.5);
    const double y = r.bernoulli(0.5) ? 1.0 : 0.0;
    const double h = 1e-5;
    const double fd = -(logistic_loss(y, z + h) - logistic_loss(y, z - h)) / (2.0 * h);
    const double exact = logistic_residual(y, z);
    REQUIRE(std::abs(fd - exact) <= 1e-5 * std::max(1.0, std::abs(exact)));
  }
}

TEST_CASE("parallel_for visits each index once and rethrows") {
  for (unsigned threads : {1u, 3u, 8u}) {
    std::vector<int> visits(100, 0);
    parallel_for(visits.size(), threads, [&](std::size_t i) { visits[i] += 1; });
    CHECK(std::all_of(visits.begin(), visits.end(), [](int v) { return v == 1; }));
  }
  CHECK_THROWS_AS(parallel_for(10, 4,
                               [](std::size_t i) {
                                 if (i == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}
