#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "vidsearch/errors.hpp"
#include "vidsearch/scoring.hpp"

using namespace vidsearch;

TEST_SUITE("scoring") {
  TEST_CASE("query score pooling") {
    const std::vector<double> half{0.5, 0.5};
    for (double tau : {1e-3, 0.1, 1.0, 1e3}) CHECK(query_score(half, tau) == 0.5);
    const std::vector<double> pair{1.0, 0.0};
    const double expect = static_cast<double>(testing::reference_query_score(pair, 0.1L));
    CHECK(std::fabs(query_score(pair, 0.1) - expect) < 1e-12);
    CHECK(query_score(std::vector<double>{}, 0.1) == 0.0);
    CHECK_THROWS_AS(query_score(pair, 0.0), RejectedInput);
    CHECK(std::fabs(query_score(pair, 1e-3) - 1.0) < 1e-3);
    CHECK(std::fabs(query_score(pair, 1e3) - 0.5) < 1e-3);
  }

  TEST_CASE("query score stays between mean and max") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 2000; ++t) {
      std::vector<double> phi(1 + rng() % 8);
      for (double& x : phi) x = u(rng);
      const double tau = std::pow(10.0, u(rng) * 4 - 3);
      const double q = query_score(phi, tau);
      double mean = 0;
      for (double x : phi) mean += x;
      mean /= static_cast<double>(phi.size());
      CHECK(q <= *std::max_element(phi.begin(), phi.end()));
      CHECK(q >= mean - 1e-15);
    }
  }

  TEST_CASE("entropy conventions and reference agreement") {
    CHECK(normalized_entropy(std::vector<double>{0.3}) == 0.0);
    CHECK(normalized_entropy(std::vector<double>{0.3, 0.3, 0.3}, 100.0) == 1.0);
    CHECK_THROWS_AS(normalized_entropy(std::vector<double>{}), RejectedInput);
    CHECK_THROWS_AS(normalized_entropy(std::vector<double>{0.1, INFINITY}), RejectedInput);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 500; ++t) {
      std::vector<double> r(2 + rng() % 6);
      for (double& x : r) x = u(rng);
      for (double scale : {1.0, 10.0}) {
        CHECK(std::fabs(normalized_entropy(r, scale) -
                        static_cast<double>(testing::reference_entropy(r, scale))) < 1e-12);
      }
    }
  }

  TEST_CASE("fusion with one candidate returns r") {
    const std::vector<FusionInput> one{{1, 0.3, 0.9}};
    const auto f = fuse(one, 0.1);
    CHECK(f.context.entropy == 0.0);
    CHECK(f.bundles[0].fused == 0.3);
  }

  TEST_CASE("fusion with equal rewards returns u") {
    const std::vector<FusionInput> in{{1, 0.4, 0.9}, {2, 0.4, 0.1}, {3, 0.4, 0.35}};
    const auto f = fuse(in, 0.1);
    CHECK(f.context.entropy == 1.0);
    for (std::size_t i = 0; i < in.size(); ++i) CHECK(f.bundles[i].fused == in[i].query);
  }

  TEST_CASE("fusion bypass keeps h = r") {
    const std::vector<FusionInput> in{{1, 0.4, 0.9}, {2, 0.4, 0.1}};
    const auto f = fuse(in, 0.1, kDefaultRewardLogitScale, true);
    CHECK(f.context.entropy == 1.0);
    CHECK(f.bundles[0].fused == 0.4);
    CHECK(f.bundles[1].fused == 0.4);
  }

  TEST_CASE("fused score lies between r and u") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 2000; ++t) {
      std::vector<FusionInput> in(1 + rng() % 7);
      for (std::size_t i = 0; i < in.size(); ++i) in[i] = {static_cast<NodeId>(i), u(rng), u(rng)};
      for (const auto& b : fuse(in, 0.1).bundles) {
        CHECK(b.fused >= std::min(b.intrinsic, b.query));
        CHECK(b.fused <= std::max(b.intrinsic, b.query));
      }
    }
    const std::vector<FusionInput> bad{{1, 1.2, 0.1}};
    CHECK_THROWS_AS(fuse(bad, 0.1), RejectedInput);
  }

  TEST_CASE("softmax is shift invariant") {
    const std::vector<double> x{0.1, 0.7, 0.3};
    std::vector<double> y = x;
    for (double& v : y) v += 5.0;
    const auto a = softmax(x, 10.0);
    const auto b = softmax(y, 10.0);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::fabs(a[i] - b[i]) < 1e-12);
  }

  TEST_CASE("intrinsic normalization clamps with a warning") {
    CHECK(normalize_intrinsic(85).value == 0.85);
    CHECK_FALSE(normalize_intrinsic(85).warning);
    const auto over = normalize_intrinsic(140);
    CHECK(over.value == 1.0);
    CHECK(over.warning);
    CHECK(normalize_intrinsic(-3).value == 0.0);
  }
}
