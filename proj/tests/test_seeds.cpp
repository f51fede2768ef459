#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "prc/seeds.hpp"

using namespace prc;

TEST_CASE("splitmix64 scrambles and is deterministic") {
  CHECK(splitmix64(0) == splitmix64(0));
  CHECK(splitmix64(0) != splitmix64(1));
  // Consecutive inputs must not give consecutive outputs.
  CHECK(splitmix64(1) - splitmix64(0) != 1);
}

TEST_CASE("named seed derivation separates streams") {
  const std::uint64_t master = 42;
  std::set<std::uint64_t> seen;
  for (const char* name : {"fiber", "imaging", "coupling", "init_weights",
                           "batch_train", "batch_test", "noise_train",
                           "noise_test"}) {
    seen.insert(derive_seed(master, name));
  }
  CHECK(seen.size() == 8);  // no collisions across the canonical names
  CHECK(derive_seed(master, "fiber") == derive_seed(master, "fiber"));
  CHECK(derive_seed(master, "fiber") != derive_seed(master + 1, "fiber"));
}

TEST_CASE("indexed seed derivation separates epochs and samples") {
  const std::uint64_t base = derive_seed(7, "noise_train");
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(base, i));
  CHECK(seen.size() == 1000);
}

TEST_CASE("uniform01 stays in [0,1) and reproduces per seed") {
  RandomStream a(123), b(123), c(124);
  bool all_in_range = true;
  bool any_diff = false;
  for (int i = 0; i < 10000; ++i) {
    double u = a.uniform01();
    if (!(u >= 0.0 && u < 1.0)) all_in_range = false;
    if (u != b.uniform01()) FAIL("same seed diverged at draw ", i);
    if (u != c.uniform01()) any_diff = true;
  }
  CHECK(all_in_range);
  CHECK(any_diff);
}

TEST_CASE("uniform_index covers its range without excess") {
  RandomStream rng(9);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    std::uint64_t k = rng.uniform_index(7);
    REQUIRE(k < 7);
    ++counts[static_cast<int>(k)];
  }
  for (int c : counts) {
    CHECK(c > 9000);  // each bucket within ~10% of the expected 10000
    CHECK(c < 11000);
  }
}

TEST_CASE("gaussian moments match the standard normal") {
  RandomStream rng(2024);
  const int n = 200000;
  double s = 0, s2 = 0, s3 = 0;
  for (int i = 0; i < n; ++i) {
    double g = rng.gaussian();
    s += g;
    s2 += g * g;
    s3 += g * g * g;
  }
  double mean = s / n;
  double var = s2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
  CHECK(std::abs(s3 / n) < 0.05);  // symmetry
}

TEST_CASE("circular gaussian has unit total variance and isotropy") {
  RandomStream rng(5);
  const int n = 100000;
  double p = 0, re = 0, im = 0, cross = 0;
  for (int i = 0; i < n; ++i) {
    std::complex<double> z = rng.circular_gaussian();
    p += std::norm(z);
    re += z.real();
    im += z.imag();
    cross += z.real() * z.imag();
  }
  CHECK(std::abs(p / n - 1.0) < 0.02);       // E|z|^2 = 1
  CHECK(std::abs(re / n) < 0.01);
  CHECK(std::abs(im / n) < 0.01);
  CHECK(std::abs(cross / n) < 0.01);         // quadratures uncorrelated
}
