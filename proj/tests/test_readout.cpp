#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "prc/errors.hpp"
#include "prc/readout.hpp"
#include "prc/seeds.hpp"

using namespace prc;

TEST_CASE("raw output is the masked detector sum") {
  Eigen::VectorXd p(4);
  p << 1.0, 2.0, 3.0, 4.0;
  ReadoutWeights none{{0, 0, 0, 0}};
  ReadoutWeights all{{1, 1, 1, 1}};
  ReadoutWeights one{{0, 0, 1, 0}};
  CHECK(raw_output(none, p) == 0.0);
  CHECK(raw_output(all, p) == 10.0);
  CHECK(raw_output(one, p) == 3.0);
  ReadoutWeights wrong{{1, 1}};
  CHECK_THROWS_AS(raw_output(wrong, p), std::invalid_argument);
}

TEST_CASE("raw output is additive over disjoint masks and monotone") {
  RandomStream rng(17);
  Eigen::VectorXd p(32);
  for (int i = 0; i < 32; ++i) p[i] = rng.uniform(0.0, 5.0);
  ReadoutWeights a, b, both;
  a.w.assign(32, 0);
  b.w.assign(32, 0);
  for (int i = 0; i < 32; ++i)
    (i % 2 ? a : b).w[i] = static_cast<std::uint8_t>(rng.uniform_index(2));
  both.w.resize(32);
  for (int i = 0; i < 32; ++i) both.w[i] = a.w[i] | b.w[i];
  CHECK(raw_output(both, p) ==
        doctest::Approx(raw_output(a, p) + raw_output(b, p)).epsilon(1e-12));
  // Turning on one more non-negative detector can only raise the sum.
  ReadoutWeights more = a;
  for (int i = 0; i < 32; ++i)
    if (!more.w[i]) {
      more.w[i] = 1;
      break;
    }
  CHECK(raw_output(more, p) >= raw_output(a, p));
}

TEST_CASE("calibration uses population statistics") {
  std::vector<double> raw{0.0, 2.0};
  Normalizer n = calibrate(raw);
  CHECK(n.mu == 1.0);
  CHECK(n.sigma == 1.0);  // population std of {0, 2}
  CHECK(normalize(0.0, n) == -1.0);
  CHECK(normalize(2.0, n) == 1.0);

  std::vector<double> tri{1.0, 2.0, 3.0};
  Normalizer m = calibrate(tri);
  CHECK(m.mu == doctest::Approx(2.0));
  CHECK(m.sigma == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("degenerate batches are typed errors") {
  std::vector<double> flat{3.0, 3.0, 3.0};
  CHECK_THROWS_AS(calibrate(flat), DegenerateBatchError);
  std::vector<double> single{1.0};
  CHECK_THROWS_AS(calibrate(single), DegenerateBatchError);
  std::vector<double> empty;
  CHECK_THROWS_AS(calibrate(empty), DegenerateBatchError);
}

TEST_CASE("standardized data re-calibrates to the identity") {
  RandomStream rng(5);
  std::vector<double> raw(64);
  for (double& v : raw) v = rng.uniform(-3.0, 9.0);
  Normalizer n = calibrate(raw);
  std::vector<double> z(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) z[i] = normalize(raw[i], n);
  Normalizer id = calibrate(z);
  CHECK(std::abs(id.mu) <= 1e-12);
  CHECK(std::abs(id.sigma - 1.0) <= 1e-12);
}

TEST_CASE("calibration is affine-equivariant") {
  RandomStream rng(6);
  std::vector<double> raw(40), scaled(40);
  const double a = 2.5, b = -7.0;
  for (int i = 0; i < 40; ++i) {
    raw[i] = rng.uniform(0.0, 1.0);
    scaled[i] = a * raw[i] + b;
  }
  Normalizer n = calibrate(raw);
  Normalizer m = calibrate(scaled);
  // Standardized values are invariant under positive affine maps.
  for (int i = 0; i < 40; ++i)
    CHECK(normalize(raw[i], n) ==
          doctest::Approx(normalize(scaled[i], m)).epsilon(1e-10));
}

TEST_CASE("threshold decision is strict at the midpoint") {
  TargetLevels lv{-1.0, 1.0};
  CHECK(threshold_classify(0.0, lv) == 0);   // midpoint goes low
  CHECK(threshold_classify(1e-12, lv) == 1);
  CHECK(threshold_classify(-5.0, lv) == 0);
  CHECK(threshold_classify(5.0, lv) == 1);
  TargetLevels shifted{2.0, 6.0};
  CHECK(threshold_classify(4.0, shifted) == 0);
  CHECK(threshold_classify(4.5, shifted) == 1);
  // The level order must not matter: the midpoint is symmetric.
  TargetLevels swapped{6.0, 2.0};
  CHECK(threshold_classify(4.5, swapped) == threshold_classify(4.5, shifted));
}

TEST_CASE("decisions survive a positive affine rescale of everything") {
  RandomStream rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    double y = rng.uniform(-2.0, 2.0);
    TargetLevels lv{rng.uniform(-1.0, 0.4), rng.uniform(0.6, 2.0)};
    double a = rng.uniform(0.1, 4.0);
    double b = rng.uniform(-5.0, 5.0);
    TargetLevels lv2{a * lv.lo + b, a * lv.hi + b};
    REQUIRE(threshold_classify(y, lv) ==
            threshold_classify(a * y + b, lv2));
  }
}

TEST_CASE("random weights are reproducible coin flips") {
  RandomStream rng1(123), rng2(123), rng3(124);
  ReadoutWeights w1 = ReadoutWeights::random(131, rng1);
  ReadoutWeights w2 = ReadoutWeights::random(131, rng2);
  ReadoutWeights w3 = ReadoutWeights::random(131, rng3);
  CHECK(w1 == w2);
  CHECK_FALSE(w1 == w3);
  REQUIRE(w1.size() == 131);
  int ones = 0;
  for (std::uint8_t b : w1.w) {
    REQUIRE((b == 0 || b == 1));
    ones += b;
  }
  // A fair coin over 131 flips stays far from both rails.
  CHECK(ones > 30);
  CHECK(ones < 101);
  ReadoutWeights f = w1;
  f.flip(7);
  CHECK(f.w[7] == (1 ^ w1.w[7]));
  f.flip(7);
  CHECK(f == w1);
}
