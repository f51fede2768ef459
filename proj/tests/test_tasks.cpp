#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "prc/errors.hpp"
#include "prc/pipeline.hpp"
#include "prc/seeds.hpp"
#include "prc/tasks.hpp"

using namespace prc;

namespace {

PipelineConfig tiny_pipeline_config() {
  PipelineConfig cfg;
  cfg.encoder.grid_side = 32;
  cfg.encoder.disc_diameter = 30;
  cfg.encoder.ring_thickness = 4;
  cfg.encoder.n_bits = 2;
  cfg.encoder.illumination_waist = 16.0;
  cfg.modes = 12;
  cfg.reservoir.n_nodes = 16;
  cfg.fiber_seed = 301;
  cfg.imaging_seed = 302;
  cfg.reservoir.seed = 303;
  return cfg;
}

}  // namespace

TEST_CASE("task validation") {
  TaskSpec bad;
  bad.kind = TaskKind::Xor;
  bad.n_bits = 3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = TaskSpec{};
  bad.header_digit = 4;  // out of range for 2 bits
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.header_digit = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = TaskSpec{};
  bad.n_bits = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.n_bits = 17;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  TaskSpec ok;
  CHECK_NOTHROW(ok.validate());
  CHECK(ok.n_digits() == 4);
  CHECK(ok.is_classification());
  ok.kind = TaskKind::Dac;
  CHECK_FALSE(ok.is_classification());
}

TEST_CASE("task names round-trip") {
  for (TaskKind k : {TaskKind::Header, TaskKind::Xor, TaskKind::Dac})
    CHECK(parse_task(task_name(k)) == k);
  CHECK_THROWS_AS(parse_task("parity"), std::invalid_argument);
}

TEST_CASE("target truth tables") {
  TaskSpec header;  // recognizes digit 3
  CHECK(target(header, 0) == 0.0);
  CHECK(target(header, 1) == 0.0);
  CHECK(target(header, 2) == 0.0);
  CHECK(target(header, 3) == 1.0);

  TaskSpec x;
  x.kind = TaskKind::Xor;
  CHECK(target(x, 0) == 0.0);
  CHECK(target(x, 1) == 1.0);
  CHECK(target(x, 2) == 1.0);
  CHECK(target(x, 3) == 0.0);

  TaskSpec dac;
  dac.kind = TaskKind::Dac;
  CHECK(target(dac, 0) == 0.0);
  CHECK(target(dac, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(target(dac, 2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(target(dac, 3) == 1.0);

  TaskSpec dac3;
  dac3.kind = TaskKind::Dac;
  dac3.n_bits = 3;
  for (int d = 0; d < 8; ++d)
    CHECK(target(dac3, d) == doctest::Approx(d / 7.0).epsilon(1e-15));

  CHECK_THROWS_AS(target(header, 4), std::invalid_argument);
  CHECK_THROWS_AS(target(header, -1), std::invalid_argument);
}

TEST_CASE("header batches are balanced to the sample") {
  TaskSpec spec;
  spec.header_digit = 0;
  for (int size : {50, 51}) {
    LabeledBatch b = generate_train_batch(spec, size, 42);
    REQUIRE(b.size() == size);
    int positives = 0;
    for (int i = 0; i < size; ++i) {
      if (b.digits[i] == 0) ++positives;
      // Negatives must come from the other digits only.
      REQUIRE(b.digits[i] >= 0);
      REQUIRE(b.digits[i] < 4);
      REQUIRE(b.targets[i] == target(spec, b.digits[i]));
    }
    CHECK(positives == (size + 1) / 2);
  }
  // Deterministic per seed; the shuffle really depends on the seed.
  LabeledBatch a1 = generate_train_batch(spec, 50, 42);
  LabeledBatch a2 = generate_train_batch(spec, 50, 42);
  LabeledBatch a3 = generate_train_batch(spec, 50, 43);
  CHECK(a1.digits == a2.digits);
  CHECK(a1.digits != a3.digits);
}

TEST_CASE("negatives cover the whole remaining alphabet") {
  TaskSpec spec;
  spec.header_digit = 2;
  LabeledBatch b = generate_train_batch(spec, 2000, 7);
  std::array<int, 4> counts{};
  for (int d : b.digits) ++counts[static_cast<std::size_t>(d)];
  CHECK(counts[2] == 1000);
  // Each other digit gets roughly a third of the 1000 negatives.
  for (int d : {0, 1, 3}) {
    CHECK(counts[static_cast<std::size_t>(d)] > 250);
    CHECK(counts[static_cast<std::size_t>(d)] < 420);
  }
}

TEST_CASE("uniform tasks draw evenly") {
  TaskSpec x;
  x.kind = TaskKind::Xor;
  LabeledBatch b = generate_train_batch(x, 4000, 11);
  std::array<int, 4> counts{};
  for (int d : b.digits) ++counts[static_cast<std::size_t>(d)];
  // 1000 expected per digit, sd ~27: a +-100 band is ~3.7 sigma.
  for (int d = 0; d < 4; ++d) {
    CHECK(counts[static_cast<std::size_t>(d)] >= 900);
    CHECK(counts[static_cast<std::size_t>(d)] <= 1100);
  }

  TaskSpec spec;  // header test batches are uniform too
  LabeledBatch t = generate_test_batch(spec, 4000, 12);
  counts = {};
  for (int d : t.digits) ++counts[static_cast<std::size_t>(d)];
  for (int d = 0; d < 4; ++d) {
    CHECK(counts[static_cast<std::size_t>(d)] >= 900);
    CHECK(counts[static_cast<std::size_t>(d)] <= 1100);
  }
  CHECK(generate_test_batch(spec, 4000, 12).digits == t.digits);
}

TEST_CASE("batch size limits") {
  TaskSpec dac;
  dac.kind = TaskKind::Dac;
  // A uniform task cannot even represent its alphabet in fewer samples.
  CHECK_THROWS_AS(generate_train_batch(dac, 3, 1), std::invalid_argument);
  CHECK_NOTHROW(generate_train_batch(dac, 4, 1));
  TaskSpec header;
  CHECK_THROWS_AS(generate_train_batch(header, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_test_batch(header, 1, 1), std::invalid_argument);
}

TEST_CASE("scoring matches a sample-by-sample recomputation") {
  Pipeline pipe = Pipeline::build(tiny_pipeline_config());

  TaskSpec spec;  // header(3)
  LabeledBatch batch = generate_test_batch(spec, 64, 99);

  // Any frozen calibration works for the comparison; derive one from the
  // clean responses of a training batch, like the harness would.
  RandomStream wrng(5);
  ReadoutWeights w = ReadoutWeights::random(16, wrng);
  LabeledBatch train = generate_train_batch(spec, 32, 17);
  std::vector<double> raw(32), tgt(train.targets);
  for (int i = 0; i < 32; ++i)
    raw[static_cast<std::size_t>(i)] =
        raw_output(w, pipe.clean_powers(train.digits[static_cast<std::size_t>(i)]));
  FrozenCalibration calib{calibrate(raw), calibrate(tgt)};

  const std::uint64_t noise_seed = 777;
  Metrics got = evaluate(w, spec, batch, pipe, calib, noise_seed);

  // Independent pass over the same public pieces.
  TargetLevels levels{normalize(0.0, calib.targets),
                      normalize(1.0, calib.targets)};
  int errors = 0;
  double rs = 0.0, rss = 0.0, ts = 0.0, tss = 0.0;
  const int n = batch.size();
  for (int i = 0; i < n; ++i) {
    RandomStream rng(derive_seed(noise_seed, static_cast<std::uint64_t>(i)));
    Eigen::VectorXd p = pipe.noisy_powers(batch.digits[static_cast<std::size_t>(i)], rng);
    double y = normalize(raw_output(w, p), calib.output);
    int truth = batch.targets[static_cast<std::size_t>(i)] > 0.5 ? 1 : 0;
    if (threshold_classify(y, levels) != truth) ++errors;
    double y_hat = y * calib.targets.sigma + calib.targets.mu;
    double r = y_hat - batch.targets[static_cast<std::size_t>(i)];
    rs += r;
    rss += r * r;
    ts += batch.targets[static_cast<std::size_t>(i)];
    tss += batch.targets[static_cast<std::size_t>(i)] *
           batch.targets[static_cast<std::size_t>(i)];
  }
  double want_ser = static_cast<double>(errors) / n;
  double var_r = rss / n - (rs / n) * (rs / n);
  double want_resid = std::sqrt(var_r > 0 ? var_r : 0);
  double var_t = tss / n - (ts / n) * (ts / n);
  double want_nmse = (rss / n) / var_t;

  CHECK(got.n_samples == n);
  CHECK(got.ser == doctest::Approx(want_ser).epsilon(1e-15));
  CHECK(got.residual_std == doctest::Approx(want_resid).epsilon(1e-12));
  CHECK(got.nmse == doctest::Approx(want_nmse).epsilon(1e-12));

  // Deterministic in the noise seed, sensitive to it.
  Metrics again = evaluate(w, spec, batch, pipe, calib, noise_seed);
  CHECK(again.ser == got.ser);
  CHECK(again.residual_std == got.residual_std);
  Metrics other = evaluate(w, spec, batch, pipe, calib, noise_seed + 1);
  CHECK(other.residual_std != got.residual_std);
}

TEST_CASE("noise-free scoring ignores the noise seed") {
  PipelineConfig cfg = tiny_pipeline_config();
  cfg.reservoir.noise_sigma = 0.0;
  Pipeline pipe = Pipeline::build(cfg);
  TaskSpec spec;
  spec.kind = TaskKind::Dac;
  LabeledBatch batch = generate_test_batch(spec, 32, 4);
  RandomStream wrng(6);
  ReadoutWeights w = ReadoutWeights::random(16, wrng);
  std::vector<double> raw(4);
  for (int d = 0; d < 4; ++d)
    raw[static_cast<std::size_t>(d)] = raw_output(w, pipe.clean_powers(d));
  std::vector<double> tgts{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  FrozenCalibration calib{calibrate(raw), calibrate(tgts)};
  Metrics a = evaluate(w, spec, batch, pipe, calib, 1);
  Metrics b = evaluate(w, spec, batch, pipe, calib, 2);
  CHECK(a.residual_std == b.residual_std);
  CHECK(a.nmse == b.nmse);
  CHECK(a.ser == 0.0);  // analogue task: no symbol decisions
}

TEST_CASE("construction fails loudly when the solver cannot settle") {
  PipelineConfig cfg = tiny_pipeline_config();
  cfg.reservoir.max_iters = 1;
  CHECK_THROWS_AS(Pipeline::build(cfg), NonConvergenceError);
}
