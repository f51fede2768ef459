#include "prc/tasks.hpp"

#include <cmath>
#include <stdexcept>

#include "prc/pipeline.hpp"
#include "prc/seeds.hpp"

namespace prc {

void TaskSpec::validate() const {
  if (n_bits < 1 || n_bits > 16)
    throw std::invalid_argument("task n_bits must be in [1, 16]");
  if (kind == TaskKind::Xor && n_bits != 2)
    throw std::invalid_argument("xor task is defined for exactly 2 bits");
  if (kind == TaskKind::Header &&
      (header_digit < 0 || header_digit >= n_digits()))
    throw std::invalid_argument("header_digit out of range for n_bits");
}

std::string task_name(TaskKind k) {
  switch (k) {
    case TaskKind::Header: return "header";
    case TaskKind::Xor: return "xor";
    case TaskKind::Dac: return "dac";
  }
  return "?";
}

TaskKind parse_task(const std::string& name) {
  if (name == "header") return TaskKind::Header;
  if (name == "xor") return TaskKind::Xor;
  if (name == "dac") return TaskKind::Dac;
  throw std::invalid_argument("unknown task '" + name + "'");
}

double target(const TaskSpec& spec, int digit) {
  spec.validate();
  if (digit < 0 || digit >= spec.n_digits())
    throw std::invalid_argument("digit out of range");
  switch (spec.kind) {
    case TaskKind::Header:
      return digit == spec.header_digit ? 1.0 : 0.0;
    case TaskKind::Xor:
      return static_cast<double>((digit ^ (digit >> 1)) & 1);
    case TaskKind::Dac:
      return static_cast<double>(digit) /
             static_cast<double>(spec.n_digits() - 1);
  }
  return 0.0;
}

namespace {

LabeledBatch finish(const TaskSpec& spec, std::vector<int> digits) {
  LabeledBatch b;
  b.targets.reserve(digits.size());
  for (int d : digits) b.targets.push_back(target(spec, d));
  b.digits = std::move(digits);
  return b;
}

}  // namespace

LabeledBatch generate_train_batch(const TaskSpec& spec, int size,
                                  std::uint64_t seed) {
  spec.validate();
  if (size < 2) throw std::invalid_argument("batch size must be >= 2");
  RandomStream rng(seed);
  std::vector<int> digits;
  digits.reserve(size);

  if (spec.kind == TaskKind::Header) {
    const int n_pos = (size + 1) / 2;
    for (int i = 0; i < n_pos; ++i) digits.push_back(spec.header_digit);
    const int n_other = spec.n_digits() - 1;
    for (int i = n_pos; i < size; ++i) {
      int d = static_cast<int>(rng.uniform_index(n_other));
      if (d >= spec.header_digit) ++d;  // skip the header pattern
      digits.push_back(d);
    }
    // Fisher-Yates so class positions carry no information.
    for (int i = size - 1; i > 0; --i) {
      int j = static_cast<int>(rng.uniform_index(i + 1));
      std::swap(digits[i], digits[j]);
    }
  } else {
    if (size < spec.n_digits())
      throw std::invalid_argument("batch size smaller than digit alphabet");
    for (int i = 0; i < size; ++i)
      digits.push_back(static_cast<int>(rng.uniform_index(spec.n_digits())));
  }
  return finish(spec, std::move(digits));
}

LabeledBatch generate_test_batch(const TaskSpec& spec, int size,
                                 std::uint64_t seed) {
  spec.validate();
  if (size < 2) throw std::invalid_argument("batch size must be >= 2");
  RandomStream rng(seed);
  std::vector<int> digits;
  digits.reserve(size);
  for (int i = 0; i < size; ++i)
    digits.push_back(static_cast<int>(rng.uniform_index(spec.n_digits())));
  return finish(spec, std::move(digits));
}

Metrics evaluate(const ReadoutWeights& weights, const TaskSpec& spec,
                 const LabeledBatch& batch, const Pipeline& pipeline,
                 const FrozenCalibration& calib, std::uint64_t noise_seed) {
  spec.validate();
  const int n = batch.size();
  if (n < 2) throw std::invalid_argument("evaluate: batch too small");

  const TargetLevels levels{normalize(0.0, calib.targets),
                            normalize(1.0, calib.targets)};

  int errors = 0;
  double resid_sum = 0.0, resid_sq = 0.0;
  double tgt_sum = 0.0, tgt_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    RandomStream rng(derive_seed(noise_seed, static_cast<std::uint64_t>(i)));
    Eigen::VectorXd p = pipeline.noisy_powers(batch.digits[i], rng);
    double y = normalize(raw_output(weights, p), calib.output);

    if (spec.is_classification()) {
      int truth = batch.targets[i] > 0.5 ? 1 : 0;
      if (threshold_classify(y, levels) != truth) ++errors;
    }
    // Back to target units with the frozen training-time scale.
    double y_hat = y * calib.targets.sigma + calib.targets.mu;
    double r = y_hat - batch.targets[i];
    resid_sum += r;
    resid_sq += r * r;
    tgt_sum += batch.targets[i];
    tgt_sq += batch.targets[i] * batch.targets[i];
  }

  Metrics m;
  m.n_samples = n;
  m.ser = spec.is_classification() ? static_cast<double>(errors) / n : 0.0;
  const double mean_r = resid_sum / n;
  double var_r = resid_sq / n - mean_r * mean_r;
  m.residual_std = std::sqrt(var_r > 0.0 ? var_r : 0.0);
  const double mean_t = tgt_sum / n;
  double var_t = tgt_sq / n - mean_t * mean_t;
  m.nmse = var_t > 0.0 ? (resid_sq / n) / var_t : 0.0;
  return m;
}

}  // namespace prc
