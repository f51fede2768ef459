#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prc/readout.hpp"

namespace prc {

class Pipeline;

// The three benchmark tasks over n-bit digits:
//   header: 1 iff the digit equals a chosen pattern, else 0
//   xor:    parity of the two bits (2-bit only)
//   dac:    digit-to-analogue, digit / (2^n - 1) in [0, 1]
enum class TaskKind { Header, Xor, Dac };

struct TaskSpec {
  TaskKind kind = TaskKind::Header;
  int n_bits = 2;
  int header_digit = 3;  // the pattern the header task recognizes

  int n_digits() const { return 1 << n_bits; }
  bool is_classification() const { return kind != TaskKind::Dac; }
  void validate() const;  // throws std::invalid_argument
};

std::string task_name(TaskKind k);
TaskKind parse_task(const std::string& name);  // throws std::invalid_argument

double target(const TaskSpec& spec, int digit);

struct LabeledBatch {
  std::vector<int> digits;
  std::vector<double> targets;

  int size() const { return static_cast<int>(digits.size()); }
};

// Training batch. Header batches are balanced (ceil(size/2) positives, the
// rest uniform over the remaining digits) so the rare positive class is not
// drowned out; uniform tasks draw digits iid. Shuffled, deterministic in
// `seed`.
LabeledBatch generate_train_batch(const TaskSpec& spec, int size,
                                  std::uint64_t seed);

// Test batch: digits iid uniform for every task.
LabeledBatch generate_test_batch(const TaskSpec& spec, int size,
                                 std::uint64_t seed);

// Normalizers frozen at training time. Tests must not peek at test-batch
// statistics: outputs are standardized with the training output normalizer
// and mapped back to target units with the training target normalizer.
struct FrozenCalibration {
  Normalizer output;
  Normalizer targets;
};

struct Metrics {
  double ser = 0.0;           // symbol error rate (classification tasks)
  double residual_std = 0.0;  // std of the residual, in target units
  double nmse = 0.0;          // mse / variance of the batch targets
  int n_samples = 0;
  int n_repeats = 1;          // batches aggregated into this record
};

// Score frozen weights on a labeled batch. Per-sample detection noise
// streams are derived from noise_seed and the sample index, so the score is
// independent of evaluation order.
Metrics evaluate(const ReadoutWeights& weights, const TaskSpec& spec,
                 const LabeledBatch& batch, const Pipeline& pipeline,
                 const FrozenCalibration& calib, std::uint64_t noise_seed);

}  // namespace prc
