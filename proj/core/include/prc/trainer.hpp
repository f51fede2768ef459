#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "prc/readout.hpp"

namespace prc {

struct TrainerConfig {
  int batch_size = 50;
  double target_eps = 2e-2;
  int max_epochs = 30000;
  std::uint64_t seed = 0;       // initial weights and flip choices
  bool resample_batch = false;  // draw a fresh batch every epoch
  bool stall_stop = true;       // stop once every index was rejected

  void validate() const;  // throws std::invalid_argument
};

// One batch evaluation of a candidate weight vector: standardized outputs,
// their mean-square error against the standardized targets, and the
// normalizers that were used (the harness freezes the incumbent's for
// testing).
struct BatchEval {
  std::vector<double> y_out;
  double eps = 0.0;
  Normalizer out_norm;
  Normalizer target_norm;
};

// The trainer is generic over how a weight vector is scored; `epoch` lets
// the evaluator vary detection noise (or the batch itself) per epoch while
// staying reproducible.
using BatchEvaluator =
    std::function<BatchEval(const ReadoutWeights&, int epoch)>;

enum class StopReason { Threshold, Stall, MaxEpochs };

struct EpochRecord {
  double eps;         // incumbent error after this epoch
  int flipped_index;  // -1 for the initial evaluation
  bool accepted;
};

struct TrainingTrace {
  std::vector<EpochRecord> epochs;  // epochs[0] is the initial evaluation
  StopReason stop_reason = StopReason::MaxEpochs;
  int epochs_used = 0;      // flip epochs actually executed
  int accepted_count = 0;   // including the initial evaluation
  double final_eps = 0.0;
};

struct TrainResult {
  ReadoutWeights weights;  // incumbent == best, by strict-decrease acceptance
  TrainingTrace trace;
  Normalizer out_norm;     // from the incumbent's last accepted evaluation
  Normalizer target_norm;
};

// Mean squared error between two equal-length series.
double mse(std::span<const double> y_out, std::span<const double> y_target);

// Greedy single-flip descent: start from seeded random Boolean weights, flip
// one uniformly-chosen weight per epoch, keep the flip iff the error
// strictly decreases, otherwise restore the bit exactly. Stops when the
// error reaches target_eps, when every index has been flipped and rejected
// since the last accept (a one-flip local optimum; only meaningful when the
// evaluation is deterministic per weights), or at max_epochs.
TrainResult train(const BatchEvaluator& evaluate, const TrainerConfig& cfg,
                  int n_nodes);

// Least-squares exponential fit to an error trace: regress
// log(eps_k - eps_final + 1e-12) on k. Points in the converged tail
// (eps_k - eps_final below 1e-3 of the total drop) are excluded so the
// noise floor does not drag the slope. rate is the positive decay constant.
struct DecayFit {
  double rate = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
};

// Over the accepted epochs of a trace (needs at least 10).
DecayFit fit_exponential_decay(const TrainingTrace& trace);
// Over an arbitrary error series indexed 0..n-1 (needs at least 10 points).
DecayFit fit_exponential_decay(std::span<const double> eps_series);

}  // namespace prc
