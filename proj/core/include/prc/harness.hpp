#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prc/encoder.hpp"
#include "prc/pipeline.hpp"
#include "prc/reservoir.hpp"
#include "prc/tasks.hpp"
#include "prc/trainer.hpp"

namespace prc {

// Deterministic per-purpose seeds, all derived from one master seed unless
// explicitly overridden in the config file.
struct NamedSeeds {
  std::uint64_t fiber = 0;
  std::uint64_t imaging = 0;
  std::uint64_t coupling = 0;
  std::uint64_t init_weights = 0;
  std::uint64_t batch_train = 0;
  std::uint64_t batch_test = 0;
  std::uint64_t noise_train = 0;
  std::uint64_t noise_test = 0;

  static NamedSeeds derive(std::uint64_t master);
};

struct SeedOverrides {
  std::optional<std::uint64_t> fiber, imaging, coupling, init_weights,
      batch_train, batch_test, noise_train, noise_test;
};

// One full experiment: geometry, optics, reservoir, task, trainer,
// evaluation protocol. Mirrors the flat `section.key = value` config file
// one-to-one.
struct ExperimentConfig {
  EncoderGeometry encoder;
  int modes = 36;
  ReservoirParams reservoir;  // .seed is filled from seeds().coupling
  TrainerConfig trainer;      // .seed is filled from seeds().init_weights
  bool frozen_noise = false;  // reuse epoch-0 detection noise every epoch
  TaskSpec task;              // .n_bits is slaved to encoder.n_bits
  int test_size = 1000;
  int repeats = 10;
  std::uint64_t master_seed = 1;
  std::string out_dir = "runs/out";
  SeedOverrides overrides;

  NamedSeeds seeds() const;
  TaskSpec effective_task() const;
  void validate() const;  // throws ConfigError
};

ExperimentConfig default_config();

// Config file grammar: one `section.key = value` per line, `#` comments
// (full-line, or trailing when preceded by whitespace), blank lines ignored,
// later assignments win. Unknown keys and malformed values raise ConfigError.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(std::istream& in, const std::string& origin);
void set_config_key(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value);

// Every setting as (key, value-string) pairs, in file order. Feeding them
// back through set_config_key reproduces the config exactly.
std::vector<std::pair<std::string, std::string>> config_items(
    const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Running experiments

// Detected-power matrix (rows = batch samples) under the epoch-0 noise
// draws. This is the frozen training problem; the oracles below consume it.
Eigen::MatrixXd frozen_power_matrix(const Pipeline& pipeline,
                                    const LabeledBatch& batch,
                                    std::uint64_t noise_seed);

// Scoring closure handed to the trainer. Draws fresh per-epoch detection
// noise unless frozen_noise is set; resamples the batch per epoch when
// resample_batch is set. The pipeline must outlive the returned evaluator.
BatchEvaluator make_training_evaluator(const Pipeline& pipeline,
                                       const TaskSpec& task, int batch_size,
                                       std::uint64_t batch_seed,
                                       std::uint64_t noise_seed,
                                       bool frozen_noise, bool resample_batch);

struct ResultsBundle {
  ExperimentConfig config;
  NamedSeeds seeds;
  TrainResult training;
  std::vector<Metrics> repeats;
  Metrics mean;  // metrics averaged over repeats, n_samples summed
  double train_seconds = 0.0;
  double eval_seconds = 0.0;
};

// Train once, then score the frozen weights on `repeats` independent test
// batches. Pure computation; writes nothing.
ResultsBundle run_experiment(const ExperimentConfig& cfg);

// Write summary.json, trace.csv, weights.txt and config.txt into out_dir
// (created if needed).
void write_results(const ResultsBundle& bundle, const std::string& out_dir);

// ---------------------------------------------------------------------------
// Oracles (reference optimizers on the frozen training problem)

struct OracleResult {
  ReadoutWeights weights;
  double eps = 0.0;
};

// Exact Boolean optimum by enumerating all non-empty masks (needs
// cols <= 20). Scores exactly like the trainer: standardize the mask's raw
// outputs, compare to the standardized targets.
OracleResult exhaustive_oracle(const Eigen::MatrixXd& powers,
                               std::span<const double> targets);

struct RidgeResult {
  Eigen::VectorXd coef;
  double intercept = 0.0;
  double eps = 0.0;
};

// Real-weighted ridge regression on the same problem; its error is a floor
// for any Boolean mask. The intercept is not penalized.
RidgeResult ridge_oracle(const Eigen::MatrixXd& powers,
                         std::span<const double> targets, double lambda);

// ---------------------------------------------------------------------------
// Near-field rendering

struct NearFieldRender {
  DiskLayout layout;
  Eigen::VectorXd powers;  // clean steady-state node powers
  int raster_side = 256;
  std::vector<std::uint8_t> raster;  // row-major, 0..255
};

NearFieldRender render_near_field(const ExperimentConfig& cfg, int digit);
// Writes nearfield_d<digit>.csv and nearfield_d<digit>.pgm (binary P5).
void write_near_field(const NearFieldRender& r, int digit,
                      const std::string& out_dir);

// ---------------------------------------------------------------------------
// Parameter sweeps

struct SweepPoint {
  std::string value;
  double final_eps = 0.0;
  int epochs_used = 0;
  Metrics mean;
  std::string dir;  // per-point output directory
};

// Run the experiment once per value of `param` (any config key). Point i
// shifts the master seed by i, so point 0 reproduces the base run. Writes
// each point's artifacts under out_dir/point_<i>/ plus a top-level
// sweep.csv.
std::vector<SweepPoint> run_sweep(const ExperimentConfig& base,
                                  const std::string& param,
                                  const std::vector<std::string>& values,
                                  const std::string& out_dir);

// ---------------------------------------------------------------------------
// Loaders for the emitted artifacts

ReadoutWeights load_weights(const std::string& path);
std::vector<EpochRecord> load_trace(const std::string& path);

struct SummaryFile {
  int schema_version = 0;
  std::map<std::string, std::string> config;
  double final_eps = 0.0;
  int epochs_used = 0;
  int accepted_epochs = 0;
  std::string stop_reason;
  std::vector<Metrics> repeats;
  Metrics mean;
};
SummaryFile load_summary(const std::string& path);

struct PgmImage {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::vector<std::uint8_t> pixels;
};
PgmImage load_pgm(const std::string& path);

struct NearFieldTable {
  std::vector<int> node, ring;
  std::vector<double> angle, power;
};
NearFieldTable load_near_field_csv(const std::string& path);

std::vector<SweepPoint> load_sweep_csv(const std::string& path);

}  // namespace prc
