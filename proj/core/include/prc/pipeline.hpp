#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "prc/encoder.hpp"
#include "prc/optics.hpp"
#include "prc/reservoir.hpp"

namespace prc {

struct PipelineConfig {
  EncoderGeometry encoder;
  int modes = 36;  // fibre mode bottleneck
  ReservoirParams reservoir;
  std::uint64_t fiber_seed = 0;
  std::uint64_t imaging_seed = 0;
};

// Everything between a digit and the detected node powers: encoder, fibre,
// imaging, coupling, steady state. Inputs are a finite alphabet, and the
// whole chain up to detection noise is deterministic, so each digit's
// steady state is solved once at construction and reused.
class Pipeline {
 public:
  // Builds the optical chain and solves every digit's steady state. As a
  // construction-time self-check, each solve is repeated from a random
  // initial condition and must land on the same state within 1e-8: the
  // operating point has to be injection-locked, not history-dependent.
  static Pipeline build(const PipelineConfig& cfg);

  int n_digits() const { return static_cast<int>(states_.size()); }
  int n_nodes() const { return cfg_.reservoir.n_nodes; }

  const PipelineConfig& config() const { return cfg_; }
  const DiskLayout& layout() const { return layout_; }
  const CouplingMatrix& coupling() const { return coupling_; }
  const TransferMatrix& fiber() const { return fiber_; }
  const TransferMatrix& imaging() const { return imaging_; }

  const ReservoirState& state(int digit) const { return states_[digit]; }
  const Eigen::VectorXd& clean_powers(int digit) const {
    return states_[digit].powers;
  }

  // Detected powers for one digit under one noise draw.
  Eigen::VectorXd noisy_powers(int digit, RandomStream& rng) const;

 private:
  Pipeline() = default;

  PipelineConfig cfg_;
  std::vector<double> illumination_;
  TransferMatrix fiber_;
  TransferMatrix imaging_;
  DiskLayout layout_;
  CouplingMatrix coupling_;
  std::vector<ReservoirState> states_;  // indexed by digit
};

}  // namespace prc
