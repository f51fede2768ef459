#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "prc/seeds.hpp"

namespace prc {

// Boolean readout: each node's detected power either contributes to the
// output sum or it does not. This mirrors a mirror-per-node selection mask,
// so there are no analogue weight values anywhere in the readout.
struct ReadoutWeights {
  std::vector<std::uint8_t> w;  // values exactly 0 or 1

  int size() const { return static_cast<int>(w.size()); }
  void flip(int i) { w[i] ^= 1; }

  static ReadoutWeights random(int n, RandomStream& rng);

  bool operator==(const ReadoutWeights&) const = default;
};

// Unnormalized detector sum sum_i w_i * P_i.
double raw_output(const ReadoutWeights& w, const Eigen::VectorXd& powers);

// Batch standardization. Population statistics (divide by N), matching how
// an oscilloscope trace would be rescaled after the fact.
struct Normalizer {
  double mu = 0.0;
  double sigma = 1.0;
};

// Throws DegenerateBatchError when the batch has fewer than two values or
// zero spread.
Normalizer calibrate(std::span<const double> raw);

inline double normalize(double raw, const Normalizer& n) {
  return (raw - n.mu) / n.sigma;
}

// Two standardized target levels for a binary decision.
struct TargetLevels {
  double lo = 0.0;
  double hi = 1.0;
};

// 1 iff y lies strictly above the midpoint of the two levels.
int threshold_classify(double y, const TargetLevels& levels);

}  // namespace prc
