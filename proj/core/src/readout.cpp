#include "prc/readout.hpp"

#include <cmath>
#include <stdexcept>

#include "prc/errors.hpp"

namespace prc {

ReadoutWeights ReadoutWeights::random(int n, RandomStream& rng) {
  ReadoutWeights w;
  w.w.resize(n);
  for (int i = 0; i < n; ++i)
    w.w[i] = static_cast<std::uint8_t>(rng.uniform_index(2));
  return w;
}

double raw_output(const ReadoutWeights& w, const Eigen::VectorXd& powers) {
  const int n = w.size();
  if (powers.size() != n)
    throw std::invalid_argument("raw_output: weight/power length mismatch");
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    if (w.w[i]) s += powers[i];
  return s;
}

Normalizer calibrate(std::span<const double> raw) {
  if (raw.size() < 2)
    throw DegenerateBatchError("calibrate: need at least two values");
  double mu = 0.0;
  for (double v : raw) mu += v;
  mu /= static_cast<double>(raw.size());
  double var = 0.0;
  for (double v : raw) var += (v - mu) * (v - mu);
  var /= static_cast<double>(raw.size());
  double sigma = std::sqrt(var);
  if (!(sigma > 0.0))
    throw DegenerateBatchError("calibrate: batch has zero spread");
  return {mu, sigma};
}

int threshold_classify(double y, const TargetLevels& levels) {
  return y > 0.5 * (levels.lo + levels.hi) ? 1 : 0;
}

}  // namespace prc
