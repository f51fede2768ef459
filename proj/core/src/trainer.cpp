#include "prc/trainer.hpp"

#include <cmath>
#include <stdexcept>

#include "prc/errors.hpp"
#include "prc/seeds.hpp"

namespace prc {

void TrainerConfig::validate() const {
  if (batch_size < 2) throw std::invalid_argument("batch_size must be >= 2");
  if (!(target_eps > 0.0))
    throw std::invalid_argument("target_eps must be positive");
  if (max_epochs < 0) throw std::invalid_argument("max_epochs must be >= 0");
}

double mse(std::span<const double> y_out, std::span<const double> y_target) {
  if (y_out.size() != y_target.size())
    throw std::invalid_argument("mse: length mismatch");
  if (y_out.empty()) throw std::invalid_argument("mse: empty series");
  double s = 0.0;
  for (std::size_t i = 0; i < y_out.size(); ++i) {
    double d = y_out[i] - y_target[i];
    s += d * d;
  }
  return s / static_cast<double>(y_out.size());
}

TrainResult train(const BatchEvaluator& evaluate, const TrainerConfig& cfg,
                  int n_nodes) {
  cfg.validate();
  if (n_nodes < 1) throw std::invalid_argument("train: n_nodes must be >= 1");

  // Separate sub-streams so the initial mask and the flip sequence can be
  // varied independently of each other in experiments.
  RandomStream init_rng(derive_seed(cfg.seed, "init_weights"));
  RandomStream flip_rng(derive_seed(cfg.seed, "flip_sequence"));

  TrainResult r;
  r.weights = ReadoutWeights::random(n_nodes, init_rng);
  BatchEval cur = evaluate(r.weights, 0);

  r.trace.epochs.push_back({cur.eps, -1, true});
  r.trace.accepted_count = 1;

  std::vector<std::uint8_t> rejected(n_nodes, 0);
  int rejected_distinct = 0;

  r.trace.stop_reason = StopReason::MaxEpochs;
  for (int k = 1; k <= cfg.max_epochs; ++k) {
    if (cur.eps <= cfg.target_eps) {
      r.trace.stop_reason = StopReason::Threshold;
      break;
    }
    int l = static_cast<int>(flip_rng.uniform_index(n_nodes));
    r.weights.flip(l);
    bool accepted = false;
    try {
      BatchEval cand = evaluate(r.weights, k);
      if (cand.eps < cur.eps) {
        cur = std::move(cand);
        accepted = true;
      }
    } catch (const DegenerateBatchError&) {
      // An all-zero (or constant) output batch cannot be scored; treat the
      // candidate as rejected.
    }
    if (accepted) {
      std::fill(rejected.begin(), rejected.end(), 0);
      rejected_distinct = 0;
    } else {
      r.weights.flip(l);  // restore the bit exactly
      if (!rejected[l]) {
        rejected[l] = 1;
        ++rejected_distinct;
      }
    }
    r.trace.epochs.push_back({cur.eps, l, accepted});
    if (accepted) ++r.trace.accepted_count;
    ++r.trace.epochs_used;
    if (cfg.stall_stop && rejected_distinct == n_nodes) {
      r.trace.stop_reason = StopReason::Stall;
      break;
    }
  }
  if (cur.eps <= cfg.target_eps) r.trace.stop_reason = StopReason::Threshold;

  r.trace.final_eps = cur.eps;
  r.out_norm = cur.out_norm;
  r.target_norm = cur.target_norm;
  return r;
}

namespace {

DecayFit fit_decay_points(const std::vector<double>& ks,
                          const std::vector<double>& es) {
  const std::size_t n = es.size();
  if (n < 10)
    throw std::invalid_argument("decay fit: need at least 10 points");
  const double e_final = es.back();
  const double drop = es.front() - e_final;
  const double cut = 1e-3 * drop;

  std::vector<double> xs, ys;
  xs.reserve(n);
  ys.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = es[i] - e_final;
    if (drop > 0.0 && d < cut) continue;  // converged tail
    xs.push_back(ks[i]);
    ys.push_back(std::log(d + 1e-12));
  }
  if (xs.size() < 2)
    throw std::invalid_argument("decay fit: too few points above the tail");

  const double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0)
    throw std::invalid_argument("decay fit: degenerate epoch axis");

  DecayFit f;
  const double slope = sxy / sxx;
  f.rate = -slope;
  f.points_used = static_cast<int>(xs.size());
  if (syy > 0.0) {
    double ss_res = syy - slope * sxy;
    f.r_squared = 1.0 - ss_res / syy;
  } else {
    f.r_squared = 1.0;  // flat log-series: the constant fit is exact
  }
  return f;
}

}  // namespace

DecayFit fit_exponential_decay(const TrainingTrace& trace) {
  std::vector<double> ks, es;
  for (std::size_t k = 0; k < trace.epochs.size(); ++k) {
    if (!trace.epochs[k].accepted) continue;
    ks.push_back(static_cast<double>(k));
    es.push_back(trace.epochs[k].eps);
  }
  return fit_decay_points(ks, es);
}

DecayFit fit_exponential_decay(std::span<const double> eps_series) {
  std::vector<double> ks(eps_series.size()), es(eps_series.begin(),
                                                eps_series.end());
  for (std::size_t i = 0; i < ks.size(); ++i) ks[i] = static_cast<double>(i);
  return fit_decay_points(ks, es);
}

}  // namespace prc
