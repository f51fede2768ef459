#include "prc/pipeline.hpp"

#include <stdexcept>
#include <string>

#include "prc/seeds.hpp"

namespace prc {

Pipeline Pipeline::build(const PipelineConfig& cfg) {
  cfg.encoder.validate();
  cfg.reservoir.validate();
  if (cfg.modes < 1) throw std::invalid_argument("modes must be >= 1");

  Pipeline p;
  p.cfg_ = cfg;
  p.illumination_ = illumination_profile(cfg.encoder);

  const int n_px = cfg.encoder.grid_side * cfg.encoder.grid_side;
  p.fiber_ = sample_fiber_matrix(cfg.fiber_seed, cfg.modes, n_px);
  p.imaging_ =
      sample_injection_matrix(cfg.imaging_seed, cfg.reservoir.n_nodes, cfg.modes);
  p.layout_ = build_layout(cfg.reservoir.n_nodes);
  p.coupling_ = build_internal_coupling(p.layout_, cfg.reservoir);

  const BooleanImage ring = make_dc_ring(cfg.encoder);
  const int n_digits = 1 << cfg.encoder.n_bits;
  p.states_.reserve(n_digits);

  // Random restarts share one stream; the check is about where the solves
  // end up, not about which starts are tried.
  RandomStream restart_rng(derive_seed(cfg.reservoir.seed, "lock_check"));

  for (int d = 0; d < n_digits; ++d) {
    BooleanImage pattern =
        compose_input(ring, encode_digit(d, cfg.encoder));
    ComplexInjection inj =
        inject(pattern, p.illumination_, p.fiber_, p.imaging_);
    ReservoirState s = steady_state(inj, cfg.reservoir, p.coupling_);

    Eigen::VectorXcd x0(cfg.reservoir.n_nodes);
    for (int i = 0; i < cfg.reservoir.n_nodes; ++i)
      x0[i] = restart_rng.circular_gaussian();
    ReservoirState s2 = steady_state(inj, cfg.reservoir, p.coupling_, &x0);
    double gap = (s.x - s2.x).cwiseAbs().maxCoeff();
    if (gap > 1e-8)
      throw std::runtime_error(
          "pipeline: steady state for digit " + std::to_string(d) +
          " depends on the initial condition (gap " + std::to_string(gap) +
          "); the reservoir is not injection-locked at these parameters");

    p.states_.push_back(std::move(s));
  }
  return p;
}

Eigen::VectorXd Pipeline::noisy_powers(int digit, RandomStream& rng) const {
  if (digit < 0 || digit >= n_digits())
    throw std::invalid_argument("noisy_powers: digit out of range");
  return detect_powers(states_[digit], cfg_.reservoir, rng);
}

}  // namespace prc
