#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "prc/optics.hpp"
#include "prc/seeds.hpp"

namespace prc {

// Physical and numerical parameters of the saturable-gain reservoir.
struct ReservoirParams {
  int n_nodes = 131;
  double gain = 1.5;             // small-signal gain g
  double coupling = 0.15;        // internal coupling strength kappa
  double diffusion_radius = 0.25;  // neighbourhood radius on the unit disc
  double cross_saturation = 3.0;   // shared-pump depletion weight beta
  double noise_sigma = 1e-3;     // relative detection noise
  double relax_alpha = 0.5;      // damping of the fixed-point iteration
  double tol = 1e-10;            // convergence tolerance, max-norm
  int max_iters = 10000;
  std::uint64_t seed = 0;        // coupling topology seed

  void validate() const;  // throws std::invalid_argument
};

// Concentric-ring arrangement of the nodes on the unit disc: a centre node,
// then rings with populations growing by six per ring (hexagonal packing),
// the outermost ring absorbing the remainder.
struct DiskLayout {
  std::vector<int> ring_counts;
  std::vector<double> x, y;    // node positions, ring-by-ring order
  std::vector<int> ring;       // ring index of each node
  std::vector<double> angle;   // angular position of each node, [0, 2*pi)

  int size() const { return static_cast<int>(x.size()); }
};

DiskLayout build_layout(int n_nodes);

// Complex nearest-neighbour coupling: node i receives from every node j != i
// within diffusion_radius. Magnitudes are uniform in [0.5, 1] before each
// row is normalized to unit magnitude-sum; phases are uniform. Diagonal is
// zero (self-saturation lives in the nonlinearity, not the coupling).
struct CouplingMatrix {
  Eigen::MatrixXcd w;
  double spectral_radius = 0.0;  // of kappa * |w|, by power iteration
};

CouplingMatrix build_internal_coupling(const DiskLayout& layout,
                                       const ReservoirParams& p);

struct ReservoirState {
  Eigen::VectorXcd x;        // steady-state complex node amplitudes
  Eigen::VectorXd powers;    // |x_i|^2, noiseless
  int iterations_used = 0;
  double residual = 0.0;     // max-norm of the last update
};

// One application of the saturable map
//   F_i(x) = g * (kappa * (W x)_i + e_i) / (1 + |x_i|^2 + beta * mean|x|^2).
// The local |x_i|^2 term is gain saturation; the mean-power term models the
// shared pump so bright regions steal gain from dim ones.
Eigen::VectorXcd saturable_map(const Eigen::VectorXcd& x,
                               const ComplexInjection& inj,
                               const ReservoirParams& p,
                               const CouplingMatrix& coupling);

// Damped fixed-point solve x <- (1-alpha) x + alpha F(x), from x0 (or zero).
// Stops when the update max-norm drops to tol; throws NonConvergenceError
// after max_iters.
ReservoirState steady_state(const ComplexInjection& inj,
                            const ReservoirParams& p,
                            const CouplingMatrix& coupling,
                            const Eigen::VectorXcd* x0 = nullptr);

// Photodetector reading: per-node optical power with multiplicative Gaussian
// noise, clamped at zero (counts cannot go negative).
Eigen::VectorXd detect_powers(const ReservoirState& state,
                              const ReservoirParams& p, RandomStream& rng);

}  // namespace prc
