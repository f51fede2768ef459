#include "prc/reservoir.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "prc/errors.hpp"

namespace prc {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

// Largest eigenvalue of a non-negative matrix by power iteration. Good
// enough for the diagnostic stored on CouplingMatrix.
double power_iteration(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  if (n == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd w = a * v;
    double nw = w.norm();
    if (nw == 0.0) return 0.0;
    w /= nw;
    double next = w.dot(a * w);
    if (std::abs(next - lambda) <= 1e-12 * std::max(1.0, std::abs(next)))
      return next;
    lambda = next;
    v = w;
  }
  return lambda;
}

}  // namespace

void ReservoirParams::validate() const {
  if (n_nodes < 1) throw std::invalid_argument("n_nodes must be >= 1");
  // gain == 0 is allowed: it is the dark reservoir used to sanity-check the
  // rendering path (all powers identically zero).
  if (!(gain >= 0.0)) throw std::invalid_argument("gain must be >= 0");
  if (!(coupling >= 0.0)) throw std::invalid_argument("coupling must be >= 0");
  if (!(diffusion_radius > 0.0) || !(diffusion_radius <= 2.0))
    throw std::invalid_argument("diffusion_radius must be in (0, 2]");
  if (!(cross_saturation >= 0.0))
    throw std::invalid_argument("cross_saturation must be >= 0");
  if (!(noise_sigma >= 0.0))
    throw std::invalid_argument("noise_sigma must be >= 0");
  if (!(relax_alpha > 0.0) || !(relax_alpha <= 1.0))
    throw std::invalid_argument("relax_alpha must be in (0, 1]");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
}

DiskLayout build_layout(int n_nodes) {
  if (n_nodes < 1) throw std::invalid_argument("n_nodes must be >= 1");
  DiskLayout l;
  l.ring_counts.push_back(1);
  int remaining = n_nodes - 1;
  for (int k = 1; remaining > 0; ++k) {
    // A hexagonal ring k holds 6k nodes. If the leftover would not fill the
    // next ring to its nominal size, spread all of it over this one instead
    // of leaving a sparse outer ring.
    int take = (remaining < 6 * (k + 1)) ? remaining : 6 * k;
    l.ring_counts.push_back(take);
    remaining -= take;
  }
  const int n_rings = static_cast<int>(l.ring_counts.size());
  l.x.reserve(n_nodes);
  l.y.reserve(n_nodes);
  l.ring.reserve(n_nodes);
  l.angle.reserve(n_nodes);
  for (int k = 0; k < n_rings; ++k) {
    double r = (n_rings > 1) ? static_cast<double>(k) / (n_rings - 1) : 0.0;
    int m = l.ring_counts[k];
    for (int j = 0; j < m; ++j) {
      double a = kTwoPi * j / m;
      l.x.push_back(r * std::cos(a));
      l.y.push_back(r * std::sin(a));
      l.ring.push_back(k);
      l.angle.push_back(a);
    }
  }
  return l;
}

CouplingMatrix build_internal_coupling(const DiskLayout& layout,
                                       const ReservoirParams& p) {
  p.validate();
  const int n = layout.size();
  if (n != p.n_nodes)
    throw std::invalid_argument("layout size does not match n_nodes");

  CouplingMatrix c;
  c.w = Eigen::MatrixXcd::Zero(n, n);
  RandomStream rng(p.seed);
  const double r2 = p.diffusion_radius * p.diffusion_radius;
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double dx = layout.x[i] - layout.x[j];
      double dy = layout.y[i] - layout.y[j];
      if (dx * dx + dy * dy > r2) continue;
      double mag = rng.uniform(0.5, 1.0);
      double ph = rng.uniform(0.0, kTwoPi);
      c.w(i, j) = std::polar(mag, ph);
      row_sum += mag;
    }
    if (row_sum > 0.0) c.w.row(i) /= row_sum;
  }
  c.spectral_radius = p.coupling * power_iteration(c.w.cwiseAbs());
  return c;
}

Eigen::VectorXcd saturable_map(const Eigen::VectorXcd& x,
                               const ComplexInjection& inj,
                               const ReservoirParams& p,
                               const CouplingMatrix& coupling) {
  const Eigen::Index n = x.size();
  Eigen::VectorXcd drive = p.coupling * (coupling.w * x) + inj.e;
  const double mean_power = x.squaredNorm() / static_cast<double>(n);
  Eigen::VectorXcd f(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double denom = 1.0 + std::norm(x[i]) + p.cross_saturation * mean_power;
    f[i] = p.gain * drive[i] / denom;
  }
  return f;
}

ReservoirState steady_state(const ComplexInjection& inj,
                            const ReservoirParams& p,
                            const CouplingMatrix& coupling,
                            const Eigen::VectorXcd* x0) {
  p.validate();
  const Eigen::Index n = inj.e.size();
  if (n != p.n_nodes)
    throw std::invalid_argument("injection size does not match n_nodes");
  if (coupling.w.rows() != n || coupling.w.cols() != n)
    throw std::invalid_argument("coupling size does not match n_nodes");
  if (x0 && x0->size() != n)
    throw std::invalid_argument("x0 size does not match n_nodes");

  ReservoirState s;
  s.x = x0 ? *x0 : Eigen::VectorXcd::Zero(n);
  const double alpha = p.relax_alpha;
  for (int it = 1; it <= p.max_iters; ++it) {
    Eigen::VectorXcd f = saturable_map(s.x, inj, p, coupling);
    Eigen::VectorXcd next = (1.0 - alpha) * s.x + alpha * f;
    double res = (next - s.x).cwiseAbs().maxCoeff();
    s.x.swap(next);
    if (res <= p.tol) {
      s.iterations_used = it;
      s.residual = res;
      s.powers = s.x.cwiseAbs2();
      return s;
    }
    s.residual = res;
  }
  throw NonConvergenceError(
      "steady_state: no fixed point after " + std::to_string(p.max_iters) +
          " iterations (residual " + std::to_string(s.residual) + ")",
      p.max_iters, s.residual);
}

Eigen::VectorXd detect_powers(const ReservoirState& state,
                              const ReservoirParams& p, RandomStream& rng) {
  const Eigen::Index n = state.powers.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double gain = 1.0 + p.noise_sigma * rng.gaussian();
    out[i] = state.powers[i] * (gain > 0.0 ? gain : 0.0);
  }
  return out;
}

}  // namespace prc
