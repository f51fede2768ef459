#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "prc/encoder.hpp"

namespace prc {

// A random complex linear system (multimode fibre segment, imaging path,
// ...). Columns are unit-norm so no input direction is systematically
// favoured; entries start as iid circular complex Gaussians.
struct TransferMatrix {
  Eigen::MatrixXcd m;
  std::uint64_t seed = 0;

  Eigen::Index rows() const { return m.rows(); }
  Eigen::Index cols() const { return m.cols(); }
};

// Pixel field -> guided modes. `modes` is the mode bottleneck of the fibre.
TransferMatrix sample_fiber_matrix(std::uint64_t seed, int modes, int pixels);

// Guided modes -> complex field at the reservoir nodes.
TransferMatrix sample_injection_matrix(std::uint64_t seed, int nodes, int modes);

// Complex drive at each reservoir node for one mirror pattern.
struct ComplexInjection {
  Eigen::VectorXcd e;
};

// Apply illumination to the binary pattern, push the masked field through
// the fibre and the imaging path.
ComplexInjection inject(const BooleanImage& pattern,
                        const std::vector<double>& illumination,
                        const TransferMatrix& fiber,
                        const TransferMatrix& imaging);

// Flat binary serialization: rows and cols as little-endian u64, then
// row-major (re, im) pairs as little-endian IEEE f64. Loading restores the
// matrix bit-exactly. The seed is advisory and not stored.
void save_matrix(const TransferMatrix& t, std::ostream& out);
void save_matrix(const TransferMatrix& t, const std::string& path);
TransferMatrix load_matrix(std::istream& in);
TransferMatrix load_matrix(const std::string& path);

}  // namespace prc
