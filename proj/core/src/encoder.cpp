#include "prc/encoder.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace prc {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void EncoderGeometry::validate() const {
  if (grid_side <= 0) throw std::invalid_argument("grid_side must be positive");
  if (disc_diameter <= 0)
    throw std::invalid_argument("disc_diameter must be positive");
  if (disc_diameter > grid_side)
    throw std::invalid_argument("disc_diameter exceeds grid_side");
  if (ring_thickness < 0)
    throw std::invalid_argument("ring_thickness must be >= 0");
  // Thickness equal to the radius is allowed: the ring swallows the whole
  // disc and there is simply no interior left to modulate.
  if (2 * ring_thickness > disc_diameter)
    throw std::invalid_argument("ring_thickness exceeds disc radius");
  if (n_bits < 1 || n_bits > 16)
    throw std::invalid_argument("n_bits must be in [1, 16]");
  if (!(illumination_waist > 0.0))
    throw std::invalid_argument("illumination_waist must be positive");
}

std::size_t BooleanImage::active_count() const {
  std::size_t n = 0;
  for (std::uint8_t v : on) n += v;
  return n;
}

double pixel_radius(int row, int col, int side) {
  double dx = col - side / 2;
  double dy = row - side / 2;
  return std::sqrt(dx * dx + dy * dy);
}

double pixel_angle(int row, int col, int side) {
  double dx = col - side / 2;
  double dy = row - side / 2;
  double a = std::atan2(dy, dx);
  if (a < 0.0) a += kTwoPi;
  // atan2(-0.0, x>0) folds to 2*pi; keep the representative in [0, 2*pi).
  if (a >= kTwoPi) a = 0.0;
  return a;
}

BooleanImage make_dc_ring(const EncoderGeometry& g) {
  g.validate();
  BooleanImage img;
  img.side = g.grid_side;
  img.on.assign(static_cast<std::size_t>(g.grid_side) * g.grid_side, 0);
  const double R = g.disc_radius();
  const double inner = R - g.ring_thickness;
  std::size_t k = 0;
  for (int row = 0; row < g.grid_side; ++row) {
    for (int col = 0; col < g.grid_side; ++col, ++k) {
      double r = pixel_radius(row, col, g.grid_side);
      if (r < R && r >= inner) img.on[k] = 1;
    }
  }
  return img;
}

BooleanImage encode_digit(int digit, const EncoderGeometry& g) {
  g.validate();
  if (digit < 0 || digit >= (1 << g.n_bits))
    throw std::invalid_argument("digit out of range for n_bits=" +
                                std::to_string(g.n_bits));
  BooleanImage img;
  img.side = g.grid_side;
  img.on.assign(static_cast<std::size_t>(g.grid_side) * g.grid_side, 0);
  const double R = g.disc_radius();
  const double inner = R - g.ring_thickness;
  std::size_t k = 0;
  for (int row = 0; row < g.grid_side; ++row) {
    for (int col = 0; col < g.grid_side; ++col, ++k) {
      double r = pixel_radius(row, col, g.grid_side);
      if (r >= inner) continue;  // interior only; the annulus is the ring's
      double a = pixel_angle(row, col, g.grid_side);
      int wedge = static_cast<int>(a * g.n_bits / kTwoPi);
      if (wedge >= g.n_bits) wedge = g.n_bits - 1;  // a == 2*pi - ulp
      if ((digit >> wedge) & 1) img.on[k] = 1;
    }
  }
  return img;
}

BooleanImage compose_input(const BooleanImage& ring, const BooleanImage& data) {
  if (ring.side != data.side)
    throw std::invalid_argument("compose_input: mismatched image sides");
  BooleanImage out = ring;
  for (std::size_t i = 0; i < out.on.size(); ++i)
    out.on[i] = (ring.on[i] | data.on[i]);
  return out;
}

std::vector<double> illumination_profile(const EncoderGeometry& g) {
  g.validate();
  std::vector<double> amp(static_cast<std::size_t>(g.grid_side) * g.grid_side);
  const double inv_w2 = 1.0 / (g.illumination_waist * g.illumination_waist);
  std::size_t k = 0;
  for (int row = 0; row < g.grid_side; ++row) {
    for (int col = 0; col < g.grid_side; ++col, ++k) {
      double r = pixel_radius(row, col, g.grid_side);
      amp[k] = std::exp(-r * r * inv_w2);
    }
  }
  return amp;
}

}  // namespace prc
