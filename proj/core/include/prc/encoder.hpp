#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace prc {

// Geometry of the binary spatial light modulator: a centred disc of
// micromirrors on a square grid. The disc is split into a DC ring (outer
// annulus, always on, keeps the device in its locked operating regime) and
// an interior divided into equal angular wedges, one per input bit.
struct EncoderGeometry {
  int grid_side = 96;
  int disc_diameter = 90;        // pixels
  int ring_thickness = 10;       // pixels, radially inward; 0 = no ring
  int n_bits = 2;
  double illumination_waist = 45.0;  // Gaussian amplitude waist, pixels

  // Throws std::invalid_argument on nonsense (non-positive sizes, disc
  // larger than the grid, ring thicker than the disc radius, ...).
  void validate() const;

  double disc_radius() const { return disc_diameter / 2.0; }
};

// A binary mirror pattern, row-major, values exactly 0 or 1.
struct BooleanImage {
  int side = 0;
  std::vector<std::uint8_t> on;

  bool at(int row, int col) const {
    return on[static_cast<std::size_t>(row) * side + col] != 0;
  }
  std::size_t active_count() const;

  bool operator==(const BooleanImage&) const = default;
};

// Pixel-centre polar coordinates relative to the disc centre, which sits on
// the integer pixel (side/2, side/2). Angle is in [0, 2*pi), measured
// counter-clockwise from the +x (column) axis.
double pixel_radius(int row, int col, int side);
double pixel_angle(int row, int col, int side);

// The always-on outer annulus: pixels with R - t <= r < R.
BooleanImage make_dc_ring(const EncoderGeometry& g);

// One digit's wedge pattern over the disc interior (r < R - t). Bit b of
// `digit` controls the wedge spanning angles [b, b+1) * 2*pi / n_bits, so
// bit 0 starts at angle zero and bits advance counter-clockwise.
BooleanImage encode_digit(int digit, const EncoderGeometry& g);

// Pixelwise OR of ring and data patterns (their supports are disjoint).
BooleanImage compose_input(const BooleanImage& ring, const BooleanImage& data);

// Gaussian illumination amplitude exp(-r^2 / w^2) sampled at pixel centres,
// row-major; exactly 1 at the centre pixel.
std::vector<double> illumination_profile(const EncoderGeometry& g);

}  // namespace prc
