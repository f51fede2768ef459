#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "doctest.h"
#include "prc/encoder.hpp"

using namespace prc;

namespace {

// Independent pixel-predicate oracle, written against the stated geometry
// rather than the encoder code: integer pixel centres, disc centre at
// (side/2, side/2), annulus R - t <= r < R, interior r < R - t, wedge index
// floor(theta * n / 2pi) with theta in [0, 2pi) counter-clockwise from +x.
struct PixelOracle {
  EncoderGeometry g;

  double radius(int row, int col) const {
    double dx = col - g.grid_side / 2;
    double dy = row - g.grid_side / 2;
    return std::hypot(dx, dy);
  }
  bool in_ring(int row, int col) const {
    double r = radius(row, col);
    double R = g.disc_diameter / 2.0;
    return r < R && r >= R - g.ring_thickness;
  }
  bool in_interior(int row, int col) const {
    return radius(row, col) < g.disc_diameter / 2.0 - g.ring_thickness;
  }
  int wedge(int row, int col) const {
    double dx = col - g.grid_side / 2;
    double dy = row - g.grid_side / 2;
    double th = std::atan2(dy, dx);
    const double two_pi = 8.0 * std::atan(1.0);
    if (th < 0) th += two_pi;
    int w = static_cast<int>(th * g.n_bits / two_pi);
    return w >= g.n_bits ? g.n_bits - 1 : w;
  }
  std::size_t ring_census() const {
    std::size_t n = 0;
    for (int r = 0; r < g.grid_side; ++r)
      for (int c = 0; c < g.grid_side; ++c)
        if (in_ring(r, c)) ++n;
    return n;
  }
  std::size_t disc_census() const {
    std::size_t n = 0;
    for (int r = 0; r < g.grid_side; ++r)
      for (int c = 0; c < g.grid_side; ++c)
        if (radius(r, c) < g.disc_diameter / 2.0) ++n;
    return n;
  }
};

}  // namespace

TEST_CASE("geometry validation rejects nonsense") {
  EncoderGeometry g;
  CHECK_NOTHROW(g.validate());
  EncoderGeometry bad = g;
  bad.disc_diameter = 100;  // larger than the 96 grid
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.ring_thickness = 46;  // thicker than the disc radius
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.ring_thickness = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.n_bits = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.illumination_waist = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.grid_side = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("thickness equal to the radius is the full disc") {
  EncoderGeometry g;
  g.ring_thickness = 45;
  CHECK_NOTHROW(g.validate());
  BooleanImage ring = make_dc_ring(g);
  PixelOracle oracle{g};
  CHECK(ring.active_count() == oracle.disc_census());
  // ... and the interior is empty, so every digit encodes to nothing.
  CHECK(encode_digit(3, g).active_count() == 0);
}

TEST_CASE("zero thickness is an empty annulus") {
  EncoderGeometry g;
  g.ring_thickness = 0;
  BooleanImage ring = make_dc_ring(g);
  CHECK(ring.active_count() == 0);
}

TEST_CASE("ring census matches the predicate oracle") {
  EncoderGeometry g;  // diameter 90, thickness 10
  BooleanImage ring = make_dc_ring(g);
  PixelOracle oracle{g};
  CHECK(ring.active_count() == oracle.ring_census());
  // Continuum estimate pi * (45^2 - 35^2) ~= 2513; the discrete census must
  // land near it.
  double cont = 3.14159265358979 * (45.0 * 45.0 - 35.0 * 35.0);
  CHECK(std::abs(static_cast<double>(ring.active_count()) - cont) <
        0.02 * cont);
  // Pixel-by-pixel agreement, not just the count.
  for (int r = 0; r < g.grid_side; ++r)
    for (int c = 0; c < g.grid_side; ++c)
      REQUIRE(ring.at(r, c) == oracle.in_ring(r, c));
}

TEST_CASE("digit wedges match the predicate oracle") {
  EncoderGeometry g;
  g.n_bits = 4;
  PixelOracle oracle{g};
  const int d = 9;  // binary 1001: wedges 0 and 3
  BooleanImage img = encode_digit(d, g);
  for (int r = 0; r < g.grid_side; ++r) {
    for (int c = 0; c < g.grid_side; ++c) {
      bool expect = oracle.in_interior(r, c) &&
                    ((d >> oracle.wedge(r, c)) & 1) != 0;
      REQUIRE(img.at(r, c) == expect);
    }
  }
  // Wedges 1 and 2 are dark: no active pixel may have those wedge indices.
  for (int r = 0; r < g.grid_side; ++r)
    for (int c = 0; c < g.grid_side; ++c)
      if (img.at(r, c)) {
        int w = oracle.wedge(r, c);
        REQUIRE((w == 0 || w == 3));
      }
}

TEST_CASE("digit zero is dark and all-ones fills the interior") {
  EncoderGeometry g;  // n_bits = 2
  CHECK(encode_digit(0, g).active_count() == 0);
  BooleanImage full = encode_digit(3, g);
  PixelOracle oracle{g};
  std::size_t interior = 0;
  for (int r = 0; r < g.grid_side; ++r)
    for (int c = 0; c < g.grid_side; ++c)
      if (oracle.in_interior(r, c)) ++interior;
  CHECK(full.active_count() == interior);
  CHECK_THROWS_AS(encode_digit(4, g), std::invalid_argument);
  CHECK_THROWS_AS(encode_digit(-1, g), std::invalid_argument);
}

TEST_CASE("ring and wedges are disjoint for assorted geometries") {
  for (int thickness : {1, 5, 10, 20, 44}) {
    for (int n_bits : {1, 2, 3, 4}) {
      EncoderGeometry g;
      g.ring_thickness = thickness;
      g.n_bits = n_bits;
      BooleanImage ring = make_dc_ring(g);
      BooleanImage data = encode_digit((1 << n_bits) - 1, g);
      for (std::size_t i = 0; i < ring.on.size(); ++i)
        REQUIRE((ring.on[i] & data.on[i]) == 0);
    }
  }
}

TEST_CASE("compose is OR: identity, idempotence, disjoint additivity") {
  EncoderGeometry g;
  BooleanImage ring = make_dc_ring(g);
  BooleanImage data = encode_digit(2, g);
  BooleanImage empty;
  empty.side = g.grid_side;
  empty.on.assign(ring.on.size(), 0);

  CHECK(compose_input(ring, empty) == ring);
  CHECK(compose_input(ring, ring) == ring);
  BooleanImage both = compose_input(ring, data);
  CHECK(both.active_count() == ring.active_count() + data.active_count());
  // No pixel may ever be deactivated by composition.
  for (std::size_t i = 0; i < both.on.size(); ++i) {
    REQUIRE(both.on[i] >= ring.on[i]);
    REQUIRE(both.on[i] >= data.on[i]);
  }
  BooleanImage small;
  small.side = 10;
  small.on.assign(100, 0);
  CHECK_THROWS_AS(compose_input(ring, small), std::invalid_argument);
}

TEST_CASE("digits are pairwise distinct and bit-monotone") {
  EncoderGeometry g;  // n_bits = 2
  std::vector<BooleanImage> imgs;
  for (int d = 0; d < 4; ++d) imgs.push_back(encode_digit(d, g));
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) CHECK_FALSE(imgs[a] == imgs[b]);
  // Superset of set bits implies superset of active pixels.
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      if ((a & b) != a) continue;  // a's bits not a subset of b's
      for (std::size_t i = 0; i < imgs[a].on.size(); ++i)
        REQUIRE(imgs[a].on[i] <= imgs[b].on[i]);
    }
  }
}

TEST_CASE("encoding is deterministic") {
  EncoderGeometry g;
  CHECK(make_dc_ring(g) == make_dc_ring(g));
  CHECK(encode_digit(2, g) == encode_digit(2, g));
}

TEST_CASE("illumination peaks at 1 and hits exp(-1) at the waist") {
  EncoderGeometry g;  // waist 45 on a 96 grid, centre (48, 48)
  std::vector<double> amp = illumination_profile(g);
  const int c = g.grid_side / 2;
  CHECK(amp[static_cast<std::size_t>(c) * g.grid_side + c] == 1.0);
  // Pixel (c, c+45) sits exactly at radius 45 = waist.
  double at_waist = amp[static_cast<std::size_t>(c) * g.grid_side + c + 45];
  CHECK(at_waist == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("illumination is radially monotone non-increasing") {
  EncoderGeometry g;
  std::vector<double> amp = illumination_profile(g);
  std::vector<std::pair<double, double>> by_radius;  // (radius, amplitude)
  for (int r = 0; r < g.grid_side; ++r)
    for (int c = 0; c < g.grid_side; ++c)
      by_radius.emplace_back(pixel_radius(r, c, g.grid_side),
                             amp[static_cast<std::size_t>(r) * g.grid_side + c]);
  std::sort(by_radius.begin(), by_radius.end(),
            [](auto& a, auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < by_radius.size(); ++i)
    REQUIRE(by_radius[i].second <= by_radius[i - 1].second + 1e-15);
}
