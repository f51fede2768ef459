#include "prc/optics.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "prc/seeds.hpp"

namespace prc {

namespace {

TransferMatrix sample_matrix(std::uint64_t seed, int rows, int cols) {
  if (rows <= 0 || cols <= 0)
    throw std::invalid_argument("transfer matrix dimensions must be positive");
  TransferMatrix t;
  t.seed = seed;
  t.m.resize(rows, cols);
  RandomStream rng(seed);
  // Row-major fill order so the sampled system is independent of how Eigen
  // stores it.
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) t.m(r, c) = rng.circular_gaussian();
  for (int c = 0; c < cols; ++c) {
    double n = t.m.col(c).norm();
    if (n > 0.0) t.m.col(c) /= n;
  }
  return t;
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("transfer matrix stream truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  put_u64(out, bits);
}

double get_f64(std::istream& in) {
  std::uint64_t bits = get_u64(in);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

}  // namespace

TransferMatrix sample_fiber_matrix(std::uint64_t seed, int modes, int pixels) {
  return sample_matrix(seed, modes, pixels);
}

TransferMatrix sample_injection_matrix(std::uint64_t seed, int nodes, int modes) {
  return sample_matrix(seed, nodes, modes);
}

ComplexInjection inject(const BooleanImage& pattern,
                        const std::vector<double>& illumination,
                        const TransferMatrix& fiber,
                        const TransferMatrix& imaging) {
  const std::size_t n_px = pattern.on.size();
  if (illumination.size() != n_px)
    throw std::invalid_argument("inject: illumination size mismatch");
  if (static_cast<std::size_t>(fiber.cols()) != n_px)
    throw std::invalid_argument("inject: fiber matrix pixel count mismatch");
  if (imaging.cols() != fiber.rows())
    throw std::invalid_argument("inject: imaging/fiber mode count mismatch");

  // Masked field at the modulator plane. Off mirrors contribute nothing, on
  // mirrors pass the (real, positive) illumination amplitude.
  Eigen::VectorXcd field(n_px);
  for (std::size_t i = 0; i < n_px; ++i)
    field[i] = pattern.on[i] ? illumination[i] : 0.0;

  ComplexInjection inj;
  inj.e = imaging.m * (fiber.m * field);
  return inj;
}

void save_matrix(const TransferMatrix& t, std::ostream& out) {
  put_u64(out, static_cast<std::uint64_t>(t.rows()));
  put_u64(out, static_cast<std::uint64_t>(t.cols()));
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    for (Eigen::Index c = 0; c < t.cols(); ++c) {
      put_f64(out, t.m(r, c).real());
      put_f64(out, t.m(r, c).imag());
    }
  }
  if (!out) throw std::runtime_error("transfer matrix write failed");
}

void save_matrix(const TransferMatrix& t, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  save_matrix(t, f);
}

TransferMatrix load_matrix(std::istream& in) {
  std::uint64_t rows = get_u64(in);
  std::uint64_t cols = get_u64(in);
  if (rows == 0 || cols == 0 || rows > (1u << 20) || cols > (1u << 20))
    throw std::runtime_error("transfer matrix header is implausible");
  TransferMatrix t;
  t.m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::uint64_t r = 0; r < rows; ++r) {
    for (std::uint64_t c = 0; c < cols; ++c) {
      double re = get_f64(in);
      double im = get_f64(in);
      t.m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = {re, im};
    }
  }
  return t;
}

TransferMatrix load_matrix(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  return load_matrix(f);
}

}  // namespace prc
