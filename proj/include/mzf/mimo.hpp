#pragma once

// Signal model for uncoded MIMO links: q-QAM constellations with per-axis
// Gray labels, complex-to-real lattice expansion, Rayleigh channels with an
// optional imposed condition number, and additive Gaussian noise.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "mzf/linalg.hpp"

namespace mzf {

using Complex = std::complex<double>;
using Bits = std::vector<std::uint8_t>;

// A deterministic random stream. Streams are derived from a master seed plus
// a key path (e.g. point index, channel index) so that every work item owns an
// independent sequence no matter which worker executes it.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng derive(std::uint64_t master_seed, std::initializer_list<std::uint64_t> keys);

  double normal(double stddev = 1.0) { return std::normal_distribution<double>(0.0, stddev)(engine_); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  bool bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }
  std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

 private:
  std::mt19937_64 engine_;
};

class Constellation {
 public:
  [[nodiscard]] int order() const noexcept { return order_; }
  [[nodiscard]] int levels_per_axis() const noexcept { return static_cast<int>(levels_.size()); }
  [[nodiscard]] int bits_per_pam() const noexcept { return bits_per_pam_; }
  [[nodiscard]] double scale() const noexcept { return scale_; }

  // Scaled amplitudes, ascending.
  [[nodiscard]] std::span<const double> levels() const noexcept { return levels_; }
  // Odd integers -(L-1) .. (L-1), ascending.
  [[nodiscard]] std::span<const int> unscaled_levels() const noexcept { return unscaled_; }

  // Gray label of level index i, and its inverse.
  [[nodiscard]] std::uint32_t label(int index) const { return labels_.at(static_cast<std::size_t>(index)); }
  [[nodiscard]] int index_of_label(std::uint32_t label) const { return by_label_.at(label); }

  // Index of the level nearest to v, clamped to the outermost levels.
  [[nodiscard]] int nearest_index(double v) const noexcept;

 private:
  friend Constellation make_constellation(int q);
  Constellation() = default;

  int order_ = 0;
  int bits_per_pam_ = 0;
  double scale_ = 0.0;
  std::vector<double> levels_;
  std::vector<int> unscaled_;
  std::vector<std::uint32_t> labels_;
  std::vector<int> by_label_;
};

// q in {4, 16, 64, 256}; unit mean energy per complex symbol.
Constellation make_constellation(int q);

// One real coordinate per entry; values are copied from the level table so
// they compare bit-identically with it.
struct SymbolVector {
  std::vector<int> indices;
  Vector values;

  friend bool operator==(const SymbolVector&, const SymbolVector&) = default;
};

SymbolVector symbols_from_indices(std::vector<int> indices, const Constellation& c);

// Per-coordinate nearest level with clamping. Throws NonFinite on NaN/Inf.
SymbolVector slice(std::span<const double> v, const Constellation& c);

// Gray mapping, bits_per_pam bits per real coordinate, MSB first.
SymbolVector bits_to_symbols(std::span<const std::uint8_t> bits, const Constellation& c, std::size_t m);
Bits symbols_to_bits(const SymbolVector& sym, const Constellation& c);

struct ComplexChannel {
  std::size_t n_rx = 0;
  std::size_t n_tx = 0;
  std::vector<Complex> entries;  // row-major n_rx x n_tx

  Complex operator()(std::size_t i, std::size_t j) const { return entries[i * n_tx + j]; }
  Complex& operator()(std::size_t i, std::size_t j) { return entries[i * n_tx + j]; }
};

ComplexChannel make_complex_channel(std::size_t n_rx, std::size_t n_tx, std::vector<Complex> entries);

// [[Re H, -Im H], [Im H, Re H]]
Matrix realify_channel(const ComplexChannel& hc);
// [Re v; Im v]
Vector realify_vector(std::span<const Complex> vc);

// i.i.d. CN(0, 1) entries.
ComplexChannel draw_rayleigh(std::size_t n_rx, std::size_t n_tx, Rng& rng);

// Keeps the singular vectors of hc, replaces its singular values by a
// geometric progression from sigma_1 down to sigma_1 / kappa, then rescales to
// the original Frobenius norm.
ComplexChannel force_condition(const ComplexChannel& hc, double kappa);

Vector draw_noise(std::size_t n, double sigma, Rng& rng);

// Total transmit power is 1 regardless of the number of transmit antennas, and
// SNR = 1 / (2 sigma^2) where sigma is the per-real-dimension noise std dev.
double sigma_for_snr(double snr_db, const Constellation& c, std::size_t n_tx);

// Real channel with the factorizations every decoder shares.
struct RealChannel {
  Matrix h;
  QrFactors qr;
  RSplit split;
  double cond = 0.0;
  std::uint64_t cond_flops = 0;  // cost of the SVD behind cond
  std::optional<Matrix> pinv;

  [[nodiscard]] std::size_t n() const noexcept { return h.rows(); }
  [[nodiscard]] std::size_t m() const noexcept { return h.cols(); }
};

RealChannel make_real_channel(Matrix h, bool with_pseudo_inverse = false);

}  // namespace mzf
