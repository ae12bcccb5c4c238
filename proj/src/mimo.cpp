#include "mzf/mimo.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "mzf/error.hpp"

namespace mzf {

Rng Rng::derive(std::uint64_t master_seed, std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * keys.size());
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(master_seed);
  for (std::uint64_t k : keys) push(k);
  std::seed_seq seq(words.begin(), words.end());
  Rng rng(0);
  rng.engine_.seed(seq);
  return rng;
}

Constellation make_constellation(int q) {
  int side = 0;
  switch (q) {
    case 4: side = 2; break;
    case 16: side = 4; break;
    case 64: side = 8; break;
    case 256: side = 16; break;
    default: throw Error(ErrorCode::UnsupportedOrder, "QAM order " + std::to_string(q) + " not in {4,16,64,256}");
  }

  Constellation c;
  c.order_ = q;
  c.bits_per_pam_ = std::countr_zero(static_cast<unsigned>(side));
  // Mean PAM energy is (L^2 - 1) / 3 per axis; two axes per complex symbol.
  const double pam_energy = (static_cast<double>(side) * side - 1.0) / 3.0;
  c.scale_ = 1.0 / std::sqrt(2.0 * pam_energy);
  c.by_label_.assign(static_cast<std::size_t>(side), 0);
  for (int i = 0; i < side; ++i) {
    const int u = 2 * i - (side - 1);
    c.unscaled_.push_back(u);
    c.levels_.push_back(u * c.scale_);
    const auto gray = static_cast<std::uint32_t>(i ^ (i >> 1));
    c.labels_.push_back(gray);
    c.by_label_[gray] = i;
  }
  return c;
}

int Constellation::nearest_index(double v) const noexcept {
  const int top = levels_per_axis() - 1;
  const double pos = std::floor((v / scale_ + top) / 2.0 + 0.5);
  if (pos <= 0.0) return 0;
  if (pos >= top) return top;
  return static_cast<int>(pos);
}

SymbolVector symbols_from_indices(std::vector<int> indices, const Constellation& c) {
  SymbolVector s{std::move(indices), {}};
  s.values.reserve(s.indices.size());
  const auto levels = c.levels();
  for (int i : s.indices) {
    if (i < 0 || i >= c.levels_per_axis()) throw Error(ErrorCode::InvalidArgument, "level index out of range");
    s.values.push_back(levels[static_cast<std::size_t>(i)]);
  }
  return s;
}

SymbolVector slice(std::span<const double> v, const Constellation& c) {
  SymbolVector s;
  s.indices.reserve(v.size());
  s.values.reserve(v.size());
  const auto levels = c.levels();
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFinite, "slice input is not finite");
    const int idx = c.nearest_index(x);
    s.indices.push_back(idx);
    s.values.push_back(levels[static_cast<std::size_t>(idx)]);
  }
  return s;
}

SymbolVector bits_to_symbols(std::span<const std::uint8_t> bits, const Constellation& c, std::size_t m) {
  const auto k = static_cast<std::size_t>(c.bits_per_pam());
  if (bits.size() != m * k) {
    throw Error(ErrorCode::LengthMismatch,
                "expected " + std::to_string(m * k) + " bits, got " + std::to_string(bits.size()));
  }
  std::vector<int> idx(m);
  for (std::size_t d = 0; d < m; ++d) {
    std::uint32_t label = 0;
    for (std::size_t b = 0; b < k; ++b) label = (label << 1) | (bits[d * k + b] & 1U);
    idx[d] = c.index_of_label(label);
  }
  return symbols_from_indices(std::move(idx), c);
}

Bits symbols_to_bits(const SymbolVector& sym, const Constellation& c) {
  const auto k = static_cast<std::size_t>(c.bits_per_pam());
  Bits out(sym.indices.size() * k);
  for (std::size_t d = 0; d < sym.indices.size(); ++d) {
    const std::uint32_t label = c.label(sym.indices[d]);
    for (std::size_t b = 0; b < k; ++b) out[d * k + b] = static_cast<std::uint8_t>((label >> (k - 1 - b)) & 1U);
  }
  return out;
}

ComplexChannel make_complex_channel(std::size_t n_rx, std::size_t n_tx, std::vector<Complex> entries) {
  if (n_tx == 0 || n_rx < n_tx) {
    throw Error(ErrorCode::InvalidArgument,
                "channel needs N >= M >= 1, got N=" + std::to_string(n_rx) + " M=" + std::to_string(n_tx));
  }
  if (entries.size() != n_rx * n_tx) throw Error(ErrorCode::LengthMismatch, "channel entry count mismatch");
  return {n_rx, n_tx, std::move(entries)};
}

Matrix realify_channel(const ComplexChannel& hc) {
  const std::size_t n = hc.n_rx;
  const std::size_t m = hc.n_tx;
  Matrix h(2 * n, 2 * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const Complex v = hc(i, j);
      h(i, j) = v.real();
      h(i, j + m) = -v.imag();
      h(i + n, j) = v.imag();
      h(i + n, j + m) = v.real();
    }
  }
  return h;
}

Vector realify_vector(std::span<const Complex> vc) {
  Vector out(2 * vc.size());
  for (std::size_t i = 0; i < vc.size(); ++i) {
    out[i] = vc[i].real();
    out[i + vc.size()] = vc[i].imag();
  }
  return out;
}

ComplexChannel draw_rayleigh(std::size_t n_rx, std::size_t n_tx, Rng& rng) {
  const double sd = std::sqrt(0.5);
  std::vector<Complex> e(n_rx * n_tx);
  for (auto& v : e) {
    const double re = rng.normal(sd);
    const double im = rng.normal(sd);
    v = {re, im};
  }
  return make_complex_channel(n_rx, n_tx, std::move(e));
}

ComplexChannel force_condition(const ComplexChannel& hc, double kappa) {
  if (!(kappa >= 1.0) || !std::isfinite(kappa)) {
    throw Error(ErrorCode::InvalidArgument, "target condition number must be finite and >= 1");
  }
  const auto n = static_cast<Eigen::Index>(hc.n_rx);
  const auto m = static_cast<Eigen::Index>(hc.n_tx);
  Eigen::MatrixXcd a(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) = hc(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }

  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (!(s(m - 1) > kRankTol * s(0))) throw Error(ErrorCode::RankDeficient, "cannot condition a singular channel");
  if (m == 1 && kappa != 1.0) {
    throw Error(ErrorCode::InvalidArgument, "a single-column channel always has condition number 1");
  }

  Eigen::VectorXd target(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double frac = m == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(m - 1);
    target(i) = s(0) * std::pow(kappa, -frac);
  }
  target *= s.norm() / target.norm();

  const Eigen::MatrixXcd out = svd.matrixU() * target.asDiagonal() * svd.matrixV().adjoint();
  std::vector<Complex> e(hc.entries.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) e[static_cast<std::size_t>(i * m + j)] = out(i, j);
  }
  return make_complex_channel(hc.n_rx, hc.n_tx, std::move(e));
}

Vector draw_noise(std::size_t n, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise std dev must be >= 0");
  Vector w(n, 0.0);
  if (sigma == 0.0) return w;
  for (double& v : w) v = rng.normal(sigma);
  return w;
}

double sigma_for_snr(double snr_db, const Constellation& /*c*/, std::size_t /*n_tx*/) {
  // Constellation energy is normalized and symbols carry a 1/sqrt(M) factor,
  // so neither enters the noise level.
  return std::sqrt(0.5 * std::pow(10.0, -snr_db / 10.0));
}

RealChannel make_real_channel(Matrix h, bool with_pseudo_inverse) {
  QrFactors qr = qr_factorize(h);
  RSplit split = split_r(qr.r);
  FlopCounter flops;
  const double cond = condition_number(h, &flops);
  std::optional<Matrix> pinv;
  if (with_pseudo_inverse) pinv = pseudo_inverse(h);
  return {std::move(h), std::move(qr), std::move(split), cond, flops.count, std::move(pinv)};
}

}  // namespace mzf
