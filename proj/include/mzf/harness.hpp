#pragma once

// Monte Carlo engine: BER against SNR or against an imposed condition number,
// the R_hat / R_D conditioning study, and per-decoder cost tables.
//
// Work is split into (coordinate, channel) items. Each item owns an RNG stream
// derived from the master seed and the channel index, so the same channel,
// bits and normalized noise recur at every sweep coordinate and results do
// not depend on how items are scheduled across workers.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mzf/decoders.hpp"

namespace mzf {

struct ChannelSize {
  std::size_t n_rx = 2;
  std::size_t n_tx = 2;

  friend bool operator==(const ChannelSize&, const ChannelSize&) = default;
};

struct TrialConfig {
  std::size_t n_tx = 2;
  std::size_t n_rx = 2;
  int qam = 16;
  std::vector<double> snr_grid_db = {0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  double p_ill = 0.0;
  double kappa = 1000.0;
  double gamma = kDefaultGamma;
  std::vector<DecoderKind> decoders = {DecoderKind::ZF, DecoderKind::MZF, DecoderKind::HD, DecoderKind::SD};
  std::uint64_t trials_per_point = 100;
  std::uint64_t channels_per_point = 1000;
  std::uint64_t seed = 0;

  // Condition-number sweep at a fixed SNR.
  std::vector<double> kappa_grid = {1, 10, 100, 1000, 10000};
  double sweep_snr_db = 15.0;

  // Conditioning study.
  std::uint64_t runs_per_point = 10000;
  std::vector<ChannelSize> sizes = {{2, 2}};

  SphereMode sphere_mode = SphereMode::Adaptive;
  double sphere_rho = 0.0;
  std::uint64_t sphere_node_budget = 10'000'000;
  std::uint64_t ml_cap = kDefaultEnumerationCap;
  bool measure_time = false;

  friend bool operator==(const TrialConfig&, const TrialConfig&) = default;
};

// Throws ConfigInvalid naming the offending field.
void validate(const TrialConfig& cfg);

struct RunOptions {
  unsigned threads = 1;
};

struct DecoderStats {
  DecoderKind kind = DecoderKind::ZF;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits_total = 0;
  std::uint64_t symbol_errors = 0;  // complex QAM symbols
  std::uint64_t symbols_total = 0;
  std::uint64_t vectors_total = 0;
  std::uint64_t flops_total = 0;
  std::uint64_t erasures = 0;
  std::uint64_t sd_nodes_visited = 0;
  std::uint64_t mzf_branch = 0;  // HD decodes that took the MZF branch
  std::uint64_t wall_time_ns = 0;
  double wall_time_sq_ns2 = 0.0;  // sum of squared per-decode times

  [[nodiscard]] double ber() const noexcept;
  [[nodiscard]] double ser() const noexcept;
};

struct BerPoint {
  double coordinate = 0.0;  // SNR in dB or imposed condition number
  std::uint64_t channels = 0;
  std::uint64_t channels_forced = 0;
  std::uint64_t factorization_ns = 0;
  std::vector<DecoderStats> decoders;  // in config order

  [[nodiscard]] const DecoderStats& stats(DecoderKind kind) const;
};

std::vector<BerPoint> run_ber_sweep(const TrialConfig& cfg, const RunOptions& opts = {});

// Every channel forced to the coordinate's condition number at sweep_snr_db.
std::vector<BerPoint> run_kappa_sweep(const TrialConfig& cfg, const RunOptions& opts = {});

struct CondStudyPoint {
  ChannelSize size;
  double kappa_in = 1.0;
  double mean_cond_rhat = 0.0;
  double mean_cond_rdiag = 0.0;
  std::uint64_t runs = 0;
  std::uint64_t submultiplicative_violations = 0;
};

std::vector<CondStudyPoint> run_cond_study(const std::vector<double>& kappa_grid, std::uint64_t runs_per_point,
                                           ChannelSize size, std::uint64_t seed, const RunOptions& opts = {});

struct ComplexityRow {
  double snr_db = 0.0;
  DecoderKind decoder = DecoderKind::ZF;
  double flops_mean = 0.0;
  double time_ns_per_bit = 0.0;
  double time_ns_per_vector = 0.0;
  double time_ns_per_vector_stderr = 0.0;
  double sd_nodes_mean = 0.0;
  double factorization_ns_per_vector = 0.0;
  std::uint64_t vectors = 0;
};

// Timed single-worker BER sweep reduced to per-decoder cost figures.
std::vector<ComplexityRow> run_complexity_sweep(const TrialConfig& cfg);

// 95% Wilson score interval for errors out of total.
std::pair<double, double> confidence_interval(std::uint64_t errors, std::uint64_t total);

}  // namespace mzf
