#pragma once

// Hard-decision MIMO detectors over a RealChannel: zero forcing, modified zero
// forcing (diagonal-only R), the condition-number hybrid of the two, a
// Schnorr-Euchner sphere decoder and an exhaustive ML reference.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "mzf/mimo.hpp"

namespace mzf {

enum class DecoderKind { ZF, MZF, HD, SD, ML };

std::string_view to_string(DecoderKind kind) noexcept;
std::optional<DecoderKind> decoder_from_string(std::string_view name) noexcept;

struct DecodeOutcome {
  SymbolVector symbols;
  double residual = 0.0;  // ||y - H x||^2
  std::uint64_t flops = 0;
  DecoderKind tag = DecoderKind::ZF;
  std::optional<DecoderKind> branch_taken;  // HD only
  std::uint64_t nodes_visited = 0;          // SD only
};

enum class SphereMode { Adaptive, FixedRadius };

struct SphereConfig {
  SphereMode mode = SphereMode::Adaptive;
  double rho = 0.0;  // fixed mode only, same units as ||y||
  std::uint64_t node_budget = 10'000'000;
};

inline constexpr double kDefaultGamma = 100.0;
inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 20;

// ||y - H x||^2, shared by every decoder so residuals compare bit-identically.
double residual_norm2(std::span<const double> y, const Matrix& h, std::span<const double> x);

// Closed-form cost model: 2nm^2 - (2/3)m^3 and that minus m^2, rounded to
// nearest from the exact rational.
std::uint64_t flops_zf(std::uint64_t n, std::uint64_t m);
std::uint64_t flops_mzf(std::uint64_t n, std::uint64_t m);

// Unsliced estimates: R^{-1} Q^T y and R_D^{-1} Q^T y.
Vector zf_estimate(std::span<const double> y, const RealChannel& ch);
Vector mzf_estimate(std::span<const double> y, const RealChannel& ch);

DecodeOutcome decode_zf(std::span<const double> y, const RealChannel& ch, const Constellation& c);
DecodeOutcome decode_mzf(std::span<const double> y, const RealChannel& ch, const Constellation& c);

// ZF when ch.cond <= gamma, MZF otherwise. With charge_condition set, the
// SVD cost behind ch.cond is added to the flop count; the Monte Carlo harness
// charges it once per channel realization.
DecodeOutcome decode_hybrid(std::span<const double> y, const RealChannel& ch, const Constellation& c,
                            double gamma = kDefaultGamma, bool charge_condition = true);

DecodeOutcome decode_sphere(std::span<const double> y, const RealChannel& ch, const Constellation& c,
                            const SphereConfig& cfg = {});

// Exhaustive search; ties go to the lexicographically smallest level-index
// vector. Throws TooLarge when (levels per axis)^m exceeds cap.
DecodeOutcome decode_ml_bruteforce(std::span<const double> y, const RealChannel& ch, const Constellation& c,
                                   std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace mzf
