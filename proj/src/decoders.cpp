#include "mzf/decoders.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mzf/error.hpp"

namespace mzf {

std::string_view to_string(DecoderKind kind) noexcept {
  switch (kind) {
    case DecoderKind::ZF: return "ZF";
    case DecoderKind::MZF: return "MZF";
    case DecoderKind::HD: return "HD";
    case DecoderKind::SD: return "SD";
    case DecoderKind::ML: return "ML";
  }
  return "?";
}

std::optional<DecoderKind> decoder_from_string(std::string_view name) noexcept {
  for (auto k : {DecoderKind::ZF, DecoderKind::MZF, DecoderKind::HD, DecoderKind::SD, DecoderKind::ML}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

namespace {

void require_dims(std::span<const double> y, const RealChannel& ch) {
  if (y.size() != ch.n()) {
    throw Error(ErrorCode::LengthMismatch,
                "received vector has " + std::to_string(y.size()) + " entries, channel has " + std::to_string(ch.n()));
  }
}

DecodeOutcome finish(std::span<const double> y, const RealChannel& ch, SymbolVector symbols, std::uint64_t flops,
                     DecoderKind tag) {
  DecodeOutcome out;
  out.residual = residual_norm2(y, ch.h, symbols.values);
  out.symbols = std::move(symbols);
  out.flops = flops;
  out.tag = tag;
  return out;
}

}  // namespace

double residual_norm2(std::span<const double> y, const Matrix& h, std::span<const double> x) {
  if (h.rows() != y.size() || h.cols() != x.size()) throw Error(ErrorCode::LengthMismatch, "residual dimensions");
  double total = 0.0;
  for (std::size_t i = 0; i < h.rows(); ++i) {
    double e = y[i];
    for (std::size_t j = 0; j < h.cols(); ++j) e -= h(i, j) * x[j];
    total += e * e;
  }
  return total;
}

std::uint64_t flops_zf(std::uint64_t n, std::uint64_t m) {
  if (m == 0 || n < m) throw Error(ErrorCode::InvalidArgument, "flop model needs n >= m >= 1");
  // 3 * (2nm^2 - (2/3)m^3), exact in integers; round-half-up division by 3.
  const std::uint64_t thrice = 6 * n * m * m - 2 * m * m * m;
  return (thrice + 1) / 3;
}

std::uint64_t flops_mzf(std::uint64_t n, std::uint64_t m) {
  // The m^2 term is an integer, so rounding commutes with the subtraction.
  return flops_zf(n, m) - m * m;
}

Vector zf_estimate(std::span<const double> y, const RealChannel& ch) {
  require_dims(y, ch);
  const Vector z = multiply_transposed(ch.qr.q, y);
  return back_substitute(ch.qr.r, z);
}

Vector mzf_estimate(std::span<const double> y, const RealChannel& ch) {
  require_dims(y, ch);
  Vector z = multiply_transposed(ch.qr.q, y);
  const auto& d = ch.split.r_diag;
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (!(std::abs(d[j]) > 0.0)) throw Error(ErrorCode::SingularDiagonal, "zero diagonal in R");
    z[j] /= d[j];
  }
  return z;
}

DecodeOutcome decode_zf(std::span<const double> y, const RealChannel& ch, const Constellation& c) {
  return finish(y, ch, slice(zf_estimate(y, ch), c), flops_zf(ch.n(), ch.m()), DecoderKind::ZF);
}

DecodeOutcome decode_mzf(std::span<const double> y, const RealChannel& ch, const Constellation& c) {
  return finish(y, ch, slice(mzf_estimate(y, ch), c), flops_mzf(ch.n(), ch.m()), DecoderKind::MZF);
}

DecodeOutcome decode_hybrid(std::span<const double> y, const RealChannel& ch, const Constellation& c, double gamma,
                            bool charge_condition) {
  if (!(gamma > 1.0)) throw Error(ErrorCode::InvalidArgument, "hybrid threshold must exceed 1");
  // cond == gamma falls to ZF.
  const bool use_zf = ch.cond <= gamma;
  DecodeOutcome out = use_zf ? decode_zf(y, ch, c) : decode_mzf(y, ch, c);
  out.branch_taken = out.tag;
  out.tag = DecoderKind::HD;
  if (charge_condition) out.flops += ch.cond_flops;
  return out;
}

namespace {

// Nearest-first enumeration of level indices around a real center.
struct LevelCursor {
  int lo = 0;
  int hi = 0;
  bool first = true;
  int start = 0;

  void reset(int nearest) {
    start = nearest;
    lo = nearest - 1;
    hi = nearest + 1;
    first = true;
  }

  void exhaust(int levels) {
    first = false;
    lo = -1;
    hi = levels;
  }

  // Returns -1 when every level has been visited.
  int next(double center, std::span<const double> lv) {
    if (first) {
      first = false;
      return start;
    }
    const int count = static_cast<int>(lv.size());
    const bool lo_ok = lo >= 0;
    const bool hi_ok = hi < count;
    if (!lo_ok && !hi_ok) return -1;
    if (lo_ok && (!hi_ok || std::abs(center - lv[static_cast<std::size_t>(lo)]) <=
                                std::abs(center - lv[static_cast<std::size_t>(hi)]))) {
      return lo--;
    }
    return hi++;
  }
};

}  // namespace

DecodeOutcome decode_sphere(std::span<const double> y, const RealChannel& ch, const Constellation& c,
                            const SphereConfig& cfg) {
  require_dims(y, ch);
  if (cfg.node_budget < 1) throw Error(ErrorCode::InvalidArgument, "node budget must be >= 1");
  if (cfg.mode == SphereMode::FixedRadius && !(cfg.rho > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "fixed-radius sphere decoding needs rho > 0");
  }

  const std::size_t m = ch.m();
  const Matrix& r = ch.qr.r;
  const auto lv = c.levels();
  const int levels = c.levels_per_axis();
  const Vector z = multiply_transposed(ch.qr.q, y);

  // Preprocessing is priced like MZF (QR plus Q^T y); the search adds
  // 2(m-1-k)+1 flops per center and 3 per evaluated child.
  std::uint64_t flops = flops_mzf(ch.n(), m);
  std::uint64_t nodes = 0;

  double radius2 = cfg.mode == SphereMode::Adaptive ? std::numeric_limits<double>::infinity() : cfg.rho * cfg.rho;
  bool found = false;
  std::vector<int> best(m, 0);
  std::vector<int> x(m, 0);
  Vector center(m, 0.0);
  Vector above(m + 1, 0.0);  // above[k]: path metric of coordinates k..m-1
  std::vector<LevelCursor> cursor(m);

  auto open = [&](std::size_t k) {
    double s = z[k];
    for (std::size_t j = k + 1; j < m; ++j) s -= r(k, j) * lv[static_cast<std::size_t>(x[j])];
    center[k] = s / r(k, k);
    flops += 2 * (m - 1 - k) + 1;
    cursor[k].reset(c.nearest_index(center[k]));
  };

  std::size_t k = m - 1;
  open(k);
  for (;;) {
    const int idx = cursor[k].next(center[k], lv);
    if (idx < 0) {
      if (++k == m) break;
      continue;
    }
    const double e = r(k, k) * (center[k] - lv[static_cast<std::size_t>(idx)]);
    const double d = above[k + 1] + e * e;
    flops += 3;
    if (++nodes > cfg.node_budget) {
      throw Error(ErrorCode::BudgetExceeded, "sphere search visited more than " + std::to_string(cfg.node_budget) +
                                                 " nodes");
    }
    if (d >= radius2) {
      // Children arrive nearest-first, so every remaining sibling is farther.
      cursor[k].exhaust(levels);
      if (++k == m) break;
      continue;
    }
    x[k] = idx;
    if (k == 0) {
      radius2 = d;
      best = x;
      found = true;
      continue;
    }
    above[k] = d;
    --k;
    open(k);
  }

  if (!found) throw Error(ErrorCode::SearchFailed, "no lattice point inside the search radius");
  DecodeOutcome out = finish(y, ch, symbols_from_indices(std::move(best), c), flops, DecoderKind::SD);
  out.nodes_visited = nodes;
  return out;
}

DecodeOutcome decode_ml_bruteforce(std::span<const double> y, const RealChannel& ch, const Constellation& c,
                                   std::uint64_t cap) {
  require_dims(y, ch);
  const std::size_t m = ch.m();
  const auto levels = static_cast<std::uint64_t>(c.levels_per_axis());
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < m; ++i) {
    if (total > cap / levels) throw Error(ErrorCode::TooLarge, "ML enumeration exceeds cap");
    total *= levels;
  }
  if (total > cap) throw Error(ErrorCode::TooLarge, "ML enumeration exceeds cap");

  const auto lv = c.levels();
  std::vector<int> idx(m, 0);
  Vector x(m);
  std::vector<int> best;
  double best_metric = std::numeric_limits<double>::infinity();

  // Odometer over index vectors with coordinate 0 most significant, so the
  // first minimizer met is the lexicographically smallest.
  for (std::uint64_t t = 0; t < total; ++t) {
    for (std::size_t j = 0; j < m; ++j) x[j] = lv[static_cast<std::size_t>(idx[j])];
    const double metric = residual_norm2(y, ch.h, x);
    if (metric < best_metric) {
      best_metric = metric;
      best = idx;
    }
    for (std::size_t j = m; j-- > 0;) {
      if (++idx[j] < c.levels_per_axis()) break;
      idx[j] = 0;
    }
  }
  const std::uint64_t per_candidate = 2 * ch.n() * m + 2 * ch.n();
  return finish(y, ch, symbols_from_indices(std::move(best), c), total * per_candidate, DecoderKind::ML);
}

}  // namespace mzf
