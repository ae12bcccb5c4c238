#include "mzf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <string>
#include <thread>

#include "mzf/error.hpp"

namespace mzf {

namespace {

// Stream domains keep the sweeps' random sequences apart.
constexpr std::uint64_t kBerDomain = 1;
constexpr std::uint64_t kKappaDomain = 2;
constexpr std::uint64_t kCondDomain = 3;

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::ConfigInvalid, field + ": " + why);
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1U, threads);
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    const auto workers = std::min<std::size_t>(threads, count);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count || failed.load()) return;
          try {
            fn(i);
          } catch (...) {
            const std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed.store(true);
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

void accumulate(DecoderStats& into, const DecoderStats& from) {
  into.bit_errors += from.bit_errors;
  into.bits_total += from.bits_total;
  into.symbol_errors += from.symbol_errors;
  into.symbols_total += from.symbols_total;
  into.vectors_total += from.vectors_total;
  into.flops_total += from.flops_total;
  into.erasures += from.erasures;
  into.sd_nodes_visited += from.sd_nodes_visited;
  into.mzf_branch += from.mzf_branch;
  into.wall_time_ns += from.wall_time_ns;
  into.wall_time_sq_ns2 += from.wall_time_sq_ns2;
}

struct ItemResult {
  bool forced = false;
  std::uint64_t factorization_ns = 0;
  std::vector<DecoderStats> stats;
};

enum class SweepKind { Snr, Kappa };

struct Scenario {
  const TrialConfig& cfg;
  const Constellation constellation;
  SweepKind kind;
};

ItemResult run_channel(const Scenario& sc, double coordinate, std::uint64_t channel_index) {
  const TrialConfig& cfg = sc.cfg;
  const Constellation& c = sc.constellation;
  const std::size_t m = 2 * cfg.n_tx;
  const std::size_t bits_per_vector = m * static_cast<std::size_t>(c.bits_per_pam());

  const std::uint64_t domain = sc.kind == SweepKind::Snr ? kBerDomain : kKappaDomain;
  Rng rng = Rng::derive(cfg.seed, {domain, channel_index});

  ItemResult res;
  double kappa = cfg.kappa;
  double snr_db = coordinate;
  if (sc.kind == SweepKind::Snr) {
    res.forced = rng.bernoulli(cfg.p_ill);
  } else {
    res.forced = true;
    kappa = coordinate;
    snr_db = cfg.sweep_snr_db;
  }
  ComplexChannel hc = draw_rayleigh(cfg.n_rx, cfg.n_tx, rng);
  if (res.forced) hc = force_condition(hc, kappa);

  // Symbols carry 1/sqrt(M) so total transmit power stays 1; fold it into H.
  const double tx_scale = 1.0 / std::sqrt(static_cast<double>(cfg.n_tx));
  const auto f0 = std::chrono::steady_clock::now();
  const RealChannel ch = make_real_channel(tx_scale * realify_channel(hc));
  const auto f1 = std::chrono::steady_clock::now();
  if (cfg.measure_time) {
    res.factorization_ns = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(f1 - f0).count());
  }

  const double sigma = sigma_for_snr(snr_db, c, cfg.n_tx);
  const SphereConfig sphere{cfg.sphere_mode, cfg.sphere_rho, cfg.sphere_node_budget};

  const std::size_t nd = cfg.decoders.size();
  res.stats.resize(nd);
  for (std::size_t d = 0; d < nd; ++d) res.stats[d].kind = cfg.decoders[d];

  Bits bits(bits_per_vector);
  for (std::uint64_t t = 0; t < cfg.trials_per_point; ++t) {
    for (auto& b : bits) b = rng.bit();
    const SymbolVector tx = bits_to_symbols(bits, c, m);
    Vector y = ch.h * std::span<const double>(tx.values);
    const Vector w = draw_noise(y.size(), sigma, rng);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += w[i];

    // Rotate the call order when timing so no decoder always runs first.
    for (std::size_t step = 0; step < nd; ++step) {
      const std::size_t d = cfg.measure_time ? (step + t) % nd : step;
      DecoderStats& st = res.stats[d];
      st.vectors_total += 1;
      st.bits_total += bits_per_vector;
      st.symbols_total += cfg.n_tx;

      std::optional<DecodeOutcome> out;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        switch (st.kind) {
          case DecoderKind::ZF: out = decode_zf(y, ch, c); break;
          case DecoderKind::MZF: out = decode_mzf(y, ch, c); break;
          case DecoderKind::HD: out = decode_hybrid(y, ch, c, cfg.gamma, t == 0); break;
          case DecoderKind::SD: out = decode_sphere(y, ch, c, sphere); break;
          case DecoderKind::ML: out = decode_ml_bruteforce(y, ch, c, cfg.ml_cap); break;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SearchFailed && e.code() != ErrorCode::BudgetExceeded) throw;
      }
      const auto t1 = std::chrono::steady_clock::now();
      if (cfg.measure_time) {
        const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
        st.wall_time_ns += static_cast<std::uint64_t>(ns);
        st.wall_time_sq_ns2 += static_cast<double>(ns) * static_cast<double>(ns);
      }

      if (!out) {
        st.erasures += 1;
        st.bit_errors += bits_per_vector;
        st.symbol_errors += cfg.n_tx;
        continue;
      }
      st.flops_total += out->flops;
      st.sd_nodes_visited += out->nodes_visited;
      if (out->branch_taken == DecoderKind::MZF) st.mzf_branch += 1;

      const Bits rx = symbols_to_bits(out->symbols, c);
      for (std::size_t i = 0; i < bits_per_vector; ++i) st.bit_errors += rx[i] != bits[i] ? 1U : 0U;
      for (std::size_t j = 0; j < cfg.n_tx; ++j) {
        const bool wrong = out->symbols.indices[j] != tx.indices[j] ||
                           out->symbols.indices[j + cfg.n_tx] != tx.indices[j + cfg.n_tx];
        st.symbol_errors += wrong ? 1U : 0U;
      }
    }
  }
  return res;
}

std::vector<BerPoint> run_sweep(const TrialConfig& cfg, const RunOptions& opts, SweepKind kind) {
  validate(cfg);
  const Scenario sc{cfg, make_constellation(cfg.qam), kind};
  const std::vector<double>& grid = kind == SweepKind::Snr ? cfg.snr_grid_db : cfg.kappa_grid;
  const std::uint64_t per_point = cfg.channels_per_point;
  const std::size_t items = grid.size() * per_point;

  std::vector<ItemResult> results(items);
  parallel_for(items, opts.threads, [&](std::size_t i) {
    results[i] = run_channel(sc, grid[i / per_point], i % per_point);
  });

  std::vector<BerPoint> points(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    BerPoint& bp = points[p];
    bp.coordinate = grid[p];
    bp.decoders.resize(cfg.decoders.size());
    for (std::size_t d = 0; d < cfg.decoders.size(); ++d) bp.decoders[d].kind = cfg.decoders[d];
    for (std::uint64_t k = 0; k < per_point; ++k) {
      const ItemResult& r = results[p * per_point + k];
      bp.channels += 1;
      bp.channels_forced += r.forced ? 1U : 0U;
      bp.factorization_ns += r.factorization_ns;
      for (std::size_t d = 0; d < r.stats.size(); ++d) accumulate(bp.decoders[d], r.stats[d]);
    }
  }
  return points;
}

}  // namespace

double DecoderStats::ber() const noexcept {
  return bits_total == 0 ? 0.0 : static_cast<double>(bit_errors) / static_cast<double>(bits_total);
}

double DecoderStats::ser() const noexcept {
  return symbols_total == 0 ? 0.0 : static_cast<double>(symbol_errors) / static_cast<double>(symbols_total);
}

const DecoderStats& BerPoint::stats(DecoderKind kind) const {
  for (const auto& s : decoders) {
    if (s.kind == kind) return s;
  }
  throw Error(ErrorCode::InvalidArgument, "decoder " + std::string(to_string(kind)) + " not in this run");
}

void validate(const TrialConfig& cfg) {
  if (cfg.n_tx < 1) invalid("M", "must be >= 1");
  if (cfg.n_rx < cfg.n_tx) invalid("N", "must be >= M");
  try {
    (void)make_constellation(cfg.qam);
  } catch (const Error&) {
    invalid("q", "must be one of 4, 16, 64, 256");
  }
  if (cfg.snr_grid_db.empty()) invalid("snr_db", "must not be empty");
  for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i) {
    if (!std::isfinite(cfg.snr_grid_db[i])) invalid("snr_db", "values must be finite");
    if (i > 0 && !(cfg.snr_grid_db[i] > cfg.snr_grid_db[i - 1])) invalid("snr_db", "must be strictly increasing");
  }
  if (!(cfg.p_ill >= 0.0 && cfg.p_ill <= 1.0)) invalid("p_ill", "must lie in [0, 1]");
  if (!(cfg.kappa >= 1.0) || !std::isfinite(cfg.kappa)) invalid("kappa", "must be finite and >= 1");
  if (!(cfg.gamma > 1.0)) invalid("gamma", "must be > 1");
  if (cfg.decoders.empty()) invalid("decoders", "must list at least one decoder");
  if (std::set<DecoderKind>(cfg.decoders.begin(), cfg.decoders.end()).size() != cfg.decoders.size()) {
    invalid("decoders", "must not repeat a decoder");
  }
  if (cfg.trials_per_point < 1) invalid("trials_per_point", "must be >= 1");
  if (cfg.channels_per_point < 1) invalid("channels_per_point", "must be >= 1");
  if (cfg.kappa_grid.empty()) invalid("kappa_grid", "must not be empty");
  for (double k : cfg.kappa_grid) {
    if (!(k >= 1.0) || !std::isfinite(k)) invalid("kappa_grid", "values must be finite and >= 1");
  }
  if (!std::isfinite(cfg.sweep_snr_db)) invalid("sweep_snr_db", "must be finite");
  if (cfg.runs_per_point < 1) invalid("runs_per_point", "must be >= 1");
  if (cfg.sizes.empty()) invalid("sizes", "must not be empty");
  for (const auto& s : cfg.sizes) {
    if (s.n_tx < 1 || s.n_rx < s.n_tx) invalid("sizes", "each entry needs N >= M >= 1");
  }
  if (cfg.n_tx == 1 && cfg.p_ill > 0.0 && cfg.kappa != 1.0) {
    invalid("kappa", "a single transmit antenna cannot be forced above condition number 1");
  }
  if (cfg.sphere_mode == SphereMode::FixedRadius && !(cfg.sphere_rho > 0.0)) invalid("sphere.rho", "must be > 0");
  if (cfg.sphere_node_budget < 1) invalid("sphere.node_budget", "must be >= 1");
  if (std::find(cfg.decoders.begin(), cfg.decoders.end(), DecoderKind::ML) != cfg.decoders.end()) {
    const double points = std::pow(static_cast<double>(cfg.qam), static_cast<double>(cfg.n_tx));
    if (points > static_cast<double>(cfg.ml_cap)) invalid("decoders", "ML enumeration q^M exceeds ml_cap");
  }
}

std::vector<BerPoint> run_ber_sweep(const TrialConfig& cfg, const RunOptions& opts) {
  return run_sweep(cfg, opts, SweepKind::Snr);
}

std::vector<BerPoint> run_kappa_sweep(const TrialConfig& cfg, const RunOptions& opts) {
  if (cfg.n_tx == 1) {
    for (double k : cfg.kappa_grid) {
      if (k != 1.0) invalid("kappa_grid", "a single transmit antenna cannot be forced above condition number 1");
    }
  }
  return run_sweep(cfg, opts, SweepKind::Kappa);
}

std::vector<CondStudyPoint> run_cond_study(const std::vector<double>& kappa_grid, std::uint64_t runs_per_point,
                                           ChannelSize size, std::uint64_t seed, const RunOptions& opts) {
  if (runs_per_point < 1) invalid("runs_per_point", "must be >= 1");
  if (kappa_grid.empty()) invalid("kappa_grid", "must not be empty");
  if (size.n_tx < 2 || size.n_rx < size.n_tx) invalid("sizes", "conditioning study needs N >= M >= 2");

  struct Run {
    double cond_rhat = 0.0;
    double cond_rdiag = 0.0;
    bool submultiplicative = true;
  };
  const std::size_t items = kappa_grid.size() * runs_per_point;
  std::vector<Run> runs(items);
  parallel_for(items, opts.threads, [&](std::size_t i) {
    const double kappa = kappa_grid[i / runs_per_point];
    const std::uint64_t run = i % runs_per_point;
    Rng rng = Rng::derive(seed, {kCondDomain, size.n_rx, size.n_tx, run});
    const ComplexChannel hc = force_condition(draw_rayleigh(size.n_rx, size.n_tx, rng), kappa);
    const QrFactors qr = qr_factorize(realify_channel(hc));
    const RSplit split = split_r(qr.r);
    Run& out = runs[i];
    out.cond_rhat = condition_number(split.r_hat);
    out.cond_rdiag = diagonal_condition_number(split.r_diag);
    // Exact in real arithmetic; allow for rounding in three SVDs.
    out.submultiplicative = out.cond_rhat * out.cond_rdiag >= condition_number(qr.r) * (1.0 - 1e-9);
  });

  std::vector<CondStudyPoint> points;
  points.reserve(kappa_grid.size());
  for (std::size_t p = 0; p < kappa_grid.size(); ++p) {
    CondStudyPoint pt;
    pt.size = size;
    pt.kappa_in = kappa_grid[p];
    pt.runs = runs_per_point;
    double sum_hat = 0.0;
    double sum_diag = 0.0;
    for (std::uint64_t r = 0; r < runs_per_point; ++r) {
      const Run& run = runs[p * runs_per_point + r];
      sum_hat += run.cond_rhat;
      sum_diag += run.cond_rdiag;
      pt.submultiplicative_violations += run.submultiplicative ? 0U : 1U;
    }
    pt.mean_cond_rhat = sum_hat / static_cast<double>(runs_per_point);
    pt.mean_cond_rdiag = sum_diag / static_cast<double>(runs_per_point);
    points.push_back(pt);
  }
  return points;
}

std::vector<ComplexityRow> run_complexity_sweep(const TrialConfig& cfg) {
  TrialConfig timed = cfg;
  timed.measure_time = true;
  const std::vector<BerPoint> points = run_ber_sweep(timed, RunOptions{1});

  std::vector<ComplexityRow> rows;
  for (const auto& p : points) {
    for (const auto& s : p.decoders) {
      ComplexityRow row;
      row.snr_db = p.coordinate;
      row.decoder = s.kind;
      row.vectors = s.vectors_total;
      const auto n = static_cast<double>(s.vectors_total);
      if (n > 0) {
        row.flops_mean = static_cast<double>(s.flops_total) / n;
        row.time_ns_per_vector = static_cast<double>(s.wall_time_ns) / n;
        row.time_ns_per_bit = static_cast<double>(s.wall_time_ns) / static_cast<double>(s.bits_total);
        const double var = std::max(0.0, s.wall_time_sq_ns2 / n - row.time_ns_per_vector * row.time_ns_per_vector);
        row.time_ns_per_vector_stderr = n > 1 ? std::sqrt(var * n / (n - 1) / n) : 0.0;
        row.sd_nodes_mean = static_cast<double>(s.sd_nodes_visited) / n;
        row.factorization_ns_per_vector = static_cast<double>(p.factorization_ns) / n;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::pair<double, double> confidence_interval(std::uint64_t errors, std::uint64_t total) {
  if (total == 0 || errors > total) throw Error(ErrorCode::InvalidArgument, "need 0 <= errors <= total, total >= 1");
  constexpr double z = 1.96;
  const auto n = static_cast<double>(total);
  const double p = static_cast<double>(errors) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  const double lo = errors == 0 ? 0.0 : std::clamp(center - half, 0.0, 1.0);
  const double hi = errors == total ? 1.0 : std::clamp(center + half, 0.0, 1.0);
  return {lo, hi};
}

}  // namespace mzf
