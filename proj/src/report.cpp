#include "mzf/report.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <ctime>

#include "json.hpp"
#include "mzf/config.hpp"

namespace mzf {

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

namespace {

std::string format_count(std::uint64_t v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

}  // namespace

void write_ber_csv(std::ostream& out, const std::vector<BerPoint>& points, std::string_view coordinate) {
  out << coordinate << ",decoder,ber,ber_lo,ber_hi,ser,flops_mean,time_ns_per_bit,erasures\n";
  for (const auto& p : points) {
    for (const auto& s : p.decoders) {
      const auto [lo, hi] = confidence_interval(s.bit_errors, s.bits_total);
      const double flops_mean = static_cast<double>(s.flops_total) / static_cast<double>(s.vectors_total);
      const double ns_per_bit = static_cast<double>(s.wall_time_ns) / static_cast<double>(s.bits_total);
      out << format_number(p.coordinate) << ',' << to_string(s.kind) << ',' << format_number(s.ber()) << ','
          << format_number(lo) << ',' << format_number(hi) << ',' << format_number(s.ser()) << ','
          << format_number(flops_mean) << ',' << format_number(ns_per_bit) << ',' << format_count(s.erasures)
          << '\n';
    }
  }
}

void write_cond_study_csv(std::ostream& out, const std::vector<CondStudyPoint>& points) {
  out << "kappa_in,mean_cond_rhat,mean_cond_rdiag,runs\n";
  for (const auto& p : points) {
    out << format_number(p.kappa_in) << ',' << format_number(p.mean_cond_rhat) << ','
        << format_number(p.mean_cond_rdiag) << ',' << format_count(p.runs) << '\n';
  }
}

void write_complexity_csv(std::ostream& out, const std::vector<ComplexityRow>& rows) {
  out << "snr_db,decoder,flops_mean,time_ns_per_bit,time_ns_per_vector,time_ns_per_vector_stderr,sd_nodes_mean,"
         "factorization_ns_per_vector\n";
  for (const auto& r : rows) {
    out << format_number(r.snr_db) << ',' << to_string(r.decoder) << ',' << format_number(r.flops_mean) << ','
        << format_number(r.time_ns_per_bit) << ',' << format_number(r.time_ns_per_vector) << ','
        << format_number(r.time_ns_per_vector_stderr) << ',' << format_number(r.sd_nodes_mean) << ','
        << format_number(r.factorization_ns_per_vector) << '\n';
  }
}

std::string make_manifest(const TrialConfig& cfg, std::string_view command, const std::vector<std::string>& outputs,
                          std::string_view timestamp) {
  using nlohmann::json;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = "mzf";
  j["tool_version"] = std::string(kToolVersion);
  j["command"] = std::string(command);
  j["master_seed"] = cfg.seed;
  j["timestamp"] = std::string(timestamp);
  j["config_echo"] = json::parse(serialize_config(cfg));
  j["outputs"] = outputs;
  j["conventions"] = {
      {"snr_definition", "SNR = 1/(2 sigma^2): total transmit power 1, unit-energy QAM scaled by 1/sqrt(M), "
                         "sigma^2 noise variance per real dimension"},
      {"gray_map", "reflected binary Gray code per real axis, MSB first, 0..0 on the lowest level"},
      {"gamma", cfg.gamma},
      {"conditioning_method", "SVD of the drawn channel; singular values replaced by a geometric progression from "
                              "sigma_1 to sigma_1/kappa, rescaled to the original Frobenius norm"},
      {"ill_mixing", "each channel forced with probability p_ill (ber); every channel forced (sweep-kappa)"},
      {"sd_mode", cfg.sphere_mode == SphereMode::Adaptive ? "adaptive Schnorr-Euchner" : "fixed radius"},
      {"sd_failure", "erasure: every bit of the vector counted in error"},
      {"hd_tie", "cond(H) == gamma takes the ZF branch"},
      {"timing", cfg.measure_time ? "steady clock around each decode call, single worker"
                                  : "not measured (time columns are 0)"},
  };
  return j.dump(2) + "\n";
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  const std::size_t len = std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return {buf.data(), len};
}

}  // namespace mzf
