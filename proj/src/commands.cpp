#include "mzf/commands.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mzf/config.hpp"
#include "mzf/decoders.hpp"
#include "mzf/error.hpp"
#include "mzf/report.hpp"

namespace mzf {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::InvalidArgument, "short write to " + path.string());
}

int run(std::string_view command, const fs::path& config, const fs::path& out_dir, const GlobalOptions& opts,
        std::ostream& log, const std::function<std::vector<std::string>(const TrialConfig&)>& body) {
  TrialConfig cfg;
  try {
    cfg = parse_config(config);
    if (opts.seed) cfg.seed = *opts.seed;
  } catch (const Error& e) {
    log << "config error: " << e.detail() << '\n';
    return kExitConfig;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    fs::create_directories(out_dir);
    std::vector<std::string> outputs = body(cfg);
    write_file(out_dir / "manifest.json", make_manifest(cfg, command, outputs, utc_timestamp()));
    if (!opts.quiet) {
      const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      log << command << ": wrote";
      for (const auto& o : outputs) log << ' ' << (out_dir / o).string();
      log << " in " << format_number(secs) << " s\n";
    }
  } catch (const Error& e) {
    const bool config_problem = e.code() == ErrorCode::ConfigInvalid || e.code() == ErrorCode::ParseError;
    log << (config_problem ? "config error: " : "runtime error: ") << e.what() << '\n';
    return config_problem ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    log << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

std::string to_text(const std::function<void(std::ostream&)>& emit) {
  std::ostringstream s;
  emit(s);
  return s.str();
}

}  // namespace

int cmd_ber(const fs::path& config, const fs::path& out_dir, const GlobalOptions& opts, std::ostream& log) {
  return run("ber", config, out_dir, opts, log, [&](const TrialConfig& cfg) {
    const unsigned threads = cfg.measure_time ? 1U : opts.threads;
    const auto points = run_ber_sweep(cfg, RunOptions{threads});
    write_file(out_dir / "ber.csv", to_text([&](std::ostream& o) { write_ber_csv(o, points, "snr_db"); }));
    return std::vector<std::string>{"ber.csv"};
  });
}

int cmd_sweep_kappa(const fs::path& config, const fs::path& out_dir, const GlobalOptions& opts, std::ostream& log) {
  return run("sweep-kappa", config, out_dir, opts, log, [&](const TrialConfig& cfg) {
    const unsigned threads = cfg.measure_time ? 1U : opts.threads;
    const auto points = run_kappa_sweep(cfg, RunOptions{threads});
    write_file(out_dir / "ber_vs_kappa.csv", to_text([&](std::ostream& o) { write_ber_csv(o, points, "kappa"); }));
    return std::vector<std::string>{"ber_vs_kappa.csv"};
  });
}

int cmd_cond_study(const fs::path& config, const fs::path& out_dir, const GlobalOptions& opts, std::ostream& log) {
  return run("cond-study", config, out_dir, opts, log, [&](const TrialConfig& cfg) {
    std::vector<CondStudyPoint> all;
    for (const auto& size : cfg.sizes) {
      const auto pts = run_cond_study(cfg.kappa_grid, cfg.runs_per_point, size, cfg.seed, RunOptions{opts.threads});
      all.insert(all.end(), pts.begin(), pts.end());
    }
    write_file(out_dir / "cond_study.csv", to_text([&](std::ostream& o) { write_cond_study_csv(o, all); }));
    return std::vector<std::string>{"cond_study.csv"};
  });
}

int cmd_complexity(const fs::path& config, const fs::path& out_dir, const GlobalOptions& opts, std::ostream& log) {
  return run("complexity", config, out_dir, opts, log, [&](const TrialConfig& cfg) {
    const auto rows = run_complexity_sweep(cfg);
    write_file(out_dir / "complexity.csv", to_text([&](std::ostream& o) { write_complexity_csv(o, rows); }));
    return std::vector<std::string>{"complexity.csv"};
  });
}

int cmd_flops(std::uint64_t n, std::uint64_t m, std::ostream& out, std::ostream& log) {
  try {
    const std::uint64_t zf = flops_zf(n, m);
    out << "n,m,flops_zf,flops_mzf\n" << n << ',' << m << ',' << zf << ',' << flops_mzf(n, m) << '\n';
  } catch (const Error& e) {
    log << "config error: " << e.detail() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace mzf
