#pragma once

// Subcommand bodies behind the mzf executable. Each returns the process exit
// status: 0 on success, 2 for configuration errors, 3 for runtime failures.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>

namespace mzf {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;  // overrides the config's seed
  unsigned threads = 1;
  bool quiet = false;
};

int cmd_ber(const std::filesystem::path& config, const std::filesystem::path& out_dir, const GlobalOptions& opts,
            std::ostream& log);
int cmd_sweep_kappa(const std::filesystem::path& config, const std::filesystem::path& out_dir,
                    const GlobalOptions& opts, std::ostream& log);
int cmd_cond_study(const std::filesystem::path& config, const std::filesystem::path& out_dir,
                   const GlobalOptions& opts, std::ostream& log);
int cmd_complexity(const std::filesystem::path& config, const std::filesystem::path& out_dir,
                   const GlobalOptions& opts, std::ostream& log);
int cmd_flops(std::uint64_t n, std::uint64_t m, std::ostream& out, std::ostream& log);

}  // namespace mzf
