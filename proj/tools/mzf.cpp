// mzf: Monte Carlo comparison of ZF, modified ZF, hybrid and sphere decoding.

#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "mzf/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"MIMO lattice detection experiments: ZF, MZF, hybrid and sphere decoders"};
  app.require_subcommand(1);

  mzf::GlobalOptions opts;
  opts.threads = std::max(1U, std::thread::hardware_concurrency());
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Override the config's master seed");
  app.add_option("--threads", opts.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", opts.quiet, "Suppress progress messages");

  std::string config;
  std::string out_dir = ".";
  auto add_run = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->add_option("config", config, "Scenario JSON file")->required();
    sub->add_option("--out", out_dir, "Output directory");
    return sub;
  };
  auto* ber = add_run("ber", "BER against SNR (writes ber.csv)");
  auto* cond = add_run("cond-study", "Condition numbers of R_hat and R_D (writes cond_study.csv)");
  auto* kappa = add_run("sweep-kappa", "BER against imposed condition number (writes ber_vs_kappa.csv)");
  auto* cplx = add_run("complexity", "Flop and wall-time tables (writes complexity.csv)");

  std::uint64_t n = 0;
  std::uint64_t m = 0;
  auto* flops = app.add_subcommand("flops", "Print the ZF and MZF flop model");
  flops->add_option("--n", n, "Real receive dimension")->required();
  flops->add_option("--m", m, "Real transmit dimension")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : mzf::kExitConfig;
  }
  if (*seed_opt) opts.seed = seed;

  if (*ber) return mzf::cmd_ber(config, out_dir, opts, std::cerr);
  if (*cond) return mzf::cmd_cond_study(config, out_dir, opts, std::cerr);
  if (*kappa) return mzf::cmd_sweep_kappa(config, out_dir, opts, std::cerr);
  if (*cplx) return mzf::cmd_complexity(config, out_dir, opts, std::cerr);
  if (*flops) return mzf::cmd_flops(n, m, std::cout, std::cerr);
  return mzf::kExitConfig;
}
