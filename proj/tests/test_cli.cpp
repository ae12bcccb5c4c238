#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kBinary = MZF_BINARY;
const fs::path kPresets = MZF_PRESET_DIR;

fs::path scratch() {
  static const fs::path root = [] {
    const fs::path p = fs::temp_directory_path() / ("mzf_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(p);
    return p;
  }();
  return root;
}

int run(const std::string& args, std::string* stdout_text = nullptr) {
  const fs::path captured = scratch() / "stdout.txt";
  const std::string cmd = kBinary.string() + " " + args + " > " + captured.string() + " 2> " +
                          (scratch() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  if (stdout_text != nullptr) {
    std::ifstream in(captured);
    std::ostringstream s;
    s << in.rdbuf();
    *stdout_text = s.str();
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::size_t data_rows(const fs::path& csv) {
  const std::string text = read(csv);
  std::size_t lines = 0;
  for (char ch : text) lines += ch == '\n' ? 1U : 0U;
  return lines == 0 ? 0 : lines - 1;
}

}  // namespace

TEST_CASE("ber on the fig3 preset writes 44 rows and a manifest") {
  const fs::path out = scratch() / "fig3";
  REQUIRE(run("--quiet ber " + (kPresets / "fig3.json").string() + " --out " + out.string()) == 0);
  CHECK(read(out / "ber.csv").rfind("snr_db,decoder,ber,ber_lo,ber_hi,ser,flops_mean,time_ns_per_bit,erasures\n", 0) ==
        0);
  CHECK(data_rows(out / "ber.csv") == 44);

  const auto manifest = nlohmann::json::parse(read(out / "manifest.json"));
  CHECK(manifest["command"] == "ber");
  CHECK(manifest["master_seed"] == 3);
  CHECK(manifest["config_echo"]["p_ill"] == 1.0);
  CHECK(manifest["conventions"].contains("snr_definition"));
  CHECK(manifest["conventions"].contains("gray_map"));
  CHECK(manifest["conventions"].contains("gamma"));
  CHECK(manifest["conventions"].contains("conditioning_method"));
  CHECK(manifest.contains("timestamp"));
  CHECK(manifest.contains("tool_version"));
}

TEST_CASE("cond-study on the fig1 preset writes 10 rows with means >= 1") {
  const fs::path out = scratch() / "fig1";
  REQUIRE(run("--quiet cond-study " + (kPresets / "fig1.json").string() + " --out " + out.string()) == 0);
  CHECK(data_rows(out / "cond_study.csv") == 10);
  std::istringstream in(read(out / "cond_study.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "kappa_in,mean_cond_rhat,mean_cond_rdiag,runs");
  while (std::getline(in, line)) {
    std::istringstream cells(line);
    std::string kappa;
    std::string rhat;
    std::string rdiag;
    std::getline(cells, kappa, ',');
    std::getline(cells, rhat, ',');
    std::getline(cells, rdiag, ',');
    CHECK(std::stod(rdiag) >= 1.0);
    CHECK(std::stod(rhat) >= 1.0);
  }
}

TEST_CASE("sweep-kappa on the fig5 preset writes 20 rows") {
  const fs::path out = scratch() / "fig5";
  REQUIRE(run("--quiet sweep-kappa " + (kPresets / "fig5.json").string() + " --out " + out.string()) == 0);
  CHECK(data_rows(out / "ber_vs_kappa.csv") == 20);
  CHECK(read(out / "ber_vs_kappa.csv").rfind("kappa,decoder,", 0) == 0);
}

TEST_CASE("configuration problems exit with status 2") {
  const fs::path out = scratch() / "bad";
  CHECK(run("ber " + write_config("empty.json", R"({"decoders": []})").string() + " --out " + out.string()) == 2);
  CHECK(run("ber " + write_config("typo.json", R"({"gama": 5})").string() + " --out " + out.string()) == 2);
  CHECK(run("ber " + write_config("range.json", R"({"p_ill": 1.5})").string() + " --out " + out.string()) == 2);
  CHECK(run("ber " + write_config("syntax.json", "{").string() + " --out " + out.string()) == 2);
  CHECK(run("ber " + (scratch() / "missing.json").string() + " --out " + out.string()) == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("flops --n 2") == 2);
  CHECK_FALSE(fs::exists(out / "ber.csv"));
}

TEST_CASE("runtime failures exit with status 3") {
  const fs::path cfg = write_config("small.json", R"({"snr_db": [10], "channels_per_point": 2, "trials_per_point": 2})");
  const fs::path blocker = scratch() / "blocker";
  std::ofstream(blocker) << "not a directory";
  CHECK(run("ber " + cfg.string() + " --out " + (blocker / "sub").string()) == 3);
}

TEST_CASE("reruns are byte-identical and --seed overrides the config") {
  const fs::path cfg = write_config(
      "det.json", R"({"snr_db": [0, 10, 20], "p_ill": 0.5, "channels_per_point": 40, "trials_per_point": 10, "seed": 9})");
  const auto a = scratch() / "det_a";
  const auto b = scratch() / "det_b";
  const auto c = scratch() / "det_c";
  REQUIRE(run("--quiet --threads 1 ber " + cfg.string() + " --out " + a.string()) == 0);
  REQUIRE(run("--quiet --threads 8 ber " + cfg.string() + " --out " + b.string()) == 0);
  REQUIRE(run("--quiet --seed 10 ber " + cfg.string() + " --out " + c.string()) == 0);
  CHECK(read(a / "ber.csv") == read(b / "ber.csv"));
  CHECK(read(a / "ber.csv") != read(c / "ber.csv"));
  CHECK(nlohmann::json::parse(read(c / "manifest.json"))["master_seed"] == 10);

  auto without_timestamp = [](const fs::path& p) {
    auto j = nlohmann::json::parse(read(p));
    j.erase("timestamp");
    return j.dump();
  };
  CHECK(without_timestamp(a / "manifest.json") == without_timestamp(b / "manifest.json"));
}

TEST_CASE("flops prints the closed-form costs") {
  std::string text;
  REQUIRE(run("flops --n 4 --m 4", &text) == 0);
  CHECK(text == "n,m,flops_zf,flops_mzf\n4,4,85,69\n");
  REQUIRE(run("flops --n 8 --m 8", &text) == 0);
  CHECK(text == "n,m,flops_zf,flops_mzf\n8,8,683,619\n");
  CHECK(run("flops --n 2 --m 4") == 2);
}

TEST_CASE("complexity writes closed-form flop means") {
  const fs::path cfg = write_config(
      "cx.json", R"({"snr_db": [0, 20], "channels_per_point": 20, "trials_per_point": 5, "measure_time": true})");
  const fs::path out = scratch() / "cx";
  REQUIRE(run("--quiet complexity " + cfg.string() + " --out " + out.string()) == 0);
  const std::string text = read(out / "complexity.csv");
  CHECK(data_rows(out / "complexity.csv") == 8);
  CHECK(text.find("\n0,ZF,85,") != std::string::npos);
  CHECK(text.find("\n20,MZF,69,") != std::string::npos);
}
