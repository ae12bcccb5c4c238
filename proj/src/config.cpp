#include "mzf/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"
#include "mzf/error.hpp"

namespace mzf {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(std::string_view source, const std::string& path, const std::string& why) {
  throw Error(ErrorCode::ParseError, std::string(source) + ": " + path + ": " + why);
}

struct Reader {
  std::string_view source;

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) parse_fail(source, path, "expected a number");
    return v.get<double>();
  }

  std::uint64_t count(const json& v, const std::string& path) const {
    if (!v.is_number_unsigned()) parse_fail(source, path, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::vector<double> numbers(const json& v, const std::string& path) const {
    if (!v.is_array()) parse_fail(source, path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

  template <typename Handlers>
  void object(const json& v, const std::string& path, const Handlers& handlers) const {
    if (!v.is_object()) parse_fail(source, path, "expected an object");
    for (const auto& [key, value] : v.items()) {
      const auto it = handlers.find(key);
      if (it == handlers.end()) parse_fail(source, path, "unknown key '" + key + "'");
      it->second(value, path + "." + key);
    }
  }
};

using Handler = std::function<void(const json&, const std::string&)>;

}  // namespace

TrialConfig parse_config_text(std::string_view text, std::string_view source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string(source) + ": " + e.what());
  }

  const Reader rd{source};
  TrialConfig cfg;

  const std::map<std::string, Handler, std::less<>> sphere_keys{
      {"mode",
       [&](const json& v, const std::string& p) {
         if (v == "adaptive") {
           cfg.sphere_mode = SphereMode::Adaptive;
         } else if (v == "fixed") {
           cfg.sphere_mode = SphereMode::FixedRadius;
         } else {
           parse_fail(source, p, "expected \"adaptive\" or \"fixed\"");
         }
       }},
      {"rho", [&](const json& v, const std::string& p) { cfg.sphere_rho = rd.number(v, p); }},
      {"node_budget", [&](const json& v, const std::string& p) { cfg.sphere_node_budget = rd.count(v, p); }},
  };

  const std::map<std::string, Handler, std::less<>> keys{
      {"M", [&](const json& v, const std::string& p) { cfg.n_tx = rd.count(v, p); }},
      {"N", [&](const json& v, const std::string& p) { cfg.n_rx = rd.count(v, p); }},
      {"q", [&](const json& v, const std::string& p) { cfg.qam = static_cast<int>(rd.count(v, p)); }},
      {"snr_db", [&](const json& v, const std::string& p) { cfg.snr_grid_db = rd.numbers(v, p); }},
      {"p_ill", [&](const json& v, const std::string& p) { cfg.p_ill = rd.number(v, p); }},
      {"kappa", [&](const json& v, const std::string& p) { cfg.kappa = rd.number(v, p); }},
      {"gamma", [&](const json& v, const std::string& p) { cfg.gamma = rd.number(v, p); }},
      {"decoders",
       [&](const json& v, const std::string& p) {
         if (!v.is_array()) parse_fail(source, p, "expected an array of decoder names");
         cfg.decoders.clear();
         for (std::size_t i = 0; i < v.size(); ++i) {
           const std::string at = p + "[" + std::to_string(i) + "]";
           if (!v[i].is_string()) parse_fail(source, at, "expected a decoder name");
           const auto kind = decoder_from_string(v[i].get<std::string>());
           if (!kind) parse_fail(source, at, "unknown decoder '" + v[i].get<std::string>() + "'");
           cfg.decoders.push_back(*kind);
         }
       }},
      {"trials_per_point", [&](const json& v, const std::string& p) { cfg.trials_per_point = rd.count(v, p); }},
      {"channels_per_point", [&](const json& v, const std::string& p) { cfg.channels_per_point = rd.count(v, p); }},
      {"seed", [&](const json& v, const std::string& p) { cfg.seed = rd.count(v, p); }},
      {"kappa_grid", [&](const json& v, const std::string& p) { cfg.kappa_grid = rd.numbers(v, p); }},
      {"sweep_snr_db", [&](const json& v, const std::string& p) { cfg.sweep_snr_db = rd.number(v, p); }},
      {"runs_per_point", [&](const json& v, const std::string& p) { cfg.runs_per_point = rd.count(v, p); }},
      {"sizes",
       [&](const json& v, const std::string& p) {
         if (!v.is_array()) parse_fail(source, p, "expected an array of {\"N\", \"M\"} objects");
         cfg.sizes.clear();
         for (std::size_t i = 0; i < v.size(); ++i) {
           ChannelSize s;
           const std::map<std::string, Handler, std::less<>> size_keys{
               {"N", [&](const json& x, const std::string& q) { s.n_rx = rd.count(x, q); }},
               {"M", [&](const json& x, const std::string& q) { s.n_tx = rd.count(x, q); }},
           };
           rd.object(v[i], p + "[" + std::to_string(i) + "]", size_keys);
           cfg.sizes.push_back(s);
         }
       }},
      {"sphere", [&](const json& v, const std::string& p) { rd.object(v, p, sphere_keys); }},
      {"ml_cap", [&](const json& v, const std::string& p) { cfg.ml_cap = rd.count(v, p); }},
      {"measure_time",
       [&](const json& v, const std::string& p) {
         if (!v.is_boolean()) parse_fail(source, p, "expected true or false");
         cfg.measure_time = v.get<bool>();
       }},
  };

  rd.object(root, "$", keys);
  try {
    validate(cfg);
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, std::string(source) + ": $." + e.detail());
  }
  return cfg;
}

TrialConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, path.string() + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

std::string serialize_config(const TrialConfig& cfg) {
  json j;
  j["M"] = cfg.n_tx;
  j["N"] = cfg.n_rx;
  j["q"] = cfg.qam;
  j["snr_db"] = cfg.snr_grid_db;
  j["p_ill"] = cfg.p_ill;
  j["kappa"] = cfg.kappa;
  j["gamma"] = cfg.gamma;
  json decoders = json::array();
  for (auto d : cfg.decoders) decoders.push_back(std::string(to_string(d)));
  j["decoders"] = decoders;
  j["trials_per_point"] = cfg.trials_per_point;
  j["channels_per_point"] = cfg.channels_per_point;
  j["seed"] = cfg.seed;
  j["kappa_grid"] = cfg.kappa_grid;
  j["sweep_snr_db"] = cfg.sweep_snr_db;
  j["runs_per_point"] = cfg.runs_per_point;
  json sizes = json::array();
  for (const auto& s : cfg.sizes) sizes.push_back({{"N", s.n_rx}, {"M", s.n_tx}});
  j["sizes"] = sizes;
  j["sphere"] = {{"mode", cfg.sphere_mode == SphereMode::Adaptive ? "adaptive" : "fixed"},
                 {"rho", cfg.sphere_rho},
                 {"node_budget", cfg.sphere_node_budget}};
  j["ml_cap"] = cfg.ml_cap;
  j["measure_time"] = cfg.measure_time;
  return j.dump(2);
}

}  // namespace mzf
