#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "mzf/harness.hpp"

namespace mzf {

// JSON scenario files. Missing keys take the TrialConfig defaults; unknown
// keys and out-of-range values raise ParseError / ConfigInvalid with the
// field path in the message.
TrialConfig parse_config(const std::filesystem::path& path);
TrialConfig parse_config_text(std::string_view text, std::string_view source = "<config>");

// Canonical JSON text with every field spelled out.
std::string serialize_config(const TrialConfig& cfg);

}  // namespace mzf
