#pragma once

// CSV tables and the run manifest. Numbers are written with the shortest
// round-trip decimal representation, independent of locale.

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mzf/harness.hpp"

namespace mzf {

inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

std::string format_number(double v);

// Header: <coordinate>,decoder,ber,ber_lo,ber_hi,ser,flops_mean,time_ns_per_bit,erasures
void write_ber_csv(std::ostream& out, const std::vector<BerPoint>& points, std::string_view coordinate);

// Header: kappa_in,mean_cond_rhat,mean_cond_rdiag,runs
void write_cond_study_csv(std::ostream& out, const std::vector<CondStudyPoint>& points);

void write_complexity_csv(std::ostream& out, const std::vector<ComplexityRow>& rows);

// JSON manifest; everything except "timestamp" is a function of the config.
std::string make_manifest(const TrialConfig& cfg, std::string_view command, const std::vector<std::string>& outputs,
                          std::string_view timestamp);

std::string utc_timestamp();

}  // namespace mzf
