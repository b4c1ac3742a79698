#pragma once

#include <string>

#include "blochball/verify.hpp"

namespace blochball {

inline constexpr const char* kVersion = "0.1.0";

// JSON document {command, params, seed, version, statistics{max_ratio,
// bound, margin, witness}, violations[], pass, ...}. The runtime field can
// be dropped for byte-comparison of reruns.
std::string report_to_json(const verify::VerificationReport& r,
                           bool include_runtime = true);

// Per-sample table; doubles carry 17 significant digits so rows replay
// exactly through the library.
std::string report_to_csv(const verify::VerificationReport& r);

}  // namespace blochball
