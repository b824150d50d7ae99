#pragma once

#include <filesystem>
#include <string>

#include "rismux/experiment.hpp"

namespace rismux {

inline constexpr const char* kToolName = "rismux";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kCsvHeader =
    "axis,axis_value,criterion,receiver,mean_rate_bpcu,stderr,trials";

// %.17g: enough digits to round-trip a double exactly.
std::string format_g17(double v);

// Full results.csv contents: header plus one row per table entry, LF endings.
std::string sweep_csv(const SweepTable& table, SweepAxis axis);

// Writes bytes verbatim (binary mode, UTF-8/LF by construction).
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace rismux
