#include "rismux/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rismux {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string sweep_csv(const SweepTable& table, SweepAxis axis) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& row : table.rows) {
    out += axis_name(axis);
    out += ',';
    out += format_g17(row.axis_value);
    out += ',';
    out += criterion_name(row.criterion);
    out += ',';
    out += receiver_name(row.receiver);
    out += ',';
    out += format_g17(row.mean_rate);
    out += ',';
    out += format_g17(row.std_error);
    out += ',';
    out += std::to_string(row.trials);
    out += '\n';
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!f) {
    throw std::runtime_error("write failed for " + path.string());
  }
}

}  // namespace rismux
