// SPDX-License-Identifier: Apache-2.0
#include "rcl/output.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace rcl::cli {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return {buf.data(), ptr};
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) : columns_(header) {}

CsvWriter& CsvWriter::comment(std::string_view line) {
  text_ += '#';
  text_ += ' ';
  text_ += line;
  text_ += '\n';
  return *this;
}

CsvWriter& CsvWriter::header() { return row(columns_); }

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
  bool first = true;
  for (const auto& c : cells) append(c, first);
  text_ += '\n';
  return *this;
}

void CsvWriter::append(const std::string& cell, bool& first) {
  if (!first) text_ += ',';
  text_ += cell;
  first = false;
}

nlohmann::ordered_json result_json(const MonteCarloResult& r) {
  nlohmann::ordered_json j;
  j["estimate"] = r.estimate;
  j["stderr"] = r.std_error;
  j["n"] = r.n;
  j["zero_weight_fraction"] = r.zero_weight_fraction;
  j["retries"] = r.retries;
  if (!r.metadata.empty()) j["metadata"] = r.metadata;
  return j;
}

void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + (dir / name).string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write to " + (dir / name).string() + " failed");
}

}  // namespace rcl::cli
