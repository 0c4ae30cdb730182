// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

#include "rcl/estimators.hpp"

namespace rcl::cli {

/// Shortest round-trip decimal form; locale independent.
std::string format_double(double value);

/// Builds LF-terminated comma-separated rows.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);

  CsvWriter& comment(std::string_view line);
  CsvWriter& header();
  template <class... Cells>
  CsvWriter& row(const Cells&... cells) {
    bool first = true;
    ((append(cell_text(cells), first)), ...);
    text_ += '\n';
    return *this;
  }
  CsvWriter& row(const std::vector<std::string>& cells);

  const std::string& str() const noexcept { return text_; }

 private:
  static std::string cell_text(double v) { return format_double(v); }
  static std::string cell_text(const std::string& s) { return s; }
  static std::string cell_text(const char* s) { return s; }
  template <class Int>
    requires std::is_integral_v<Int>
  static std::string cell_text(Int v) {
    return std::to_string(v);
  }
  void append(const std::string& cell, bool& first);

  std::vector<std::string> columns_;
  std::string text_;
};

nlohmann::ordered_json result_json(const MonteCarloResult& r);

/// Writes `content` to dir/name, creating dir as needed. Throws on I/O failure.
void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content);

}  // namespace rcl::cli
