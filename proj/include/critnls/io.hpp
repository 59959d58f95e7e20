#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace critnls::io {

using Json = nlohmann::ordered_json;

// Seventeen significant digits, so that every double survives a text round trip.
std::string format_double(double x);

// JSON text with all floating-point numbers written by format_double. Non-finite
// numbers become null.
std::string dump_json(const Json& value, int indent = 2);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& value);

// A CSV table. Numeric cells go through format_double; text cells are quoted when needed.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  void add_row(const std::vector<std::string>& cells);

  std::size_t size() const { return rows_.size(); }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t value);

}  // namespace critnls::io
