#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ice::detail {

// Minimal comma-separated reader: header row, optional double quotes,
// '#' comment lines skipped, cells trimmed of surrounding whitespace.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::optional<std::size_t> column(std::string_view name) const;
  [[nodiscard]] std::size_t require_column(std::string_view name, std::string_view what) const;
};

CsvTable parse_csv(const std::string& text);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

std::string trim(std::string_view s);

// Strict, locale-independent parse; nullopt for anything but a full finite
// or non-finite number token.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_integer(std::string_view s);

}  // namespace ice::detail
