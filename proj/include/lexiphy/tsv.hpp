#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lexiphy {

// A tab-separated table with a mandatory header row. Rows keep the 1-based
// line number of the source file for diagnostics.
struct TsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<size_t> line_numbers;

  std::optional<size_t> ColumnIndex(const std::string &name) const;
};

TsvTable ReadTsv(const std::filesystem::path &path);
TsvTable ParseTsv(const std::string &text);
std::string FormatTsv(const TsvTable &table);
void WriteTextFile(const std::filesystem::path &path, const std::string &text);
std::string ReadTextFile(const std::filesystem::path &path);

std::vector<std::string> SplitString(const std::string &text, char separator);
std::string Trim(const std::string &text);

}  // namespace lexiphy
