#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nhchain {

/// Minimal CSV table: a header row and numeric cells, written with
/// repeatable formatting (%.17g) so identical data gives identical bytes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void write(const std::filesystem::path& path) const;
  static CsvTable read(const std::filesystem::path& path);

  int column(const std::string& name) const;  // -1 if absent
  std::vector<double> column_values(const std::string& name) const;
};

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace nhchain
