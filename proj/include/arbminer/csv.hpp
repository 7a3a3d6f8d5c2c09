#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace arbminer {

// RFC-4180 style field splitting; quoted fields may contain the separator.
std::vector<std::string> split_csv_line(std::string_view line, char sep = ',');
std::string csv_field(std::string_view value, char sep = ',');
std::string join_csv(const std::vector<std::string>& fields, char sep = ',');

// Reads lines, dropping a trailing '\r'. Returns false at end of input.
bool read_line(std::istream& in, std::string& line);

// Header row mapped to column positions, matched case-insensitively.
class CsvHeader {
public:
  CsvHeader() = default;
  explicit CsvHeader(std::vector<std::string> names);

  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t at(std::string_view name) const;
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

private:
  std::vector<std::string> names_;
};

// Stage files start with "# arbminer <schema> v<version>" then a header row.
struct StageTable {
  std::string schema;
  int version = 0;
  CsvHeader header;
  std::vector<std::vector<std::string>> rows;
};

StageTable read_stage_table(std::istream& in, std::string_view expected_schema);
StageTable read_stage_file(const std::filesystem::path& path, std::string_view expected_schema);
std::string stage_preamble(std::string_view schema, int version);

// Writes to a sibling temp file then renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

std::string lower(std::string_view s);
std::string format_double(double v);
double parse_double(std::string_view s, std::string_view what);
long long parse_int(std::string_view s, std::string_view what);

} // namespace arbminer
