#include "arbminer/csv.hpp"

#include "arbminer/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace arbminer {

std::vector<std::string> split_csv_line(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == sep) {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(std::move(field));
  return out;
}

std::string csv_field(std::string_view value, char sep) {
  bool needs = value.find_first_of(std::string{sep, '"', '\n', '\r'}) != std::string_view::npos;
  if (!needs) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join_csv(const std::vector<std::string>& fields, char sep) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(sep);
    out += csv_field(fields[i], sep);
  }
  return out;
}

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

CsvHeader::CsvHeader(std::vector<std::string> names) : names_(std::move(names)) {
  for (auto& n : names_) {
    auto b = n.find_first_not_of(" \t");
    auto e = n.find_last_not_of(" \t");
    n = b == std::string::npos ? std::string{} : n.substr(b, e - b + 1);
  }
}

std::optional<std::size_t> CsvHeader::find(std::string_view name) const {
  std::string key = lower(name);
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (lower(names_[i]) == key) return i;
  return std::nullopt;
}

std::size_t CsvHeader::at(std::string_view name) const {
  auto i = find(name);
  if (!i) throw format_error("MissingColumn", "missing column '" + std::string(name) + "'");
  return *i;
}

std::string stage_preamble(std::string_view schema, int version) {
  return "# arbminer " + std::string(schema) + " v" + std::to_string(version) + "\n";
}

StageTable read_stage_table(std::istream& in, std::string_view expected_schema) {
  StageTable t;
  std::string line;
  if (!read_line(in, line) || line.rfind("# arbminer ", 0) != 0)
    throw format_error("BadStageFile", "missing stage preamble");
  std::istringstream pre(line.substr(11));
  std::string version;
  pre >> t.schema >> version;
  if (t.schema != expected_schema)
    throw format_error("BadStageFile", "expected schema '" + std::string(expected_schema) + "', found '" + t.schema + "'");
  if (version.size() < 2 || version[0] != 'v') throw format_error("BadStageFile", "bad stage version");
  t.version = static_cast<int>(parse_int(version.substr(1), "stage version"));
  if (!read_line(in, line)) throw format_error("BadStageFile", "missing header row");
  t.header = CsvHeader(split_csv_line(line));
  while (read_line(in, line)) {
    if (line.empty()) continue;
    t.rows.push_back(split_csv_line(line));
    if (t.rows.back().size() != t.header.size())
      throw format_error("BadStageFile", "row " + std::to_string(t.rows.size()) + " has wrong field count");
  }
  return t;
}

StageTable read_stage_file(const std::filesystem::path& path, std::string_view expected_schema) {
  std::ifstream in(path);
  if (!in) throw format_error("FileNotFound", "cannot open " + path.string());
  return read_stage_table(in, expected_schema);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw format_error("WriteFailed", "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw format_error("WriteFailed", "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw format_error("FileNotFound", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, std::string_view what) {
  if (s == "nan") return std::nan("");
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw format_error("BadNumber", "bad " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

long long parse_int(std::string_view s, std::string_view what) {
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw format_error("BadNumber", "bad " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

} // namespace arbminer
