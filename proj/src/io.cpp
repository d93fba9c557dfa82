#include "stabkit/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "stabkit/errors.hpp"

namespace stabkit {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header)
    : out_(out), columns_(header.size()) {
  if (header.empty()) throw DomainError("CsvWriter: empty header");
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::cell(const std::string& text) {
  if (filled_ == columns_) throw DomainError("CsvWriter: too many cells in row");
  out_ << (filled_ ? "," : "") << text;
  ++filled_;
}

CsvWriter& CsvWriter::operator<<(double x) {
  cell(format_double(x));
  return *this;
}

CsvWriter& CsvWriter::operator<<(int x) {
  cell(std::to_string(x));
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view s) {
  if (s.find_first_of(",\"\n") != std::string_view::npos)
    throw DomainError("CsvWriter: text cell contains a separator");
  cell(std::string(s));
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw DomainError("CsvWriter: row has wrong number of cells");
  out_ << '\n';
  filled_ = 0;
  ++rows_;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) cells.push_back(cur);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw DomainError("CsvTable: no column " + std::string(name));
}

double CsvTable::number(std::size_t row, std::string_view name) const {
  const std::string& s = rows.at(row).at(column(name));
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw DomainError("CsvTable: not a number: " + s);
  return x;
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw DomainError("read_csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split(line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.header.size())
      throw DomainError("read_csv: row " + std::to_string(t.rows.size() + 1) +
                        " has the wrong number of cells");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("read_csv_file: cannot open " + path);
  return read_csv(in);
}

nlohmann::json make_sidecar(std::string_view subcommand, const nlohmann::json& inputs,
                            const nlohmann::json& tolerances, double seconds) {
  return {{"subcommand", subcommand},
          {"inputs", inputs},
          {"tolerances", tolerances},
          {"timings", {{"wall_seconds", seconds}}},
          {"version", kVersion},
          {"csv", {{"separator", ","}, {"significant_digits", 17}}}};
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw DomainError("write_json_file: cannot open " + path);
  out << j.dump(2) << '\n';
}

}  // namespace stabkit
