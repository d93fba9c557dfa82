#pragma once

// CSV tables with a mandatory header and 17 significant digits, plus the
// JSON sidecar written next to every CLI artifact.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace stabkit {

inline constexpr std::string_view kVersion = "1.0.0";

/// Shortest round-trip text with 17 significant digits ("nan", "inf" kept).
std::string format_double(double x);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  CsvWriter& operator<<(double x);
  CsvWriter& operator<<(int x);
  CsvWriter& operator<<(std::string_view s);
  /// Terminates the row; throws when the column count is wrong.
  void end_row();

  std::size_t rows() const { return rows_; }

 private:
  void cell(const std::string& text);

  std::ostream& out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
  std::size_t rows_ = 0;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws when absent.
  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Metadata record: subcommand, inputs, tolerances, outputs, timings, version.
nlohmann::json make_sidecar(std::string_view subcommand, const nlohmann::json& inputs,
                            const nlohmann::json& tolerances, double seconds);

void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace stabkit
