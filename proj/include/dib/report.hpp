#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dib {

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);

/// In-memory CSV table with LF line endings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> fields);
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view content);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotStyle {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 720;
  int height = 480;
  std::optional<double> y_min;
  std::optional<double> y_max;
  std::optional<double> vline;  // vertical reference line at this x
};

/// SVG 1.1 line chart. Output depends only on the inputs.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotStyle& style);

void emit_plot(const std::vector<PlotSeries>& series, const PlotStyle& style, const std::filesystem::path& path);

}  // namespace dib
