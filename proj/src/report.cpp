#include "dib/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace dib {

namespace {

const std::array<const char*, 10> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                              "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw std::invalid_argument("csv: empty header");
}

void CsvTable::add_row(std::vector<std::string> fields) {
  if (fields.size() != header_.size()) {
    throw std::invalid_argument("csv: row has " + std::to_string(fields.size()) + " fields, header has " +
                                std::to_string(header_.size()));
  }
  rows_.push_back(std::move(fields));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(fields[i]);
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::string render_svg(const std::vector<PlotSeries>& series, const PlotStyle& style) {
  if (series.empty()) throw std::invalid_argument("plot: no series");
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size() || s.x.empty()) throw std::invalid_argument("plot: series '" + s.name + "' is malformed");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!std::isfinite(x0)) throw std::invalid_argument("plot: no finite points");
  if (style.y_min) y0 = *style.y_min;
  if (style.y_max) y1 = *style.y_max;
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double left = 70, right = 170, top = 40, bottom = 60;
  const double w = style.width - left - right;
  const double h = style.height - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * w; };
  auto py = [&](double y) { return top + (1.0 - (std::clamp(y, y0, y1) - y0) / (y1 - y0)) * h; };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(style.width) +
         "\" height=\"" + std::to_string(style.height) + "\" viewBox=\"0 0 " + std::to_string(style.width) + " " +
         std::to_string(style.height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + fixed(left + w / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
         xml_escape(style.title) + "</text>\n";
  out += "<rect x=\"" + fixed(left) + "\" y=\"" + fixed(top) + "\" width=\"" + fixed(w) + "\" height=\"" + fixed(h) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x0 + (x1 - x0) * i / 5.0;
    const double yv = y0 + (y1 - y0) * i / 5.0;
    out += "<text x=\"" + fixed(px(xv)) + "\" y=\"" + fixed(top + h + 18) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + tick(xv) + "</text>\n";
    out += "<text x=\"" + fixed(left - 6) + "\" y=\"" + fixed(py(yv) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">" + tick(yv) + "</text>\n";
  }
  out += "<text x=\"" + fixed(left + w / 2) + "\" y=\"" + fixed(style.height - 14.0) +
         "\" text-anchor=\"middle\" font-size=\"13\">" + xml_escape(style.x_label) + "</text>\n";
  out += "<text x=\"16\" y=\"" + fixed(top + h / 2) + "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 " +
         fixed(top + h / 2) + ")\">" + xml_escape(style.y_label) + "</text>\n";
  if (style.vline && *style.vline >= x0 && *style.vline <= x1) {
    out += "<line x1=\"" + fixed(px(*style.vline)) + "\" y1=\"" + fixed(top) + "\" x2=\"" + fixed(px(*style.vline)) +
           "\" y2=\"" + fixed(top + h) + "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % kPalette.size()];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (!points.empty()) points += ' ';
      points += fixed(px(s.x[i])) + "," + fixed(py(s.y[i]));
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + points +
           "\"/>\n";
    const double ly = top + 14.0 + 16.0 * static_cast<double>(k);
    out += "<line x1=\"" + fixed(left + w + 10) + "\" y1=\"" + fixed(ly) + "\" x2=\"" + fixed(left + w + 30) +
           "\" y2=\"" + fixed(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + fixed(left + w + 34) + "\" y=\"" + fixed(ly + 4) + "\" font-size=\"11\">" +
           xml_escape(s.name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

void emit_plot(const std::vector<PlotSeries>& series, const PlotStyle& style, const std::filesystem::path& path) {
  write_file(path, render_svg(series, style));
}

}  // namespace dib
