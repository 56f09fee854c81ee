#include "starsense/io/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace starsense {

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string csv_preamble(const std::string& command, std::uint64_t config_hash,
                         std::uint64_t seed, const std::vector<MetadataTag>& tags,
                         const std::string& columns) {
  char hash_hex[24];
  std::snprintf(hash_hex, sizeof hash_hex, "%016llx", static_cast<unsigned long long>(config_hash));
  std::string out;
  out += "# starsense " + command + "\n";
  out += "# config_hash = " + std::string(hash_hex) + "\n";
  out += "# seed = " + std::to_string(seed) + "\n";
  for (const auto& tag : tags) out += "# " + tag.key + " = " + tag.value + "\n";
  out += "# columns: " + columns + "\n";
  out += columns + "\n";
  return out;
}

std::string csv_row(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += format_number(values[i]);
  }
  out += "\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw std::ios_base::failure("error writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// SVG convenience plots.
// ---------------------------------------------------------------------------

namespace {

constexpr double kWidth = 760, kHeight = 500;
constexpr double kLeft = 75, kRight = 735, kTop = 45, kBottom = 450;

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

std::string svg_chart(const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<SvgSeries>& series,
                      bool log_x, bool log_y) {
  auto tx = [log_x](double x) { return log_x ? std::log10(x) : x; };
  auto ty = [log_y](double y) { return log_y ? std::log10(y) : y; };

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      if ((log_x && !(p[0] > 0)) || (log_y && !(p[1] > 0))) continue;
      x_min = std::min(x_min, tx(p[0]));
      x_max = std::max(x_max, tx(p[0]));
      y_min = std::min(y_min, ty(p[1]));
      y_max = std::max(y_max, ty(p[1]));
    }
  }
  if (!(x_min < x_max)) { x_min -= 1; x_max += 1; }
  if (!(y_min < y_max)) { y_min -= 1; y_max += 1; }
  const double x_pad = 0.03 * (x_max - x_min), y_pad = 0.05 * (y_max - y_min);
  x_min -= x_pad; x_max += x_pad; y_min -= y_pad; y_max += y_pad;

  auto px = [&](double x) { return kLeft + (tx(x) - x_min) / (x_max - x_min) * (kRight - kLeft); };
  auto py = [&](double y) { return kBottom - (ty(y) - y_min) / (y_max - y_min) * (kBottom - kTop); };

  std::string svg;
  char buf[256];
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"760\" height=\"500\" "
         "viewBox=\"0 0 760 500\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"760\" height=\"500\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                "stroke=\"#444\"/>\n", kLeft, kTop, kRight - kLeft, kBottom - kTop);
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"25\" text-anchor=\"middle\" font-size=\"15\">%s</text>\n",
                (kLeft + kRight) / 2, title.c_str());
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"488\" text-anchor=\"middle\">%s</text>\n",
                (kLeft + kRight) / 2, x_label.c_str());
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"18\" y=\"%.1f\" text-anchor=\"middle\" transform=\"rotate(-90 18 %.1f)\">"
                "%s</text>\n", (kTop + kBottom) / 2, (kTop + kBottom) / 2, y_label.c_str());
  svg += buf;

  for (int i = 0; i <= 5; ++i) {
    const double fx = x_min + (x_max - x_min) * i / 5.0;
    const double fy = y_min + (y_max - y_min) * i / 5.0;
    const double gx = kLeft + (kRight - kLeft) * i / 5.0;
    const double gy = kBottom - (kBottom - kTop) * i / 5.0;
    const double label_x = log_x ? std::pow(10.0, fx) : fx;
    const double label_y = log_y ? std::pow(10.0, fy) : fy;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>\n",
                  gx, kTop, gx, kBottom);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>\n",
                  kLeft, gy, kRight, gy);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%s</text>\n",
                  gx, kBottom + 16, tick_label(label_x).c_str());
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%s</text>\n",
                  kLeft - 6, gy + 4, tick_label(label_y).c_str());
    svg += buf;
  }

  double legend_y = kTop + 16;
  for (const auto& s : series) {
    std::string pts;
    for (const auto& p : s.points) {
      if ((log_x && !(p[0] > 0)) || (log_y && !(p[1] > 0))) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(p[0]), py(p[1]));
      pts += buf;
    }
    svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"" +
           pts + "\"/>\n";
    if (!s.label.empty()) {
      std::snprintf(buf, sizeof buf,
                    "<text x=\"%.1f\" y=\"%.1f\" fill=\"%s\">%s</text>\n",
                    kRight - 170.0, legend_y, s.color.c_str(), s.label.c_str());
      svg += buf;
      legend_y += 16;
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace starsense
