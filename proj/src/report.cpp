#include "uvstat/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "uvstat/common.hpp"

namespace uvstat {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc())
    throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_artifact(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

}  // namespace

void write_samples_csv(const std::filesystem::path& path,
                       const std::string& scenario, uint64_t config_hash,
                       const std::vector<SeriesBundle>& series) {
  std::ofstream os = open_artifact(path);
  os << "# config_hash=" << to_hex(config_hash) << "\n";
  os << "scenario,series,n,replicate_id,value\n";
  for (const SeriesBundle& s : series) {
    for (std::size_t r = 0; r < s.values->size(); ++r)
      os << scenario << "," << s.series << "," << s.n << "," << r << ","
         << format_double((*s.values)[r]) << "\n";
  }
}

void write_distances_csv(const std::filesystem::path& path,
                         const std::string& scenario, uint64_t config_hash,
                         const std::vector<DistanceRecord>& records) {
  std::ofstream os = open_artifact(path);
  os << "# config_hash=" << to_hex(config_hash) << "\n";
  os << "scenario,comparison,n,replicates,ks,w1,pass\n";
  for (const DistanceRecord& d : records)
    os << scenario << "," << d.comparison << "," << d.n << "," << d.replicates
       << "," << format_double(d.ks) << "," << format_double(d.w1) << ","
       << (d.pass ? 1 : 0) << "\n";
}

namespace {

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

}  // namespace

void write_ecdf_svg(const std::filesystem::path& path, const std::string& title,
                    uint64_t config_hash, std::vector<EcdfCurve> curves) {
  const double width = 640, height = 420;
  const double left = 60, right = 610, top = 40, bottom = 380;
  static const char* palette[] = {"#3b6ea5", "#b0413e", "#4a7c59", "#8e6bab"};

  double lo = 0.0, hi = 1.0;
  bool has_data = false;
  for (auto& c : curves) {
    std::sort(c.values.begin(), c.values.end());
    if (c.values.empty()) continue;
    if (!has_data) {
      lo = c.values.front();
      hi = c.values.back();
      has_data = true;
    } else {
      lo = std::min(lo, c.values.front());
      hi = std::max(hi, c.values.back());
    }
  }
  if (!has_data || hi <= lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.03 * (hi - lo);
  lo -= pad;
  hi += pad;

  auto x_of = [&](double v) {
    return left + (v - lo) / (hi - lo) * (right - left);
  };
  auto y_of = [&](double p) { return bottom - p * (bottom - top); };

  std::ofstream os = open_artifact(path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
     << height << "\">\n";
  os << "<!-- config_hash=" << to_hex(config_hash) << " -->\n";
  os << "<rect width=\"" << width << "\" height=\"" << height
     << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << left << "\" y=\"24\" font-family=\"monospace\" "
        "font-size=\"14\">"
     << title << "</text>\n";
  // axes
  os << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right
     << "\" y2=\"" << bottom << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
     << "\" y2=\"" << bottom << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double frac = t / 4.0;
    const double xv = lo + frac * (hi - lo);
    const double xp = x_of(xv);
    os << "<line x1=\"" << xp << "\" y1=\"" << bottom << "\" x2=\"" << xp
       << "\" y2=\"" << bottom + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << xp << "\" y=\"" << bottom + 20
       << "\" text-anchor=\"middle\" font-family=\"monospace\" "
          "font-size=\"11\">"
       << fixed(xv, 2) << "</text>\n";
    const double yp = y_of(frac);
    os << "<line x1=\"" << left - 5 << "\" y1=\"" << yp << "\" x2=\"" << left
       << "\" y2=\"" << yp << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << left - 10 << "\" y=\"" << yp + 4
       << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">"
       << fixed(frac, 2) << "</text>\n";
  }

  std::size_t color = 0;
  double legend_y = top + 8;
  for (const EcdfCurve& c : curves) {
    if (c.values.empty()) continue;
    const char* stroke = palette[color % 4];
    std::ostringstream pts;
    const std::size_t r = c.values.size();
    pts << x_of(c.values.front()) << "," << y_of(0.0) << " ";
    for (std::size_t i = 0; i < r; ++i)
      pts << x_of(c.values[i]) << ","
          << y_of(static_cast<double>(i + 1) / static_cast<double>(r)) << " ";
    os << "<polyline fill=\"none\" stroke=\"" << stroke
       << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
    os << "<line x1=\"" << right - 150 << "\" y1=\"" << legend_y << "\" x2=\""
       << right - 130 << "\" y2=\"" << legend_y << "\" stroke=\"" << stroke
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << right - 125 << "\" y=\"" << legend_y + 4
       << "\" font-family=\"monospace\" font-size=\"11\">" << c.label
       << "</text>\n";
    legend_y += 16;
    ++color;
  }
  os << "</svg>\n";
}

}  // namespace uvstat
