#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace uvstat {

// Shortest decimal string that round-trips the double exactly.
std::string format_double(double v);

struct SeriesBundle {
  std::string series;   // "stat", "limit", "limit_claimed", "diag", ...
  std::size_t n = 0;    // path length; 0 for limit-law series
  const std::vector<double>* values = nullptr;
};

void write_samples_csv(const std::filesystem::path& path,
                       const std::string& scenario, uint64_t config_hash,
                       const std::vector<SeriesBundle>& series);

struct DistanceRecord {
  std::string comparison;
  std::size_t n = 0;
  std::size_t replicates = 0;
  double ks = 0.0;
  double w1 = 0.0;
  bool pass = true;
};

void write_distances_csv(const std::filesystem::path& path,
                         const std::string& scenario, uint64_t config_hash,
                         const std::vector<DistanceRecord>& records);

struct EcdfCurve {
  std::string label;
  std::vector<double> values;  // need not be sorted
};

void write_ecdf_svg(const std::filesystem::path& path, const std::string& title,
                    uint64_t config_hash, std::vector<EcdfCurve> curves);

}  // namespace uvstat
