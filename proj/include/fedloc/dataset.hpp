#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fedloc/error.hpp"
#include "fedloc/rng.hpp"

namespace fedloc {

inline constexpr int kNumWaps = 520;
inline constexpr int kNotDetected = 100;       // dataset sentinel for "AP not seen"
inline constexpr int kMinDetectedRss = -104;   // weakest detectable signal, dBm
inline constexpr int kMaxDetectedRss = 0;
inline constexpr double kDefaultMissingValue = -150.0;

// One CSV row: 520 WAP columns, position labels, and the remaining columns
// kept as opaque text.
struct RawRecord {
  std::array<std::int16_t, kNumWaps> wap_rss{};
  double longitude = 0.0;
  double latitude = 0.0;
  int floor = 0;
  int building_id = 0;
  std::string aux;  // SPACEID,RELATIVEPOSITION,USERID,PHONEID,TIMESTAMP as written
};

// Preprocessed corpus: contiguous feature matrix plus 2-D labels in meters,
// local frame (dataset minima subtracted). label_scale is the corpus
// extent; trainers regress labels/label_scale and predictions are read
// back as label_scale * output, which keeps coordinate-sized targets
// reachable at small learning rates.
struct Dataset {
  std::size_t k = 0;
  std::vector<double> features;  // size() * k, row-major
  std::vector<double> labels;    // size() * 2
  std::array<double, 2> origin{0.0, 0.0};
  double missing_value_c = kDefaultMissingValue;
  bool normalized = true;
  double label_scale = 1.0;

  std::size_t size() const { return labels.size() / 2; }

  std::span<const double> feature_row(std::size_t i) const {
    return {features.data() + i * k, k};
  }
  std::span<const double> label_row(std::size_t i) const { return {labels.data() + i * 2, 2}; }

  Dataset subset(std::span<const std::uint32_t> idx) const {
    Dataset out;
    out.k = k;
    out.origin = origin;
    out.missing_value_c = missing_value_c;
    out.normalized = normalized;
    out.label_scale = label_scale;
    out.features.reserve(idx.size() * k);
    out.labels.reserve(idx.size() * 2);
    for (std::uint32_t i : idx) {
      out.features.insert(out.features.end(), features.begin() + i * k,
                          features.begin() + (i + 1) * k);
      out.labels.insert(out.labels.end(), labels.begin() + i * 2, labels.begin() + (i + 1) * 2);
    }
    return out;
  }
};

namespace detail {

inline void split_fields(const std::string& line, std::vector<std::string_view>& out) {
  out.clear();
  const char* p = line.data();
  const char* end = p + line.size();
  if (p != end && *(end - 1) == '\r') --end;
  const char* start = p;
  for (; p != end; ++p) {
    if (*p == ',') {
      out.emplace_back(start, p - start);
      start = p + 1;
    }
  }
  out.emplace_back(start, end - start);
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no, const char* what) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ParseError("line " + std::to_string(line_no) + ": bad " + what + " value '" +
                     std::string(field) + "'");
  }
  return value;
}

inline const std::array<std::string, 9> kLabelColumns = {
    "LONGITUDE", "LATITUDE",  "FLOOR",   "BUILDINGID", "SPACEID",
    "RELATIVEPOSITION", "USERID", "PHONEID", "TIMESTAMP"};

inline void check_header(const std::string& line) {
  std::vector<std::string_view> cols;
  split_fields(line, cols);
  if (cols.size() != static_cast<std::size_t>(kNumWaps) + kLabelColumns.size()) {
    throw ParseError("header: expected " + std::to_string(kNumWaps + kLabelColumns.size()) +
                     " columns, got " + std::to_string(cols.size()));
  }
  for (int i = 0; i < kNumWaps; ++i) {
    char name[8];
    std::snprintf(name, sizeof(name), "WAP%03d", i + 1);
    if (cols[i] != name) {
      throw ParseError(std::string("header: column ") + std::to_string(i + 1) + " is '" +
                       std::string(cols[i]) + "', expected '" + name + "'");
    }
  }
  for (std::size_t i = 0; i < kLabelColumns.size(); ++i) {
    if (cols[kNumWaps + i] != kLabelColumns[i]) {
      throw ParseError("header: label column " + std::to_string(i + 1) + " is '" +
                       std::string(cols[kNumWaps + i]) + "', expected '" + kLabelColumns[i] + "'");
    }
  }
}

}  // namespace detail

// Reads a CSV in the 520-WAP indoor-positioning layout, one RawRecord per
// data row, order preserved. Malformed rows fail with the line number.
inline std::vector<RawRecord> load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("'" + path.string() + "': missing header row");
  detail::check_header(line);

  std::vector<RawRecord> records;
  std::vector<std::string_view> cols;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    detail::split_fields(line, cols);
    if (cols.size() != static_cast<std::size_t>(kNumWaps) + detail::kLabelColumns.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(kNumWaps + detail::kLabelColumns.size()) +
                       " columns, got " + std::to_string(cols.size()));
    }
    RawRecord rec;
    for (int w = 0; w < kNumWaps; ++w) {
      const int v = detail::parse_number<int>(cols[w], line_no, "RSS");
      if (v != kNotDetected && (v < kMinDetectedRss || v > kMaxDetectedRss)) {
        throw ParseError("line " + std::to_string(line_no) + ": RSS value " + std::to_string(v) +
                         " outside [" + std::to_string(kMinDetectedRss) + ", " +
                         std::to_string(kMaxDetectedRss) + "] and not the +100 sentinel");
      }
      rec.wap_rss[w] = static_cast<std::int16_t>(v);
    }
    rec.longitude = detail::parse_number<double>(cols[kNumWaps], line_no, "LONGITUDE");
    rec.latitude = detail::parse_number<double>(cols[kNumWaps + 1], line_no, "LATITUDE");
    rec.floor = detail::parse_number<int>(cols[kNumWaps + 2], line_no, "FLOOR");
    rec.building_id = detail::parse_number<int>(cols[kNumWaps + 3], line_no, "BUILDINGID");
    const char* aux_begin = cols[kNumWaps + 4].data();
    const char* aux_end = cols.back().data() + cols.back().size();
    rec.aux.assign(aux_begin, aux_end);
    records.push_back(std::move(rec));
  }
  return records;
}

// Replaces the +100 sentinel with the missing-value constant c, shifts
// coordinates to a local frame by subtracting the per-corpus minima, and
// optionally maps features affinely so c -> 0.0 and 0 dBm -> 1.0.
inline Dataset preprocess(const std::vector<RawRecord>& records, double c = kDefaultMissingValue,
                          bool normalize = true) {
  if (records.empty()) throw InvalidInputError("preprocess: no records");
  if (c >= static_cast<double>(kMinDetectedRss)) {
    throw ConfigError("preprocess: missing-value constant " + std::to_string(c) +
                      " must be below the minimum detectable RSS (" +
                      std::to_string(kMinDetectedRss) + " dBm)");
  }
  double min_lon = std::numeric_limits<double>::infinity();
  double min_lat = std::numeric_limits<double>::infinity();
  for (const RawRecord& r : records) {
    min_lon = std::min(min_lon, r.longitude);
    min_lat = std::min(min_lat, r.latitude);
  }

  Dataset ds;
  ds.k = kNumWaps;
  ds.origin = {min_lon, min_lat};
  ds.missing_value_c = c;
  ds.normalized = normalize;
  ds.features.resize(records.size() * ds.k);
  ds.labels.resize(records.size() * 2);
  const double scale = 1.0 / (0.0 - c);
  for (std::size_t i = 0; i < records.size(); ++i) {
    double* f = ds.features.data() + i * ds.k;
    const auto& rss = records[i].wap_rss;
    for (int w = 0; w < kNumWaps; ++w) {
      const double r = (rss[w] == kNotDetected) ? c : static_cast<double>(rss[w]);
      f[w] = normalize ? (r - c) * scale : r;
    }
    ds.labels[i * 2] = records[i].longitude - min_lon;
    ds.labels[i * 2 + 1] = records[i].latitude - min_lat;
  }
  double extent = 1.0;
  for (double v : ds.labels) extent = std::max(extent, v);
  ds.label_scale = extent;
  return ds;
}

// Uniform random disjoint split, deterministic per seed. Both parts keep
// k, origin and the missing-value constant; row order within each part
// follows the original corpus order.
inline std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, std::size_t test_count,
                                                    std::uint64_t seed) {
  if (test_count >= ds.size()) {
    throw InvalidInputError("split_train_test: test_count " + std::to_string(test_count) +
                            " must be smaller than the corpus (" + std::to_string(ds.size()) + ")");
  }
  std::vector<std::uint32_t> perm(ds.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<std::uint32_t>(i);
  Rng rng(seed);
  rng.shuffle(perm);
  std::vector<std::uint32_t> test_idx(perm.begin(), perm.begin() + test_count);
  std::vector<std::uint32_t> train_idx(perm.begin() + test_count, perm.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  return {ds.subset(train_idx), ds.subset(test_idx)};
}

}  // namespace fedloc
