#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adactrl/parallel.hpp"
#include "adactrl/response_codec.hpp"

namespace adactrl::eval {

using codec::DifficultyTag;

// One scored response, whether it came from an external model export or from
// the simulator.
struct EvalRecord {
  std::string problem_id;
  std::string dataset_label;
  std::optional<DifficultyTag> tag;
  bool correct = false;
  std::uint64_t length = 0;  // tokens
  std::optional<int> difficulty_level;

  bool operator==(const EvalRecord&) const = default;
};

// Fixed-edge histogram. Values below the first or above the last edge are
// counted in the outermost bins so the total always equals the record count.
struct Histogram {
  std::vector<double> edges;   // bins + 1, strictly increasing
  std::vector<double> counts;  // bins

  bool operator==(const Histogram&) const = default;
};

// Stats for one tag class (Easy / Hard / untagged — the missing-tag case is
// first-class so calibration failures stay visible in reports).
struct TagClassStats {
  double count = 0.0;
  double proportion = 0.0;
  Histogram lengths;

  bool operator==(const TagClassStats&) const = default;
};

struct LevelStats {
  double count = 0.0;
  double mean_length = 0.0;

  bool operator==(const LevelStats&) const = default;
};

struct DatasetReport {
  std::string dataset_label;
  double count = 0.0;
  double accuracy_percent = 0.0;  // in [0, 100]
  double mean_length = 0.0;
  std::map<int, LevelStats> levels;  // only levels that appear in the records
  TagClassStats easy;
  TagClassStats hard;
  TagClassStats untagged;

  bool operator==(const DatasetReport&) const = default;
};

struct Report {
  std::vector<DatasetReport> datasets;  // sorted by dataset_label
  std::map<std::string, std::string> metadata;

  bool operator==(const Report&) const = default;

  const DatasetReport* find(const std::string& label) const;
};

// Log-spaced 16..24576 with 32 bins, matching the simulator's budget grid so
// simulator and external-data reports line up.
std::vector<double> default_histogram_edges();

// Full aggregation over records, grouped by dataset_label. All accumulation
// is integer-exact, so the parallel chunked path and the serial path return
// bitwise-identical reports. Throws "no records" on empty input.
Report aggregate(std::span<const EvalRecord> records,
                 const std::vector<double>& edges = default_histogram_edges(),
                 Execution exec = Execution::Parallel);

// Count-weighted combination of two reports over the union of their dataset
// labels. aggregate(A ++ B) == merge_reports(aggregate(A), aggregate(B)) up
// to floating-point rounding of the final means.
Report merge_reports(const Report& a, const Report& b);

// Unweighted arithmetic mean across independent runs: accuracy, mean length,
// counts and proportions are averaged per dataset; histograms are summed and
// renormalized to unit mass. All reports must carry the same dataset labels.
Report repeat_average(std::span<const Report> reports);

enum class Format { JSON, CSV, PlotData };

// JSON: the full nested report (round-trips losslessly).
// CSV: "dataset,metric,value" rows — fixed metric set plus one row per level.
// PlotData: tidy (x, series, value) rows for external plotting.
std::string emit(const Report& report, Format format);

}  // namespace adactrl::eval
