#include "adactrl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "adactrl/grid.hpp"
#include "adactrl/plotdata.hpp"
#include "adactrl/serde.hpp"

namespace adactrl::eval {

namespace {

constexpr std::size_t kChunk = 4096;  // fixed grid: result independent of thread count

void validate_edges(const std::vector<double>& edges) {
  if (edges.size() < 2) throw std::invalid_argument("invalid histogram edges");
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i] < edges[i + 1])) throw std::invalid_argument("invalid histogram edges");
  }
}

int bin_index(const std::vector<double>& edges, double v) {
  if (v < edges.front()) return 0;
  const auto it = std::upper_bound(edges.begin(), edges.end(), v);
  const int idx = static_cast<int>(it - edges.begin()) - 1;
  return std::clamp(idx, 0, static_cast<int>(edges.size()) - 2);
}

// Integer accumulators: merging partials is exact, so chunked-parallel and
// serial aggregation cannot drift apart.
struct TagAcc {
  std::uint64_t count = 0;
  std::vector<std::uint64_t> hist;
};

struct LevelAcc {
  std::uint64_t count = 0;
  std::uint64_t length_sum = 0;
};

struct DatasetAcc {
  std::uint64_t count = 0;
  std::uint64_t correct = 0;
  std::uint64_t length_sum = 0;
  std::map<int, LevelAcc> levels;
  TagAcc easy;
  TagAcc hard;
  TagAcc untagged;
};

using Acc = std::map<std::string, DatasetAcc>;

void accumulate(Acc& acc, const EvalRecord& rec, const std::vector<double>& edges) {
  DatasetAcc& d = acc[rec.dataset_label];
  d.count += 1;
  if (rec.correct) d.correct += 1;
  d.length_sum += rec.length;
  if (rec.difficulty_level) {
    LevelAcc& lv = d.levels[*rec.difficulty_level];
    lv.count += 1;
    lv.length_sum += rec.length;
  }
  TagAcc& t = !rec.tag ? d.untagged
                       : (*rec.tag == DifficultyTag::Easy ? d.easy : d.hard);
  if (t.hist.empty()) t.hist.assign(edges.size() - 1, 0);
  t.count += 1;
  t.hist[static_cast<std::size_t>(bin_index(edges, static_cast<double>(rec.length)))] += 1;
}

void merge_tag_acc(TagAcc& into, const TagAcc& from) {
  into.count += from.count;
  if (from.hist.empty()) return;
  if (into.hist.empty()) into.hist.assign(from.hist.size(), 0);
  for (std::size_t i = 0; i < from.hist.size(); ++i) into.hist[i] += from.hist[i];
}

void merge_acc(Acc& into, const Acc& from) {
  for (const auto& [label, d] : from) {
    DatasetAcc& t = into[label];
    t.count += d.count;
    t.correct += d.correct;
    t.length_sum += d.length_sum;
    for (const auto& [level, lv] : d.levels) {
      t.levels[level].count += lv.count;
      t.levels[level].length_sum += lv.length_sum;
    }
    merge_tag_acc(t.easy, d.easy);
    merge_tag_acc(t.hard, d.hard);
    merge_tag_acc(t.untagged, d.untagged);
  }
}

TagClassStats finalize_tag(const TagAcc& t, std::uint64_t total,
                           const std::vector<double>& edges) {
  TagClassStats s;
  s.count = static_cast<double>(t.count);
  s.proportion = total == 0 ? 0.0 : static_cast<double>(t.count) / static_cast<double>(total);
  s.lengths.edges = edges;
  s.lengths.counts.assign(edges.size() - 1, 0.0);
  for (std::size_t i = 0; i < t.hist.size(); ++i) {
    s.lengths.counts[i] = static_cast<double>(t.hist[i]);
  }
  return s;
}

Report finalize(const Acc& acc, const std::vector<double>& edges) {
  Report report;
  for (const auto& [label, d] : acc) {
    DatasetReport r;
    r.dataset_label = label;
    r.count = static_cast<double>(d.count);
    r.accuracy_percent =
        100.0 * static_cast<double>(d.correct) / static_cast<double>(d.count);
    r.mean_length = static_cast<double>(d.length_sum) / static_cast<double>(d.count);
    for (const auto& [level, lv] : d.levels) {
      LevelStats ls;
      ls.count = static_cast<double>(lv.count);
      ls.mean_length = static_cast<double>(lv.length_sum) / static_cast<double>(lv.count);
      r.levels[level] = ls;
    }
    r.easy = finalize_tag(d.easy, d.count, edges);
    r.hard = finalize_tag(d.hard, d.count, edges);
    r.untagged = finalize_tag(d.untagged, d.count, edges);
    report.datasets.push_back(std::move(r));
  }
  return report;
}

}  // namespace

const DatasetReport* Report::find(const std::string& label) const {
  for (const auto& d : datasets) {
    if (d.dataset_label == label) return &d;
  }
  return nullptr;
}

std::vector<double> default_histogram_edges() { return log_spaced_edges(16.0, 24576.0, 32); }

Report aggregate(std::span<const EvalRecord> records, const std::vector<double>& edges,
                 Execution exec) {
  validate_edges(edges);
  if (records.empty()) throw std::invalid_argument("no records");

  const std::size_t chunks = (records.size() + kChunk - 1) / kChunk;
  std::vector<Acc> partials(chunks);
  for_each_index(chunks, exec, [&](std::size_t c) {
    const std::size_t lo = c * kChunk;
    const std::size_t hi = std::min(lo + kChunk, records.size());
    for (std::size_t i = lo; i < hi; ++i) accumulate(partials[c], records[i], edges);
  });

  Acc total;
  for (const Acc& p : partials) merge_acc(total, p);
  return finalize(total, edges);
}

namespace {

TagClassStats merge_tag_stats(const TagClassStats& a, const TagClassStats& b,
                              double total) {
  if (a.lengths.edges != b.lengths.edges) {
    throw std::invalid_argument("mismatched histogram edges");
  }
  TagClassStats s;
  s.count = a.count + b.count;
  s.proportion = total == 0.0 ? 0.0 : s.count / total;
  s.lengths.edges = a.lengths.edges;
  s.lengths.counts.resize(a.lengths.counts.size());
  for (std::size_t i = 0; i < s.lengths.counts.size(); ++i) {
    s.lengths.counts[i] = a.lengths.counts[i] + b.lengths.counts[i];
  }
  return s;
}

DatasetReport merge_datasets(const DatasetReport& a, const DatasetReport& b) {
  DatasetReport r;
  r.dataset_label = a.dataset_label;
  r.count = a.count + b.count;
  const double w = r.count == 0.0 ? 0.0 : 1.0 / r.count;
  r.accuracy_percent = (a.accuracy_percent * a.count + b.accuracy_percent * b.count) * w;
  r.mean_length = (a.mean_length * a.count + b.mean_length * b.count) * w;
  r.levels = a.levels;
  for (const auto& [level, lv] : b.levels) {
    auto it = r.levels.find(level);
    if (it == r.levels.end()) {
      r.levels[level] = lv;
    } else {
      const double c = it->second.count + lv.count;
      it->second.mean_length =
          c == 0.0 ? 0.0
                   : (it->second.mean_length * it->second.count + lv.mean_length * lv.count) / c;
      it->second.count = c;
    }
  }
  r.easy = merge_tag_stats(a.easy, b.easy, r.count);
  r.hard = merge_tag_stats(a.hard, b.hard, r.count);
  r.untagged = merge_tag_stats(a.untagged, b.untagged, r.count);
  return r;
}

}  // namespace

Report merge_reports(const Report& a, const Report& b) {
  Report out;
  out.metadata = a.metadata;
  for (const auto& [k, v] : b.metadata) out.metadata.emplace(k, v);

  std::set<std::string> labels;
  for (const auto& d : a.datasets) labels.insert(d.dataset_label);
  for (const auto& d : b.datasets) labels.insert(d.dataset_label);
  for (const auto& label : labels) {
    const DatasetReport* da = a.find(label);
    const DatasetReport* db = b.find(label);
    if (da && db) {
      out.datasets.push_back(merge_datasets(*da, *db));
    } else {
      out.datasets.push_back(da ? *da : *db);
    }
  }
  return out;
}

namespace {

TagClassStats average_tag_stats(const std::vector<const TagClassStats*>& parts) {
  TagClassStats s;
  s.lengths.edges = parts.front()->lengths.edges;
  s.lengths.counts.assign(parts.front()->lengths.counts.size(), 0.0);
  for (const TagClassStats* p : parts) {
    if (p->lengths.edges != s.lengths.edges) {
      throw std::invalid_argument("mismatched histogram edges");
    }
    s.count += p->count;
    s.proportion += p->proportion;
    for (std::size_t i = 0; i < s.lengths.counts.size(); ++i) {
      s.lengths.counts[i] += p->lengths.counts[i];
    }
  }
  const double n = static_cast<double>(parts.size());
  s.count /= n;
  s.proportion /= n;
  double total = 0.0;
  for (double c : s.lengths.counts) total += c;
  if (total > 0.0) {
    for (double& c : s.lengths.counts) c /= total;
  }
  return s;
}

}  // namespace

Report repeat_average(std::span<const Report> reports) {
  if (reports.empty()) throw std::invalid_argument("no reports");
  const auto labels_of = [](const Report& r) {
    std::vector<std::string> labels;
    for (const auto& d : r.datasets) labels.push_back(d.dataset_label);
    std::sort(labels.begin(), labels.end());
    return labels;
  };
  const auto expected = labels_of(reports.front());
  for (const Report& r : reports) {
    if (labels_of(r) != expected) throw std::invalid_argument("mismatched dataset labels");
  }

  Report out;
  out.metadata = reports.front().metadata;
  out.metadata["repeats"] = std::to_string(reports.size());
  const double n = static_cast<double>(reports.size());

  for (const auto& label : expected) {
    DatasetReport r;
    r.dataset_label = label;
    std::vector<const DatasetReport*> parts;
    for (const Report& rep : reports) parts.push_back(rep.find(label));

    std::map<int, std::pair<double, double>> level_sums;  // level -> (count, mean sums)
    std::map<int, int> level_hits;
    for (const DatasetReport* p : parts) {
      r.count += p->count;
      r.accuracy_percent += p->accuracy_percent;
      r.mean_length += p->mean_length;
      for (const auto& [level, lv] : p->levels) {
        level_sums[level].first += lv.count;
        level_sums[level].second += lv.mean_length;
        level_hits[level] += 1;
      }
    }
    r.count /= n;
    r.accuracy_percent /= n;
    r.mean_length /= n;
    for (const auto& [level, sums] : level_sums) {
      const double hits = static_cast<double>(level_hits[level]);
      r.levels[level] = LevelStats{sums.first / hits, sums.second / hits};
    }

    std::vector<const TagClassStats*> easy, hard, untagged;
    for (const DatasetReport* p : parts) {
      easy.push_back(&p->easy);
      hard.push_back(&p->hard);
      untagged.push_back(&p->untagged);
    }
    r.easy = average_tag_stats(easy);
    r.hard = average_tag_stats(hard);
    r.untagged = average_tag_stats(untagged);
    out.datasets.push_back(std::move(r));
  }
  return out;
}

namespace {

std::string emit_csv(const Report& report) {
  std::string out = "dataset,metric,value\n";
  const auto row = [&out](const std::string& dataset, const std::string& metric,
                          double value) {
    out += csv_field(dataset);
    out += ',';
    out += csv_field(metric);
    out += ',';
    out += format_double(value);
    out += '\n';
  };
  for (const auto& d : report.datasets) {
    row(d.dataset_label, "accuracy_percent", d.accuracy_percent);
    row(d.dataset_label, "mean_length", d.mean_length);
    row(d.dataset_label, "count", d.count);
    row(d.dataset_label, "easy/proportion", d.easy.proportion);
    row(d.dataset_label, "hard/proportion", d.hard.proportion);
    row(d.dataset_label, "untagged/proportion", d.untagged.proportion);
    for (const auto& [level, lv] : d.levels) {
      row(d.dataset_label, "level" + std::to_string(level) + "/mean_length",
          lv.mean_length);
    }
  }
  return out;
}

void append_hist_rows(std::vector<TidyRow>& rows, const std::string& label,
                      const std::string& cls, const TagClassStats& stats) {
  if (stats.count <= 0.0) return;
  for (std::size_t i = 0; i < stats.lengths.counts.size(); ++i) {
    const double mid = 0.5 * (stats.lengths.edges[i] + stats.lengths.edges[i + 1]);
    rows.push_back({format_double(mid), label + "/" + cls + "_lengths",
                    stats.lengths.counts[i]});
  }
}

std::string emit_plot_data(const Report& report) {
  std::vector<TidyRow> rows;
  for (const auto& d : report.datasets) {
    for (const auto& [level, lv] : d.levels) {
      rows.push_back({std::to_string(level), d.dataset_label + "/mean_length",
                      lv.mean_length});
    }
    rows.push_back({d.dataset_label, "easy_proportion", d.easy.proportion});
    rows.push_back({d.dataset_label, "hard_proportion", d.hard.proportion});
    rows.push_back({d.dataset_label, "untagged_proportion", d.untagged.proportion});
    append_hist_rows(rows, d.dataset_label, "easy", d.easy);
    append_hist_rows(rows, d.dataset_label, "hard", d.hard);
    append_hist_rows(rows, d.dataset_label, "untagged", d.untagged);
  }
  return tidy_csv(rows);
}

}  // namespace

std::string emit(const Report& report, Format format) {
  switch (format) {
    case Format::JSON: {
      const nlohmann::json j = report;
      return j.dump(2) + "\n";
    }
    case Format::CSV:
      return emit_csv(report);
    case Format::PlotData:
      return emit_plot_data(report);
  }
  throw std::invalid_argument("unknown emit format");
}

}  // namespace adactrl::eval
