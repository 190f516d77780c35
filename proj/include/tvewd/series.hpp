#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tvewd {

/// A point u = t/T on the unit interval.
class RescaledTime {
 public:
  explicit RescaledTime(double u);
  double value() const noexcept { return u_; }

 private:
  double u_;
};

/// Rescaled time of zero-based position `pos` in a sample of length `length`: (pos+1)/length.
inline double rescaled_time(std::size_t pos, std::size_t length) {
  return static_cast<double>(pos + 1) / static_cast<double>(length);
}

/// Observation times (t/T for t = 1..T) of a sample of the given length.
std::vector<double> observation_grid(std::size_t length);

/// A gapless, finite, real-valued series. Positions 0..T-1 are the canonical
/// index; labels (usually ISO dates) are display metadata.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(std::vector<double> values, std::vector<std::string> labels = {},
                      std::string frequency = {});

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  bool has_labels() const noexcept { return !labels_.empty(); }
  /// Label at position i, or the position itself when the series is unlabeled.
  std::string label(std::size_t i) const;
  const std::string& frequency() const noexcept { return frequency_; }

  /// Positions [begin, end); may hold a single observation.
  TimeSeries slice(std::size_t begin, std::size_t end) const;

 private:
  TimeSeries(std::vector<double> values, std::vector<std::string> labels, std::string frequency,
             std::size_t min_length);

  std::vector<double> values_;
  std::vector<std::string> labels_;
  std::string frequency_;
};

struct SampleSplit {
  std::size_t in_sample = 0;
  std::size_t out_sample = 0;
};

/// First m observations and the remaining T-m.
std::pair<TimeSeries, TimeSeries> split(const TimeSeries& series, std::size_t m);
SampleSplit make_split(std::size_t length, std::size_t m, std::size_t min_in_sample = 1);

/// log(v[t+1]) - log(v[t]); labels follow the later observation.
TimeSeries log_difference(const TimeSeries& series);

/// Nonempty collection of named series (lengths may differ).
class Panel {
 public:
  Panel() = default;
  explicit Panel(std::map<std::string, TimeSeries> members);
  static Panel single(std::string name, TimeSeries series);

  std::size_t size() const noexcept { return members_.size(); }
  const std::map<std::string, TimeSeries>& members() const noexcept { return members_; }
  const TimeSeries& at(const std::string& id) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, TimeSeries> members_;
};

// CSV ingestion: `date,value` or a wide panel `date,asset1,...,assetK`.
// Header row required. Empty cells are accepted only as leading or trailing
// runs of a panel column (unequal lengths); interior gaps are rejected.
Panel read_panel_csv(const std::string& path, const std::string& frequency = {});
TimeSeries read_series_csv(const std::string& path, const std::string& column = {},
                           const std::string& frequency = {});

void write_series_csv(const std::string& path, const TimeSeries& series,
                      const std::string& value_name = "value");

}  // namespace tvewd

namespace tvewd {

/// Values attached to positions [first, first + size()) of a parent series.
/// Positions before `first` are unavailable (never zero-filled).
struct AlignedSeries {
  std::size_t first = 0;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  std::size_t end() const noexcept { return first + values.size(); }
  bool available(std::size_t pos) const noexcept { return pos >= first && pos < end(); }
  double at(std::size_t pos) const { return values.at(pos - first); }
  double operator[](std::size_t pos) const { return values[pos - first]; }
};

}  // namespace tvewd
