#include "tvewd/series.hpp"

#include <cmath>
#include <string>

#include "tvewd/error.hpp"

namespace tvewd {

RescaledTime::RescaledTime(double u) : u_(u) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError("rescaled time must lie in [0,1], got " + std::to_string(u));
  }
}

std::vector<double> observation_grid(std::size_t length) {
  std::vector<double> grid(length);
  for (std::size_t i = 0; i < length; ++i) grid[i] = rescaled_time(i, length);
  return grid;
}

TimeSeries::TimeSeries(std::vector<double> values, std::vector<std::string> labels,
                       std::string frequency)
    : TimeSeries(std::move(values), std::move(labels), std::move(frequency), 2) {}

TimeSeries::TimeSeries(std::vector<double> values, std::vector<std::string> labels,
                       std::string frequency, std::size_t min_length)
    : values_(std::move(values)), labels_(std::move(labels)), frequency_(std::move(frequency)) {
  if (values_.size() < min_length) {
    throw DomainError("time series needs at least " + std::to_string(min_length) +
                      " observations, got " + std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DomainError("non-finite value at position " + std::to_string(i));
    }
  }
  if (!labels_.empty()) {
    if (labels_.size() != values_.size()) {
      throw DomainError("label count " + std::to_string(labels_.size()) +
                        " differs from value count " + std::to_string(values_.size()));
    }
    for (std::size_t i = 1; i < labels_.size(); ++i) {
      if (!(labels_[i - 1] < labels_[i])) {
        throw DomainError("index not strictly increasing at position " + std::to_string(i) +
                          " (" + labels_[i - 1] + " >= " + labels_[i] + ")");
      }
    }
  }
}

std::string TimeSeries::label(std::size_t i) const {
  return labels_.empty() ? std::to_string(i) : labels_.at(i);
}

TimeSeries TimeSeries::slice(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > size()) {
    throw DomainError("invalid slice [" + std::to_string(begin) + "," + std::to_string(end) +
                      ") of series with length " + std::to_string(size()));
  }
  std::vector<double> v(values_.begin() + begin, values_.begin() + end);
  std::vector<std::string> l;
  if (!labels_.empty()) l.assign(labels_.begin() + begin, labels_.begin() + end);
  // Slices may be a single observation (e.g. a one-step holdout).
  return TimeSeries(std::move(v), std::move(l), frequency_, 1);
}

SampleSplit make_split(std::size_t length, std::size_t m, std::size_t min_in_sample) {
  if (m < 1) throw DomainError("in-sample length must be >= 1");
  if (m >= length) {
    throw DomainError("in-sample length " + std::to_string(m) + " must be < T = " +
                      std::to_string(length));
  }
  if (m < min_in_sample) {
    throw DomainError("in-sample length " + std::to_string(m) + " below required minimum " +
                      std::to_string(min_in_sample));
  }
  return {m, length - m};
}

std::pair<TimeSeries, TimeSeries> split(const TimeSeries& series, std::size_t m) {
  make_split(series.size(), m);
  return {series.slice(0, m), series.slice(m, series.size())};
}

TimeSeries log_difference(const TimeSeries& series) {
  const auto v = series.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) {
      throw DomainError("log difference needs positive values; position " + std::to_string(i) +
                        " holds " + std::to_string(v[i]));
    }
  }
  std::vector<double> out(v.size() - 1);
  for (std::size_t i = 0; i + 1 < v.size(); ++i) out[i] = std::log(v[i + 1]) - std::log(v[i]);
  std::vector<std::string> labels;
  if (series.has_labels()) labels.assign(series.labels().begin() + 1, series.labels().end());
  if (out.size() < 2) {
    throw DomainError("log difference of a length-2 series leaves a single observation");
  }
  return TimeSeries(std::move(out), std::move(labels), series.frequency());
}

Panel::Panel(std::map<std::string, TimeSeries> members) : members_(std::move(members)) {
  if (members_.empty()) throw DomainError("panel must hold at least one series");
}

Panel Panel::single(std::string name, TimeSeries series) {
  std::map<std::string, TimeSeries> m;
  m.emplace(std::move(name), std::move(series));
  return Panel(std::move(m));
}

const TimeSeries& Panel::at(const std::string& id) const {
  auto it = members_.find(id);
  if (it == members_.end()) throw DomainError("unknown asset '" + id + "'");
  return it->second;
}

std::vector<std::string> Panel::ids() const {
  std::vector<std::string> out;
  out.reserve(members_.size());
  for (const auto& [k, _] : members_) out.push_back(k);
  return out;
}

}  // namespace tvewd
