#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "tvewd/error.hpp"
#include "tvewd/series.hpp"

namespace tvewd {
namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool all_digits(const std::string& s, std::size_t from, std::size_t to) {
  for (std::size_t i = from; i < to; ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

// YYYY-MM-DD, YYYY-MM, optionally followed by a time part (THH:MM...).
bool is_iso_date(const std::string& s) {
  if (s.size() < 7 || !all_digits(s, 0, 4) || s[4] != '-' || !all_digits(s, 5, 7)) return false;
  if (s.size() == 7) return true;
  if (s.size() < 10 || s[7] != '-' || !all_digits(s, 8, 10)) return false;
  return s.size() == 10 || s[10] == 'T' || s[10] == ' ';
}

bool is_integer(const std::string& s) {
  return !s.empty() && all_digits(s, s[0] == '-' ? 1 : 0, s.size()) && s != "-";
}

double parse_value(const std::string& cell, std::size_t line_no, const std::string& column) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw DomainError("line " + std::to_string(line_no) + ", column '" + column +
                      "': not a finite number: '" + cell + "'");
  }
  return v;
}

}  // namespace

Panel read_panel_csv(const std::string& path, const std::string& frequency) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open CSV file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DomainError("CSV file '" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_row(line);
  if (header.size() < 2) throw DomainError("CSV header needs a date column and >= 1 value column");

  const std::size_t k = header.size() - 1;
  std::vector<std::string> dates;
  std::vector<std::vector<std::string>> cells(k);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto row = split_row(line);
    if (row.size() != header.size()) {
      throw DomainError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " cells, got " + std::to_string(row.size()));
    }
    dates.push_back(row[0]);
    for (std::size_t c = 0; c < k; ++c) cells[c].push_back(row[c + 1]);
  }
  if (dates.empty()) throw DomainError("CSV file '" + path + "' has no data rows");

  const bool iso = std::all_of(dates.begin(), dates.end(), is_iso_date);
  const bool positional = !iso && std::all_of(dates.begin(), dates.end(), is_integer);
  if (!iso && !positional) {
    throw DomainError("first column of '" + path + "' must hold ISO-8601 dates or integer positions");
  }
  if (positional) {
    for (std::size_t i = 1; i < dates.size(); ++i) {
      if (std::stoll(dates[i]) <= std::stoll(dates[i - 1])) {
        throw DomainError("integer index not strictly increasing at data row " + std::to_string(i + 1));
      }
    }
  }

  std::map<std::string, TimeSeries> members;
  for (std::size_t c = 0; c < k; ++c) {
    const auto& col = cells[c];
    std::size_t b = 0, e = col.size();
    while (b < e && col[b].empty()) ++b;
    while (e > b && col[e - 1].empty()) --e;
    if (b == e) throw DomainError("column '" + header[c + 1] + "' is empty");
    std::vector<double> values;
    std::vector<std::string> labels;
    for (std::size_t i = b; i < e; ++i) {
      if (col[i].empty()) {
        throw DomainError("column '" + header[c + 1] + "' has a missing value at " + dates[i] +
                          "; gaps are not imputed");
      }
      values.push_back(parse_value(col[i], i + 2, header[c + 1]));
      if (iso) labels.push_back(dates[i]);
    }
    members.emplace(header[c + 1], TimeSeries(std::move(values), std::move(labels), frequency));
  }
  return Panel(std::move(members));
}

TimeSeries read_series_csv(const std::string& path, const std::string& column,
                           const std::string& frequency) {
  Panel panel = read_panel_csv(path, frequency);
  if (column.empty()) {
    if (panel.size() != 1) {
      throw DomainError("'" + path + "' holds " + std::to_string(panel.size()) +
                        " series; choose one with a column name");
    }
    return panel.members().begin()->second;
  }
  return panel.at(column);
}

void write_series_csv(const std::string& path, const TimeSeries& series,
                      const std::string& value_name) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write '" + path + "'");
  out << (series.has_labels() ? "date" : "t") << ',' << value_name << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < series.size(); ++i) out << series.label(i) << ',' << series[i] << '\n';
}

}  // namespace tvewd
