#ifndef SHIFTAUDIT_DATASET_HPP
#define SHIFTAUDIT_DATASET_HPP

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "shiftaudit/errors.hpp"

namespace shiftaudit {

// Columnar table. A column is numeric when every non-empty cell parses as a
// decimal real; otherwise it is categorical. Empty cells are missing (NaN for
// numeric, "" for categorical).
class Dataset {
 public:
  enum class ColumnType { Numeric, Categorical };

  struct Column {
    ColumnType type = ColumnType::Numeric;
    std::vector<double> num;
    std::vector<std::string> cat;

    size_t size() const { return type == ColumnType::Numeric ? num.size() : cat.size(); }
    bool missing(size_t i) const {
      return type == ColumnType::Numeric ? std::isnan(num[i]) : cat[i].empty();
    }
  };

  size_t row_count() const { return rows_; }
  size_t column_count() const { return names_.size(); }
  const std::vector<std::string>& column_names() const { return names_; }

  bool has_column(const std::string& name) const { return index_.count(name) > 0; }

  const Column& column(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) fail(errc::missing_columns, "no column named '" + name + "'");
    return cols_[it->second];
  }

  const std::vector<double>& numeric(const std::string& name) const {
    const Column& c = column(name);
    if (c.type != ColumnType::Numeric)
      fail(errc::missing_columns, "column '" + name + "' is not numeric");
    return c.num;
  }

  const std::vector<std::string>& categorical(const std::string& name) const {
    const Column& c = column(name);
    if (c.type != ColumnType::Categorical)
      fail(errc::missing_columns, "column '" + name + "' is not categorical");
    return c.cat;
  }

  // Cell as text regardless of type; used for grouping columns that may have
  // been parsed numerically.
  std::string cell_text(const std::string& name, size_t row) const {
    const Column& c = column(name);
    if (c.type == ColumnType::Categorical) return c.cat[row];
    if (std::isnan(c.num[row])) return "";
    return format_number(c.num[row]);
  }

  void add_numeric(const std::string& name, std::vector<double> values) {
    check_new_column(name, values.size());
    Column c;
    c.type = ColumnType::Numeric;
    c.num = std::move(values);
    append(name, std::move(c));
  }

  void add_categorical(const std::string& name, std::vector<std::string> values) {
    check_new_column(name, values.size());
    Column c;
    c.type = ColumnType::Categorical;
    c.cat = std::move(values);
    append(name, std::move(c));
  }

  static std::string format_number(double v) {
    // shortest representation that round-trips
    char buf[32];
    for (int prec = 1; prec <= 17; ++prec) {
      std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
      double back = 0;
      std::sscanf(buf, "%lf", &back);
      if (back == v) break;
    }
    return buf;
  }

 private:
  void check_new_column(const std::string& name, size_t n) {
    if (index_.count(name)) fail(errc::duplicate_node, "column '" + name + "' added twice");
    if (!names_.empty() && n != rows_)
      fail(errc::invalid_spec, "column '" + name + "' has " + std::to_string(n) +
                                   " rows, table has " + std::to_string(rows_));
  }
  void append(const std::string& name, Column c) {
    rows_ = c.size();
    index_[name] = cols_.size();
    names_.push_back(name);
    cols_.push_back(std::move(c));
  }

  std::vector<std::string> names_;
  std::vector<Column> cols_;
  std::map<std::string, size_t> index_;
  size_t rows_ = 0;
};

// Columns belonging to a graph node: the exact name if present, otherwise
// name+index ("X1", "X2", ...) for multi-dimensional nodes.
inline std::vector<std::string> node_columns(const Dataset& data, const std::string& node) {
  if (data.has_column(node)) return {node};
  std::vector<std::string> out;
  for (const auto& col : data.column_names()) {
    if (col.size() <= node.size() || col.compare(0, node.size(), node) != 0) continue;
    bool digits = true;
    for (size_t i = node.size(); i < col.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(col[i]))) {
        digits = false;
        break;
      }
    if (digits) out.push_back(col);
  }
  return out;
}

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::optional<double> parse_number(const std::string& s) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  double value = 0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

}  // namespace detail

inline Dataset read_csv(std::istream& in, const std::string& origin = "<stream>") {
  std::string line;
  if (!std::getline(in, line)) fail(errc::parse_error, origin + ": empty file, header row required");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> headers;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) headers.push_back(detail::trim(tok));
    if (line.empty() || line.back() == ',') headers.push_back("");
  }
  for (const auto& h : headers)
    if (h.empty()) fail(errc::parse_error, origin + ": empty column name in header");

  std::vector<std::vector<std::string>> raw(headers.size());
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        cells.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    cells.push_back(cur);
    if (cells.size() != headers.size())
      fail(errc::parse_error, origin + ":" + std::to_string(lineno) + ": expected " +
                                  std::to_string(headers.size()) + " cells, found " +
                                  std::to_string(cells.size()));
    for (size_t c = 0; c < cells.size(); ++c) raw[c].push_back(detail::trim(cells[c]));
  }

  Dataset out;
  for (size_t c = 0; c < headers.size(); ++c) {
    bool numeric = true;
    for (const auto& cell : raw[c]) {
      if (cell.empty()) continue;
      if (!detail::parse_number(cell)) {
        numeric = false;
        break;
      }
    }
    if (numeric) {
      std::vector<double> vals;
      vals.reserve(raw[c].size());
      for (const auto& cell : raw[c])
        vals.push_back(cell.empty() ? std::numeric_limits<double>::quiet_NaN()
                                    : *detail::parse_number(cell));
      out.add_numeric(headers[c], std::move(vals));
    } else {
      out.add_categorical(headers[c], std::move(raw[c]));
    }
  }
  return out;
}

inline Dataset read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open '" + path + "'");
  return read_csv(in, path);
}

inline void write_csv(const Dataset& data, std::ostream& out) {
  const auto& names = data.column_names();
  for (size_t c = 0; c < names.size(); ++c) {
    if (c) out << ',';
    out << names[c];
  }
  out << '\n';
  for (size_t r = 0; r < data.row_count(); ++r) {
    for (size_t c = 0; c < names.size(); ++c) {
      if (c) out << ',';
      const auto& col = data.column(names[c]);
      if (!col.missing(r)) {
        if (col.type == Dataset::ColumnType::Numeric)
          out << Dataset::format_number(col.num[r]);
        else
          out << col.cat[r];
      }
    }
    out << '\n';
  }
}

inline void write_csv_file(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot open '" + path + "' for writing");
  write_csv(data, out);
}

}  // namespace shiftaudit

#endif  // SHIFTAUDIT_DATASET_HPP
