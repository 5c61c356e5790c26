#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "quakesim/core.hpp"

namespace quakesim::csv {

/// Header-addressed rows of a plain comma-separated file (no quoting).
class Table {
 public:
  static Table parse(std::istream& in, const std::string& source = "<stream>") {
    Table t;
    t.source_ = source;
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::ParseError, "missing CSV header", source);
    t.header_ = split(strip(line));
    for (std::size_t i = 0; i < t.header_.size(); ++i) t.index_[t.header_[i]] = i;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      line = strip(line);
      if (line.empty()) continue;
      auto cells = split(line);
      require(cells.size() == t.header_.size(), ErrorCode::ParseError, "wrong number of CSV fields",
              source + ":" + std::to_string(lineno));
      t.rows_.push_back(std::move(cells));
    }
    return t;
  }

  static Table read(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::NotFound, "cannot open file", path);
    return parse(in, path);
  }

  std::size_t size() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }

  void require_columns(const std::vector<std::string>& cols) const {
    for (const auto& c : cols) require(index_.count(c) > 0, ErrorCode::ParseError, "missing CSV column", source_ + ":" + c);
  }

  const std::string& str(std::size_t row, const std::string& col) const {
    const auto it = index_.find(col);
    require(it != index_.end(), ErrorCode::ParseError, "missing CSV column", source_ + ":" + col);
    return rows_[row][it->second];
  }

  double num(std::size_t row, const std::string& col) const {
    const auto& s = str(row, col);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    require(ec == std::errc() && p == s.data() + s.size(), ErrorCode::ParseError, "bad number in CSV",
            source_ + ":" + col + "=" + s);
    return v;
  }

  long long integer(std::size_t row, const std::string& col) const {
    const auto& s = str(row, col);
    long long v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    require(ec == std::errc() && p == s.data() + s.size(), ErrorCode::ParseError, "bad integer in CSV",
            source_ + ":" + col + "=" + s);
    return v;
  }

 private:
  static std::string strip(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
  }

  static std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
  }

  std::string source_;
  std::vector<std::string> header_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace quakesim::csv
