// Small deterministic CSV writer. Numeric cells are formatted with %.12g so
// identical inputs always produce byte-identical files, which the test suite
// relies on for reproducibility checks.
#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wban {

class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header)
      : header_(std::move(header)) {}

  class Row {
  public:
    explicit Row(CsvWriter* w) : writer_(w) {}
    Row& col(double v) {
      // NaN marks an undefined measurement; its cell is left empty.
      if (std::isnan(v)) {
        cells_.emplace_back();
        return *this;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.12g", v);
      cells_.emplace_back(buf);
      return *this;
    }
    Row& col(int v) { return col(static_cast<long long>(v)); }
    Row& col(long long v) {
      cells_.push_back(std::to_string(v));
      return *this;
    }
    Row& col(unsigned long long v) {
      cells_.push_back(std::to_string(v));
      return *this;
    }
    Row& col(const std::string& v) {
      cells_.push_back(v);
      return *this;
    }
    ~Row() { writer_->push(std::move(cells_)); }

  private:
    CsvWriter* writer_;
    std::vector<std::string> cells_;
  };

  Row row() { return Row(this); }

  void push(std::vector<std::string> cells) {
    if (cells.size() != header_.size())
      throw std::logic_error("csv row width does not match header");
    rows_.push_back(std::move(cells));
  }

  std::string str() const {
    std::string out = join(header_);
    for (const auto& r : rows_) out += join(r);
    return out;
  }

  void write_file(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << str();
  }

  std::size_t row_count() const { return rows_.size(); }

private:
  static std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    line += '\n';
    return line;
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

} // namespace wban
