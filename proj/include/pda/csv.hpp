#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace pda {

// 6 significant digits, '.' decimal separator, locale-independent.
inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::string(buf);
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

  class Row {
   public:
    explicit Row(CsvWriter& w) : writer_(w) {}
    Row& add(double v) { return add_raw(format_number(v)); }
    Row& add(int v) { return add_raw(std::to_string(v)); }
    Row& add(std::int64_t v) { return add_raw(std::to_string(v)); }
    Row& add(const std::string& v) { return add_raw(v); }
    ~Row() { writer_.rows_.push_back(cells_); }

   private:
    Row& add_raw(std::string cell) {
      cells_.push_back(std::move(cell));
      return *this;
    }
    CsvWriter& writer_;
    std::vector<std::string> cells_;
  };

  Row row() { return Row(*this); }

  std::string str() const {
    std::ostringstream os;
    write_line(os, header_);
    for (const auto& r : rows_) write_line(os, r);
    return os.str();
  }

  void save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    os << str();
  }

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

 private:
  static void write_line(std::ostringstream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << cells[i];
    }
    os << '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  friend class Row;
};

}  // namespace pda
