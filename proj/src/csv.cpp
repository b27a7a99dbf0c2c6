#include "rydchan/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

#include "rydchan/errors.hpp"

namespace rydchan {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 32> buf;
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw NumericalError("cannot format floating-point value");
  return std::string(buf.data(), end);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable::Row CsvTable::row() {
  rows_.emplace_back();
  return Row(rows_.back());
}

CsvTable::Row& CsvTable::Row::operator<<(double x) {
  cells_.push_back(format_double(x));
  return *this;
}

CsvTable::Row& CsvTable::Row::operator<<(long long x) {
  cells_.push_back(std::to_string(x));
  return *this;
}

CsvTable::Row& CsvTable::Row::operator<<(const std::string& s) {
  cells_.push_back(s);
  return *this;
}

CsvTable::Row& CsvTable::Row::blank() {
  cells_.emplace_back();
  return *this;
}

std::string CsvTable::str() const {
  std::string out;
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) {
    if (r.size() != header_.size())
      throw UsageError("csv row has " + std::to_string(r.size()) + " cells, header has " +
                       std::to_string(header_.size()));
    line(r);
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, path);
}

}  // namespace rydchan
