#pragma once

#include <deque>
#include <filesystem>
#include <string>
#include <vector>

namespace rydchan {

/// Shortest decimal that reads back to the same double ("nan", "inf" and
/// "-inf" for non-finite values).
std::string format_double(double x);

/// Comma-separated table with a header row and LF line endings. Cells are
/// written verbatim, so callers must not put commas or newlines in them.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  class Row {
   public:
    Row& operator<<(double x);
    Row& operator<<(long long x);
    Row& operator<<(int x) { return *this << static_cast<long long>(x); }
    Row& operator<<(long x) { return *this << static_cast<long long>(x); }
    Row& operator<<(const std::string& s);
    Row& operator<<(const char* s) { return *this << std::string(s); }
    /// Empty cell, used where a quantity was not computed.
    Row& blank();

   private:
    friend class CsvTable;
    explicit Row(std::vector<std::string>& cells) : cells_(cells) {}
    std::vector<std::string>& cells_;
  };

  /// Starts a new row; fill it with operator<<.
  Row row();

  std::size_t rows() const { return rows_.size(); }
  /// Throws UsageError if a row has the wrong number of cells.
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::deque<std::vector<std::string>> rows_;  // stable references for Row
};

/// Writes through a temporary file in the same directory and renames it
/// into place, creating the directory if needed.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace rydchan
