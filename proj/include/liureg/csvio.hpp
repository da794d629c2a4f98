#pragma once

#include <string>
#include <vector>

namespace liureg {

// Accumulates a CSV and writes it atomically (temp file + rename), so
// interrupted runs never leave partial outputs behind. Numbers are
// formatted at 6 significant digits by default; full_precision keeps
// all 17.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header, bool full_precision = false);

    void add_row(const std::vector<double>& values);
    void add_row_mixed(const std::vector<std::string>& cells);

    std::string format_number(double x) const;
    const std::string& text() const { return body_; }

    void write(const std::string& path) const;

  private:
    std::size_t columns_;
    bool full_precision_;
    std::string body_;
};

// Atomic text write used for every output artifact.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace liureg
