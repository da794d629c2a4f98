#include "liureg/csvio.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace liureg {

CsvWriter::CsvWriter(std::vector<std::string> header, bool full_precision)
    : columns_(header.size()), full_precision_(full_precision) {
    if (header.empty()) throw std::invalid_argument("CsvWriter: empty header");
    for (std::size_t i = 0; i < header.size(); ++i) {
        body_ += header[i];
        body_ += (i + 1 == header.size()) ? "\n" : ",";
    }
}

std::string CsvWriter::format_number(double x) const {
    char buf[40];
    std::snprintf(buf, sizeof(buf), full_precision_ ? "%.17g" : "%.6g", x);
    return buf;
}

void CsvWriter::add_row(const std::vector<double>& values) {
    if (values.size() != columns_) {
        throw std::invalid_argument("CsvWriter: row width mismatch");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        body_ += format_number(values[i]);
        body_ += (i + 1 == values.size()) ? "\n" : ",";
    }
}

void CsvWriter::add_row_mixed(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) {
        throw std::invalid_argument("CsvWriter: row width mismatch");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        body_ += cells[i];
        body_ += (i + 1 == cells.size()) ? "\n" : ",";
    }
}

void CsvWriter::write(const std::string& path) const { write_file_atomic(path, body_); }

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out << contents;
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw std::runtime_error("atomic rename failed for " + path + ": " + ec.message());
    }
}

}  // namespace liureg
