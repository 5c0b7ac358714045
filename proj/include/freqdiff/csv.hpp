#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace freqdiff {

// Minimal CSV emitter with a fixed header. Numeric cells go through num() so
// reruns produce byte-identical rows.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, std::vector<std::string> header)
        : out_(path), ncols_(header.size()) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path);
        write_cells(header);
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != ncols_) throw std::invalid_argument("csv row width mismatch");
        write_cells(cells);
    }

    void flush() { out_.flush(); }

    static std::string num(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }
    static std::string num(int v) { return std::to_string(v); }
    static std::string num(long long v) { return std::to_string(v); }
    static std::string num(unsigned long long v) { return std::to_string(v); }

  private:
    void write_cells(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    std::ofstream out_;
    std::size_t ncols_;
};

}  // namespace freqdiff
