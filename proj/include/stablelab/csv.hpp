#pragma once

// CSV output with header rows, 17 significant digits, and atomic replacement of the
// target file (write to a sibling temporary, then rename).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace stablelab::io {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Writes `content` to `path` through a temporary file in the same directory.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    class Row {
    public:
        Row& operator<<(double v) {
            cells_.push_back(format_double(v));
            return *this;
        }
        Row& operator<<(std::size_t v) {
            cells_.push_back(std::to_string(v));
            return *this;
        }
        Row& operator<<(const std::string& s) {
            cells_.push_back(s);
            return *this;
        }

    private:
        friend class CsvTable;
        std::vector<std::string> cells_;
    };

    Row& row() { return rows_.emplace_back(); }

    [[nodiscard]] std::string str() const {
        std::string out = join(header_);
        for (const auto& r : rows_) {
            if (r.cells_.size() != header_.size()) throw std::logic_error("csv row width does not match header");
            out += join(r.cells_);
        }
        return out;
    }

    void write(const std::filesystem::path& path) const { write_atomic(path, str()); }

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
    std::vector<Row> rows_;
};

}  // namespace stablelab::io
