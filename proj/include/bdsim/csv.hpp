#ifndef BDSIM_CSV_HPP
#define BDSIM_CSV_HPP

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "bdsim/errors.hpp"

namespace bdsim::csv {

// All repo files are plain comma-separated UTF-8 with a mandatory header
// row and '.' decimal separator; fields never contain commas or quotes.

struct Table {
    std::string path;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // 1-based source line per row

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }

    int require_column(const std::string& name) const {
        const int i = column(name);
        if (i < 0)
            throw ValidationError(path + ": missing required column '" + name + "'");
        return i;
    }
};

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    out.push_back(field);
    return out;
}

inline Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    Table t;
    t.path = path;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto fields = split_line(line);
        if (t.header.empty()) {
            t.header = std::move(fields);
        } else {
            if (fields.size() != t.header.size()) {
                std::ostringstream msg;
                msg << path << ":" << lineno << ": expected " << t.header.size()
                    << " fields, got " << fields.size();
                throw ValidationError(msg.str());
            }
            t.rows.push_back(std::move(fields));
            t.line_numbers.push_back(lineno);
        }
    }
    if (t.header.empty()) throw ValidationError(path + ": empty file, header row required");
    return t;
}

inline double parse_double(const Table& t, std::size_t row, int col) {
    const std::string& s = t.rows[row][static_cast<std::size_t>(col)];
    double value = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        std::ostringstream msg;
        msg << t.path << ":" << t.line_numbers[row] << ": '" << s << "' is not a number";
        throw ValidationError(msg.str());
    }
    return value;
}

inline long parse_long(const Table& t, std::size_t row, int col) {
    const std::string& s = t.rows[row][static_cast<std::size_t>(col)];
    long value = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        std::ostringstream msg;
        msg << t.path << ":" << t.line_numbers[row] << ": '" << s << "' is not an integer";
        throw ValidationError(msg.str());
    }
    return value;
}

// Shortest-round-trip formatting: every finite double reloads bit-exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = 0.0;
    std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
    if (back == v) {
        // Try to shorten while staying exact.
        for (int prec = 1; prec < 17; ++prec) {
            char shorter[40];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
            double b2 = 0.0;
            std::from_chars(shorter, shorter + std::char_traits<char>::length(shorter), b2);
            if (b2 == v) return shorter;
        }
    }
    return buf;
}

class Writer {
public:
    explicit Writer(const std::string& path) : path_(path), out_(path) {
        if (!out_) throw IoError("cannot open " + path + " for writing");
    }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
        if (!out_) throw IoError("write failed on " + path_);
    }

    void close() {
        out_.close();
        if (out_.fail()) throw IoError("write failed on " + path_);
    }

private:
    std::string path_;
    std::ofstream out_;
};

}  // namespace bdsim::csv

#endif
