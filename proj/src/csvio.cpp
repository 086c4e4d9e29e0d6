#include "phantom/csvio.hpp"

#include <cstdio>
#include <stdexcept>

namespace phantom {

const char* const kVersion = "0.1.0";

std::string format_sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), out_(path) {
    if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
    bool first = true;
    for (const auto& h : header) {
        if (!first) out_ << ',';
        out_ << h;
        first = false;
    }
    out_ << '\n';
}

void CsvWriter::sep() {
    if (row_started_) out_ << ',';
    row_started_ = true;
}

void CsvWriter::field(double v) {
    sep();
    out_ << format_sci(v);
}

void CsvWriter::field(long v) {
    sep();
    out_ << v;
}

void CsvWriter::field(const std::string& quoted) {
    sep();
    out_ << '"' << quoted << '"';
}

void CsvWriter::end_row() {
    out_ << '\n';
    row_started_ = false;
}

void write_manifest(const std::string& path, const nlohmann::json& manifest) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << manifest.dump(2) << '\n';
}

}  // namespace phantom
