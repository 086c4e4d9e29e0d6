#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace phantom {

// float64 serialized as scientific with 17 significant digits (round-trip
// exact); extended-precision values travel as decimal-quoted strings.
std::string format_sci(double v);

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void field(double v);
    void field(long v);
    void field(int v) { field(static_cast<long>(v)); }
    void field(const std::string& quoted);  // written as "..."
    void end_row();

    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::ofstream out_;
    bool row_started_ = false;
    void sep();
};

// Every run writes a manifest next to its data: full configuration, seed,
// version, thread cap, and the list of artifacts, so any number in the
// output is traceable to a config without reading code.
void write_manifest(const std::string& path, const nlohmann::json& manifest);

extern const char* const kVersion;

}  // namespace phantom
