#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace vti {

// Time series of a co-simulation run: t, s_wheel, F_contact, u_under_wheel
// plus optional probe-dof columns. Serialized as CSV with 17-significant-digit
// values; metadata (timings, dt, approach) travels in leading `#` comment
// lines so a trace file is self-contained.
struct Trace {
    std::vector<std::string> columns;               // without leading "t"
    std::vector<double> t;
    std::vector<std::vector<double>> rows;          // rows[i].size() == columns.size()
    std::map<std::string, std::string> metadata;

    std::size_t size() const { return t.size(); }
    int column_index(const std::string& name) const;  // -1 if absent
    std::vector<double> column(const std::string& name) const;

    void append(double time, const std::vector<double>& values);
};

void write_trace(const std::filesystem::path& file, const Trace& trace);
Trace read_trace(const std::filesystem::path& file);

}  // namespace vti
