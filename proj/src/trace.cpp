#include "vti/trace.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "vti/errors.hpp"

namespace vti {

int Trace::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return int(i);
    return -1;
}

std::vector<double> Trace::column(const std::string& name) const {
    int idx = column_index(name);
    if (idx < 0) throw ParseError("trace has no column '" + name + "'");
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[idx]);
    return out;
}

void Trace::append(double time, const std::vector<double>& values) {
    t.push_back(time);
    rows.push_back(values);
}

void write_trace(const std::filesystem::path& file, const Trace& trace) {
    std::ofstream out(file);
    if (!out) throw ParseError("cannot write trace " + file.string());
    for (const auto& [key, value] : trace.metadata)
        out << "# " << key << "=" << value << "\n";
    out << "t";
    for (const auto& c : trace.columns) out << "," << c;
    out << "\n";
    char buf[32];
    for (std::size_t i = 0; i < trace.t.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.16e", trace.t[i]);
        out << buf;
        for (double v : trace.rows[i]) {
            std::snprintf(buf, sizeof(buf), "%.16e", v);
            out << "," << buf;
        }
        out << "\n";
    }
}

Trace read_trace(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open trace " + file.string());
    Trace trace;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            auto b = body.find_first_not_of(' ');
            auto eq = body.find('=');
            if (b != std::string::npos && eq != std::string::npos && eq > b)
                trace.metadata[body.substr(b, eq - b)] = body.substr(eq + 1);
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        if (!have_header) {
            bool first = true;
            while (std::getline(ss, field, ',')) {
                if (first) {
                    if (field != "t")
                        throw ParseError("trace header must start with 't' in " +
                                         file.string());
                    first = false;
                } else {
                    trace.columns.push_back(field);
                }
            }
            have_header = true;
            continue;
        }
        std::vector<double> values;
        while (std::getline(ss, field, ','))
            values.push_back(std::stod(field));
        if (values.size() != trace.columns.size() + 1)
            throw ParseError("trace row width mismatch in " + file.string());
        trace.t.push_back(values[0]);
        trace.rows.emplace_back(values.begin() + 1, values.end());
    }
    if (!have_header) throw ParseError("trace " + file.string() + " has no header");
    return trace;
}

}  // namespace vti
