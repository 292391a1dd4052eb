#include "frontlab/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace frontlab {

std::string format_number(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns) : width_(columns.size()) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i > 0) text_ += ',';
        text_ += columns[i];
    }
    text_ += '\n';
}

void CsvTable::add_row(std::span<const double> values) {
    if (values.size() != width_) throw std::invalid_argument("CsvTable: row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) text_ += ',';
        text_ += format_number(values[i]);
    }
    text_ += '\n';
    ++rows_;
}

void CsvTable::add_row(std::initializer_list<double> values) {
    add_row(std::span<const double>(values.begin(), values.size()));
}

CsvTable trajectory_table(const Trajectory& traj) {
    CsvTable table({"t", "g", "h", "ux_g", "ux_h", "max_u", "u_center"});
    for (const auto& s : traj.samples) table.add_row({s.t, s.g, s.h, s.ux_g, s.ux_h, s.max_u, s.u_center});
    return table;
}

CsvTable profile_table(const FrontState& state) {
    CsvTable table({"x", "u"});
    for (int j = 0; j <= state.intervals(); ++j) table.add_row({state.x_at(j), state.values[j]});
    return table;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace frontlab
