#pragma once

#include "frontlab/fb_solver.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace frontlab {

/// Comma-separated table with a header row; numbers use %.17g so values round-trip exactly.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    void add_row(std::span<const double> values);
    void add_row(std::initializer_list<double> values);

    std::size_t rows() const { return rows_; }
    const std::string& text() const { return text_; }

private:
    std::size_t width_;
    std::size_t rows_ = 0;
    std::string text_;
};

std::string format_number(double value);

CsvTable trajectory_table(const Trajectory& traj);
CsvTable profile_table(const FrontState& state);

/// Writes `content` to `path`, creating parent directories; throws std::runtime_error on failure.
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace frontlab
