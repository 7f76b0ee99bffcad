#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "turnpike/time_grid.hpp"

namespace turnpike {

std::string format_double(double v);  // shortest round-trip decimal

/// Long-format trajectory export: header "t,x,value".
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& tr, const Grid& g);

/// Column-oriented CSV; all columns must have equal length.
using NamedColumn = std::pair<std::string, std::vector<double>>;
void write_columns_csv(const std::filesystem::path& path, const std::vector<NamedColumn>& cols);

std::string sha256_hex_of_file(const std::filesystem::path& path);

/// Run manifest written next to the artifacts. `config_json` echoes the
/// effective configuration so a run can be reproduced from the manifest alone.
struct Manifest {
    std::string config_sha256;
    std::string subcommand;
    std::string started_at;   // ISO-8601 UTC
    double wall_seconds = 0.0;
    std::string version;
    std::string config_json = "null";
    std::vector<std::string> artifact_files;
    std::vector<std::pair<std::string, double>> timings;
};

void write_manifest(const std::filesystem::path& dir, const Manifest& m);

/// Minimal SVG line plot (linear or log-scale y); enough for the figure
/// reproductions without an external plotting dependency.
class SvgPlot {
  public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel, bool log_y = false);
    void add_line(const std::vector<double>& x, const std::vector<double>& y, std::string label,
                  std::string color = "", bool dashed = false);
    void write(const std::filesystem::path& path) const;

  private:
    struct Line {
        std::vector<double> x, y;
        std::string label, color;
        bool dashed;
    };
    std::string title_, xlabel_, ylabel_;
    bool log_y_;
    std::vector<Line> lines_;
};

}  // namespace turnpike
