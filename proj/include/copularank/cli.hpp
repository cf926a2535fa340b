#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "copularank/density.hpp"
#include "copularank/sample.hpp"

namespace copularank {

/// Two numeric comma-separated columns; a non-numeric first line is taken as
/// a header. Throws std::runtime_error on unreadable files or bad rows.
BivariateSample read_sample_csv(const std::filesystem::path& path);
BivariateSample parse_sample_csv(std::istream& in, const std::string& source_name);

enum class RadiusMode { Area, Radius };

/// SVG with one circle per grid atom (p/n, q/n). In Area mode the circle area
/// is proportional to the mass; in Radius mode the radius is.
std::string density_svg(const DiscreteCopulaDensity& density, RadiusMode mode);

/// Entry point of the command-line tool: estimate | gof | indep | power | thresholds.
/// Returns the process exit code; reports go to `out` (or --output), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace copularank
