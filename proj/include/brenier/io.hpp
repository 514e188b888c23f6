#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "brenier/jet.hpp"

namespace brenier::io {

/// Shortest round-trip representation, so text output is byte-stable.
std::string fmt(double v);

/// Point as "x1;x2;..." for CSV cells.
std::string point_cell(const Vec& x);

nlohmann::json to_json(const Vec& v);
nlohmann::json to_json(const Mat& m);

/// Writes text to a file, throwing on I/O failure.
void write_file(const std::string& path, const std::string& text);

}  // namespace brenier::io
