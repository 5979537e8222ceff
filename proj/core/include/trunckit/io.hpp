#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "trunckit/triangulation.hpp"

namespace trunckit {

// Versioned text document: combinatorial gluing data plus optional solved
// angles and cusp cross-section heights. The combinatorial block round-trips
// bit-exact; numeric blocks round-trip at 17 significant digits.
struct TriangulationFile {
    int version = 1;
    std::string name = "unnamed";
    Triangulation tri;
    std::optional<std::vector<TetAngles>> angles;   // 6 entries per tetrahedron
    std::optional<std::vector<double>> cusp_heights;  // per toric cusp, in class order
};

TriangulationFile parse_triangulation(const std::string& text);  // throws ParseError
TriangulationFile load_triangulation(const std::string& path);
std::string serialize_triangulation(const TriangulationFile& file);
void save_triangulation(const TriangulationFile& file, const std::string& path);

// 17 significant digits, enough to round-trip an IEEE double.
std::string format_double(double v);

}  // namespace trunckit
