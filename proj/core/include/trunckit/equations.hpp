#pragma once

#include <complex>
#include <vector>

#include "trunckit/triangulation.hpp"

namespace trunckit {

// Flat vector of the free dihedral angles (length-0 edges are pinned to 0
// and carry no unknown).
struct AngleVector {
    std::vector<double> x;
    std::vector<std::pair<int, int>> slot_of;        // unknown -> (tet, edge)
    std::vector<std::array<int, 6>> unknown_of;      // (tet, edge) -> unknown or -1

    int size() const { return static_cast<int>(x.size()); }
    TetAngles tet_angles(int tet) const;
    static AngleVector zeros(const Triangulation& tri);
};

enum class ResidualKind : std::uint8_t {
    InternalLength,
    BoundaryLength,
    Sigma,
    AngleSum,
    ZReal,
    ZImag,
    CompletenessRe,
    CompletenessIm,
    IdealVertexSum,
};

const char* residual_kind_name(ResidualKind k);

// Corner of a cusp link triangle: the cross-section modulus is
// cusp_modulus_z(v, w, sign) of tetrahedron `tet`.
struct LinkCorner {
    int tet = 0, v = 0, w = 0, sign = +1;
};

// Cyclic counter-clockwise rotation around one link vertex; spoke[k] is the
// link-edge id crossed between corners[k-1] and corners[k].
struct LinkRotation {
    std::vector<LinkCorner> corners;
    std::vector<int> spoke;
};

struct LoopStep {
    int vertex = 0;      // local link-vertex id
    int arrive_pos = 0;  // spoke position of the edge the loop came in by
    int depart_pos = 0;  // spoke position of the edge it leaves by
};

struct CuspLink {
    int vertex_class = -1;
    std::vector<LinkRotation> rotations;
    std::array<std::vector<LoopStep>, 2> generators;  // simplicial H1 basis
};

struct Residual {
    ResidualKind kind;
    // payload, interpreted per kind
    int a = -1, b = -1, c = -1, d = -1, e = -1, f = -1, g = -1, h = -1;
    std::vector<LinkCorner> corners;  // ZReal/ZImag
};

struct ResidualSystem {
    Triangulation tri;
    Classes cls;
    std::vector<std::pair<int, int>> slot_of;
    std::vector<std::array<int, 6>> unknown_of;
    std::vector<Residual> residuals;
    std::vector<CuspLink> cusps;
    bool has_toric = false;
    bool has_annular = false;

    int unknowns() const { return static_cast<int>(slot_of.size()); }
    int equations() const { return static_cast<int>(residuals.size()); }
    AngleVector make_vector(double value) const;
    TetAngles tet_angles(int tet, const std::vector<double>& x) const;
};

struct AssembleOptions {
    bool drop_redundant = true;  // apply the no-toric / no-annular reductions
};

ResidualSystem assemble(const Triangulation& tri, const AssembleOptions& opts = {});

std::vector<double> evaluate(const ResidualSystem& sys, const std::vector<double>& x);

// Row-major equations() x unknowns() matrix. Angle-sum and vertex-sum rows
// are analytic (entries 0/1); the rest is central finite differences.
std::vector<double> jacobian(const ResidualSystem& sys, const std::vector<double>& x);

// Dilation component of the holonomy of one simplicial generator, by the
// corner-product rule with the odd-vertex sign.
std::complex<double> loop_dilation(const ResidualSystem& sys, const CuspLink& cusp,
                                   const std::vector<LoopStep>& loop, const std::vector<double>& x);

// The same holonomy derivative obtained by developing the link into the
// plane, triangle fan by triangle fan. Used as the independent check.
std::complex<double> loop_dilation_developed(const ResidualSystem& sys, const CuspLink& cusp,
                                             const std::vector<LoopStep>& loop,
                                             const std::vector<double>& x);

// True when every free angle is inside the open box and every non-ideal
// vertex sum is below pi - margin.
bool in_valid_domain(const ResidualSystem& sys, const std::vector<double>& x, double margin);

}  // namespace trunckit
