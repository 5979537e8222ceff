#pragma once

#include <optional>

#include "trunckit/equations.hpp"
#include "trunckit/solver.hpp"

namespace trunckit {

// Lorentz map placing the partner tetrahedron of a face gluing against the
// given realization: src = current lifts of the near tetrahedron, dst_base
// = base-frame lifts of the far one, g = the gluing of face f. Ideal lift
// scales are matched through the Lorentzian pairings.
LorentzMat face_transfer(const std::array<MVec, 4>& src, const TetCombinatorics& src_comb,
                         const std::array<MVec, 4>& dst_base, int f, const FaceGluing& g);

// One tetrahedron copy of a development in the half-space chart.
struct Realized {
    int tet = -1;
    std::array<MVec, 4> lift;
    int inf_vertex = -1;  // vertex at the chart infinity, -1 for lower copies
    std::array<bool, 4> glued{};
};

struct CuspDevelopment {
    int vertex_class = -1;
    double rho = 0.0;      // largest opposite-face hemisphere radius (step 1.A)
    double r_trunc = 0.0;  // largest truncation radius among the 1.A copies
    double diameter = 0.0; // Euclidean diameter of the slice Omega
    double r1 = 0.0, r2 = 0.0;  // first/second largest truncation radii
    std::vector<Realized> family;
    // cross-section shadow circumradius of each (tet, ideal vertex) pair of
    // this cusp, from its step-1.A copy
    std::vector<std::pair<std::pair<int, int>, double>> shadow_circumradius;
};

struct DevelopConfig {
    int copy_cap = 100000;  // DevelopmentOverflow beyond this
    int seed_member = 0;    // which class member to start from
};

// Steps 1.A-1.C: develops the cusp at the chart infinity and extracts the
// height constants. Throws NotApplicable when the manifold has no
// truncated vertices (empty geodesic boundary).
CuspDevelopment develop_cusp(const Triangulation& tri, const Classes& cls,
                             const std::vector<TetAngles>& angles, int cusp_class,
                             const DevelopConfig& cfg = {});

double height_constant_k(double r1, double r2, double d);

struct CrossSection {
    double lambda = 0.0;
    std::vector<int> cusp_classes;  // vertex classes, one per toric cusp
    std::vector<double> heights;    // per cusp
    std::vector<std::array<std::optional<double>, 4>> radii;  // per (tet, vertex)
    std::vector<CuspDevelopment> developments;

    HoroRadii tet_radii(int tet) const;
    CrossSection scaled(double height_factor) const;
};

CrossSection cross_section(const Triangulation& tri, const Classes& cls,
                           const std::vector<TetAngles>& angles, const DevelopConfig& cfg = {});

enum class FaceConvexity : std::uint8_t { Convex, Flat, Concave };

const char* face_convexity_name(FaceConvexity c);

struct FaceTilt {
    int tet = -1, face = -1;        // the lexicographically smaller side
    int other_tet = -1, other_face = -1;
    double t1 = 0.0, t2 = 0.0;
    double normalized_sum = 0.0;    // (t1+t2)/max|t| over the triangulation
    bool self_adjacent = false;
    FaceConvexity kind = FaceConvexity::Convex;
};

std::vector<FaceTilt> face_tilt_table(const Triangulation& tri,
                                      const std::vector<TetAngles>& angles,
                                      const std::vector<HoroRadii>& radii, double tilt_eps);

// Euclidean admissibility of the 2-3 move across face (tet, f) in the
// projective chart of the joint lift.
bool admissible(const Triangulation& tri, const std::vector<TetAngles>& angles,
                const std::vector<HoroRadii>& radii, int tet, int f);

// A move applied with shapes derived from the joint lift (not re-solved).
struct GeometricMove {
    Triangulation tri;
    std::vector<TetAngles> angles;
    std::vector<HoroRadii> radii;
    std::array<int, 3> new_tets{-1, -1, -1};
    int shape_defects = 0;  // flag snaps that exceeded tolerance
};

GeometricMove geometric_two_three(const Triangulation& tri, const std::vector<TetAngles>& angles,
                                  const std::vector<HoroRadii>& radii, int tet, int face);

GeometricMove geometric_three_two(const Triangulation& tri, const Classes& cls,
                                  const std::vector<TetAngles>& angles,
                                  const std::vector<HoroRadii>& radii, int edge_class);

enum class CanonizeStatus : std::uint8_t { Canonical, Subdivision, Stuck };

const char* canonize_status_name(CanonizeStatus s);

struct CanonizeConfig {
    double tilt_eps = 1e-9;
    long max_moves = -1;  // default 10 * n^3
    bool cap_hit_flag = false;
    DevelopConfig develop;
    double ideal_radius = 1.0;  // used when the boundary is empty
};

struct CanonicalCells {
    CanonizeStatus status = CanonizeStatus::Canonical;
    bool cap_hit = false;
    Triangulation tri;
    std::vector<TetAngles> angles;
    std::vector<HoroRadii> radii;
    std::vector<FaceTilt> faces;                 // final tilt table
    std::vector<std::vector<int>> cells;         // tetrahedra grouped across flat faces
    std::vector<std::pair<int, int>> transparent;  // flat faces (tet, face)
    int moves = 0;
    int moves_23 = 0, moves_32 = 0;
    int assertion_failures = 0;  // self-adjacent or freshly created non-convex faces
};

CanonicalCells canonize(const Triangulation& tri, const std::vector<TetAngles>& angles,
                        const CanonizeConfig& cfg = {});

// Builds per-tet angles from a solved flat vector.
std::vector<TetAngles> per_tet_angles(const ResidualSystem& sys, const std::vector<double>& x);

struct CrossSectionCheck {
    bool applicable = false;
    bool pass = true;
    int pairs_checked = 0;
    std::vector<std::string> violations;
};

// Spot-check of the strict-convexity hypothesis on all horosphere pairs
// realized inside the finite developments. Hypothesis (2) on cut-locus
// vertices is guaranteed by the height construction and not re-tested.
CrossSectionCheck verify_cross_section(const Triangulation& tri, const Classes& cls,
                                       const std::vector<TetAngles>& angles,
                                       const CrossSection& cs);

}  // namespace trunckit
