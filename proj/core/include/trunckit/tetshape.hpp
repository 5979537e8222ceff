#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "trunckit/lorentz.hpp"

namespace trunckit {

// Edge slots of a tetrahedron, indexed by unordered vertex pairs in the
// fixed order {0,1},{0,2},{0,3},{2,3},{1,3},{1,2}. Slots k and k+3 are
// opposite edges. All closed-form expressions below are evaluated through
// this single labelling.
inline constexpr int edge_table[6][2] = {{0, 1}, {0, 2}, {0, 3}, {2, 3}, {1, 3}, {1, 2}};

int edge_index(int v, int w);
inline int opposite_edge(int e) { return (e + 3) % 6; }
inline const int* edge_vertices(int e) { return edge_table[e]; }
bool edge_has_vertex(int e, int v);
// The three edge slots at vertex v, ordered by the other endpoint.
std::array<int, 3> edges_at_vertex(int v);
// The three vertices of face f (the face opposite vertex f), ascending.
std::array<int, 3> face_vertices(int f);
// The edge slots contained in face f.
std::array<int, 3> face_edges(int f);

// Positive cyclic order of the three neighbours of v: for an oriented
// tetrahedron with sign +1 the permutation (v, b, c, d) is even; sign -1
// flips the cycle.
std::array<int, 3> positive_cycle_at(int v, int orientation = +1);

struct TetCombinatorics {
    std::uint8_t ideal_mask = 0;  // bit v set when vertex v is ideal
    std::uint8_t zero_mask = 0;   // bit e set when edge slot e has length 0

    bool operator==(const TetCombinatorics&) const = default;
    bool ideal(int v) const { return (ideal_mask >> v) & 1; }
    bool zero(int e) const { return (zero_mask >> e) & 1; }
    // no endpoint of a length-0 edge may be ideal
    bool consistent() const;
};

struct TetAngles {
    std::array<double, 6> theta{};

    double operator[](int e) const { return theta[e]; }
    double& operator[](int e) { return theta[e]; }
    double at(int v, int w) const { return theta[edge_index(v, w)]; }
    double vertex_sum(int v) const;
};

// Per-ideal-vertex horosphere parameter: the circumradius of the
// triangular cross-section trace (see Remark on encoding horospheres).
struct HoroRadii {
    std::array<std::optional<double>, 4> r{};

    static HoroRadii all(double v);
    double at(int v) const;  // throws MissingRadius
};

struct AngleValidity {
    bool zero_edges_ok = true;        // theta(e) == 0 exactly for zero edges
    bool positive_ok = true;          // nonzero angles lie in (0, pi)
    std::array<bool, 4> vertex_ok{};  // sum == pi iff ideal (within eps_geom)
    bool valid() const;
};

AngleValidity validate_angles(const TetCombinatorics& comb, const TetAngles& angles);

// d^theta(v) = 2 c1 c2 c3 + c1^2 + c2^2 + c3^2 - 1 over the cosines of the
// three angles at v; zero exactly at ideal vertices.
double d_theta(const TetAngles& angles, int v);
// c^theta(e) for the internal-length formula, through the fixed labelling.
double c_theta(const TetAngles& angles, int e);
// Division-free g^theta > 0 entering the non-ideal D values.
double g_theta(const TetAngles& angles);

enum class LengthKind : std::uint8_t { Zero, Finite, HalfLine, Line };

struct Length {
    LengthKind kind = LengthKind::Finite;
    double value = 0.0;  // meaningful for Finite only

    static Length zero() { return {LengthKind::Zero, 0.0}; }
    static Length finite(double v) { return {LengthKind::Finite, v}; }
    static Length half_line() { return {LengthKind::HalfLine, 0.0}; }
    static Length line() { return {LengthKind::Line, 0.0}; }
    bool finite_kind() const { return kind == LengthKind::Finite || kind == LengthKind::Zero; }
};

// Length of the boundary edge between non-opposite slots e_i, e_j at their
// common vertex. Zero at ideal vertices, infinite when a slot is 0-length.
Length boundary_edge_length(const TetCombinatorics& comb, const TetAngles& angles, int ei, int ej);
// cosh of the above when finite (used by residuals; no arccosh involved).
double boundary_edge_cosh(const TetAngles& angles, int ei, int ej);

Length internal_edge_length(const TetCombinatorics& comb, const TetAngles& angles, int e);
// cosh L(e) = c(e)/sqrt(d d'), floored away from the singular set.
double internal_edge_cosh(const TetAngles& angles, int e);

// Signed invariant of an exceptional hexagon: face with ideal corner a
// whose opposite internal edge {b,c} has length 0. The order (b,c) encodes
// the orientation; swapping b and c flips the sign.
double sigma(const TetCombinatorics& comb, const TetAngles& angles, int a, int b, int c);
// True when face f with corner a is exceptional.
bool is_exceptional_hexagon(const TetCombinatorics& comb, int f, int a);

// Similarity modulus of the cusp cross-section triangle at ideal vertex v,
// seen from the corner of edge {v,b}.
std::complex<double> cusp_modulus_z(const TetCombinatorics& comb, const TetAngles& angles, int v,
                                    int b, int orientation = +1);

// D_i of the tilt pipeline: sqrt(g/d) at non-ideal vertices, the explicit
// 1/(2r) expression at ideal ones.
double D_value(const TetCombinatorics& comb, const TetAngles& angles, int v, const HoroRadii& radii);

// Tilt vector t = M * (1/D_1 .. 1/D_4), M the matrix of opposite-angle
// cosines.
std::array<double, 4> tilts(const TetCombinatorics& comb, const TetAngles& angles,
                            const HoroRadii& radii);

// --- Gram-matrix reconstruction (independent oracle) --------------------

enum class VertexKind : std::uint8_t { Ideal, UltraIdeal };

// Reconstruction of the tetrahedron from the face-normal Gram matrix
// G_ii = 1, G_ij = -cos theta(e_kl). Vertex lifts are rows of G^{-1} in an
// explicit Lorentz frame centred at the in-point, so they carry honest
// Minkowski coordinates: unit space-like rows for ultra-ideal vertices,
// future null rows (x0-normalized) for ideal ones.
struct GramLift {
    std::array<std::array<double, 4>, 4> gram_inv{};  // Gram of raw duals
    std::array<VertexKind, 4> kind{};
    std::array<MVec, 4> vertex;   // normalized lifts, standard frame
    std::array<MVec, 4> face_in;  // face normals, manifold side positive
    double det = 0.0;

    MVec face_out(int f) const { return -face_in[f]; }
};

GramLift gram_lift(const TetAngles& angles);

struct GramReport {
    std::array<VertexKind, 4> kind{};
    // per-edge internal lengths and per-(face, corner) boundary lengths
    std::array<Length, 6> internal;
    std::array<std::array<Length, 4>, 4> boundary;  // [face][corner vertex]
    double max_internal_delta = 0.0;  // vs closed forms, cosh scale
    double max_boundary_delta = 0.0;
};

// Recomputes all lengths from Lorentzian products of the lifted vertices
// and reports deltas against the closed-form operations.
GramReport gram_oracle(const TetCombinatorics& comb, const TetAngles& angles);

// Vertex lifts with ideal vertices scaled so the dual horosphere has
// cross-section circumradius r (others on H^3_+), in the standard frame.
std::array<MVec, 4> lift_with_radii(const TetCombinatorics& comb, const TetAngles& angles,
                                    const HoroRadii& radii);

// Cross-section circumradius of ideal vertex v for the given null lift,
// measured against the other three lifted vertices.
double cross_section_circumradius(const std::array<MVec, 4>& lift, int v);

// Tilts recomputed from the definition <m, p>: p the support vector of the
// lifted tetrahedron, m the outward face normals. Independent of tilts().
std::array<double, 4> tilt_oracle(const TetCombinatorics& comb, const TetAngles& angles,
                                  const HoroRadii& radii);

// Outward unit normal of the face spanned by lifts a, b, c, with x on the
// non-positive side.
MVec face_outward_normal(const MVec& a, const MVec& b, const MVec& c, const MVec& x);

// Dihedral angles of a lifted tetrahedron, recovered from face normals.
TetAngles angles_from_lift(const std::array<MVec, 4>& lift);

}  // namespace trunckit
