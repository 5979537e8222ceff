#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trunckit/tetshape.hpp"

namespace trunckit {

// A face pairing: glue face f of the owning tetrahedron to face perm[f] of
// tetrahedron `tet`, matching vertex v to perm[v].
struct FaceGluing {
    int tet = -1;
    std::array<std::uint8_t, 4> perm{0, 1, 2, 3};

    int image_face(int f) const { return perm[f]; }
    FaceGluing inverse_onto(int self) const;
    bool operator==(const FaceGluing&) const = default;
};

int perm_parity(const std::array<std::uint8_t, 4>& p);  // +1 even, -1 odd

struct TetData {
    TetCombinatorics comb;
    std::array<FaceGluing, 4> glue{};

    bool operator==(const TetData&) const = default;
};

// Combinatorial gluing data of a partially truncated triangulation. The
// value is immutable in use: moves return new triangulations.
struct Triangulation {
    std::vector<TetData> tets;

    int size() const { return static_cast<int>(tets.size()); }
    bool operator==(const Triangulation&) const = default;
};

// One pass of a tetrahedron wedge around an edge orbit.
struct EdgeIncidence {
    int tet = 0;
    int slot = 0;        // edge slot in the tetrahedron
    bool forward = true; // slot endpoints aligned with the class reference
    int entry_face = 0;  // face crossed to reach this wedge
    int exit_face = 0;
};

struct EdgeClass {
    std::vector<EdgeIncidence> inc;  // cyclic, in walk order
    bool zero = false;
    std::array<int, 2> end_vertex_class{-1, -1};  // vertex class at ends 0/1

    int valence() const { return static_cast<int>(inc.size()); }
};

struct VertexClass {
    std::vector<std::pair<int, int>> members;  // (tet, vertex)
    bool ideal = false;
    int link_chi = 0;  // Euler characteristic of the link surface
};

// Identifier of a link vertex: (edge class, end).
struct LinkVertexId {
    int edge_class = -1;
    int end = 0;
    bool operator==(const LinkVertexId&) const = default;
    bool operator<(const LinkVertexId& o) const {
        return edge_class != o.edge_class ? edge_class < o.edge_class : end < o.end;
    }
};

struct Classes {
    std::vector<int> sign;  // per-tet orientation, tet 0 positive
    std::vector<EdgeClass> edges;
    std::vector<VertexClass> verts;
    std::vector<std::array<int, 6>> edge_class_of;   // [tet][slot]
    std::vector<std::array<bool, 6>> edge_dir_of;    // slot aligned with class ref
    std::vector<std::array<int, 4>> vertex_class_of; // [tet][vertex]

    LinkVertexId link_vertex(int tet, int v, int slot) const;
};

// Orbit computation; throws InconsistentGluing when the gluing data is not
// a closed orientable partially truncated triangulation.
Classes build_classes(const Triangulation& tri);

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    std::vector<double> boundary_chi;  // per boundary component
};

ValidationReport validate(const Triangulation& tri);

// Euler characteristics of the components of the truncation surface;
// every component of a geometric boundary must have chi < 0.
std::vector<int> boundary_euler_check(const Triangulation& tri, const Classes& cls);

// Advisory scan for edges that look boundary-parallel.
std::vector<std::string> detect_boundary_parallel_flags(const Triangulation& tri,
                                                        const Classes& cls);

// --- dual (N', arcs) view ------------------------------------------------

struct ArcView {
    std::vector<std::array<FaceGluing, 4>> glue;
    std::vector<std::uint8_t> arc_mask;  // per-tet edge bitmask
};

ArcView to_arc_view(const Triangulation& tri);
Triangulation from_arc_view(const ArcView& av);

// --- moves ---------------------------------------------------------------

struct MoveResult {
    Triangulation tri;
    std::array<int, 3> new_tets{-1, -1, -1};  // third unused for 3-2
    int new_edge_tet = -1;                    // 2-3: a tet containing the new edge
    int new_edge_slot = -1;
};

// Replaces the two distinct tetrahedra around face (tet, face) by three
// around a new edge. Outer gluings are rewired; flags are inherited; the
// new edge is not length 0.
MoveResult move_two_three(const Triangulation& tri, int tet, int face);

// Inverse move on a valence-3 edge class with three distinct tetrahedra.
MoveResult move_three_two(const Triangulation& tri, const Classes& cls, int edge_class);

// --- canonical labelling -------------------------------------------------

// Deterministic canonical form: two triangulations get equal strings iff
// they are isomorphic including ideal and length-0 flags.
std::string isomorphism_signature(const Triangulation& tri);
Triangulation canonical_relabel(const Triangulation& tri);

}  // namespace trunckit
