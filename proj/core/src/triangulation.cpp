#include "trunckit/triangulation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

namespace trunckit {

FaceGluing FaceGluing::inverse_onto(int self) const {
    FaceGluing inv;
    inv.tet = self;
    for (int i = 0; i < 4; ++i) inv.perm[perm[i]] = static_cast<std::uint8_t>(i);
    return inv;
}

int perm_parity(const std::array<std::uint8_t, 4>& p) {
    int inv = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (p[i] > p[j]) ++inv;
    return (inv % 2) ? -1 : +1;
}

namespace {

void check_structural(const Triangulation& tri) {
    const int n = tri.size();
    if (n == 0) throw InconsistentGluing("empty triangulation");
    for (int t = 0; t < n; ++t) {
        if (!tri.tets[t].comb.consistent())
            throw InconsistentGluing("length-0 edge with an ideal endpoint");
        for (int f = 0; f < 4; ++f) {
            const FaceGluing& g = tri.tets[t].glue[f];
            if (g.tet < 0 || g.tet >= n)
                throw InconsistentGluing("face left unglued");
            std::array<bool, 4> seen{};
            for (int v : g.perm) {
                if (v < 0 || v > 3 || seen[v]) throw InconsistentGluing("bad permutation");
                seen[v] = true;
            }
            int f2 = g.image_face(f);
            if (g.tet == t && f2 == f) throw InconsistentGluing("face glued to itself");
            const FaceGluing& back = tri.tets[g.tet].glue[f2];
            if (back != g.inverse_onto(t))
                throw InconsistentGluing("gluing is not an involution");
        }
    }
}

std::vector<int> orient_signs(const Triangulation& tri) {
    const int n = tri.size();
    std::vector<int> sign(n, 0);
    sign[0] = +1;
    std::queue<int> bfs;
    bfs.push(0);
    while (!bfs.empty()) {
        int t = bfs.front();
        bfs.pop();
        for (int f = 0; f < 4; ++f) {
            const FaceGluing& g = tri.tets[t].glue[f];
            // gluings must reverse the induced orientations
            int want = -sign[t] * perm_parity(g.perm);
            if (sign[g.tet] == 0) {
                sign[g.tet] = want;
                bfs.push(g.tet);
            } else if (sign[g.tet] != want) {
                throw InconsistentGluing("gluings do not reverse orientation");
            }
        }
    }
    for (int t = 0; t < n; ++t)
        if (sign[t] == 0) throw InconsistentGluing("triangulation is not connected");
    return sign;
}

}  // namespace

LinkVertexId Classes::link_vertex(int tet, int v, int slot) const {
    int c = edge_class_of[tet][slot];
    bool dir = edge_dir_of[tet][slot];
    int first = dir ? edge_table[slot][0] : edge_table[slot][1];
    return {c, v == first ? 0 : 1};
}

Classes build_classes(const Triangulation& tri) {
    check_structural(tri);
    const int n = tri.size();

    Classes cls;
    cls.sign = orient_signs(tri);
    cls.edge_class_of.assign(n, {-1, -1, -1, -1, -1, -1});
    cls.edge_dir_of.assign(n, {});
    cls.vertex_class_of.assign(n, {-1, -1, -1, -1});

    // --- edge orbits, walked around each edge ---------------------------
    for (int t0 = 0; t0 < n; ++t0) {
        for (int s0 = 0; s0 < 6; ++s0) {
            if (cls.edge_class_of[t0][s0] >= 0) continue;
            EdgeClass ec;
            int i0 = edge_table[s0][0], j0 = edge_table[s0][1];
            // wall labels = the two face indices containing the edge
            int walls[2];
            int wk = 0;
            for (int v = 0; v < 4; ++v)
                if (v != i0 && v != j0) walls[wk++] = v;
            int t = t0, i = i0, j = j0;
            int entry = walls[0], exit = walls[1];
            // map of visited directed states for the fold check
            std::set<std::array<int, 4>> seen_directed;
            while (true) {
                if (seen_directed.count({t, i, j, entry}))
                    break;  // closed up at the start state
                if (seen_directed.count({t, j, i, entry}))
                    throw InconsistentGluing("edge identified with itself reversing orientation");
                seen_directed.insert({t, i, j, entry});
                int slot = edge_index(i, j);
                EdgeIncidence einc;
                einc.tet = t;
                einc.slot = slot;
                einc.forward = (edge_table[slot][0] == i);
                einc.entry_face = entry;
                einc.exit_face = exit;
                ec.inc.push_back(einc);
                const FaceGluing& g = tri.tets[t].glue[exit];
                int nt = g.tet;
                int ni = g.perm[i], nj = g.perm[j];
                int nentry = g.perm[exit];
                int nexit = -1;
                for (int v = 0; v < 4; ++v)
                    if (v != ni && v != nj && v != nentry) nexit = v;
                t = nt;
                i = ni;
                j = nj;
                entry = nentry;
                exit = nexit;
                if (static_cast<int>(ec.inc.size()) > 24 * n)
                    throw InconsistentGluing("edge orbit failed to close");
            }
            // must have closed at the initial directed state
            if (t != t0 || i != i0 || j != j0)
                throw InconsistentGluing("edge orbit closed at an unexpected state");
            int cid = static_cast<int>(cls.edges.size());
            bool zero = tri.tets[t0].comb.zero(s0);
            for (const EdgeIncidence& einc : ec.inc) {
                if (tri.tets[einc.tet].comb.zero(einc.slot) != zero)
                    throw InconsistentGluing("length-0 flags differ within an edge class");
                cls.edge_class_of[einc.tet][einc.slot] = cid;
                cls.edge_dir_of[einc.tet][einc.slot] = einc.forward;
            }
            ec.zero = zero;
            cls.edges.push_back(std::move(ec));
        }
    }

    // --- vertex orbits ---------------------------------------------------
    for (int t0 = 0; t0 < n; ++t0) {
        for (int v0 = 0; v0 < 4; ++v0) {
            if (cls.vertex_class_of[t0][v0] >= 0) continue;
            int cid = static_cast<int>(cls.verts.size());
            VertexClass vc;
            vc.ideal = tri.tets[t0].comb.ideal(v0);
            std::queue<std::pair<int, int>> bfs;
            bfs.emplace(t0, v0);
            cls.vertex_class_of[t0][v0] = cid;
            while (!bfs.empty()) {
                auto [t, v] = bfs.front();
                bfs.pop();
                vc.members.emplace_back(t, v);
                if (tri.tets[t].comb.ideal(v) != vc.ideal)
                    throw InconsistentGluing("ideal flags differ within a vertex class");
                for (int f = 0; f < 4; ++f) {
                    if (f == v) continue;
                    const FaceGluing& g = tri.tets[t].glue[f];
                    int nt = g.tet, nv = g.perm[v];
                    if (cls.vertex_class_of[nt][nv] < 0) {
                        cls.vertex_class_of[nt][nv] = cid;
                        bfs.emplace(nt, nv);
                    }
                }
            }
            std::sort(vc.members.begin(), vc.members.end());
            cls.verts.push_back(std::move(vc));
        }
    }

    // edge-class ends and link Euler characteristics
    std::vector<int> link_vertices(cls.verts.size(), 0);
    for (auto& ec : cls.edges) {
        const EdgeIncidence& first = ec.inc.front();
        int i = first.forward ? edge_table[first.slot][0] : edge_table[first.slot][1];
        int j = first.forward ? edge_table[first.slot][1] : edge_table[first.slot][0];
        ec.end_vertex_class[0] = cls.vertex_class_of[first.tet][i];
        ec.end_vertex_class[1] = cls.vertex_class_of[first.tet][j];
        ++link_vertices[ec.end_vertex_class[0]];
        ++link_vertices[ec.end_vertex_class[1]];
    }
    for (std::size_t c = 0; c < cls.verts.size(); ++c) {
        VertexClass& vc = cls.verts[c];
        int faces = static_cast<int>(vc.members.size());
        vc.link_chi = link_vertices[c] - faces / 2;
        if (vc.ideal && vc.link_chi != 0)
            throw InconsistentGluing("ideal vertex class whose link is not a torus");
    }
    return cls;
}

std::vector<int> boundary_euler_check(const Triangulation& tri, const Classes& cls) {
    // Components of the truncation surface: one triangle per non-ideal
    // (tet, vertex), glued along the faces.
    const int n = tri.size();
    std::vector<std::array<int, 4>> comp(n, {-1, -1, -1, -1});
    std::vector<int> chi;
    std::vector<std::pair<int, int>> stack;
    int ncomp = 0;
    for (int t0 = 0; t0 < n; ++t0) {
        for (int v0 = 0; v0 < 4; ++v0) {
            if (tri.tets[t0].comb.ideal(v0) || comp[t0][v0] >= 0) continue;
            int id = ncomp++;
            int faces = 0;
            stack.emplace_back(t0, v0);
            comp[t0][v0] = id;
            while (!stack.empty()) {
                auto [t, v] = stack.back();
                stack.pop_back();
                ++faces;
                for (int f = 0; f < 4; ++f) {
                    if (f == v) continue;
                    const FaceGluing& g = tri.tets[t].glue[f];
                    int nt = g.tet, nv = g.perm[v];
                    if (comp[nt][nv] < 0) {
                        comp[nt][nv] = id;
                        stack.emplace_back(nt, nv);
                    }
                }
            }
            chi.push_back(-faces / 2);  // V term added below
        }
    }
    // genuine vertices: ends of non-zero edge classes at truncated classes
    for (const auto& ec : cls.edges) {
        if (ec.zero) continue;
        const EdgeIncidence& first = ec.inc.front();
        int a = first.forward ? edge_table[first.slot][0] : edge_table[first.slot][1];
        int b = first.forward ? edge_table[first.slot][1] : edge_table[first.slot][0];
        int ends[2] = {a, b};
        for (int e = 0; e < 2; ++e) {
            int vcls = ec.end_vertex_class[e];
            if (cls.verts[vcls].ideal) continue;
            ++chi[comp[first.tet][ends[e]]];
        }
    }
    return chi;
}

std::vector<std::string> detect_boundary_parallel_flags(const Triangulation& tri,
                                                        const Classes& cls) {
    std::vector<std::string> warnings;
    (void)tri;
    for (std::size_t c = 0; c < cls.edges.size(); ++c) {
        const EdgeClass& ec = cls.edges[c];
        if (ec.zero) continue;
        int v0 = ec.end_vertex_class[0], v1 = ec.end_vertex_class[1];
        if (v0 == v1 && !cls.verts[v0].ideal) {
            warnings.push_back("edge class " + std::to_string(c) +
                               " has both ends on the same boundary component; it may be "
                               "boundary-parallel (triangulation would not be geometric)");
        }
    }
    return warnings;
}

ValidationReport validate(const Triangulation& tri) {
    ValidationReport rep;
    try {
        Classes cls = build_classes(tri);
        auto chi = boundary_euler_check(tri, cls);
        for (std::size_t i = 0; i < chi.size(); ++i) {
            rep.boundary_chi.push_back(chi[i]);
            if (chi[i] >= 0) {
                rep.ok = false;
                rep.errors.push_back("boundary component " + std::to_string(i) +
                                     " has Euler characteristic " + std::to_string(chi[i]) +
                                     " (must be negative)");
            }
        }
        for (auto& w : detect_boundary_parallel_flags(tri, cls)) rep.warnings.push_back(w);
    } catch (const Error& e) {
        rep.ok = false;
        rep.errors.push_back(e.what());
    }
    return rep;
}

// --- arc view -------------------------------------------------------------

ArcView to_arc_view(const Triangulation& tri) {
    ArcView av;
    for (const TetData& td : tri.tets) {
        av.glue.push_back(td.glue);
        av.arc_mask.push_back(td.comb.zero_mask);
    }
    return av;
}

Triangulation from_arc_view(const ArcView& av) {
    Triangulation tri;
    for (std::size_t t = 0; t < av.glue.size(); ++t) {
        TetData td;
        td.glue = av.glue[t];
        td.comb.zero_mask = av.arc_mask[t];
        td.comb.ideal_mask = 0;
        tri.tets.push_back(td);
    }
    // ideal vertices: torus link and no arc ends
    Classes cls = build_classes(tri);
    std::vector<bool> touched(cls.verts.size(), false);
    for (const auto& ec : cls.edges) {
        if (!ec.zero) continue;
        touched[ec.end_vertex_class[0]] = true;
        touched[ec.end_vertex_class[1]] = true;
    }
    for (std::size_t c = 0; c < cls.verts.size(); ++c) {
        if (cls.verts[c].link_chi != 0 || touched[c]) continue;
        for (auto [t, v] : cls.verts[c].members)
            tri.tets[t].comb.ideal_mask |= static_cast<std::uint8_t>(1u << v);
    }
    return tri;
}

// --- moves -----------------------------------------------------------------

namespace {

struct FaceRef {
    int tet = -1;
    int face = -1;
    bool operator<(const FaceRef& o) const {
        return tet != o.tet ? tet < o.tet : face < o.face;
    }
};

// relabelling of one old tetrahedron face onto a new tetrahedron face
struct FaceLift {
    int tet = -1;                        // new tet index
    std::array<std::uint8_t, 4> relab{}; // old labels -> new labels
};

std::array<std::uint8_t, 4> compose(const std::array<std::uint8_t, 4>& outer,
                                    const std::array<std::uint8_t, 4>& inner) {
    std::array<std::uint8_t, 4> r{};
    for (int i = 0; i < 4; ++i) r[i] = outer[inner[i]];
    return r;
}

std::array<std::uint8_t, 4> invert(const std::array<std::uint8_t, 4>& p) {
    std::array<std::uint8_t, 4> r{};
    for (int i = 0; i < 4; ++i) r[p[i]] = static_cast<std::uint8_t>(i);
    return r;
}

// Rewires the boundary of a surgered region. `lift` maps every old face on
// the region boundary to its new location; `removed` lists dropped tets.
// Gluings of survivors pointing into the region are redirected; gluings
// between two region faces are resolved through both lifts.
Triangulation splice(const Triangulation& old, const std::vector<int>& removed,
                     const std::vector<TetData>& created,
                     const std::map<FaceRef, FaceLift>& lift) {
    Triangulation out;
    std::vector<int> remap(old.size(), -1);
    for (int t = 0; t < old.size(); ++t) {
        if (std::find(removed.begin(), removed.end(), t) != removed.end()) continue;
        remap[t] = out.size();
        out.tets.push_back(old.tets[t]);
    }
    const int base = out.size();
    for (const TetData& td : created) out.tets.push_back(td);

    auto resolve = [&](int old_tet, int old_face,
                       const std::array<std::uint8_t, 4>& into_old) -> FaceGluing {
        // (old_tet, old_face) is where an edge of the gluing graph lands in
        // the old triangulation; into_old maps the source labels there.
        auto it = lift.find({old_tet, old_face});
        FaceGluing g;
        if (it == lift.end()) {
            g.tet = remap[old_tet];
            g.perm = into_old;
        } else {
            g.tet = base + it->second.tet;
            g.perm = compose(it->second.relab, into_old);
        }
        return g;
    };

    // survivors: redirect faces that pointed into removed tets
    for (int t = 0; t < old.size(); ++t) {
        if (remap[t] < 0) continue;
        for (int f = 0; f < 4; ++f) {
            const FaceGluing& g = old.tets[t].glue[f];
            out.tets[remap[t]].glue[f] = resolve(g.tet, g.image_face(f), g.perm);
        }
    }
    // created tets: each outer face records the OLD gluing target of the old
    // face it replaces; callers pre-set those as (old tet, perm: new labels
    // -> old target labels) with tet encoded as ~old_tet. Inner faces are
    // set directly with tet >= 0 meaning created-index.
    for (std::size_t k = 0; k < created.size(); ++k) {
        for (int f = 0; f < 4; ++f) {
            FaceGluing g = out.tets[base + k].glue[f];
            if (g.tet >= 0) {
                g.tet += base;  // created-to-created, fixed labels
                out.tets[base + k].glue[f] = g;
            } else {
                int old_tet = ~g.tet;
                out.tets[base + k].glue[f] = resolve(old_tet, g.image_face(f), g.perm);
            }
        }
    }
    return out;
}

}  // namespace

MoveResult move_two_three(const Triangulation& tri, int ta, int fa) {
    const FaceGluing& gl = tri.tets[ta].glue[fa];
    const int tb = gl.tet;
    const int fb = gl.image_face(fa);
    if (tb == ta) throw SelfAdjacentFace();

    auto p = face_vertices(fa);                 // equator labels in ta
    std::array<int, 3> q{};                     // their labels in tb
    for (int k = 0; k < 3; ++k) q[k] = gl.perm[p[k]];
    const TetCombinatorics& ca = tri.tets[ta].comb;
    const TetCombinatorics& cb = tri.tets[tb].comb;

    std::vector<TetData> created(3);
    std::map<FaceRef, FaceLift> lift;

    for (int k = 0; k < 3; ++k) {
        int i = (k == 0) ? 1 : 0;
        int j = (k == 2) ? 1 : 2;
        // new tet k: vertex 0 = apex of ta, 1 = equator p[i], 2 = equator
        // p[j], 3 = apex of tb (i < j among the indices != k)
        TetData& nt = created[k];
        auto set_ideal = [&](int lv, bool flag) {
            if (flag) nt.comb.ideal_mask |= static_cast<std::uint8_t>(1u << lv);
        };
        set_ideal(0, ca.ideal(fa));
        set_ideal(1, ca.ideal(p[i]));
        set_ideal(2, ca.ideal(p[j]));
        set_ideal(3, cb.ideal(fb));
        auto set_zero = [&](int lv, int lw, bool flag) {
            if (flag) nt.comb.zero_mask |= static_cast<std::uint8_t>(1u << edge_index(lv, lw));
        };
        set_zero(0, 1, ca.zero(edge_index(fa, p[i])));
        set_zero(0, 2, ca.zero(edge_index(fa, p[j])));
        set_zero(1, 2, ca.zero(edge_index(p[i], p[j])));
        set_zero(1, 3, cb.zero(edge_index(q[i], fb)));
        set_zero(2, 3, cb.zero(edge_index(q[j], fb)));
        // edge {0,3} is the new edge: never length 0

        // face lifts of the old outer faces
        FaceLift la;  // old (ta, p[k]) -> (new k, face 3)
        la.tet = k;
        la.relab[fa] = 0;
        la.relab[p[i]] = 1;
        la.relab[p[j]] = 2;
        la.relab[p[k]] = 3;
        lift[{ta, p[k]}] = la;
        FaceLift lb;  // old (tb, q[k]) -> (new k, face 0)
        lb.tet = k;
        lb.relab[fb] = 3;
        lb.relab[q[i]] = 1;
        lb.relab[q[j]] = 2;
        lb.relab[q[k]] = 0;
        lift[{tb, q[k]}] = lb;
    }

    for (int k = 0; k < 3; ++k) {
        int i = (k == 0) ? 1 : 0;
        int j = (k == 2) ? 1 : 2;
        TetData& nt = created[k];
        // outer faces: encode the old target with tet = ~old_tet
        const FaceGluing& ga = tri.tets[ta].glue[p[k]];
        const FaceGluing& gb = tri.tets[tb].glue[q[k]];
        std::array<std::uint8_t, 4> inv_a = invert(lift[{ta, p[k]}].relab);
        std::array<std::uint8_t, 4> inv_b = invert(lift[{tb, q[k]}].relab);
        nt.glue[3] = FaceGluing{~ga.tet, compose(ga.perm, inv_a)};
        nt.glue[0] = FaceGluing{~gb.tet, compose(gb.perm, inv_b)};
        // inner faces between the slices: shared face {0, 3, common equator}
        for (int l = 0; l < 3; ++l) {
            if (l == k) continue;
            int il = (l == 0) ? 1 : 0;
            int jl = (l == 2) ? 1 : 2;
            // equator vertex common to slices k and l
            int m = 3 - k - l;
            int my_local = (m == i) ? 1 : 2;
            int their_local = (m == il) ? 1 : 2;
            int my_other = 3 - my_local;     // local 1 <-> 2
            int their_other = 3 - their_local;
            FaceGluing g;
            g.tet = l;  // created-index, shifted by splice
            g.perm[0] = 0;
            g.perm[3] = 3;
            g.perm[my_local] = static_cast<std::uint8_t>(their_local);
            g.perm[my_other] = static_cast<std::uint8_t>(their_other);
            nt.glue[my_other] = g;
        }
    }

    MoveResult res;
    res.tri = splice(tri, {ta, tb}, created, lift);
    int base = res.tri.size() - 3;
    res.new_tets = {base, base + 1, base + 2};
    res.new_edge_tet = base;
    res.new_edge_slot = edge_index(0, 3);
    return res;
}

MoveResult move_three_two(const Triangulation& tri, const Classes& cls, int edge_class) {
    const EdgeClass& ec = cls.edges[edge_class];
    if (ec.valence() != 3) throw WrongValence();
    if (ec.zero) throw ZeroLengthEdge();
    std::array<int, 3> ts{ec.inc[0].tet, ec.inc[1].tet, ec.inc[2].tet};
    if (ts[0] == ts[1] || ts[0] == ts[2] || ts[1] == ts[2]) throw RepeatedTetrahedra();

    // Names of the five points in each slice's labels. Slice m has the two
    // edge ends A, B and the equator points P_{m-1}, P_m (mod 3): the wall
    // inside the exit face is shared with the next slice.
    struct SliceMap {
        int a, b, p_prev, p_next;  // local labels of A, B, P_{m-1}, P_m
    };
    std::array<SliceMap, 3> sm{};
    for (int m = 0; m < 3; ++m) {
        const EdgeIncidence& inc = ec.inc[m];
        sm[m].a = inc.forward ? edge_table[inc.slot][0] : edge_table[inc.slot][1];
        sm[m].b = inc.forward ? edge_table[inc.slot][1] : edge_table[inc.slot][0];
        // exit face (a face index = a wall label) contains the other wall
        sm[m].p_next = inc.entry_face;  // wall inside the exit face
        sm[m].p_prev = inc.exit_face;   // wall inside the entry face
    }

    const TetCombinatorics& c0 = tri.tets[ts[0]].comb;
    std::vector<TetData> created(2);
    // TA = (A, P0, P1, P2), TB = (B, P0, P1, P2)
    TetData& taD = created[0];
    TetData& tbD = created[1];
    auto ideal_of = [&](int m, int local) { return tri.tets[ts[m]].comb.ideal(local); };
    auto zero_of = [&](int m, int lv, int lw) {
        return tri.tets[ts[m]].comb.zero(edge_index(lv, lw));
    };
    // apex flags from slice 0 (class-constant by validity)
    if (ideal_of(0, sm[0].a)) taD.comb.ideal_mask |= 1u << 0;
    if (ideal_of(0, sm[0].b)) tbD.comb.ideal_mask |= 1u << 0;
    // equator P_m: local 1 + m in both new tets; flags via any slice seeing it
    auto p_local = [](int m) { return 1 + ((m % 3) + 3) % 3; };
    for (int m = 0; m < 3; ++m) {
        int lp = p_local(m);
        if (ideal_of(m, sm[m].p_next)) {
            taD.comb.ideal_mask |= static_cast<std::uint8_t>(1u << lp);
            tbD.comb.ideal_mask |= static_cast<std::uint8_t>(1u << lp);
        }
        // apex-to-equator edges: A-P_m and B-P_m are edges of slice m
        if (zero_of(m, sm[m].a, sm[m].p_next))
            taD.comb.zero_mask |= static_cast<std::uint8_t>(1u << edge_index(0, lp));
        if (zero_of(m, sm[m].b, sm[m].p_next))
            tbD.comb.zero_mask |= static_cast<std::uint8_t>(1u << edge_index(0, lp));
        // equator edge P_{m-1} P_m lives in slice m
        int lprev = p_local(m - 1);
        if (zero_of(m, sm[m].p_prev, sm[m].p_next)) {
            taD.comb.zero_mask |= static_cast<std::uint8_t>(1u << edge_index(lprev, lp));
            tbD.comb.zero_mask |= static_cast<std::uint8_t>(1u << edge_index(lprev, lp));
        }
    }
    (void)c0;

    std::map<FaceRef, FaceLift> lift;
    for (int m = 0; m < 3; ++m) {
        // slice m face opposite B -> TA face opposite the absent equator
        // point P_{m+1}
        FaceLift la;
        la.tet = 0;
        la.relab[sm[m].a] = 0;
        la.relab[sm[m].p_prev] = static_cast<std::uint8_t>(p_local(m - 1));
        la.relab[sm[m].p_next] = static_cast<std::uint8_t>(p_local(m));
        la.relab[sm[m].b] = static_cast<std::uint8_t>(p_local(m + 1));
        lift[{ts[m], sm[m].b}] = la;
        FaceLift lb;
        lb.tet = 1;
        lb.relab[sm[m].b] = 0;
        lb.relab[sm[m].p_prev] = static_cast<std::uint8_t>(p_local(m - 1));
        lb.relab[sm[m].p_next] = static_cast<std::uint8_t>(p_local(m));
        lb.relab[sm[m].a] = static_cast<std::uint8_t>(p_local(m + 1));
        lift[{ts[m], sm[m].a}] = lb;
    }
    for (int m = 0; m < 3; ++m) {
        const FaceGluing& ga = tri.tets[ts[m]].glue[sm[m].b];
        const FaceGluing& gb = tri.tets[ts[m]].glue[sm[m].a];
        int face_a = p_local(m + 1);
        taD.glue[face_a] = FaceGluing{~ga.tet, compose(ga.perm, invert(lift[{ts[m], sm[m].b}].relab))};
        tbD.glue[face_a] = FaceGluing{~gb.tet, compose(gb.perm, invert(lift[{ts[m], sm[m].a}].relab))};
    }
    // central face TA.0 <-> TB.0, identity on the equator
    taD.glue[0] = FaceGluing{1, {0, 1, 2, 3}};
    tbD.glue[0] = FaceGluing{0, {0, 1, 2, 3}};

    MoveResult res;
    std::vector<int> removed(ts.begin(), ts.end());
    res.tri = splice(tri, removed, created, lift);
    res.new_tets = {res.tri.size() - 2, res.tri.size() - 1, -1};
    return res;
}

// --- canonical labelling ----------------------------------------------------

namespace {

const std::array<std::array<std::uint8_t, 4>, 24>& all_perms() {
    static const auto table = [] {
        std::array<std::array<std::uint8_t, 4>, 24> t{};
        std::array<std::uint8_t, 4> p{0, 1, 2, 3};
        int k = 0;
        do {
            t[k++] = p;
        } while (std::next_permutation(p.begin(), p.end()));
        return t;
    }();
    return table;
}

// BFS relabelling from a chosen start tet and vertex relabelling; returns
// the encoded signature string.
std::string signature_from(const Triangulation& tri, int start,
                           const std::array<std::uint8_t, 4>& start_perm,
                           Triangulation* out_relabel) {
    const int n = tri.size();
    std::vector<int> new_of_old(n, -1);
    std::vector<int> old_of_new(n, -1);
    // relab[t]: old labels -> new labels for tet t
    std::vector<std::array<std::uint8_t, 4>> relab(n);
    new_of_old[start] = 0;
    old_of_new[0] = start;
    relab[start] = start_perm;
    int next_id = 1;

    std::string sig;
    sig.reserve(static_cast<std::size_t>(n) * 32);
    auto emit = [&sig](int v) {
        sig += std::to_string(v);
        sig.push_back('.');
    };

    for (int id = 0; id < n; ++id) {
        int t = old_of_new[id];
        const auto inv = invert(relab[t]);
        for (int nf = 0; nf < 4; ++nf) {
            int of = inv[nf];  // old face behind new face nf
            const FaceGluing& g = tri.tets[t].glue[of];
            if (new_of_old[g.tet] < 0) {
                // first visit: label the neighbour so the gluing reads as
                // the identity-like minimal permutation
                new_of_old[g.tet] = next_id;
                old_of_new[next_id] = g.tet;
                std::array<std::uint8_t, 4> r{};
                // neighbour old label x sits at our old label inv(g.perm)(x)
                auto ginv = invert(g.perm);
                for (int x = 0; x < 4; ++x) r[x] = relab[t][ginv[x]];
                relab[g.tet] = r;
                ++next_id;
            }
            emit(new_of_old[g.tet]);
            // permutation in new labels on both sides
            std::array<std::uint8_t, 4> np{};
            for (int x = 0; x < 4; ++x) np[relab[t][x]] = relab[g.tet][g.perm[x]];
            int code = 0;
            for (int k = 0; k < 24; ++k)
                if (all_perms()[k] == np) code = k;
            emit(code);
        }
    }
    for (int id = 0; id < n; ++id) {
        int t = old_of_new[id];
        int imask = 0, zmask = 0;
        for (int v = 0; v < 4; ++v)
            if (tri.tets[t].comb.ideal(v)) imask |= 1 << relab[t][v];
        for (int e = 0; e < 6; ++e)
            if (tri.tets[t].comb.zero(e))
                zmask |= 1 << edge_index(relab[t][edge_table[e][0]], relab[t][edge_table[e][1]]);
        emit(imask);
        emit(zmask);
    }

    if (out_relabel) {
        Triangulation out;
        out.tets.resize(n);
        for (int id = 0; id < n; ++id) {
            int t = old_of_new[id];
            TetData td;
            for (int v = 0; v < 4; ++v)
                if (tri.tets[t].comb.ideal(v))
                    td.comb.ideal_mask |= static_cast<std::uint8_t>(1u << relab[t][v]);
            for (int e = 0; e < 6; ++e)
                if (tri.tets[t].comb.zero(e))
                    td.comb.zero_mask |= static_cast<std::uint8_t>(
                        1u << edge_index(relab[t][edge_table[e][0]], relab[t][edge_table[e][1]]));
            for (int nf = 0; nf < 4; ++nf) {
                int of = invert(relab[t])[nf];
                const FaceGluing& g = tri.tets[t].glue[of];
                FaceGluing ng;
                ng.tet = new_of_old[g.tet];
                for (int x = 0; x < 4; ++x) ng.perm[relab[t][x]] = relab[g.tet][g.perm[x]];
                td.glue[nf] = ng;
            }
            out.tets[id] = td;
        }
        *out_relabel = out;
    }
    return sig;
}

}  // namespace

std::string isomorphism_signature(const Triangulation& tri) {
    std::string best;
    for (int start = 0; start < tri.size(); ++start) {
        for (const auto& p : all_perms()) {
            std::string s = signature_from(tri, start, p, nullptr);
            if (best.empty() || s < best) best = s;
        }
    }
    return best;
}

Triangulation canonical_relabel(const Triangulation& tri) {
    std::string best;
    Triangulation best_tri;
    for (int start = 0; start < tri.size(); ++start) {
        for (const auto& p : all_perms()) {
            Triangulation cand;
            std::string s = signature_from(tri, start, p, &cand);
            if (best.empty() || s < best) {
                best = s;
                best_tri = cand;
            }
        }
    }
    return best_tri;
}

}  // namespace trunckit
