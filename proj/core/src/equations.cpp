#include "trunckit/equations.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace trunckit {

namespace {

// induced boundary cycle of face f on a positively oriented tetrahedron
constexpr int face_cycle_table[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};

// Orders the two non-corner vertices of face f so that (a, b, c) agrees
// with the induced orientation of the face.
std::array<int, 3> oriented_face_from_corner(int f, int a, int sign) {
    std::array<int, 3> cyc = {face_cycle_table[f][0], face_cycle_table[f][1],
                              face_cycle_table[f][2]};
    if (sign < 0) std::swap(cyc[1], cyc[2]);
    int p = 0;
    while (cyc[p] != a) ++p;
    return {a, cyc[(p + 1) % 3], cyc[(p + 2) % 3]};
}

}  // namespace

const char* residual_kind_name(ResidualKind k) {
    switch (k) {
        case ResidualKind::InternalLength: return "internal-length";
        case ResidualKind::BoundaryLength: return "boundary-length";
        case ResidualKind::Sigma: return "sigma";
        case ResidualKind::AngleSum: return "angle-sum";
        case ResidualKind::ZReal: return "z-real";
        case ResidualKind::ZImag: return "z-imag";
        case ResidualKind::CompletenessRe: return "completeness-re";
        case ResidualKind::CompletenessIm: return "completeness-im";
        case ResidualKind::IdealVertexSum: return "ideal-vertex-sum";
    }
    return "?";
}

TetAngles AngleVector::tet_angles(int tet) const {
    TetAngles a;
    for (int e = 0; e < 6; ++e) {
        int u = unknown_of[tet][e];
        a[e] = u < 0 ? 0.0 : x[u];
    }
    return a;
}

AngleVector AngleVector::zeros(const Triangulation& tri) {
    AngleVector av;
    av.unknown_of.assign(tri.size(), {-1, -1, -1, -1, -1, -1});
    for (int t = 0; t < tri.size(); ++t)
        for (int e = 0; e < 6; ++e) {
            if (tri.tets[t].comb.zero(e)) continue;
            av.unknown_of[t][e] = static_cast<int>(av.slot_of.size());
            av.slot_of.emplace_back(t, e);
        }
    av.x.assign(av.slot_of.size(), 0.0);
    return av;
}

AngleVector ResidualSystem::make_vector(double value) const {
    AngleVector av;
    av.slot_of = slot_of;
    av.unknown_of = unknown_of;
    av.x.assign(slot_of.size(), value);
    return av;
}

TetAngles ResidualSystem::tet_angles(int tet, const std::vector<double>& x) const {
    TetAngles a;
    for (int e = 0; e < 6; ++e) {
        int u = unknown_of[tet][e];
        a[e] = u < 0 ? 0.0 : x[u];
    }
    return a;
}

namespace {

struct SideKey {
    int tet, v, face;
    bool operator<(const SideKey& o) const {
        if (tet != o.tet) return tet < o.tet;
        if (v != o.v) return v < o.v;
        return face < o.face;
    }
};

// Builds the cusp link of one ideal vertex class: ccw rotations around the
// link vertices and a simplicial H1 basis via tree-cotree.
CuspLink build_cusp_link(const Triangulation& tri, const Classes& cls, int vclass) {
    CuspLink link;
    link.vertex_class = vclass;

    // link-edge ids: orbit of a side (tet, v, face) under the face gluing
    std::map<SideKey, int> side_id;
    struct EdgeInstances {
        std::array<std::pair<int, int>, 2> at{{{-1, -1}, {-1, -1}}};  // (vertex, spoke pos)
        int found = 0;
        std::array<int, 2> tri_of{-1, -1};  // adjacent link triangles
    };
    std::vector<EdgeInstances> edge_inst;
    std::map<std::pair<int, int>, int> tri_id;  // (tet, v) -> triangle id
    for (auto [t, v] : cls.verts[vclass].members)
        tri_id[{t, v}] = static_cast<int>(tri_id.size());

    auto canonical_side = [&](int t, int v, int f) -> int {
        const FaceGluing& g = tri.tets[t].glue[f];
        SideKey a{t, v, f};
        SideKey b{g.tet, g.perm[v], g.image_face(f)};
        SideKey key = std::min(a, b);
        auto it = side_id.find(key);
        if (it != side_id.end()) return it->second;
        int id = static_cast<int>(edge_inst.size());
        side_id[key] = id;
        edge_inst.emplace_back();
        edge_inst.back().tri_of[0] = tri_id.at({a.tet, a.v});
        edge_inst.back().tri_of[1] = tri_id.at({b.tet, b.v});
        return id;
    };

    // rotations: one per edge-class end landing on this vertex class
    std::map<std::pair<int, int>, int> rot_id;  // (edge class, end) -> local id
    for (std::size_t c = 0; c < cls.edges.size(); ++c) {
        const EdgeClass& ec = cls.edges[c];
        for (int end = 0; end < 2; ++end) {
            if (ec.end_vertex_class[end] != vclass) continue;
            LinkRotation rot;
            for (const EdgeIncidence& inc : ec.inc) {
                int i = inc.forward ? edge_table[inc.slot][0] : edge_table[inc.slot][1];
                int j = inc.forward ? edge_table[inc.slot][1] : edge_table[inc.slot][0];
                LinkCorner corner;
                corner.tet = inc.tet;
                corner.v = end == 0 ? i : j;
                corner.w = end == 0 ? j : i;
                corner.sign = cls.sign[inc.tet];
                rot.corners.push_back(corner);
                rot.spoke.push_back(0);  // placeholder
            }
            // flanking faces in walk order: (entry, exit); make the list ccw
            auto cyc = positive_cycle_at(rot.corners[0].v, rot.corners[0].sign);
            int p = 0;
            while (cyc[p] != rot.corners[0].w) ++p;
            int before_walk = ec.inc[0].entry_face;
            bool ccw = (before_walk == cyc[(p + 2) % 3]);
            const int m = static_cast<int>(rot.corners.size());
            std::vector<int> before(m), after(m);
            for (int k = 0; k < m; ++k) {
                before[k] = ec.inc[k].entry_face;
                after[k] = ec.inc[k].exit_face;
            }
            if (!ccw) {
                std::reverse(rot.corners.begin(), rot.corners.end());
                std::reverse(before.begin(), before.end());
                std::reverse(after.begin(), after.end());
                std::swap(before, after);
            }
            for (int k = 0; k < m; ++k) {
                // spoke[k] sits between corner k-1 and corner k
                const LinkCorner& ck = rot.corners[k];
                rot.spoke[k] = canonical_side(ck.tet, ck.v, before[k]);
            }
            int lid = static_cast<int>(link.rotations.size());
            rot_id[{static_cast<int>(c), end}] = lid;
            link.rotations.push_back(std::move(rot));
        }
    }

    // record the two spoke instances of every link edge
    for (std::size_t lv = 0; lv < link.rotations.size(); ++lv) {
        const LinkRotation& rot = link.rotations[lv];
        for (std::size_t k = 0; k < rot.spoke.size(); ++k) {
            EdgeInstances& ei = edge_inst[rot.spoke[k]];
            if (ei.found >= 2) throw InconsistentGluing("cusp link edge with >2 ends");
            ei.at[ei.found++] = {static_cast<int>(lv), static_cast<int>(k)};
        }
    }
    for (const auto& ei : edge_inst)
        if (ei.found != 2) throw InconsistentGluing("cusp link edge with <2 ends");

    // tree-cotree: spanning tree in the 1-skeleton, cotree in the dual,
    // leaving exactly two generator edges on a torus
    const int V = static_cast<int>(link.rotations.size());
    const int E = static_cast<int>(edge_inst.size());
    const int F = static_cast<int>(tri_id.size());
    std::vector<int> parent_edge(V, -1), parent_vertex(V, -2), depth(V, -1);
    std::vector<bool> in_tree(E, false);
    {
        std::vector<int> queue{0};
        parent_vertex[0] = -1;
        depth[0] = 0;
        std::size_t head = 0;
        while (head < queue.size()) {
            int v = queue[head++];
            for (int e = 0; e < E; ++e) {
                int a = edge_inst[e].at[0].first, b = edge_inst[e].at[1].first;
                if (a == b) continue;
                int other = a == v ? b : (b == v ? a : -1);
                if (other < 0 || depth[other] >= 0) continue;
                depth[other] = depth[v] + 1;
                parent_vertex[other] = v;
                parent_edge[other] = e;
                in_tree[e] = true;
                queue.push_back(other);
            }
        }
        for (int v = 0; v < V; ++v)
            if (depth[v] < 0) throw InconsistentGluing("cusp link is not connected");
    }
    std::vector<bool> in_cotree(E, false);
    {
        std::vector<int> comp(F, -1);
        std::vector<int> queue{0};
        comp[0] = 0;
        std::size_t head = 0;
        while (head < queue.size()) {
            int f = queue[head++];
            for (int e = 0; e < E; ++e) {
                if (in_tree[e]) continue;
                int a = edge_inst[e].tri_of[0], b = edge_inst[e].tri_of[1];
                int other = a == f ? b : (b == f ? a : -1);
                if (other < 0 || comp[other] >= 0 || in_cotree[e]) continue;
                if (a == b) continue;
                comp[other] = 0;
                in_cotree[e] = true;
                queue.push_back(other);
            }
        }
    }
    std::vector<int> spare;
    for (int e = 0; e < E; ++e)
        if (!in_tree[e] && !in_cotree[e]) spare.push_back(e);
    if (spare.size() != 2)
        throw InconsistentGluing("cusp link does not have torus homology rank 2");

    // loops: tree path closed by the spare edge
    auto tree_path = [&](int from, int to) {
        // returns directed edge list (edge, forward?) from `from` to `to`
        std::vector<std::pair<int, bool>> up, down;
        int a = from, b = to;
        while (depth[a] > depth[b]) {
            up.emplace_back(parent_edge[a], false);
            a = parent_vertex[a];
        }
        while (depth[b] > depth[a]) {
            down.emplace_back(parent_edge[b], true);
            b = parent_vertex[b];
        }
        while (a != b) {
            up.emplace_back(parent_edge[a], false);
            a = parent_vertex[a];
            down.emplace_back(parent_edge[b], true);
            b = parent_vertex[b];
        }
        std::reverse(down.begin(), down.end());
        up.insert(up.end(), down.begin(), down.end());
        return up;
    };

    for (int gidx = 0; gidx < 2; ++gidx) {
        int eps = spare[gidx];
        // traverse eps from instance 0 to instance 1, then walk the tree back
        auto [v_from, pos_from] = edge_inst[eps].at[0];
        auto [v_to, pos_to] = edge_inst[eps].at[1];
        // directed traversal list: (edge, from instance index)
        std::vector<std::array<int, 3>> steps;  // vertex_arrived, arrive_pos, edge arrived by
        steps.push_back({v_to, pos_to, eps});
        for (auto [e, fwd] : tree_path(v_to, v_from)) {
            // instance order in edge_inst is arbitrary; orient by parent data
            auto [va, pa] = edge_inst[e].at[0];
            auto [vb, pb] = edge_inst[e].at[1];
            (void)fwd;
            int cur = steps.back()[0];
            int nxt = (va == cur) ? vb : va;
            int arrive = (va == cur) ? pb : pa;
            steps.push_back({nxt, arrive, e});
        }
        // now steps returns to v_from; close with departure data
        std::vector<LoopStep> loop;
        for (std::size_t k = 0; k < steps.size(); ++k) {
            const auto& cur = steps[k];
            const auto& nxt_edge_step = steps[(k + 1) % steps.size()];
            int depart_edge = nxt_edge_step[2];
            // departure spoke: the instance of depart_edge at this vertex
            auto [va, pa] = edge_inst[depart_edge].at[0];
            auto [vb, pb] = edge_inst[depart_edge].at[1];
            int depart_pos;
            if (va == cur[0] && vb == cur[0]) {
                // self-loop: leave by the instance other than the arrival one
                // of the next step
                depart_pos = (nxt_edge_step[1] == pa) ? pb : pa;
            } else {
                depart_pos = (va == cur[0]) ? pa : pb;
            }
            LoopStep ls;
            ls.vertex = cur[0];
            ls.arrive_pos = cur[1];
            ls.depart_pos = depart_pos;
            loop.push_back(ls);
        }
        link.generators[gidx] = std::move(loop);
    }
    return link;
}

}  // namespace

ResidualSystem assemble(const Triangulation& tri, const AssembleOptions& opts) {
    ResidualSystem sys;
    sys.tri = tri;
    sys.cls = build_classes(tri);
    AngleVector av = AngleVector::zeros(tri);
    sys.slot_of = av.slot_of;
    sys.unknown_of = av.unknown_of;

    for (const auto& vc : sys.cls.verts) sys.has_toric |= vc.ideal;
    for (const auto& ec : sys.cls.edges) sys.has_annular |= ec.zero;

    bool keep1 = true, keep2 = true, keep3 = true, keep5 = true, keep_complete = true;
    if (opts.drop_redundant) {
        if (!sys.has_toric) {
            keep2 = keep3 = keep5 = keep_complete = false;
        } else if (!sys.has_annular) {
            keep1 = keep3 = false;
        }
    }
    if (!sys.has_toric) keep_complete = false;  // nothing to complete

    // ideal vertex sums
    for (int t = 0; t < tri.size(); ++t)
        for (int v = 0; v < 4; ++v)
            if (tri.tets[t].comb.ideal(v)) {
                Residual r;
                r.kind = ResidualKind::IdealVertexSum;
                r.a = t;
                r.b = v;
                sys.residuals.push_back(r);
            }

    // (4) total angle 2*pi around non-0-length edge classes
    for (std::size_t c = 0; c < sys.cls.edges.size(); ++c) {
        if (sys.cls.edges[c].zero) continue;
        Residual r;
        r.kind = ResidualKind::AngleSum;
        r.a = static_cast<int>(c);
        sys.residuals.push_back(r);
    }

    // per-face-gluing matching conditions
    for (int t = 0; t < tri.size(); ++t) {
        for (int f = 0; f < 4; ++f) {
            const FaceGluing& g = tri.tets[t].glue[f];
            int t2 = g.tet, f2 = g.image_face(f);
            if (std::tie(t2, f2) < std::tie(t, f)) continue;  // each gluing once
            const TetCombinatorics& ca = tri.tets[t].comb;
            const TetCombinatorics& cb = tri.tets[t2].comb;

            auto fv = face_vertices(f);
            // (1) internal edge lengths
            if (keep1) {
                for (int k = 0; k < 3; ++k) {
                    for (int l = k + 1; l < 3; ++l) {
                        int e1 = edge_index(fv[k], fv[l]);
                        int e2 = edge_index(g.perm[fv[k]], g.perm[fv[l]]);
                        bool fin1 = !ca.ideal(edge_table[e1][0]) && !ca.ideal(edge_table[e1][1]);
                        bool fin2 = !cb.ideal(edge_table[e2][0]) && !cb.ideal(edge_table[e2][1]);
                        if (fin1 != fin2 || ca.zero(e1) != cb.zero(e2))
                            throw TagMismatch("internal edge tags differ across a gluing");
                        if (!fin1 || ca.zero(e1)) continue;
                        Residual r;
                        r.kind = ResidualKind::InternalLength;
                        r.a = t;
                        r.b = e1;
                        r.c = t2;
                        r.d = e2;
                        sys.residuals.push_back(r);
                    }
                }
            }
            // (2) boundary edge lengths, one per face corner
            if (keep2) {
                for (int corner : fv) {
                    int b = -1, c2 = -1;
                    for (int v : fv) {
                        if (v == corner) continue;
                        (b < 0 ? b : c2) = v;
                    }
                    bool fin1 = !ca.ideal(corner) && !ca.zero(edge_index(corner, b)) &&
                                !ca.zero(edge_index(corner, c2));
                    int corner2 = g.perm[corner], b2 = g.perm[b], cc2 = g.perm[c2];
                    bool fin2 = !cb.ideal(corner2) && !cb.zero(edge_index(corner2, b2)) &&
                                !cb.zero(edge_index(corner2, cc2));
                    if (fin1 != fin2) throw TagMismatch("boundary edge tags differ across a gluing");
                    if (!fin1) continue;
                    Residual r;
                    r.kind = ResidualKind::BoundaryLength;
                    r.a = t;
                    r.b = edge_index(corner, b);
                    r.c = edge_index(corner, c2);
                    r.d = t2;
                    r.e = edge_index(corner2, b2);
                    r.f = edge_index(corner2, cc2);
                    sys.residuals.push_back(r);
                }
            }
            // (3) sigma matching for exceptional hexagon pairs
            if (keep3) {
                for (int corner : fv) {
                    if (!is_exceptional_hexagon(ca, f, corner)) continue;
                    if (!is_exceptional_hexagon(cb, f2, g.perm[corner]))
                        throw TagMismatch("exceptional hexagon glued to a regular one");
                    auto o1 = oriented_face_from_corner(f, corner, sys.cls.sign[t]);
                    auto o2 = oriented_face_from_corner(f2, g.perm[corner], sys.cls.sign[t2]);
                    Residual r;
                    r.kind = ResidualKind::Sigma;
                    r.a = t;
                    r.b = o1[0];
                    r.c = o1[1];
                    r.d = o1[2];
                    r.e = t2;
                    r.f = o2[0];
                    r.g = o2[1];
                    r.h = o2[2];
                    sys.residuals.push_back(r);
                }
            }
        }
    }

    // (5) Z = 1 at one end of every edge class with both ends ideal
    if (keep5) {
        for (std::size_t c = 0; c < sys.cls.edges.size(); ++c) {
            const EdgeClass& ec = sys.cls.edges[c];
            if (ec.zero) continue;
            if (!sys.cls.verts[ec.end_vertex_class[0]].ideal ||
                !sys.cls.verts[ec.end_vertex_class[1]].ideal)
                continue;
            int end = ec.end_vertex_class[0] <= ec.end_vertex_class[1] ? 0 : 1;
            std::vector<LinkCorner> corners;
            for (const EdgeIncidence& inc : ec.inc) {
                int i = inc.forward ? edge_table[inc.slot][0] : edge_table[inc.slot][1];
                int j = inc.forward ? edge_table[inc.slot][1] : edge_table[inc.slot][0];
                LinkCorner corner;
                corner.tet = inc.tet;
                corner.v = end == 0 ? i : j;
                corner.w = end == 0 ? j : i;
                corner.sign = sys.cls.sign[inc.tet];
                corners.push_back(corner);
            }
            Residual re;
            re.kind = ResidualKind::ZReal;
            re.a = static_cast<int>(c);
            re.corners = corners;
            sys.residuals.push_back(re);
            Residual im;
            im.kind = ResidualKind::ZImag;
            im.a = static_cast<int>(c);
            im.corners = std::move(corners);
            sys.residuals.push_back(im);
        }
    }

    // completeness of the toric cusps
    if (keep_complete) {
        for (std::size_t vc = 0; vc < sys.cls.verts.size(); ++vc) {
            if (!sys.cls.verts[vc].ideal) continue;
            int cusp_id = static_cast<int>(sys.cusps.size());
            sys.cusps.push_back(build_cusp_link(tri, sys.cls, static_cast<int>(vc)));
            for (int gidx = 0; gidx < 2; ++gidx) {
                Residual re;
                re.kind = ResidualKind::CompletenessRe;
                re.a = cusp_id;
                re.b = gidx;
                sys.residuals.push_back(re);
                Residual im;
                im.kind = ResidualKind::CompletenessIm;
                im.a = cusp_id;
                im.b = gidx;
                sys.residuals.push_back(im);
            }
        }
    }
    return sys;
}

namespace {

std::complex<double> corner_z(const ResidualSystem& sys, const LinkCorner& c,
                              const std::vector<double>& x) {
    return cusp_modulus_z(sys.tri.tets[c.tet].comb, sys.tet_angles(c.tet, x), c.v, c.w, c.sign);
}

}  // namespace

std::complex<double> loop_dilation(const ResidualSystem& sys, const CuspLink& cusp,
                                   const std::vector<LoopStep>& loop,
                                   const std::vector<double>& x) {
    // Corner-product rule: the loop is developed through the fan of corners
    // on its left at every vertex (the corners swept ccw from the departure
    // spoke to the arrival one), with one sign per vertex.
    std::complex<double> h(1.0, 0.0);
    for (const LoopStep& step : loop) {
        const LinkRotation& rot = cusp.rotations[step.vertex];
        const int d = static_cast<int>(rot.corners.size());
        std::complex<double> prod(1.0, 0.0);
        int k = step.depart_pos;
        do {
            prod *= corner_z(sys, rot.corners[k], x);
            k = (k + 1) % d;
        } while (k != step.arrive_pos);
        h *= -1.0 / prod;  // odd-vertex sign rule, one factor per vertex
    }
    return h;
}

std::complex<double> loop_dilation_developed(const ResidualSystem& sys, const CuspLink& cusp,
                                             const std::vector<LoopStep>& loop,
                                             const std::vector<double>& x) {
    // Develop the loop into C by placing the left fan of triangles around
    // every vertex: each clockwise corner crossing maps the after-spoke
    // vector onto the before-spoke one, i.e. divides by the corner modulus.
    std::complex<double> pos(0.0, 0.0);
    std::complex<double> dir(1.0, 0.0);  // vector of the edge just traversed
    const std::complex<double> dir0 = dir;
    for (const LoopStep& step : loop) {
        pos += dir;  // arrive at step.vertex
        const LinkRotation& rot = cusp.rotations[step.vertex];
        const int d = static_cast<int>(rot.corners.size());
        std::complex<double> ray = -dir;  // the arrival spoke vector
        int p = step.arrive_pos;
        do {
            p = (p - 1 + d) % d;
            ray /= corner_z(sys, rot.corners[p], x);
        } while (p != step.depart_pos);
        dir = ray;
    }
    return dir / dir0;
}

std::vector<double> evaluate(const ResidualSystem& sys, const std::vector<double>& x) {
    std::vector<double> r;
    r.reserve(sys.residuals.size());
    std::vector<TetAngles> angles(sys.tri.size());
    for (int t = 0; t < sys.tri.size(); ++t) angles[t] = sys.tet_angles(t, x);

    for (const Residual& res : sys.residuals) {
        switch (res.kind) {
            case ResidualKind::IdealVertexSum:
                r.push_back(angles[res.a].vertex_sum(res.b) - pi());
                break;
            case ResidualKind::AngleSum: {
                const EdgeClass& ec = sys.cls.edges[res.a];
                double s = 0;
                for (const EdgeIncidence& inc : ec.inc) s += angles[inc.tet][inc.slot];
                r.push_back(s - 2.0 * pi());
                break;
            }
            case ResidualKind::InternalLength:
                r.push_back(internal_edge_cosh(angles[res.a], res.b) -
                            internal_edge_cosh(angles[res.c], res.d));
                break;
            case ResidualKind::BoundaryLength:
                r.push_back(boundary_edge_cosh(angles[res.a], res.b, res.c) -
                            boundary_edge_cosh(angles[res.d], res.e, res.f));
                break;
            case ResidualKind::Sigma:
                r.push_back(sigma(sys.tri.tets[res.a].comb, angles[res.a], res.b, res.c, res.d) +
                            sigma(sys.tri.tets[res.e].comb, angles[res.e], res.f, res.g, res.h));
                break;
            case ResidualKind::ZReal:
            case ResidualKind::ZImag: {
                std::complex<double> z(1.0, 0.0);
                for (const LinkCorner& c : res.corners) z *= corner_z(sys, c, x);
                r.push_back(res.kind == ResidualKind::ZReal ? z.real() - 1.0 : z.imag());
                break;
            }
            case ResidualKind::CompletenessRe:
            case ResidualKind::CompletenessIm: {
                const CuspLink& cusp = sys.cusps[res.a];
                std::complex<double> h = loop_dilation(sys, cusp, cusp.generators[res.b], x);
                std::complex<double> lg = std::log(h);
                r.push_back(res.kind == ResidualKind::CompletenessRe ? lg.real() : lg.imag());
                break;
            }
        }
    }
    return r;
}

std::vector<double> jacobian(const ResidualSystem& sys, const std::vector<double>& x) {
    const int m = sys.equations();
    const int n = sys.unknowns();
    std::vector<double> J(static_cast<std::size_t>(m) * n, 0.0);

    // finite differences everywhere first
    std::vector<double> xp = x;
    for (int j = 0; j < n; ++j) {
        double h = 1e-6 * std::max(1.0, std::abs(x[j]));
        xp[j] = x[j] + h;
        std::vector<double> rp = evaluate(sys, xp);
        xp[j] = x[j] - h;
        std::vector<double> rm = evaluate(sys, xp);
        xp[j] = x[j];
        for (int i = 0; i < m; ++i) J[static_cast<std::size_t>(i) * n + j] = (rp[i] - rm[i]) / (2 * h);
    }
    // analytic rows for the linear classes
    for (int i = 0; i < m; ++i) {
        const Residual& res = sys.residuals[i];
        if (res.kind == ResidualKind::AngleSum) {
            for (int j = 0; j < n; ++j) J[static_cast<std::size_t>(i) * n + j] = 0.0;
            const EdgeClass& ec = sys.cls.edges[res.a];
            for (const EdgeIncidence& inc : ec.inc) {
                int u = sys.unknown_of[inc.tet][inc.slot];
                if (u >= 0) J[static_cast<std::size_t>(i) * n + u] += 1.0;
            }
        } else if (res.kind == ResidualKind::IdealVertexSum) {
            for (int j = 0; j < n; ++j) J[static_cast<std::size_t>(i) * n + j] = 0.0;
            for (int e : edges_at_vertex(res.b)) {
                int u = sys.unknown_of[res.a][e];
                if (u >= 0) J[static_cast<std::size_t>(i) * n + u] += 1.0;
            }
        }
    }
    return J;
}

bool in_valid_domain(const ResidualSystem& sys, const std::vector<double>& x, double margin) {
    for (double v : x)
        if (!(v >= margin && v <= pi() - margin)) return false;
    for (int t = 0; t < sys.tri.size(); ++t) {
        TetAngles a = sys.tet_angles(t, x);
        for (int v = 0; v < 4; ++v) {
            if (sys.tri.tets[t].comb.ideal(v)) continue;
            if (!(a.vertex_sum(v) < pi() - margin)) return false;
        }
    }
    return true;
}

}  // namespace trunckit
