#include "trunckit/canonical.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace trunckit {

namespace {

Eigen::Vector4d col(const MVec& v) { return {v.x0, v.x1, v.x2, v.x3}; }
MVec from_col(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }

std::complex<double> shadow(const MVec& x) {
    double a = x.x0 - x.x3;
    return {x.x1 / a, x.x2 / a};
}

bool at_chart_infinity(const MVec& x) {
    return std::abs(x.x0 - x.x3) <= 1e-7 * sup_norm(x);
}

double circumradius2d(std::complex<double> a, std::complex<double> b, std::complex<double> c) {
    double la = std::abs(b - c), lb = std::abs(c - a), lc = std::abs(a - b);
    double s = 0.5 * (la + lb + lc);
    double area2 = s * (s - la) * (s - lb) * (s - lc);
    if (area2 <= 0) throw DegenerateLift("circumradius2d: collinear shadow");
    return la * lb * lc / (4.0 * std::sqrt(area2));
}

}  // namespace

LorentzMat face_transfer(const std::array<MVec, 4>& src, const TetCombinatorics& src_comb,
                         const std::array<MVec, 4>& dst_base, int f, const FaceGluing& g) {
    auto fv = face_vertices(f);
    int f2 = g.image_face(f);

    // scale factors on the far side so that Lorentz products agree
    std::array<double, 3> lam{1.0, 1.0, 1.0};
    std::array<bool, 3> ideal{};
    for (int k = 0; k < 3; ++k) ideal[k] = src_comb.ideal(fv[k]);
    auto pair_src = [&](int k, int l) { return lorentz_dot(src[fv[k]], src[fv[l]]); };
    auto pair_dst = [&](int k, int l) {
        return lorentz_dot(dst_base[g.perm[fv[k]]], dst_base[g.perm[fv[l]]]);
    };
    int n_ideal = ideal[0] + ideal[1] + ideal[2];
    if (n_ideal == 3) {
        // lam_k * lam_l = rho_kl with rho = <src>/<dst>
        double r01 = pair_src(0, 1) / pair_dst(0, 1);
        double r02 = pair_src(0, 2) / pair_dst(0, 2);
        double r12 = pair_src(1, 2) / pair_dst(1, 2);
        lam[0] = std::sqrt(r01 * r02 / r12);
        lam[1] = r01 / lam[0];
        lam[2] = r02 / lam[0];
    } else {
        for (int k = 0; k < 3; ++k) {
            if (!ideal[k]) continue;
            int w = -1;
            for (int l = 0; l < 3; ++l)
                if (!ideal[l]) w = l;
            lam[k] = pair_src(k, w) / pair_dst(k, w);
        }
    }

    // far face outward normal maps to the near inward one
    MVec m_src = face_outward_normal(src[fv[0]], src[fv[1]], src[fv[2]], src[f]);
    auto fv2 = face_vertices(f2);
    MVec m_dst = face_outward_normal(dst_base[fv2[0]], dst_base[fv2[1]], dst_base[fv2[2]],
                                     dst_base[f2]);

    Eigen::Matrix4d S, T;
    for (int k = 0; k < 3; ++k) {
        S.col(k) = col(dst_base[g.perm[fv[k]]]);
        T.col(k) = col(src[fv[k]] * lam[k]);
    }
    S.col(3) = col(m_dst);
    T.col(3) = col(-m_src);
    Eigen::Matrix4d Phi = T * S.inverse();
    LorentzMat out;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out.at(r, c) = Phi(r, c);
    return out;
}

namespace {

std::array<MVec, 4> apply_all(const LorentzMat& m, const std::array<MVec, 4>& lifts) {
    return {m.apply(lifts[0]), m.apply(lifts[1]), m.apply(lifts[2]), m.apply(lifts[3])};
}

// Hemisphere (or vertical plane) radius of a plane dual in the chart.
std::optional<double> trace_radius(const MVec& w) {
    MVec u = w;
    double q = lorentz_dot(u, u);
    if (q <= 0) return std::nullopt;
    u = u * (1.0 / std::sqrt(q));
    double a = std::abs(u.x0 - u.x3);
    if (a < eps_geom) return std::nullopt;  // vertical plane
    return 1.0 / a;
}

struct CopyGeometry {
    double height_reach = 0.0;           // upper bound on the copy's height
    std::complex<double> centre{0, 0};   // conservative shadow disc
    double radius = 0.0;
};

// The copy lies under its face hemispheres, so its shadow sits inside the
// union of the face discs and its height below the largest sphere radius.
CopyGeometry copy_geometry(const Realized& rc) {
    CopyGeometry g;
    std::vector<std::pair<std::complex<double>, double>> discs;
    for (int f = 0; f < 4; ++f) {
        auto fv = face_vertices(f);
        try {
            MVec m = face_outward_normal(rc.lift[fv[0]], rc.lift[fv[1]], rc.lift[fv[2]],
                                         rc.lift[f]);
            auto r = trace_radius(m);
            if (r) {
                g.height_reach = std::max(g.height_reach, *r);
                discs.emplace_back(shadow(m), *r);
            }
        } catch (const DegenerateLift&) {
        }
    }
    for (int v = 0; v < 4; ++v) {
        double q = lorentz_dot(rc.lift[v], rc.lift[v]);
        if (q > eps_geom) {
            auto r = trace_radius(rc.lift[v]);
            if (r) g.height_reach = std::max(g.height_reach, *r);
        }
        if (!at_chart_infinity(rc.lift[v])) discs.emplace_back(shadow(rc.lift[v]), 0.0);
    }
    if (discs.empty()) return g;
    std::complex<double> c{0, 0};
    for (const auto& [z, r] : discs) c += z;
    c /= static_cast<double>(discs.size());
    double rad = 0;
    for (const auto& [z, r] : discs) rad = std::max(rad, std::abs(z - c) + r);
    g.centre = c;
    g.radius = rad;
    return g;
}

// Deduplication key for universal-cover copies. Lift entries grow like the
// exponential of the development depth, so quantize relative to the copy's
// own scale.
std::string position_key(const Realized& rc) {
    double scale = 0.0;
    for (int v = 0; v < 4; ++v) scale = std::max(scale, sup_norm(rc.lift[v]));
    std::ostringstream os;
    os << rc.tet << ':' << llround(std::log(scale) * 1e7);
    for (int v = 0; v < 4; ++v)
        for (int i = 0; i < 4; ++i) os << ':' << llround(rc.lift[v][i] / scale * 1e7);
    return os.str();
}

}  // namespace

double height_constant_k(double r1, double r2, double d) {
    return std::sqrt(3.0) * (r1 * r1 + d * d / 4.0) / (r1 - r2);
}

CuspDevelopment develop_cusp(const Triangulation& tri, const Classes& cls,
                             const std::vector<TetAngles>& angles, int cusp_class,
                             const DevelopConfig& cfg) {
    const VertexClass& vc = cls.verts[cusp_class];
    if (!vc.ideal) throw NotApplicable("develop_cusp: not a toric cusp");
    bool has_boundary = false;
    for (const TetData& td : tri.tets) has_boundary |= td.comb.ideal_mask != 0x0f;
    if (!has_boundary)
        throw NotApplicable("develop_cusp: empty geodesic boundary, heights are not defined");

    std::vector<std::array<MVec, 4>> base(tri.size());
    for (int t = 0; t < tri.size(); ++t) base[t] = gram_lift(angles[t]).vertex;

    CuspDevelopment dev;
    dev.vertex_class = cusp_class;

    // Step 1.A: one copy per (tet, vertex) member, glued along vertical faces
    std::map<std::pair<int, int>, int> placed;  // (tet, v) -> family index
    auto [t0, v0] = vc.members[cfg.seed_member % vc.members.size()];
    {
        LorentzMat to_inf = map_lightlike_to_infinity(base[t0][v0]);
        Realized rc;
        rc.tet = t0;
        rc.lift = apply_all(to_inf, base[t0]);
        rc.inf_vertex = v0;
        dev.family.push_back(rc);
        placed[{t0, v0}] = 0;
    }
    for (std::size_t head = 0; head < dev.family.size(); ++head) {
        if (dev.family.size() > static_cast<std::size_t>(vc.members.size())) break;
        Realized rc = dev.family[head];  // copy, family may reallocate
        for (int f = 0; f < 4; ++f) {
            if (f == rc.inf_vertex) continue;  // the face opposite infinity is not vertical
            const FaceGluing& g = tri.tets[rc.tet].glue[f];
            int t2 = g.tet, v2 = g.perm[rc.inf_vertex];
            if (placed.count({t2, v2})) continue;
            LorentzMat phi = face_transfer(rc.lift, tri.tets[rc.tet].comb, base[t2], f, g);
            Realized nc;
            nc.tet = t2;
            nc.lift = apply_all(phi, base[t2]);
            nc.inf_vertex = v2;
            placed[{t2, v2}] = static_cast<int>(dev.family.size());
            dev.family.push_back(nc);
        }
    }
    if (placed.size() != vc.members.size())
        throw DevelopmentOverflow("develop_cusp: step 1.A did not reach every member");

    // constants of step 1.A
    std::vector<std::complex<double>> omega_pts;
    bool have_trunc = false;
    for (const Realized& rc : dev.family) {
        auto fv = face_vertices(rc.inf_vertex);
        MVec m = face_outward_normal(rc.lift[fv[0]], rc.lift[fv[1]], rc.lift[fv[2]],
                                     rc.lift[rc.inf_vertex]);
        if (auto r = trace_radius(m)) dev.rho = std::max(dev.rho, *r);
        for (int v = 0; v < 4; ++v) {
            if (v == rc.inf_vertex) continue;
            if (!tri.tets[rc.tet].comb.ideal(v)) {
                if (auto r = trace_radius(rc.lift[v])) {
                    dev.r_trunc = std::max(dev.r_trunc, *r);
                    have_trunc = true;
                }
            }
            omega_pts.push_back(shadow(rc.lift[v]));
        }
        // cross-section shadow triangle of this (tet, inf vertex)
        std::array<std::complex<double>, 3> tri_pts;
        int k = 0;
        for (int v = 0; v < 4; ++v)
            if (v != rc.inf_vertex) tri_pts[k++] = shadow(rc.lift[v]);
        dev.shadow_circumradius.push_back(
            {{rc.tet, rc.inf_vertex}, circumradius2d(tri_pts[0], tri_pts[1], tri_pts[2])});
    }
    (void)have_trunc;
    for (std::size_t i = 0; i < omega_pts.size(); ++i)
        for (std::size_t j = i + 1; j < omega_pts.size(); ++j)
            dev.diameter = std::max(dev.diameter, std::abs(omega_pts[i] - omega_pts[j]));

    // conservative disc around Omega
    std::complex<double> omega_centre{0, 0};
    for (auto p : omega_pts) omega_centre += p;
    omega_centre /= static_cast<double>(omega_pts.size());
    double omega_radius = 0;
    for (auto p : omega_pts) omega_radius = std::max(omega_radius, std::abs(p - omega_centre));

    // Steps 1.B / 1.C: glue along free non-vertical faces, layer by layer
    std::set<std::string> keys;
    for (const Realized& rc : dev.family) keys.insert(position_key(rc));
    // vertical faces of the 1.A copies stay free; mark them glued so the
    // frontier only carries non-vertical faces
    for (Realized& rc : dev.family)
        for (int f = 0; f < 4; ++f)
            if (rc.inf_vertex >= 0 && f != rc.inf_vertex) rc.glued[f] = true;

    auto radii_snapshot = [&]() {
        std::vector<double> rs;
        for (const Realized& rc : dev.family)
            for (int v = 0; v < 4; ++v) {
                if (tri.tets[rc.tet].comb.ideal(v)) continue;
                if (rc.inf_vertex == v) continue;
                if (auto r = trace_radius(rc.lift[v])) rs.push_back(*r);
            }
        std::sort(rs.begin(), rs.end(), std::greater<>());
        return rs;
    };
    auto top_two_distinct = [&](const std::vector<double>& rs) -> std::optional<std::pair<double, double>> {
        if (rs.empty()) return std::nullopt;
        for (double r : rs)
            if (r < rs.front() * (1.0 - 1e-9)) return std::make_pair(rs.front(), r);
        return std::nullopt;
    };

    bool region_known = false;
    double region_floor = 0.0;
    while (true) {
        auto snap = top_two_distinct(radii_snapshot());
        if (!region_known && snap) {
            region_known = true;
            region_floor = snap->second;  // r'_2 of step 1.B
        }
        // collect the free non-vertical frontier
        std::vector<std::pair<int, int>> frontier;
        for (std::size_t i = 0; i < dev.family.size(); ++i)
            for (int f = 0; f < 4; ++f) {
                if (dev.family[i].glued[f]) continue;
                auto fv = face_vertices(f);
                try {
                    MVec m = face_outward_normal(dev.family[i].lift[fv[0]],
                                                 dev.family[i].lift[fv[1]],
                                                 dev.family[i].lift[fv[2]], dev.family[i].lift[f]);
                    if (!trace_radius(m)) {
                        dev.family[i].glued[f] = true;  // vertical, never glued
                        continue;
                    }
                } catch (const DegenerateLift&) {
                    dev.family[i].glued[f] = true;
                    continue;
                }
                frontier.emplace_back(static_cast<int>(i), f);
            }
        if (frontier.empty()) break;
        bool grew = false;
        for (auto [i, f] : frontier) {
            if (dev.family[i].glued[f]) continue;
            dev.family[i].glued[f] = true;
            const Realized& rc = dev.family[i];
            const FaceGluing& g = tri.tets[rc.tet].glue[f];
            LorentzMat phi = face_transfer(rc.lift, tri.tets[rc.tet].comb, base[g.tet], f, g);
            Realized nc;
            nc.tet = g.tet;
            nc.lift = apply_all(phi, base[g.tet]);
            nc.inf_vertex = -1;
            for (int v = 0; v < 4; ++v)
                if (at_chart_infinity(nc.lift[v])) nc.inf_vertex = v;
            std::string key = position_key(nc);
            if (keys.count(key)) continue;  // already realized at this spot
            if (region_known) {
                CopyGeometry cg = copy_geometry(nc);
                bool outside = cg.height_reach < region_floor * (1.0 - 1e-9) ||
                               std::abs(cg.centre - omega_centre) > cg.radius + omega_radius;
                if (outside) continue;
            }
            nc.glued[g.image_face(f)] = true;
            keys.insert(key);
            dev.family.push_back(nc);
            grew = true;
            if (static_cast<int>(dev.family.size()) > cfg.copy_cap) {
                auto rs = radii_snapshot();
                std::ostringstream os;
                os << "develop_cusp: copy cap exceeded (family " << dev.family.size()
                   << ", region_known " << region_known << ", floor " << region_floor
                   << ", radii seen " << rs.size();
                if (!rs.empty()) os << ", top " << rs.front() << ", bottom " << rs.back();
                os << ")";
                throw DevelopmentOverflow(os.str());
            }
        }
        if (!grew && region_known) break;
        if (!grew && !region_known)
            throw DevelopmentOverflow("develop_cusp: step 1.B exhausted without distinct radii");
    }

    auto final_snap = top_two_distinct(radii_snapshot());
    if (!final_snap)
        throw DevelopmentOverflow("develop_cusp: no two distinct truncation radii found");
    dev.r1 = final_snap->first;
    dev.r2 = final_snap->second;
    return dev;
}

HoroRadii CrossSection::tet_radii(int tet) const {
    HoroRadii r;
    r.r = radii[tet];
    return r;
}

CrossSection CrossSection::scaled(double height_factor) const {
    CrossSection out = *this;
    for (double& h : out.heights) h *= height_factor;
    for (auto& per_tet : out.radii)
        for (auto& r : per_tet)
            if (r) *r /= height_factor;
    return out;
}

CrossSection cross_section(const Triangulation& tri, const Classes& cls,
                           const std::vector<TetAngles>& angles, const DevelopConfig& cfg) {
    CrossSection cs;
    cs.radii.assign(tri.size(), {});
    for (std::size_t vc = 0; vc < cls.verts.size(); ++vc)
        if (cls.verts[vc].ideal) cs.cusp_classes.push_back(static_cast<int>(vc));
    if (cs.cusp_classes.empty()) return cs;

    for (int vc : cs.cusp_classes)
        cs.developments.push_back(develop_cusp(tri, cls, angles, vc, cfg));

    cs.lambda = 0.0;
    for (const CuspDevelopment& dev : cs.developments) {
        double k = height_constant_k(dev.r1, dev.r2, dev.diameter);
        cs.lambda = std::max(cs.lambda, k / dev.r1);
    }
    for (const CuspDevelopment& dev : cs.developments) {
        double k = height_constant_k(dev.r1, dev.r2, dev.diameter);
        double h = cs.lambda * k;
        cs.heights.push_back(h);
        for (const auto& [tv, shadow_r] : dev.shadow_circumradius) {
            auto [t, v] = tv;
            double r = shadow_r / h;
            if (cs.radii[t][v] && std::abs(*cs.radii[t][v] - r) > 1e-6 * r)
                throw DegenerateLift("cross_section: inconsistent induced radii");
            cs.radii[t][v] = r;
        }
    }
    return cs;
}

const char* face_convexity_name(FaceConvexity c) {
    switch (c) {
        case FaceConvexity::Convex: return "convex";
        case FaceConvexity::Flat: return "flat";
        case FaceConvexity::Concave: return "concave";
    }
    return "?";
}

const char* canonize_status_name(CanonizeStatus s) {
    switch (s) {
        case CanonizeStatus::Canonical: return "canonical";
        case CanonizeStatus::Subdivision: return "subdivision";
        case CanonizeStatus::Stuck: return "stuck";
    }
    return "?";
}

std::vector<FaceTilt> face_tilt_table(const Triangulation& tri,
                                      const std::vector<TetAngles>& angles,
                                      const std::vector<HoroRadii>& radii, double tilt_eps) {
    std::vector<std::array<double, 4>> tilt(tri.size());
    double scale = 0.0;
    for (int t = 0; t < tri.size(); ++t) {
        tilt[t] = tilts(tri.tets[t].comb, angles[t], radii[t]);
        for (double v : tilt[t]) scale = std::max(scale, std::abs(v));
    }
    if (scale <= 0) scale = 1.0;

    std::vector<FaceTilt> out;
    for (int t = 0; t < tri.size(); ++t) {
        for (int f = 0; f < 4; ++f) {
            const FaceGluing& g = tri.tets[t].glue[f];
            int t2 = g.tet, f2 = g.image_face(f);
            if (std::tie(t2, f2) < std::tie(t, f)) continue;
            FaceTilt ft;
            ft.tet = t;
            ft.face = f;
            ft.other_tet = t2;
            ft.other_face = f2;
            ft.t1 = tilt[t][f];
            ft.t2 = tilt[t2][f2];
            ft.self_adjacent = (t == t2);
            ft.normalized_sum = (ft.t1 + ft.t2) / scale;
            if (ft.normalized_sum > tilt_eps)
                ft.kind = FaceConvexity::Concave;
            else if (ft.normalized_sum < -tilt_eps)
                ft.kind = FaceConvexity::Convex;
            else
                ft.kind = FaceConvexity::Flat;
            out.push_back(ft);
        }
    }
    return out;
}

namespace {

std::array<double, 3> barycentric_in_face(const std::array<MVec, 4>& lift_near,
                                          const MVec& far_apex, int f) {
    // affine chart x0 = 1
    auto fv = face_vertices(f);
    for (int v : fv)
        if (lift_near[v].x0 <= eps_geom) throw DegenerateLift("barycentric: chart overflow");
    if (lift_near[f].x0 <= eps_geom || far_apex.x0 <= eps_geom)
        throw DegenerateLift("barycentric: chart overflow");
    Eigen::Vector3d p0, p4;
    std::array<Eigen::Vector3d, 3> q;
    auto chart = [](const MVec& x) {
        return Eigen::Vector3d(x.x1 / x.x0, x.x2 / x.x0, x.x3 / x.x0);
    };
    p0 = chart(lift_near[f]);
    p4 = chart(far_apex);
    for (int k = 0; k < 3; ++k) q[k] = chart(lift_near[fv[k]]);

    // solve p0 + s (p4 - p0) = sum_k b_k q[k], sum b = 1
    Eigen::Matrix4d A;
    Eigen::Vector4d rhs;
    for (int r = 0; r < 3; ++r) {
        for (int k = 0; k < 3; ++k) A(r, k) = q[k][r];
        A(r, 3) = -(p4[r] - p0[r]);
        rhs[r] = p0[r];
    }
    A(3, 0) = A(3, 1) = A(3, 2) = 1.0;
    A(3, 3) = 0.0;
    rhs[3] = 1.0;
    Eigen::FullPivLU<Eigen::Matrix4d> lu(A);
    if (!lu.isInvertible()) throw DegenerateLift("barycentric: degenerate configuration");
    Eigen::Vector4d sol = lu.solve(rhs);
    double s = sol[3];
    if (!(s > eps_geom && s < 1.0 - eps_geom))
        return {-1.0, -1.0, -1.0};  // crossing outside the open segment
    return {sol[0], sol[1], sol[2]};
}

struct JointLift {
    std::array<MVec, 4> near;  // lifts of tet t
    std::array<MVec, 4> far;   // lifts of the partner, in the same frame
};

JointLift joint_lift(const Triangulation& tri, const std::vector<TetAngles>& angles,
                     const std::vector<HoroRadii>& radii, int t, int f) {
    const FaceGluing& g = tri.tets[t].glue[f];
    JointLift jl;
    jl.near = lift_with_radii(tri.tets[t].comb, angles[t], radii[t]);
    std::array<MVec, 4> far_base = lift_with_radii(tri.tets[g.tet].comb, angles[g.tet],
                                                   radii[g.tet]);
    LorentzMat phi = face_transfer(jl.near, tri.tets[t].comb, far_base, f, g);
    jl.far = apply_all(phi, far_base);
    return jl;
}

}  // namespace

bool admissible(const Triangulation& tri, const std::vector<TetAngles>& angles,
                const std::vector<HoroRadii>& radii, int t, int f) {
    const FaceGluing& g = tri.tets[t].glue[f];
    if (g.tet == t && g.image_face(f) == f) throw SelfAdjacentFace();
    if (g.tet == t) throw SelfAdjacentFace("admissible: face joins a tetrahedron to itself");
    JointLift jl = joint_lift(tri, angles, radii, t, f);
    try {
        auto bc = barycentric_in_face(jl.near, jl.far[g.image_face(f)], f);
        return bc[0] > eps_geom && bc[1] > eps_geom && bc[2] > eps_geom;
    } catch (const DegenerateLift&) {
        return false;
    }
}

std::vector<TetAngles> per_tet_angles(const ResidualSystem& sys, const std::vector<double>& x) {
    std::vector<TetAngles> out(sys.tri.size());
    for (int t = 0; t < sys.tri.size(); ++t) out[t] = sys.tet_angles(t, x);
    return out;
}

namespace {

// Shape data carried through the flip loop.
struct FlipState {
    Triangulation tri;
    std::vector<TetAngles> angles;
    std::vector<HoroRadii> radii;
};

TetAngles snap_angles(const TetCombinatorics& comb, const TetAngles& raw, int* failures) {
    TetAngles out = raw;
    for (int e = 0; e < 6; ++e) {
        if (comb.zero(e)) {
            if (std::abs(raw[e]) > 1e-6) ++*failures;
            out[e] = 0.0;
        }
    }
    for (int v = 0; v < 4; ++v) {
        double s = out.vertex_sum(v);
        if (comb.ideal(v) && std::abs(s - pi()) > 1e-6) ++*failures;
        if (!comb.ideal(v) && s >= pi()) ++*failures;
    }
    return out;
}

HoroRadii radii_from_lift(const TetCombinatorics& comb, const std::array<MVec, 4>& lift) {
    HoroRadii r;
    for (int v = 0; v < 4; ++v)
        if (comb.ideal(v)) r.r[v] = cross_section_circumradius(lift, v);
    return r;
}

}  // namespace

GeometricMove geometric_two_three(const Triangulation& tri, const std::vector<TetAngles>& angles,
                                  const std::vector<HoroRadii>& radii, int tet, int face) {
    const FaceGluing& g = tri.tets[tet].glue[face];
    JointLift jl = joint_lift(tri, angles, radii, tet, face);
    auto p = face_vertices(face);
    MVec apexA = jl.near[face];
    MVec apexB = jl.far[g.image_face(face)];
    int tb = g.tet;
    MoveResult mv = move_two_three(tri, tet, face);

    GeometricMove out;
    out.new_tets = mv.new_tets;
    out.angles.resize(mv.tri.size());
    out.radii.resize(mv.tri.size());
    int idx = 0;
    for (int t = 0; t < tri.size(); ++t) {
        if (t == tet || t == tb) continue;
        out.angles[idx] = angles[t];
        out.radii[idx] = radii[t];
        ++idx;
    }
    for (int k = 0; k < 3; ++k) {
        int i = (k == 0) ? 1 : 0;
        int j = (k == 2) ? 1 : 2;
        std::array<MVec, 4> lift{apexA, jl.near[p[i]], jl.near[p[j]], apexB};
        int nt = mv.new_tets[k];
        out.angles[nt] = snap_angles(mv.tri.tets[nt].comb, angles_from_lift(lift),
                                     &out.shape_defects);
        out.radii[nt] = radii_from_lift(mv.tri.tets[nt].comb, lift);
    }
    out.tri = std::move(mv.tri);
    return out;
}

GeometricMove geometric_three_two(const Triangulation& tri, const Classes& cls,
                                  const std::vector<TetAngles>& angles,
                                  const std::vector<HoroRadii>& radii, int edge_class) {
    const EdgeClass& ec = cls.edges[edge_class];
    std::array<int, 3> ts{ec.inc[0].tet, ec.inc[1].tet, ec.inc[2].tet};

    // realize the three slices around the edge in one frame
    std::array<std::array<MVec, 4>, 3> lifts;
    lifts[0] = lift_with_radii(tri.tets[ts[0]].comb, angles[ts[0]], radii[ts[0]]);
    for (int m = 0; m < 2; ++m) {
        const EdgeIncidence& inc = ec.inc[m];
        const FaceGluing& gg = tri.tets[inc.tet].glue[inc.exit_face];
        std::array<MVec, 4> nb = lift_with_radii(tri.tets[gg.tet].comb, angles[gg.tet],
                                                 radii[gg.tet]);
        LorentzMat phi = face_transfer(lifts[m], tri.tets[inc.tet].comb, nb, inc.exit_face, gg);
        lifts[m + 1] = apply_all(phi, nb);
    }
    const EdgeIncidence& i0 = ec.inc[0];
    int a0 = i0.forward ? edge_table[i0.slot][0] : edge_table[i0.slot][1];
    int b0 = i0.forward ? edge_table[i0.slot][1] : edge_table[i0.slot][0];
    MVec A = lifts[0][a0], B = lifts[0][b0];
    std::array<MVec, 3> P;
    for (int m = 0; m < 3; ++m) P[m] = lifts[m][ec.inc[m].entry_face];

    MoveResult mv = move_three_two(tri, cls, edge_class);
    GeometricMove out;
    out.new_tets = mv.new_tets;
    out.angles.resize(mv.tri.size());
    out.radii.resize(mv.tri.size());
    int idx = 0;
    for (int t = 0; t < tri.size(); ++t) {
        if (t == ts[0] || t == ts[1] || t == ts[2]) continue;
        out.angles[idx] = angles[t];
        out.radii[idx] = radii[t];
        ++idx;
    }
    std::array<MVec, 4> liftA{A, P[0], P[1], P[2]};
    std::array<MVec, 4> liftB{B, P[0], P[1], P[2]};
    int tA = mv.new_tets[0], tB = mv.new_tets[1];
    out.angles[tA] = snap_angles(mv.tri.tets[tA].comb, angles_from_lift(liftA),
                                 &out.shape_defects);
    out.angles[tB] = snap_angles(mv.tri.tets[tB].comb, angles_from_lift(liftB),
                                 &out.shape_defects);
    out.radii[tA] = radii_from_lift(mv.tri.tets[tA].comb, liftA);
    out.radii[tB] = radii_from_lift(mv.tri.tets[tB].comb, liftB);
    out.tri = std::move(mv.tri);
    return out;
}

CanonicalCells canonize(const Triangulation& tri0, const std::vector<TetAngles>& angles0,
                        const CanonizeConfig& cfg) {
    FlipState st{tri0, angles0, {}};
    Classes cls = build_classes(st.tri);

    // heights are fixed once, before the loop, from the initial triangulation
    bool all_ideal = true;
    for (const TetData& td : st.tri.tets) all_ideal &= td.comb.ideal_mask == 0x0f;
    bool has_cusp = false;
    for (const auto& vc : cls.verts) has_cusp |= vc.ideal;

    st.radii.assign(st.tri.size(), {});
    if (has_cusp) {
        if (all_ideal) {
            // empty boundary: cusp-height selection is not applicable; accept
            // user-supplied equal radii and run the same tilt machinery
            for (int t = 0; t < st.tri.size(); ++t)
                for (int v = 0; v < 4; ++v)
                    if (st.tri.tets[t].comb.ideal(v)) st.radii[t].r[v] = cfg.ideal_radius;
        } else {
            CrossSection cs = cross_section(st.tri, cls, st.angles, cfg.develop);
            for (int t = 0; t < st.tri.size(); ++t) st.radii[t] = cs.tet_radii(t);
        }
    }

    CanonicalCells out;
    long cap = cfg.max_moves >= 0
                   ? cfg.max_moves
                   : 10L * st.tri.size() * st.tri.size() * st.tri.size();

    while (true) {
        std::vector<FaceTilt> table = face_tilt_table(st.tri, st.angles, st.radii, cfg.tilt_eps);
        for (const FaceTilt& ft : table)
            if (ft.self_adjacent && ft.kind != FaceConvexity::Convex) ++out.assertion_failures;

        std::vector<FaceTilt> concave;
        for (const FaceTilt& ft : table)
            if (!ft.self_adjacent && ft.kind == FaceConvexity::Concave) concave.push_back(ft);
        std::sort(concave.begin(), concave.end(), [](const FaceTilt& a, const FaceTilt& b) {
            if (a.normalized_sum != b.normalized_sum) return a.normalized_sum > b.normalized_sum;
            return std::tie(a.tet, a.face) < std::tie(b.tet, b.face);
        });

        if (concave.empty()) {
            out.status = CanonizeStatus::Canonical;
            for (const FaceTilt& ft : table)
                if (ft.kind == FaceConvexity::Flat) {
                    out.status = CanonizeStatus::Subdivision;
                    out.transparent.emplace_back(ft.tet, ft.face);
                }
            out.faces = table;
            break;
        }
        if (out.moves >= cap) {
            out.status = CanonizeStatus::Stuck;
            out.cap_hit = true;
            out.faces = table;
            break;
        }

        bool moved = false;
        for (const FaceTilt& ft : concave) {
            if (admissible(st.tri, st.angles, st.radii, ft.tet, ft.face)) {
                // geometric 2-3: shapes of the three new tetrahedra come from
                // splitting the lifted bipyramid, not from re-solving
                GeometricMove mv = geometric_two_three(st.tri, st.angles, st.radii, ft.tet,
                                                       ft.face);
                out.assertion_failures += mv.shape_defects;
                st.tri = std::move(mv.tri);
                st.angles = std::move(mv.angles);
                st.radii = std::move(mv.radii);
                ++out.moves;
                ++out.moves_23;
                // the freshly created inner faces must be convex at creation
                auto t2 = face_tilt_table(st.tri, st.angles, st.radii, cfg.tilt_eps);
                for (const FaceTilt& nf : t2) {
                    bool fresh = false;
                    for (int k = 0; k < 3; ++k)
                        for (int l = 0; l < 3; ++l)
                            fresh |= (k != l && nf.tet == mv.new_tets[k] &&
                                      nf.other_tet == mv.new_tets[l]);
                    if (fresh && nf.kind != FaceConvexity::Convex) ++out.assertion_failures;
                }
                moved = true;
                break;
            }
            // otherwise: a 3-2 move on a valence-3 edge of this face
            Classes cur = build_classes(st.tri);
            bool did32 = false;
            for (int e : face_edges(ft.face)) {
                int c = cur.edge_class_of[ft.tet][e];
                const EdgeClass& ec = cur.edges[c];
                if (ec.zero || ec.valence() != 3) continue;
                std::array<int, 3> ts{ec.inc[0].tet, ec.inc[1].tet, ec.inc[2].tet};
                if (ts[0] == ts[1] || ts[0] == ts[2] || ts[1] == ts[2]) continue;

                GeometricMove mv = geometric_three_two(st.tri, cur, st.angles, st.radii, c);
                out.assertion_failures += mv.shape_defects;
                int tA = mv.new_tets[0], tB = mv.new_tets[1];
                st.tri = std::move(mv.tri);
                st.angles = std::move(mv.angles);
                st.radii = std::move(mv.radii);
                ++out.moves;
                ++out.moves_32;
                auto t2 = face_tilt_table(st.tri, st.angles, st.radii, cfg.tilt_eps);
                for (const FaceTilt& nf : t2) {
                    bool fresh = (nf.tet == tA && nf.other_tet == tB) ||
                                 (nf.tet == tB && nf.other_tet == tA);
                    if (fresh && nf.face == 0 && nf.other_face == 0 &&
                        nf.kind != FaceConvexity::Convex)
                        ++out.assertion_failures;
                }
                did32 = true;
                break;
            }
            if (did32) {
                moved = true;
                break;
            }
        }
        if (!moved) {
            out.status = CanonizeStatus::Stuck;
            out.faces = face_tilt_table(st.tri, st.angles, st.radii, cfg.tilt_eps);
            break;
        }
    }

    // group tetrahedra into polyhedral cells across transparent faces
    std::vector<int> parent(st.tri.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (auto [t, f] : out.transparent) {
        const FaceGluing& g = st.tri.tets[t].glue[f];
        parent[find(t)] = find(g.tet);
    }
    std::map<int, std::vector<int>> groups;
    for (int t = 0; t < st.tri.size(); ++t) groups[find(t)].push_back(t);
    for (auto& [root, members] : groups) out.cells.push_back(members);

    out.tri = st.tri;
    out.angles = st.angles;
    out.radii = st.radii;
    return out;
}

CrossSectionCheck verify_cross_section(const Triangulation& tri, const Classes& cls,
                                       const std::vector<TetAngles>& angles,
                                       const CrossSection& cs) {
    CrossSectionCheck chk;
    if (cs.cusp_classes.empty()) return chk;  // vacuous
    chk.applicable = true;

    // Realized horosphere duals and truncation-plane duals across the finite
    // developments, with horoball scales taken from the cross-section.
    std::vector<MVec> horospheres;
    std::vector<MVec> planes;
    for (std::size_t d = 0; d < cs.developments.size(); ++d) {
        const CuspDevelopment& dev = cs.developments[d];
        horospheres.push_back(horosphere_at_infinity_dual(cs.heights[d]));
        for (const Realized& rc : dev.family) {
            for (int v = 0; v < 4; ++v) {
                if (v == rc.inf_vertex) continue;
                if (!tri.tets[rc.tet].comb.ideal(v)) {
                    double q = lorentz_dot(rc.lift[v], rc.lift[v]);
                    if (q > 0) planes.push_back(rc.lift[v] * (1.0 / std::sqrt(q)));
                    continue;
                }
                auto target = cs.radii[rc.tet][v];
                if (!target) continue;
                double r_now = cross_section_circumradius(rc.lift, v);
                horospheres.push_back(rc.lift[v] * (r_now / *target));
            }
        }
    }
    if (planes.empty()) return chk;

    auto dist_to_boundary = [&](const MVec& u) {
        double best = 1e300;
        for (const MVec& w : planes) best = std::min(best, std::abs(lorentz_dot(u, w)));
        return best;  // exp of the signed distance
    };

    for (std::size_t i = 0; i < horospheres.size(); ++i) {
        for (std::size_t j = i + 1; j < horospheres.size(); ++j) {
            const MVec& u1 = horospheres[i];
            const MVec& u2 = horospheres[j];
            MVec diff = u1 * (1.0 / u1.x0) - u2 * (1.0 / u2.x0);
            if (sup_norm(diff) < 1e-7) continue;  // same centre, same horosphere
            double e12 = -0.5 * lorentz_dot(u1, u2);
            if (e12 <= 0) continue;
            ++chk.pairs_checked;
            double lhs = dist_to_boundary(u1) + dist_to_boundary(u2);
            if (!(lhs < 2.0 * e12)) {
                chk.pass = false;
                std::ostringstream os;
                os << "horosphere pair (" << i << "," << j << "): exp d(O1,bd)+exp d(O2,bd)="
                   << lhs << " !< 2 exp d(O1,O2)=" << 2.0 * e12;
                chk.violations.push_back(os.str());
            }
        }
    }
    return chk;
}

}  // namespace trunckit
