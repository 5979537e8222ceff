#include "trunckit/tetshape.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace trunckit {

namespace {

constexpr double kLengthFloor = 1e-18;  // floor under d*d' in cosh ratios

Eigen::Vector4d to_eigen(const MVec& v) { return {v.x0, v.x1, v.x2, v.x3}; }
MVec from_eigen(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }

// Formal 4x4 determinant expansion: the vector Euclidean-orthogonal to
// a, b, c. Composing with J = diag(-1,1,1,1) gives Lorentz-orthogonality.
MVec euclidean_cross(const MVec& a, const MVec& b, const MVec& c) {
    Eigen::Matrix3d m;
    MVec n;
    for (int mu = 0; mu < 4; ++mu) {
        int col = 0;
        for (int j = 0; j < 4; ++j) {
            if (j == mu) continue;
            m(0, col) = a[j];
            m(1, col) = b[j];
            m(2, col) = c[j];
            ++col;
        }
        n[mu] = ((mu % 2) ? -1.0 : 1.0) * m.determinant();
    }
    return n;
}

MVec apply_j(const MVec& v) { return {-v.x0, v.x1, v.x2, v.x3}; }

}  // namespace

int edge_index(int v, int w) {
    for (int e = 0; e < 6; ++e)
        if ((edge_table[e][0] == v && edge_table[e][1] == w) ||
            (edge_table[e][0] == w && edge_table[e][1] == v))
            return e;
    throw Error("edge_index: bad vertex pair");
}

bool edge_has_vertex(int e, int v) {
    return edge_table[e][0] == v || edge_table[e][1] == v;
}

std::array<int, 3> edges_at_vertex(int v) {
    std::array<int, 3> out{};
    int k = 0;
    for (int w = 0; w < 4; ++w)
        if (w != v) out[k++] = edge_index(v, w);
    return out;
}

std::array<int, 3> face_vertices(int f) {
    std::array<int, 3> out{};
    int k = 0;
    for (int v = 0; v < 4; ++v)
        if (v != f) out[k++] = v;
    return out;
}

std::array<int, 3> face_edges(int f) {
    auto fv = face_vertices(f);
    return {edge_index(fv[0], fv[1]), edge_index(fv[0], fv[2]), edge_index(fv[1], fv[2])};
}

std::array<int, 3> positive_cycle_at(int v, int orientation) {
    static constexpr int cycles[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
    std::array<int, 3> c = {cycles[v][0], cycles[v][1], cycles[v][2]};
    if (orientation < 0) std::swap(c[1], c[2]);
    return c;
}

bool TetCombinatorics::consistent() const {
    for (int e = 0; e < 6; ++e)
        if (zero(e) && (ideal(edge_table[e][0]) || ideal(edge_table[e][1]))) return false;
    return true;
}

double TetAngles::vertex_sum(int v) const {
    auto es = edges_at_vertex(v);
    return theta[es[0]] + theta[es[1]] + theta[es[2]];
}

HoroRadii HoroRadii::all(double v) {
    HoroRadii h;
    for (auto& x : h.r) x = v;
    return h;
}

double HoroRadii::at(int v) const {
    if (!r[v]) throw MissingRadius();
    return *r[v];
}

bool AngleValidity::valid() const {
    return zero_edges_ok && positive_ok && vertex_ok[0] && vertex_ok[1] && vertex_ok[2] &&
           vertex_ok[3];
}

AngleValidity validate_angles(const TetCombinatorics& comb, const TetAngles& angles) {
    AngleValidity rep;
    for (int e = 0; e < 6; ++e) {
        if (comb.zero(e)) {
            if (angles[e] != 0.0) rep.zero_edges_ok = false;
        } else {
            if (angles[e] == 0.0) rep.zero_edges_ok = false;
            if (!(angles[e] > 0.0 && angles[e] < pi())) rep.positive_ok = false;
        }
    }
    for (int v = 0; v < 4; ++v) {
        double s = angles.vertex_sum(v);
        rep.vertex_ok[v] = comb.ideal(v) ? std::abs(s - pi()) <= eps_geom : s < pi() - eps_geom;
    }
    return rep;
}

double d_theta(const TetAngles& angles, int v) {
    auto es = edges_at_vertex(v);
    double c1 = std::cos(angles[es[0]]), c2 = std::cos(angles[es[1]]), c3 = std::cos(angles[es[2]]);
    return 2 * c1 * c2 * c3 + c1 * c1 + c2 * c2 + c3 * c3 - 1.0;
}

double c_theta(const TetAngles& angles, int e) {
    int a = edge_table[e][0], b = edge_table[e][1];
    int c = -1, d = -1;
    for (int v = 0; v < 4; ++v) {
        if (v == a || v == b) continue;
        (c < 0 ? c : d) = v;
    }
    double cab = std::cos(angles.at(a, b));
    double cac = std::cos(angles.at(a, c)), cad = std::cos(angles.at(a, d));
    double cbc = std::cos(angles.at(b, c)), cbd = std::cos(angles.at(b, d));
    double ccd = std::cos(angles.at(c, d));
    double sab = std::sin(angles.at(a, b));
    return cab * (cad * cbc + cac * cbd) + cac * cbc + cad * cbd + ccd * sab * sab;
}

double g_theta(const TetAngles& angles) {
    double cs[6];
    for (int e = 0; e < 6; ++e) cs[e] = std::cos(angles[e]);
    double g = -1.0;
    for (int e = 0; e < 6; ++e) g += cs[e] * cs[e];
    for (int v = 0; v < 4; ++v) {
        auto es = edges_at_vertex(v);
        g += 2.0 * cs[es[0]] * cs[es[1]] * cs[es[2]];
    }
    // opposite pairs {e, e+3}: the third summand is written division-free as
    // the product of cosines over the four edges NOT in the pair
    for (int p = 0; p < 3; ++p) {
        double prod = 1.0;
        for (int e = 0; e < 6; ++e)
            if (e != p && e != p + 3) prod *= cs[e];
        g += 2.0 * prod;
        g -= cs[p] * cs[p] * cs[p + 3] * cs[p + 3];
    }
    return g;
}

namespace {
int common_vertex(int ei, int ej) {
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
            if (edge_table[ei][k] == edge_table[ej][l]) return edge_table[ei][k];
    return -1;
}
}  // namespace

double boundary_edge_cosh(const TetAngles& angles, int ei, int ej) {
    int a = common_vertex(ei, ej);
    auto es = edges_at_vertex(a);
    int ek = -1;
    for (int e : es)
        if (e != ei && e != ej) ek = e;
    double ci = std::cos(angles[ei]), cj = std::cos(angles[ej]), ck = std::cos(angles[ek]);
    double si = std::sin(angles[ei]), sj = std::sin(angles[ej]);
    double denom = si * sj;
    if (denom < kLengthFloor) denom = kLengthFloor;
    return (ci * cj + ck) / denom;
}

Length boundary_edge_length(const TetCombinatorics& comb, const TetAngles& angles, int ei,
                            int ej) {
    if (ei == ej) throw SameEdge();
    if (ej == opposite_edge(ei)) throw OppositeEdges();
    int a = common_vertex(ei, ej);
    if (comb.ideal(a)) return Length::zero();
    bool zi = comb.zero(ei), zj = comb.zero(ej);
    if (zi && zj) return Length::line();
    if (zi || zj) return Length::half_line();
    double ch = boundary_edge_cosh(angles, ei, ej);
    if (ch < 1.0 - eps_geom) throw FormulaDomain("boundary_edge_length: cosh < 1");
    return Length::finite(std::acosh(std::max(1.0, ch)));
}

double internal_edge_cosh(const TetAngles& angles, int e) {
    int a = edge_table[e][0], b = edge_table[e][1];
    double dd = d_theta(angles, a) * d_theta(angles, b);
    if (dd < kLengthFloor) dd = kLengthFloor;
    return c_theta(angles, e) / std::sqrt(dd);
}

Length internal_edge_length(const TetCombinatorics& comb, const TetAngles& angles, int e) {
    int a = edge_table[e][0], b = edge_table[e][1];
    bool ia = comb.ideal(a), ib = comb.ideal(b);
    if (ia && ib) return Length::line();
    if (ia || ib) return Length::half_line();
    if (comb.zero(e)) return Length::zero();
    double ch = internal_edge_cosh(angles, e);
    if (ch < 1.0 - eps_geom) throw FormulaDomain("internal_edge_length: cosh < 1");
    return Length::finite(std::acosh(std::max(1.0, ch)));
}

bool is_exceptional_hexagon(const TetCombinatorics& comb, int f, int a) {
    if (a == f) return false;
    auto fv = face_vertices(f);
    int b = -1, c = -1;
    for (int v : fv) {
        if (v == a) continue;
        (b < 0 ? b : c) = v;
    }
    return comb.ideal(a) && comb.zero(edge_index(b, c));
}

double sigma(const TetCombinatorics& comb, const TetAngles& angles, int a, int b, int c) {
    int d = 6 - a - b - c;
    if (!comb.ideal(a) || !comb.zero(edge_index(b, c))) throw NotExceptional();
    auto term = [&](int x, int y) {
        // x: the vertex adjacent to a along the edge, y: opposite pairing
        double num = std::sin(angles.at(a, x));
        double den = std::cos(angles.at(a, x)) + std::cos(angles.at(x, y));
        if (den < kLengthFloor) den = kLengthFloor;
        return std::log(std::max(num / den, kLengthFloor));
    };
    // log term of e_{ac} (paper's theta2 with opposite theta4 = {c,d})
    // minus the log term of e_{ab} (theta1 with opposite theta5 = {b,d})
    return term(c, d) - term(b, d);
}

std::complex<double> cusp_modulus_z(const TetCombinatorics& comb, const TetAngles& angles, int v,
                                    int b, int orientation) {
    if (!comb.ideal(v)) throw VertexNotIdeal();
    auto cyc = positive_cycle_at(v, orientation);
    int pos = 0;
    while (cyc[pos] != b) ++pos;
    int c = cyc[(pos + 1) % 3], d = cyc[(pos + 2) % 3];
    double mod = std::sin(angles.at(v, c)) / std::sin(angles.at(v, d));
    return std::polar(mod, angles.at(v, b));
}

double D_value(const TetCombinatorics& comb, const TetAngles& angles, int v,
               const HoroRadii& radii) {
    if (comb.ideal(v)) {
        double r = radii.at(v);
        double num = 0.0, den = 1.0;
        for (int w = 0; w < 4; ++w) {
            if (w == v) continue;
            int e = edge_index(v, w);
            num += std::sin(angles[e]) * std::cos(angles[opposite_edge(e)]);
            den *= std::sin(angles[e]);
        }
        return num / (2.0 * r * den);
    }
    double d = d_theta(angles, v);
    if (d <= 0) throw FormulaDomain("D_value: d^theta <= 0 at a non-ideal vertex");
    double g = g_theta(angles);
    if (g <= 0) throw FormulaDomain("D_value: g^theta <= 0");
    return std::sqrt(g / d);
}

std::array<double, 4> tilts(const TetCombinatorics& comb, const TetAngles& angles,
                            const HoroRadii& radii) {
    std::array<double, 4> invd{};
    for (int v = 0; v < 4; ++v) invd[v] = 1.0 / D_value(comb, angles, v, radii);
    std::array<double, 4> t{};
    for (int i = 0; i < 4; ++i) {
        double s = invd[i];
        for (int j = 0; j < 4; ++j) {
            if (j == i) continue;
            int k = -1, l = -1;
            for (int v = 0; v < 4; ++v) {
                if (v == i || v == j) continue;
                (k < 0 ? k : l) = v;
            }
            s -= std::cos(angles.at(k, l)) * invd[j];
        }
        t[i] = s;
    }
    return t;
}

// --- Gram reconstruction -------------------------------------------------

GramLift gram_lift(const TetAngles& angles) {
    Eigen::Matrix4d G;
    for (int i = 0; i < 4; ++i) {
        G(i, i) = 1.0;
        for (int j = i + 1; j < 4; ++j) {
            int k = -1, l = -1;
            for (int v = 0; v < 4; ++v) {
                if (v == i || v == j) continue;
                (k < 0 ? k : l) = v;
            }
            G(i, j) = G(j, i) = -std::cos(angles.at(k, l));
        }
    }
    Eigen::PartialPivLU<Eigen::Matrix4d> lu(G);
    double det = lu.determinant();
    double scale = G.norm();
    if (std::abs(det) < 1e-12 * scale * scale * scale * scale)
        throw SingularGram("gram_lift: |det G| below threshold");
    Eigen::Matrix4d Ginv = lu.inverse();

    GramLift out;
    out.det = det;
    double diag_scale = std::max(1.0, Ginv.cwiseAbs().maxCoeff());
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) out.gram_inv[i][j] = Ginv(i, j);
        double q = Ginv(i, i);
        if (q < -1e-9 * diag_scale)
            throw FormulaDomain("gram_lift: time-like vertex lift, invalid moduli");
        out.kind[i] = (q <= 1e-9 * diag_scale) ? VertexKind::Ideal : VertexKind::UltraIdeal;
    }

    // Explicit face normals W with W J W^T = G, from the eigendecomposition;
    // signature must be (-,+,+,+).
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(G);
    const auto& lam = es.eigenvalues();
    if (!(lam[0] < 0 && lam[1] > 0))
        throw SingularGram("gram_lift: Gram matrix does not have Lorentz signature");
    Eigen::Matrix4d W = es.eigenvectors();
    for (int c = 0; c < 4; ++c) W.col(c) *= std::sqrt(std::abs(lam[c]));
    Eigen::Matrix4d U = Ginv * W;

    Eigen::Vector4d q_raw = U.colwise().sum();
    Eigen::Vector4d Jq = q_raw;
    Jq[0] = -Jq[0];
    double qq = q_raw.dot(Jq);
    if (qq >= 0) throw SingularGram("gram_lift: no interior point (degenerate moduli)");
    if (q_raw[0] < 0) {
        U = -U;
        W = -W;
        q_raw = -q_raw;
    }

    // Lorentz frame with the in-point at (1,0,0,0): b0 time-like unit, then
    // Gram-Schmidt over the coordinate axes for the space-like part.
    auto ldot = [](const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
        return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
    };
    std::array<Eigen::Vector4d, 4> basis;
    basis[0] = q_raw / std::sqrt(-qq);
    int filled = 1;
    for (int axis = 0; axis < 4 && filled < 4; ++axis) {
        Eigen::Vector4d v = Eigen::Vector4d::Zero();
        v[axis] = 1.0;
        v += ldot(v, basis[0]) * basis[0];  // remove time component
        for (int k = 1; k < filled; ++k) v -= ldot(v, basis[k]) * basis[k];
        double n = ldot(v, v);
        if (n < 1e-12) continue;
        basis[filled++] = v / std::sqrt(n);
    }
    if (filled < 4) throw SingularGram("gram_lift: frame construction failed");

    auto to_frame = [&](const Eigen::Vector4d& v) {
        return MVec(-ldot(v, basis[0]), ldot(v, basis[1]), ldot(v, basis[2]), ldot(v, basis[3]));
    };

    for (int i = 0; i < 4; ++i) {
        MVec u = to_frame(U.row(i).transpose());
        if (out.kind[i] == VertexKind::UltraIdeal) {
            u = u * (1.0 / std::sqrt(Ginv(i, i)));
        } else {
            if (u.x0 <= 0) throw SingularGram("gram_lift: ideal lift is past-directed");
            // snap onto the light cone, keeping the spatial direction
            double s = std::sqrt(u.x1 * u.x1 + u.x2 * u.x2 + u.x3 * u.x3);
            u = MVec(1.0, u.x1 / s, u.x2 / s, u.x3 / s);
        }
        if (u.x0 <= 0) throw SingularGram("gram_lift: vertex lift is past-directed");
        out.vertex[i] = u;
        out.face_in[i] = to_frame(W.row(i).transpose());
    }
    return out;
}

namespace {

// Dual, within the face plane spanned by {a, b, far}, of the line through
// a and b; oriented so that <n, far> <= 0.
MVec in_face_line_dual(const MVec& a, const MVec& b, const MVec& face_normal, const MVec& far) {
    MVec n = apply_j(euclidean_cross(a, b, face_normal));
    if (lorentz_dot(n, far) > 0) n = -n;
    return n;
}

}  // namespace

MVec face_outward_normal(const MVec& a, const MVec& b, const MVec& c, const MVec& x) {
    MVec n = apply_j(euclidean_cross(a, b, c));
    double nn = lorentz_dot(n, n);
    if (nn <= 0) throw DegenerateLift("face_outward_normal: face plane is not space-like dual");
    n = n * (1.0 / std::sqrt(nn));
    if (lorentz_dot(n, x) > 0) n = -n;
    return n;
}

GramReport gram_oracle(const TetCombinatorics& comb, const TetAngles& angles) {
    GramLift lift = gram_lift(angles);
    GramReport rep;
    rep.kind = lift.kind;

    for (int e = 0; e < 6; ++e) {
        int a = edge_table[e][0], b = edge_table[e][1];
        bool ia = lift.kind[a] == VertexKind::Ideal, ib = lift.kind[b] == VertexKind::Ideal;
        if (ia && ib) {
            rep.internal[e] = Length::line();
        } else if (ia || ib) {
            rep.internal[e] = Length::half_line();
        } else {
            double ch = -lift.gram_inv[a][b] /
                        std::sqrt(lift.gram_inv[a][a] * lift.gram_inv[b][b]);
            rep.internal[e] = Length::finite(std::acosh(std::max(1.0, ch)));
            Length closed = internal_edge_length(comb, angles, e);
            if (closed.finite_kind()) {
                double want = closed.kind == LengthKind::Zero ? 1.0 : std::cosh(closed.value);
                rep.max_internal_delta = std::max(rep.max_internal_delta, std::abs(ch - want));
            }
        }
    }

    for (int f = 0; f < 4; ++f) {
        auto fv = face_vertices(f);
        // face normal from the three vertex lifts, outward from vertex f
        MVec m;
        try {
            m = face_outward_normal(lift.vertex[fv[0]], lift.vertex[fv[1]], lift.vertex[fv[2]],
                                    lift.vertex[f]);
        } catch (const DegenerateLift&) {
            continue;
        }
        for (int corner : fv) {
            int b = -1, c = -1;
            for (int v : fv) {
                if (v == corner) continue;
                (b < 0 ? b : c) = v;
            }
            MVec n1 = in_face_line_dual(lift.vertex[corner], lift.vertex[b], m, lift.vertex[c]);
            MVec n2 = in_face_line_dual(lift.vertex[corner], lift.vertex[c], m, lift.vertex[b]);
            double q1 = lorentz_dot(n1, n1), q2 = lorentz_dot(n2, n2);
            double s1 = sup_norm(n1), s2 = sup_norm(n2);
            bool tangent1 = q1 <= 1e-9 * s1 * s1, tangent2 = q2 <= 1e-9 * s2 * s2;
            Length& slot = rep.boundary[f][corner];
            if (lift.kind[corner] == VertexKind::Ideal) {
                slot = Length::zero();
            } else if (tangent1 && tangent2) {
                slot = Length::line();
            } else if (tangent1 || tangent2) {
                slot = Length::half_line();
            } else {
                double ch = -lorentz_dot(n1, n2) / std::sqrt(q1 * q2);
                slot = Length::finite(std::acosh(std::max(1.0, ch)));
                Length closed =
                    boundary_edge_length(comb, angles, edge_index(corner, b), edge_index(corner, c));
                if (closed.kind == LengthKind::Finite) {
                    rep.max_boundary_delta = std::max(
                        rep.max_boundary_delta, std::abs(ch - std::cosh(closed.value)));
                }
            }
        }
    }
    return rep;
}

double cross_section_circumradius(const std::array<MVec, 4>& lift, int v) {
    // feet of the three edges at v on the horosphere dual to lift[v]
    std::array<MVec, 3> feet;
    int k = 0;
    for (int j = 0; j < 4; ++j) {
        if (j == v) continue;
        double P = lorentz_dot(lift[v], lift[j]);
        double Q = lorentz_dot(lift[j], lift[j]);
        if (P >= -eps_geom) throw DegenerateLift("cross_section_circumradius: bad pairing");
        double bcoef = -1.0 / P;
        double acoef = 0.5 * (1.0 + Q / (P * P));
        feet[k++] = lift[v] * acoef + lift[j] * bcoef;
    }
    // intrinsic flat distances: cosh d = 1 + rho^2/2
    double rho[3];
    for (int i = 0; i < 3; ++i) {
        double ch = -lorentz_dot(feet[i], feet[(i + 1) % 3]);
        rho[i] = std::sqrt(std::max(0.0, 2.0 * (ch - 1.0)));
    }
    double s = 0.5 * (rho[0] + rho[1] + rho[2]);
    double area2 = s * (s - rho[0]) * (s - rho[1]) * (s - rho[2]);
    if (area2 <= 0) throw DegenerateLift("cross_section_circumradius: degenerate cross-section");
    return rho[0] * rho[1] * rho[2] / (4.0 * std::sqrt(area2));
}

std::array<MVec, 4> lift_with_radii(const TetCombinatorics& comb, const TetAngles& angles,
                                    const HoroRadii& radii) {
    GramLift lift = gram_lift(angles);
    std::array<MVec, 4> out = lift.vertex;
    for (int v = 0; v < 4; ++v) {
        if (!comb.ideal(v)) continue;
        double r0 = cross_section_circumradius(out, v);
        out[v] = out[v] * (r0 / radii.at(v));
    }
    return out;
}

std::array<double, 4> tilt_oracle(const TetCombinatorics& comb, const TetAngles& angles,
                                  const HoroRadii& radii) {
    auto lift = lift_with_radii(comb, angles, radii);
    Eigen::Matrix4d A;
    for (int i = 0; i < 4; ++i) {
        A(i, 0) = -lift[i].x0;
        A(i, 1) = lift[i].x1;
        A(i, 2) = lift[i].x2;
        A(i, 3) = lift[i].x3;
    }
    Eigen::FullPivLU<Eigen::Matrix4d> lu(A);
    if (!lu.isInvertible()) throw DegenerateLift("tilt_oracle: affinely dependent lifts");
    Eigen::Vector4d p = lu.solve(Eigen::Vector4d::Constant(-1.0));
    MVec pv = from_eigen(p);

    std::array<double, 4> t{};
    for (int f = 0; f < 4; ++f) {
        auto fv = face_vertices(f);
        MVec m = face_outward_normal(lift[fv[0]], lift[fv[1]], lift[fv[2]], lift[f]);
        t[f] = lorentz_dot(m, pv);
    }
    return t;
}

TetAngles angles_from_lift(const std::array<MVec, 4>& lift) {
    std::array<MVec, 4> normals;
    for (int f = 0; f < 4; ++f) {
        auto fv = face_vertices(f);
        normals[f] = face_outward_normal(lift[fv[0]], lift[fv[1]], lift[fv[2]], lift[f]);
    }
    TetAngles th;
    for (int e = 0; e < 6; ++e) {
        int a = edge_table[e][0], b = edge_table[e][1];
        // the two faces meeting along e are the ones opposite the other two
        // vertices
        int k = -1, l = -1;
        for (int v = 0; v < 4; ++v) {
            if (v == a || v == b) continue;
            (k < 0 ? k : l) = v;
        }
        double c = -lorentz_dot(normals[k], normals[l]);
        th[e] = std::acos(std::clamp(c, -1.0, 1.0));
    }
    return th;
}

}  // namespace trunckit
