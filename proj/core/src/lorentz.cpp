#include "trunckit/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

namespace trunckit {

MVec::MVec(double a0, double a1, double a2, double a3) : x0(a0), x1(a1), x2(a2), x3(a3) {
    if (!std::isfinite(a0) || !std::isfinite(a1) || !std::isfinite(a2) || !std::isfinite(a3))
        throw BadModelPoint("MVec: non-finite component");
}

double lorentz_dot(const MVec& a, const MVec& b) {
    return -a.x0 * b.x0 + a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3;
}

double sup_norm(const MVec& a) {
    return std::max(std::max(std::abs(a.x0), std::abs(a.x1)),
                    std::max(std::abs(a.x2), std::abs(a.x3)));
}

MVec normalize_hyperboloid(const MVec& x) {
    double q = lorentz_dot(x, x);
    if (q >= -eps_model * sup_norm(x) * sup_norm(x))
        throw BadModelPoint("normalize_hyperboloid: vector is not time-like");
    MVec v = x * (1.0 / std::sqrt(-q));
    if (v.x0 < 0) v = -v;
    return v;
}

MVec normalize_spacelike(const MVec& x) {
    double q = lorentz_dot(x, x);
    if (q <= eps_model * sup_norm(x) * sup_norm(x))
        throw NotUnitSpacelike("normalize_spacelike: vector is not space-like");
    return x * (1.0 / std::sqrt(q));
}

bool is_unit_spacelike(const MVec& w, double tol) {
    return std::abs(lorentz_dot(w, w) - 1.0) <= tol;
}

bool is_future_lightlike(const MVec& u, double tol) {
    double s = sup_norm(u);
    return u.x0 > 0 && std::abs(lorentz_dot(u, u)) <= tol * std::max(1.0, s * s);
}

LorentzMat LorentzMat::identity() {
    LorentzMat r;
    for (int i = 0; i < 4; ++i) r.at(i, i) = 1.0;
    return r;
}

MVec LorentzMat::apply(const MVec& v) const {
    MVec r;
    for (int i = 0; i < 4; ++i) {
        double s = 0;
        for (int j = 0; j < 4; ++j) s += at(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

LorentzMat LorentzMat::compose(const LorentzMat& o) const {
    LorentzMat r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0;
            for (int k = 0; k < 4; ++k) s += at(i, k) * o.at(k, j);
            r.at(i, j) = s;
        }
    return r;
}

double LorentzMat::lorentz_defect() const {
    auto eta = [](int i) { return i == 0 ? -1.0 : 1.0; };
    double worst = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0;
            for (int k = 0; k < 4; ++k) s += eta(k) * at(k, i) * at(k, j);
            double want = (i == j) ? eta(i) : 0.0;
            worst = std::max(worst, std::abs(s - want));
        }
    return worst;
}

LorentzMat map_lightlike_to_infinity(const MVec& u) {
    if (!is_future_lightlike(u, 1e-9 * std::max(1.0, sup_norm(u))))
        throw NotLightlike("map_lightlike_to_infinity: not future light-like");
    // Rotate the spatial part onto the +x3 axis, then boost along x3 so
    // that u lands exactly on (1,0,0,1), the centre-at-infinity of the
    // half-space chart.
    double s = std::sqrt(u.x1 * u.x1 + u.x2 * u.x2 + u.x3 * u.x3);
    LorentzMat rot = LorentzMat::identity();
    if (s > 0) {
        // Householder-style rotation taking (x1,x2,x3)/s to (0,0,1).
        double a1 = u.x1 / s, a2 = u.x2 / s, a3 = u.x3 / s;
        double v1 = a1, v2 = a2, v3 = a3 - 1.0;
        double vv = v1 * v1 + v2 * v2 + v3 * v3;
        if (vv > 1e-30) {
            // reflection through v composed with reflection through e3,
            // giving a rotation with a -> e3
            auto H = LorentzMat::identity();
            double c = 2.0 / vv;
            double h[3][3];
            double v[3] = {v1, v2, v3};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) h[i][j] = (i == j ? 1.0 : 0.0) - c * v[i] * v[j];
            // compose with diag(1,1,-1)-free fix: reflect through plane z=0 after H
            // maps a -> -e3; instead use H directly: H a = e3 when v = a - e3.
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) H.at(i + 1, j + 1) = h[i][j];
            // H is a reflection (det -1); negating the x1 output row keeps
            // the image of u fixed (it lands on the x3 axis) and restores
            // det +1.
            for (int j = 1; j < 4; ++j) H.at(1, j) = -H.at(1, j);
            rot = H;
        }
    } else {
        throw NotLightlike("map_lightlike_to_infinity: zero spatial part");
    }
    MVec ru = rot.apply(u);
    // ru = r*(1,0,0,1) approximately; boost rapidity chosen so r -> 1.
    double r = ru.x0;
    double e = 1.0 / r;  // multiply the null ray by e
    double ch = 0.5 * (e + 1.0 / e), sh = 0.5 * (e - 1.0 / e);
    LorentzMat boost = LorentzMat::identity();
    boost.at(0, 0) = ch;
    boost.at(0, 3) = sh;
    boost.at(3, 0) = sh;
    boost.at(3, 3) = ch;
    return boost.compose(rot);
}

// --- model conversions --------------------------------------------------

ModelPoint ModelPoint::from_hyperboloid(const MVec& x) {
    double q = lorentz_dot(x, x);
    double s = sup_norm(x);
    if (std::abs(q + 1.0) > eps_model * std::max(1.0, s * s) || x.x0 <= 0)
        throw BadModelPoint("from_hyperboloid: <x,x> != -1 or x0 <= 0");
    ModelPoint p;
    p.model = Model::Hyperboloid;
    p.hyperboloid = x;
    return p;
}

ModelPoint ModelPoint::from_projective(double y1, double y2, double y3) {
    if (y1 * y1 + y2 * y2 + y3 * y3 >= 1.0)
        throw BadModelPoint("from_projective: point outside the unit ball");
    ModelPoint p;
    p.model = Model::Projective;
    p.projective = {y1, y2, y3};
    return p;
}

ModelPoint ModelPoint::from_half_space(std::complex<double> z, double t) {
    if (!(t > 0) || !std::isfinite(t) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw BadModelPoint("from_half_space: height must be positive and finite");
    ModelPoint p;
    p.model = Model::HalfSpace;
    p.half_space = {z, t};
    return p;
}

ModelPoint ModelPoint::to(Model target) const {
    // Everything routes through the hyperboloid.
    MVec x;
    switch (model) {
        case Model::Hyperboloid: x = hyperboloid; break;
        case Model::Projective: {
            double n2 = projective[0] * projective[0] + projective[1] * projective[1] +
                        projective[2] * projective[2];
            double s = 1.0 / std::sqrt(1.0 - n2);
            x = MVec(s, s * projective[0], s * projective[1], s * projective[2]);
            break;
        }
        case Model::HalfSpace: {
            // inverse of t = 1/(x0-x3), z = (x1+i x2)/(x0-x3)
            double t = half_space.t;
            double zr = half_space.z.real(), zi = half_space.z.imag();
            double a = 1.0 / t;  // x0 - x3
            double n = (zr * zr + zi * zi) / t;
            x = MVec(0.5 * (a + t + n), zr / t, zi / t, 0.5 * (t + n - a));
            break;
        }
    }
    ModelPoint out;
    out.model = target;
    switch (target) {
        case Model::Hyperboloid: out.hyperboloid = x; break;
        case Model::Projective:
            out.projective = {x.x1 / x.x0, x.x2 / x.x0, x.x3 / x.x0};
            break;
        case Model::HalfSpace: {
            double a = x.x0 - x.x3;
            if (a <= 0) throw BadModelPoint("to(HalfSpace): point at the chart's infinity");
            out.half_space = {std::complex<double>(x.x1 / a, x.x2 / a), 1.0 / a};
            break;
        }
    }
    return out;
}

HalfSpaceDual::HalfSpaceDual(const MVec& w_) : w(w_) {
    if (!is_unit_spacelike(w, 1e-10)) throw NotUnitSpacelike();
}

HorosphereDual::HorosphereDual(const MVec& u_) : u(u_) {
    if (!is_future_lightlike(u, 1e-10)) throw NotLightlike();
}

BoundaryCircle halfspace_trace(const MVec& w) {
    if (!is_unit_spacelike(w, 1e-8)) throw NotUnitSpacelike("halfspace_trace");
    BoundaryCircle c;
    double a = w.x0 - w.x3;
    if (std::abs(a) < eps_geom) {
        // vertical plane: {z : Re(conj(n) z) = offset}
        c.is_line = true;
        double nn = std::hypot(w.x1, w.x2);
        if (nn < eps_geom) throw NotUnitSpacelike("halfspace_trace: degenerate plane");
        c.normal = std::complex<double>(w.x1 / nn, w.x2 / nn);
        c.offset = 0.5 * (w.x0 + w.x3) / nn;
        return c;
    }
    c.radius = 1.0 / std::abs(a);
    double sg = a > 0 ? 1.0 : -1.0;
    c.centre = std::complex<double>(sg * w.x1 / std::abs(a), sg * w.x2 / std::abs(a));
    return c;
}

HalfSpaceHorosphere halfspace_horosphere(const MVec& u) {
    if (!is_future_lightlike(u, 1e-8 * std::max(1.0, sup_norm(u))))
        throw NotLightlike("halfspace_horosphere");
    HalfSpaceHorosphere h;
    double a = u.x0 - u.x3;
    if (std::abs(a) < eps_geom * u.x0) {
        h.at_infinity = true;
        h.height = u.x0;  // dual of C x {s} is s*(1,0,0,1)
        return h;
    }
    // Tangent sphere at z = (u1 + i u2)/a. The apex (z, D) lies on the
    // horosphere, and <apex, u> = -a*D/2, so the diameter is D = 2/a.
    h.centre = std::complex<double>(u.x1 / a, u.x2 / a);
    h.diameter = 2.0 / a;
    return h;
}

MVec horosphere_at_infinity_dual(double h) {
    if (!(h > 0)) throw NotLightlike("horosphere_at_infinity_dual: height must be > 0");
    return MVec(h, 0, 0, h);
}

double distance_plane_plane(const MVec& w1, const MVec& w2) {
    if (!is_unit_spacelike(w1) || !is_unit_spacelike(w2)) throw NotUnitSpacelike();
    double c = -lorentz_dot(w1, w2);
    if (c < 1.0 - eps_geom) throw PlanesIntersect();
    return std::acosh(std::max(1.0, c));
}

double angle_plane_plane(const MVec& w1, const MVec& w2) {
    if (!is_unit_spacelike(w1) || !is_unit_spacelike(w2)) throw NotUnitSpacelike();
    double c = -lorentz_dot(w1, w2);
    if (std::abs(c) >= 1.0) throw PlanesDisjoint();
    return std::acos(c);
}

double distance_horosphere_plane(const MVec& u, const MVec& w) {
    if (!is_future_lightlike(u, 1e-10 * std::max(1.0, sup_norm(u) * sup_norm(u))))
        throw NotLightlike();
    if (!is_unit_spacelike(w)) throw NotUnitSpacelike();
    double e = -lorentz_dot(u, w);
    if (e <= 0) throw WrongSide();
    return std::log(e);
}

double distance_horosphere_horosphere(const MVec& u1, const MVec& u2) {
    double s1 = sup_norm(u1), s2 = sup_norm(u2);
    if (!is_future_lightlike(u1, 1e-10 * std::max(1.0, s1 * s1)) ||
        !is_future_lightlike(u2, 1e-10 * std::max(1.0, s2 * s2)))
        throw NotLightlike();
    // same projective class iff u1/u1.x0 == u2/u2.x0
    MVec d = u1 * (1.0 / u1.x0) - u2 * (1.0 / u2.x0);
    if (sup_norm(d) < eps_geom) throw SameCentre();
    double e = -0.5 * lorentz_dot(u1, u2);
    if (e <= 0) throw SameCentre("distance_horosphere_horosphere: non-positive pairing");
    return std::log(e);
}

double halfspace_distance(const ModelPoint& p, const ModelPoint& q) {
    if (p.model != Model::HalfSpace || q.model != Model::HalfSpace)
        throw BadModelPoint("halfspace_distance: both points must be half-space points");
    double tp = p.half_space.t, tq = q.half_space.t;
    double d2 = std::norm(p.half_space.z - q.half_space.z) + (tp - tq) * (tp - tq);
    return std::acosh(1.0 + d2 / (2.0 * tp * tq));
}

double distance_point_point(const MVec& a, const MVec& b) {
    return std::acosh(std::max(1.0, -lorentz_dot(a, b)));
}

}  // namespace trunckit
