#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <iosfwd>

#include "trunckit/common.hpp"

namespace trunckit {

// A vector of Minkowski 4-space with the Lorentzian inner product
// <x,y> = -x0*y0 + x1*y1 + x2*y2 + x3*y3.
struct MVec {
    double x0 = 0, x1 = 0, x2 = 0, x3 = 0;

    MVec() = default;
    MVec(double a0, double a1, double a2, double a3);  // rejects NaN/inf

    double& operator[](int i) { return (&x0)[i]; }
    double operator[](int i) const { return (&x0)[i]; }

    MVec operator+(const MVec& o) const { return {x0 + o.x0, x1 + o.x1, x2 + o.x2, x3 + o.x3}; }
    MVec operator-(const MVec& o) const { return {x0 - o.x0, x1 - o.x1, x2 - o.x2, x3 - o.x3}; }
    MVec operator*(double s) const { return {x0 * s, x1 * s, x2 * s, x3 * s}; }
    MVec operator-() const { return {-x0, -x1, -x2, -x3}; }
};

inline MVec operator*(double s, const MVec& v) { return v * s; }

double lorentz_dot(const MVec& a, const MVec& b);

// Euclidean norm of the components, used for relative tolerances.
double sup_norm(const MVec& a);

// Point of the hyperboloid sheet H^3_- := {<x,x> = -1, x0 > 0}.
MVec normalize_hyperboloid(const MVec& x);
// Scales a space-like vector onto the one-sheeted hyperboloid H^3_+.
MVec normalize_spacelike(const MVec& x);

bool is_unit_spacelike(const MVec& w, double tol = 1e-10);
bool is_future_lightlike(const MVec& u, double tol = 1e-10);

// 4x4 Lorentz transformations, stored row-major.
struct LorentzMat {
    std::array<double, 16> m{};

    static LorentzMat identity();
    MVec apply(const MVec& v) const;
    LorentzMat compose(const LorentzMat& o) const;  // this after o
    double& at(int r, int c) { return m[4 * r + c]; }
    double at(int r, int c) const { return m[4 * r + c]; }
    // max |M^T J M - J| entry; near zero for genuine isometries
    double lorentz_defect() const;
};

// Lorentz map sending the ray of the future light-like vector u to the
// ray of (1,1,0,0)... see implementation; used to put a cusp at infinity.
LorentzMat map_lightlike_to_infinity(const MVec& u);

// --- Models of hyperbolic space ---------------------------------------

enum class Model : std::uint8_t { Hyperboloid, Projective, HalfSpace };

// Point of the upper half-space model C x (0,inf); `infinity` marks the
// point at infinity of the boundary sphere (used by cusp developments).
struct HalfSpacePoint {
    std::complex<double> z{0.0, 0.0};
    double t = 1.0;
};

struct ModelPoint {
    Model model = Model::Hyperboloid;
    MVec hyperboloid;                      // valid when model == Hyperboloid
    std::array<double, 3> projective{};    // |y| < 1 when model == Projective
    HalfSpacePoint half_space;             // t > 0 when model == HalfSpace

    static ModelPoint from_hyperboloid(const MVec& x);
    static ModelPoint from_projective(double y1, double y2, double y3);
    static ModelPoint from_half_space(std::complex<double> z, double t);

    ModelPoint to(Model target) const;
    MVec as_hyperboloid() const { return to(Model::Hyperboloid).hyperboloid; }
};

// --- Duals -------------------------------------------------------------

// Half-space of H^3_- dual to a unit space-like vector w:
// {v : <v,w> <= 0}.  The dual vector is the source of truth; Euclidean
// data in other models is derived on demand.
struct HalfSpaceDual {
    MVec w;

    explicit HalfSpaceDual(const MVec& w_);  // throws NotUnitSpacelike
    bool contains(const MVec& v) const { return lorentz_dot(v, w) <= eps_geom; }
};

// Horosphere dual to a future light-like u: {v : <v,u> = -1}.
struct HorosphereDual {
    MVec u;

    explicit HorosphereDual(const MVec& u_);  // throws NotLightlike
    bool contains(const MVec& v) const { return std::abs(lorentz_dot(v, u) + 1.0) <= eps_geom; }
    bool inside_horoball(const MVec& v) const { return lorentz_dot(v, u) >= -1.0; }
    // Projective class of the centre at infinity, scaled to x0 = 1.
    MVec centre() const { return u * (1.0 / u.x0); }
};

// Trace of a plane (dual w) on the boundary C of the half-space model:
// a circle, or a line when the plane is vertical.
struct BoundaryCircle {
    bool is_line = false;
    std::complex<double> centre{0.0, 0.0};  // circle centre (is_line == false)
    double radius = 0.0;                    // circle radius
    std::complex<double> normal{0.0, 0.0};  // unit normal of the line
    double offset = 0.0;                    // line: Re(conj(normal) * z) == offset
};

BoundaryCircle halfspace_trace(const MVec& w);

// Horosphere in half-space coordinates: a sphere tangent to C at `centre`
// with Euclidean diameter `diameter`, or the horizontal plane at height
// `height` when centred at infinity.
struct HalfSpaceHorosphere {
    bool at_infinity = false;
    std::complex<double> centre{0.0, 0.0};
    double diameter = 0.0;
    double height = 0.0;
};

HalfSpaceHorosphere halfspace_horosphere(const MVec& u);
// Dual vector of the horizontal horosphere C x {h}.
MVec horosphere_at_infinity_dual(double h);

// --- Distances ---------------------------------------------------------

// d with cosh d = -<w1,w2>; throws PlanesIntersect when -<w1,w2> < 1.
double distance_plane_plane(const MVec& w1, const MVec& w2);
// angle in (0,pi) with cos = -<w1,w2>; throws PlanesDisjoint.
double angle_plane_plane(const MVec& w1, const MVec& w2);
// log(-<u,w>): negative when horosphere and plane intersect.
double distance_horosphere_plane(const MVec& u, const MVec& w);
// log(-<u1,u2>/2); throws SameCentre for equal projective classes.
double distance_horosphere_horosphere(const MVec& u1, const MVec& u2);
// cosh d(p,q) = 1 + |p-q|^2 / (2 y(p) y(q)) in the half-space model.
double halfspace_distance(const ModelPoint& p, const ModelPoint& q);

double distance_point_point(const MVec& a, const MVec& b);

}  // namespace trunckit
