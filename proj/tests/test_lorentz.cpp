#include <doctest.h>

#include <cmath>
#include <random>

#include "trunckit/lorentz.hpp"

using namespace trunckit;

namespace {

std::mt19937_64 rng(20240611);

double urand(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng);
}

// Givens rotation in spatial coordinates i,j (1..3) or boost when i==0.
LorentzMat elementary(int i, int j, double a) {
    LorentzMat m = LorentzMat::identity();
    if (i == 0) {
        m.at(0, 0) = std::cosh(a);
        m.at(0, j) = std::sinh(a);
        m.at(j, 0) = std::sinh(a);
        m.at(j, j) = std::cosh(a);
    } else {
        m.at(i, i) = std::cos(a);
        m.at(i, j) = -std::sin(a);
        m.at(j, i) = std::sin(a);
        m.at(j, j) = std::cos(a);
    }
    return m;
}

LorentzMat random_lorentz() {
    LorentzMat m = elementary(1, 2, urand(0, 6.28));
    m = elementary(2, 3, urand(0, 6.28)).compose(m);
    m = elementary(0, 3, urand(-1.5, 1.5)).compose(m);
    m = elementary(1, 3, urand(0, 6.28)).compose(m);
    m = elementary(0, 1, urand(-1.0, 1.0)).compose(m);
    return m;
}

MVec random_hyperboloid_point() {
    MVec x(1.0, urand(-2, 2), urand(-2, 2), urand(-2, 2));
    double s = x.x1 * x.x1 + x.x2 * x.x2 + x.x3 * x.x3;
    x.x0 = std::sqrt(1.0 + s);
    return x;
}

MVec random_unit_spacelike() {
    for (;;) {
        MVec w(urand(-1, 1), urand(-2, 2), urand(-2, 2), urand(-2, 2));
        double q = lorentz_dot(w, w);
        if (q > 0.1) return w * (1.0 / std::sqrt(q));
    }
}

}  // namespace

TEST_CASE("lorentz_dot matches the displayed signature") {
    CHECK(lorentz_dot({1, 0, 0, 0}, {1, 0, 0, 0}) == doctest::Approx(-1.0));
    CHECK(lorentz_dot({1, 1, 0, 0}, {1, 1, 0, 0}) == doctest::Approx(0.0));
    double a = 2.0;
    CHECK(lorentz_dot({a, a, 0, 0}, {a, -a, 0, 0}) == doctest::Approx(-8.0));  // -2a^2
}

TEST_CASE("dual half-space membership") {
    HalfSpaceDual h(MVec{0, 1, 0, 0});
    CHECK(h.contains({1, 0, 0, 0}));  // boundary case <v,w>=0
    MVec v = normalize_hyperboloid({std::sqrt(2.0), 1, 0, 0});
    CHECK_FALSE(h.contains(v));  // <v,w> = 1 > 0
    CHECK_THROWS_AS(HalfSpaceDual(MVec{1, 1, 0, 0}), NotUnitSpacelike);
}

TEST_CASE("dual horosphere membership and scaling") {
    HorosphereDual o(MVec{1, 1, 0, 0});
    CHECK(o.contains({1, 0, 0, 0}));
    MVec centre = o.centre();
    CHECK(centre.x0 == doctest::Approx(1.0));
    CHECK(centre.x1 == doctest::Approx(1.0));

    // scaling u by 2 shrinks the horoball
    HorosphereDual o2(MVec{2, 2, 0, 0});
    CHECK_FALSE(o2.inside_horoball({1, 0, 0, 0}));
    for (int k = 0; k < 100; ++k) {
        // points v on the doubled horosphere: v = a p + s u with <v,u> = -1/2
        MVec p = random_hyperboloid_point();
        double pu = lorentz_dot(p, o.u);
        double a = (-0.5) / pu;
        double s = (a * a - 1.0) / (2 * a * pu);
        MVec v = p * a + o.u * s;
        REQUIRE(std::abs(lorentz_dot(v, v) + 1) < 1e-9);
        REQUIRE(std::abs(lorentz_dot(v, o2.u) + 1) < 1e-9);
        CHECK(o.inside_horoball(v));
    }
    CHECK_THROWS_AS(HorosphereDual(MVec{0, 1, 0, 0}), NotLightlike);
}

TEST_CASE("plane-plane distance") {
    CHECK(distance_plane_plane({0, 1, 0, 0}, {0, -1, 0, 0}) == doctest::Approx(0.0));
    double s = 1.37;
    CHECK(distance_plane_plane({0, 1, 0, 0}, {std::sinh(s), -std::cosh(s), 0, 0}) ==
          doctest::Approx(s));
    CHECK_THROWS_AS(distance_plane_plane({0, 1, 0, 0}, {0, 0, 1, 0}), PlanesIntersect);
}

TEST_CASE("plane-plane angle") {
    CHECK(angle_plane_plane({0, 1, 0, 0}, {0, 0, 1, 0}) == doctest::Approx(pi() / 2));
    double alpha = 0.73;
    CHECK(angle_plane_plane({0, 1, 0, 0}, {0, -std::cos(alpha), std::sin(alpha), 0}) ==
          doctest::Approx(alpha));
    CHECK_THROWS_AS(angle_plane_plane({0, 1, 0, 0}, {std::sinh(1), -std::cosh(1), 0, 0}),
                    PlanesDisjoint);
}

TEST_CASE("horosphere-plane distance") {
    MVec u{1, 1, 0, 0};
    CHECK(distance_horosphere_plane(u, {0, -1, 0, 0}) == doctest::Approx(0.0));  // tangency
    double t = 1.0;
    // -<u,w> = e^t for w = (sinh t, -cosh t, 0, 0)
    CHECK(distance_horosphere_plane(u, {std::sinh(t), -std::cosh(t), 0, 0}) ==
          doctest::Approx(1.0));
    CHECK_THROWS_AS(distance_horosphere_plane(u, {0, 1, 0, 0}), WrongSide);

    // half-space model: horosphere C x {2} vs the unit hemisphere -> log 2
    MVec uu = horosphere_at_infinity_dual(2.0);
    MVec w{0, 0, 0, -1};  // unit hemisphere centred at z = 0
    BoundaryCircle c = halfspace_trace(w);
    REQUIRE_FALSE(c.is_line);
    REQUIRE(c.radius == doctest::Approx(1.0));
    REQUIRE(std::abs(c.centre) == doctest::Approx(0.0));
    double d;
    try {
        d = distance_horosphere_plane(uu, w);
    } catch (const WrongSide&) {
        d = distance_horosphere_plane(uu, -w);
    }
    CHECK(d == doctest::Approx(std::log(2.0)));
}

TEST_CASE("horosphere-horosphere distance") {
    CHECK(distance_horosphere_horosphere({1, 1, 0, 0}, {1, -1, 0, 0}) == doctest::Approx(0.0));
    double a = std::exp(1.0);
    CHECK(distance_horosphere_horosphere({a, a, 0, 0}, {a, -a, 0, 0}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(distance_horosphere_horosphere({1, 1, 0, 0}, {2, 2, 0, 0}), SameCentre);
}

TEST_CASE("half-space distance formula") {
    ModelPoint p = ModelPoint::from_half_space({0, 0}, 1.0);
    CHECK(halfspace_distance(p, p) == doctest::Approx(0.0));
    ModelPoint q = ModelPoint::from_half_space({0, 0}, std::exp(1.0));
    CHECK(halfspace_distance(p, q) == doctest::Approx(1.0));
    ModelPoint r = ModelPoint::from_half_space({1, 0}, 1.0);
    CHECK(halfspace_distance(p, r) == doctest::Approx(std::acosh(1.5)));
}

TEST_CASE("model round-trips: 1000 random points within 1e-10") {
    for (int k = 0; k < 1000; ++k) {
        MVec x = random_hyperboloid_point();
        ModelPoint p = ModelPoint::from_hyperboloid(x);
        MVec back =
            p.to(Model::Projective).to(Model::HalfSpace).to(Model::Hyperboloid).hyperboloid;
        CHECK(sup_norm(back - x) < 1e-10 * std::max(1.0, sup_norm(x)));
    }
}

TEST_CASE("plane-plane distance agrees with a sampled geodesic computation") {
    // numeric oracle: minimize d(p,q) over points of the two dual planes
    for (int trial = 0; trial < 25; ++trial) {
        MVec w1 = random_unit_spacelike();
        MVec w2 = random_unit_spacelike();
        double c = -lorentz_dot(w1, w2);
        if (c <= 1.02) continue;
        double want = std::acosh(c);

        auto frame = [](const MVec& w) {
            std::array<MVec, 3> b{};
            int k = 0;
            for (int axis = 0; axis < 4 && k < 3; ++axis) {
                MVec v{0, 0, 0, 0};
                v[axis] = 1;
                v = v - w * lorentz_dot(v, w);
                for (int j = 0; j < k; ++j) {
                    double q = lorentz_dot(b[j], b[j]);
                    v = v - b[j] * (lorentz_dot(v, b[j]) / q);
                }
                double q = lorentz_dot(v, v);
                if (std::abs(q) < 1e-8) continue;
                b[k++] = v * (1.0 / std::sqrt(std::abs(q)));
            }
            if (lorentz_dot(b[0], b[0]) > 0)
                for (int j = 1; j < 3; ++j)
                    if (lorentz_dot(b[j], b[j]) < 0) std::swap(b[0], b[j]);
            if (b[0].x0 < 0) b[0] = -b[0];
            return b;
        };
        auto f1 = frame(w1);
        auto f2 = frame(w2);
        auto point = [](const std::array<MVec, 3>& b, double u, double v) {
            double r = std::sqrt(1 + u * u + v * v);
            return b[0] * r + b[1] * u + b[2] * v;
        };
        double best = 1e9;
        double u1 = 0, v1 = 0, u2 = 0, v2 = 0, stepsz = 1.0;
        for (int refine = 0; refine < 30; ++refine) {
            double bu1 = u1, bv1 = v1, bu2 = u2, bv2 = v2;
            for (int a = -2; a <= 2; ++a)
                for (int b2 = -2; b2 <= 2; ++b2)
                    for (int cc = -2; cc <= 2; ++cc)
                        for (int dd = -2; dd <= 2; ++dd) {
                            MVec p = point(f1, u1 + a * stepsz, v1 + b2 * stepsz);
                            MVec q = point(f2, u2 + cc * stepsz, v2 + dd * stepsz);
                            double dist = std::acosh(std::max(1.0, -lorentz_dot(p, q)));
                            if (dist < best) {
                                best = dist;
                                bu1 = u1 + a * stepsz;
                                bv1 = v1 + b2 * stepsz;
                                bu2 = u2 + cc * stepsz;
                                bv2 = v2 + dd * stepsz;
                            }
                        }
            u1 = bu1;
            v1 = bv1;
            u2 = bu2;
            v2 = bv2;
            stepsz *= 0.55;
        }
        CHECK(std::abs(best - want) < 1e-9);
    }
}

TEST_CASE("distances are Lorentz-invariant") {
    for (int k = 0; k < 1000; ++k) {
        LorentzMat g = random_lorentz();
        REQUIRE(g.lorentz_defect() < 1e-9);
        MVec w1 = random_unit_spacelike();
        MVec w2 = random_unit_spacelike();
        double c = -lorentz_dot(w1, w2);
        if (c > 1.0 + 1e-6) {
            CHECK(std::abs(distance_plane_plane(g.apply(w1), g.apply(w2)) -
                           distance_plane_plane(w1, w2)) < 1e-9);
        } else if (std::abs(c) < 1.0 - 1e-6) {
            CHECK(std::abs(angle_plane_plane(g.apply(w1), g.apply(w2)) -
                           angle_plane_plane(w1, w2)) < 1e-9);
        }
        MVec x = random_hyperboloid_point();
        MVec y = random_hyperboloid_point();
        CHECK(std::abs(distance_point_point(g.apply(x), g.apply(y)) -
                       distance_point_point(x, y)) < 1e-9);
    }
}

TEST_CASE("horosphere dual scaling vs horoball nesting") {
    for (int k = 0; k < 200; ++k) {
        MVec dir{1, urand(-1, 1), urand(-1, 1), urand(-1, 1)};
        double n = std::sqrt(dir.x1 * dir.x1 + dir.x2 * dir.x2 + dir.x3 * dir.x3);
        if (n < 1e-3) continue;
        MVec u{1, dir.x1 / n, dir.x2 / n, dir.x3 / n};
        double alpha = urand(1.1, 4.0);
        HorosphereDual big(u);
        HorosphereDual small(u * alpha);
        MVec p = random_hyperboloid_point();
        double pu = lorentz_dot(p, u);
        double a = (-1.0 / alpha) / pu;
        double s = (a * a - 1.0) / (2 * a * pu);
        MVec v = p * a + u * s;
        REQUIRE(small.contains(v));
        CHECK(big.inside_horoball(v));
    }
}

TEST_CASE("half-space conversions agree with the dual formulas") {
    for (double s : {0.5, 1.0, 2.0, 7.5}) {
        MVec u = horosphere_at_infinity_dual(s);
        HalfSpaceHorosphere h = halfspace_horosphere(u);
        CHECK(h.at_infinity);
        CHECK(h.height == doctest::Approx(s));
    }
    HalfSpaceHorosphere h = halfspace_horosphere(MVec{1, 1, 0, 0});
    CHECK_FALSE(h.at_infinity);
    CHECK(h.diameter == doctest::Approx(2.0));
    ModelPoint apex = ModelPoint::from_half_space(h.centre, h.diameter);
    CHECK(std::abs(lorentz_dot(apex.as_hyperboloid(), MVec{1, 1, 0, 0}) + 1) < 1e-12);
}
