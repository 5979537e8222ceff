#include <doctest.h>

#include <cmath>
#include <random>

#include "generators.hpp"
#include "trunckit/tetshape.hpp"

using namespace trunckit;
using trunckit_test::random_compact_angles;
using trunckit_test::random_radii;
using trunckit_test::random_valid_angles;

namespace {

std::mt19937_64 rng(777202406);

TetAngles all_equal(double t) {
    TetAngles a;
    for (int e = 0; e < 6; ++e) a[e] = t;
    return a;
}

TetCombinatorics all_ideal() {
    TetCombinatorics c;
    c.ideal_mask = 0x0f;
    return c;
}

// relabel angle assignment by a vertex permutation
TetAngles relabel(const TetAngles& a, const std::array<int, 4>& p) {
    TetAngles out;
    for (int e = 0; e < 6; ++e) {
        int i = edge_table[e][0], j = edge_table[e][1];
        out[edge_index(p[i], p[j])] = a[e];
    }
    return out;
}

}  // namespace

TEST_CASE("validate_angles") {
    // regular ideal tetrahedron
    CHECK(validate_angles(all_ideal(), all_equal(pi() / 3)).valid());
    // all pi/6, compact
    CHECK(validate_angles(TetCombinatorics{}, all_equal(pi() / 6)).valid());
    // a zero angle on a non-zero edge is invalid
    TetAngles a = all_equal(pi() / 6);
    a[edge_index(0, 1)] = 0.0;
    CHECK_FALSE(validate_angles(TetCombinatorics{}, a).valid());
    // and valid when the edge is declared length 0
    TetCombinatorics withzero;
    withzero.zero_mask = 1 << edge_index(0, 1);
    CHECK(validate_angles(withzero, a).valid());
}

TEST_CASE("d_theta closed forms") {
    CHECK(d_theta(all_equal(pi() / 3), 0) == doctest::Approx(0.0).epsilon(1e-12));
    double expect_pi6 = 3.0 * std::sqrt(3.0) / 4.0 + 5.0 / 4.0;
    CHECK(d_theta(all_equal(pi() / 6), 0) == doctest::Approx(expect_pi6));
    // theta = (0, pi/4, pi/4) at vertex 0: 2*1*(1/2) + 1 + 1/2 + 1/2 - 1 = 2
    TetAngles a = all_equal(pi() / 4);
    a[edge_index(0, 1)] = 0.0;
    CHECK(d_theta(a, 0) == doctest::Approx(2.0));
}

TEST_CASE("c_theta closed forms and symmetry") {
    double expect_pi6 = 7.0 * std::sqrt(3.0) / 8.0 + 3.0 / 2.0;
    CHECK(c_theta(all_equal(pi() / 6), 0) == doctest::Approx(expect_pi6));
    CHECK(c_theta(all_equal(pi() / 3), 0) == doctest::Approx(1.125));
    // label symmetries fixing the edge give equal values
    for (int k = 0; k < 50; ++k) {
        TetAngles a = random_compact_angles(rng);
        int e = std::uniform_int_distribution<int>(0, 5)(rng);
        int i = edge_table[e][0], j = edge_table[e][1];
        int c = -1, d = -1;
        for (int v = 0; v < 4; ++v)
            if (v != i && v != j) (c < 0 ? c : d) = v;
        std::array<int, 4> swap_ends{};
        swap_ends[i] = j;
        swap_ends[j] = i;
        swap_ends[c] = c;
        swap_ends[d] = d;
        std::array<int, 4> swap_opp{};
        swap_opp[i] = i;
        swap_opp[j] = j;
        swap_opp[c] = d;
        swap_opp[d] = c;
        CHECK(c_theta(relabel(a, swap_ends), e) == doctest::Approx(c_theta(a, e)));
        CHECK(c_theta(relabel(a, swap_opp), e) == doctest::Approx(c_theta(a, e)));
    }
}

TEST_CASE("boundary edge lengths") {
    // ideal common vertex: Zero, and the formula degenerates to cosh L = 1
    Length l = boundary_edge_length(all_ideal(), all_equal(pi() / 3), 0, 1);
    CHECK(l.kind == LengthKind::Zero);
    CHECK(boundary_edge_cosh(all_equal(pi() / 3), 0, 1) == doctest::Approx(1.0));

    // all pi/6: arccosh(3 + 2 sqrt 3)
    l = boundary_edge_length(TetCombinatorics{}, all_equal(pi() / 6), 0, 1);
    CHECK(l.kind == LengthKind::Finite);
    CHECK(l.value == doctest::Approx(std::acosh(3.0 + 2.0 * std::sqrt(3.0))));

    // a 0-length edge turns the boundary edge into an infinite half-line
    TetCombinatorics comb;
    comb.zero_mask = 1 << edge_index(0, 1);
    TetAngles a = all_equal(pi() / 5);
    a[edge_index(0, 1)] = 0.0;
    CHECK(boundary_edge_length(comb, a, edge_index(0, 1), edge_index(0, 2)).kind ==
          LengthKind::HalfLine);

    CHECK_THROWS_AS(boundary_edge_length(TetCombinatorics{}, a, 0, 0), SameEdge);
    CHECK_THROWS_AS(boundary_edge_length(TetCombinatorics{}, a, 0, 3), OppositeEdges);
}

TEST_CASE("internal edge lengths") {
    // all pi/6: cosh L = c/d, checked against the Gram reconstruction below
    Length l = internal_edge_length(TetCombinatorics{}, all_equal(pi() / 6), 0);
    CHECK(l.kind == LengthKind::Finite);
    double ratio = (7.0 * std::sqrt(3.0) / 8.0 + 3.0 / 2.0) /
                   (3.0 * std::sqrt(3.0) / 4.0 + 5.0 / 4.0);
    CHECK(l.value == doctest::Approx(std::acosh(ratio)));

    // one ideal endpoint
    TetCombinatorics c1;
    c1.ideal_mask = 1;  // vertex 0
    TetAngles a = all_equal(0.8);
    for (int e : edges_at_vertex(0)) a[e] = pi() / 3;
    CHECK(internal_edge_length(c1, a, edge_index(0, 1)).kind == LengthKind::HalfLine);

    // zero-length edge: tagged Zero, and the ratio is exactly 1
    TetCombinatorics cz;
    cz.zero_mask = 1 << edge_index(0, 1);
    for (int k = 0; k < 100; ++k) {
        TetAngles az = random_compact_angles(rng);
        az[edge_index(0, 1)] = 0.0;
        CHECK(internal_edge_length(cz, az, edge_index(0, 1)).kind == LengthKind::Zero);
        CHECK(internal_edge_cosh(az, edge_index(0, 1)) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("sigma of exceptional hexagons") {
    // face {0,1,2} with ideal corner 0 and zero edge {1,2}
    TetCombinatorics comb;
    comb.ideal_mask = 1;
    comb.zero_mask = 1 << edge_index(1, 2);
    CHECK(is_exceptional_hexagon(comb, 3, 0));
    CHECK_FALSE(is_exceptional_hexagon(comb, 3, 1));

    // symmetric hexagon: theta1 = theta2 and theta4 = theta5 -> 0
    TetAngles a{};
    a[edge_index(0, 1)] = 0.7;                      // theta1
    a[edge_index(0, 2)] = 0.7;                      // theta2
    a[edge_index(0, 3)] = pi() - 1.4;               // ideal vertex sum
    a[edge_index(2, 3)] = 0.5;                      // theta4 (opposite theta1)
    a[edge_index(1, 3)] = 0.5;                      // theta5 (opposite theta2)
    a[edge_index(1, 2)] = 0.0;                      // theta6, length 0
    CHECK(sigma(comb, a, 0, 1, 2) == doctest::Approx(0.0));

    // direct evaluation: theta1=pi/3, theta5=pi/6, theta2=pi/4, theta4=pi/4
    a[edge_index(0, 1)] = pi() / 3;
    a[edge_index(1, 3)] = pi() / 6;
    a[edge_index(0, 2)] = pi() / 4;
    a[edge_index(2, 3)] = pi() / 4;
    a[edge_index(0, 3)] = pi() - pi() / 3 - pi() / 4;
    double term2 = std::log(std::sin(pi() / 4) / (std::cos(pi() / 4) + std::cos(pi() / 4)));
    double term1 = std::log(std::sin(pi() / 3) / (std::cos(pi() / 3) + std::cos(pi() / 6)));
    double expect = term2 - term1;  // log(1/2) - log(sqrt(3)/(1+sqrt(3)))
    CHECK(expect == doctest::Approx(std::log(0.5) - std::log(std::sqrt(3.0) / (1 + std::sqrt(3.0)))));
    CHECK(sigma(comb, a, 0, 1, 2) == doctest::Approx(expect));
    // orientation reversal flips the sign exactly
    CHECK(sigma(comb, a, 0, 2, 1) == doctest::Approx(-expect));

    CHECK_THROWS_AS(sigma(TetCombinatorics{}, a, 0, 1, 2), NotExceptional);
}

TEST_CASE("cusp modulus z") {
    CHECK(cusp_modulus_z(all_ideal(), all_equal(pi() / 3), 0, 1) ==
          std::complex<double>(std::polar(1.0, pi() / 3)));

    // theta(0,1) = pi/2, theta(0,2) = theta(0,3) = pi/4 -> z = i
    TetAngles a = all_equal(pi() / 4);
    a[edge_index(0, 1)] = pi() / 2;
    a[edge_index(2, 3)] = pi() / 2;
    auto z = cusp_modulus_z(all_ideal(), a, 0, 1);
    CHECK(z.real() == doctest::Approx(0.0));
    CHECK(z.imag() == doctest::Approx(1.0));

    CHECK_THROWS_AS(cusp_modulus_z(TetCombinatorics{}, a, 0, 1), VertexNotIdeal);

    // triangle cycle relations around an ideal vertex, random valid angles
    for (int k = 0; k < 500; ++k) {
        TetAngles av = random_valid_angles(rng, 0x01);
        auto cyc = positive_cycle_at(0, +1);
        auto z1 = cusp_modulus_z(TetCombinatorics{.ideal_mask = 1}, av, 0, cyc[0]);
        auto z2 = cusp_modulus_z(TetCombinatorics{.ideal_mask = 1}, av, 0, cyc[1]);
        auto z3 = cusp_modulus_z(TetCombinatorics{.ideal_mask = 1}, av, 0, cyc[2]);
        CHECK(z1.imag() > 0);
        auto prod = z1 * z2 * z3;
        CHECK(std::abs(prod - std::complex<double>(-1.0, 0.0)) < 1e-10);
        CHECK(std::abs(z2 - 1.0 / (1.0 - z1)) < 1e-10);
    }
}

TEST_CASE("g_theta closed form and positivity") {
    // all angles equal t: g = -1 + 6c^2 + 8c^3 + 3c^4
    for (double t : {pi() / 6, 0.3, 0.7, 1.0}) {
        double c = std::cos(t);
        double closed = -1 + 6 * c * c + 8 * c * c * c + 3 * c * c * c * c;
        CHECK(g_theta(all_equal(t)) == doctest::Approx(closed));
    }
    // exact: 5.1875 + 3 sqrt 3
    CHECK(g_theta(all_equal(pi() / 6)) == doctest::Approx(5.1875 + 3 * std::sqrt(3.0)));
    // outside the valid domain g can be negative
    CHECK(g_theta(all_equal(pi() / 2)) == doctest::Approx(-1.0));
    // positive on 10^4 random valid compact moduli
    for (int k = 0; k < 10000; ++k) {
        CHECK(g_theta(random_compact_angles(rng)) > 0.0);
    }
}

TEST_CASE("D values") {
    // regular ideal, r = 1: D = 1 (D = 1/r in general)
    HoroRadii r1 = HoroRadii::all(1.0);
    CHECK(D_value(all_ideal(), all_equal(pi() / 3), 0, r1) == doctest::Approx(1.0));
    HoroRadii r2 = HoroRadii::all(2.0);
    CHECK(D_value(all_ideal(), all_equal(pi() / 3), 0, r2) == doctest::Approx(0.5));

    double g = g_theta(all_equal(pi() / 6));
    double d = d_theta(all_equal(pi() / 6), 0);
    CHECK(D_value(TetCombinatorics{}, all_equal(pi() / 6), 0, HoroRadii{}) ==
          doctest::Approx(std::sqrt(g / d)));
    CHECK(std::sqrt(g / d) == doctest::Approx(2.0183).epsilon(1e-4));

    CHECK_THROWS_AS(D_value(all_ideal(), all_equal(pi() / 3), 0, HoroRadii{}), MissingRadius);
}

TEST_CASE("tilt vector") {
    auto t = tilts(all_ideal(), all_equal(pi() / 3), HoroRadii::all(1.0));
    for (double v : t) CHECK(v == doctest::Approx(-0.5));

    // all-ideal: scaling every r by lambda scales every tilt by lambda
    for (int k = 0; k < 50; ++k) {
        TetAngles a = random_valid_angles(rng, 0x0f);
        HoroRadii r = random_radii(rng, 0x0f);
        double lam = 2.7;
        HoroRadii rs;
        for (int v = 0; v < 4; ++v) rs.r[v] = *r.r[v] * lam;
        auto t1 = tilts(all_ideal(), a, r);
        auto t2 = tilts(all_ideal(), a, rs);
        for (int v = 0; v < 4; ++v) CHECK(t2[v] == doctest::Approx(t1[v] * lam));
    }

    auto tc = tilts(TetCombinatorics{}, all_equal(pi() / 6), HoroRadii{});
    double D = std::sqrt(g_theta(all_equal(pi() / 6)) / d_theta(all_equal(pi() / 6), 0));
    double expect = (1.0 - 3.0 * std::cos(pi() / 6)) / D;
    for (double v : tc) CHECK(v == doctest::Approx(expect));
    CHECK(expect == doctest::Approx(-0.7917910).epsilon(1e-6));
}

TEST_CASE("tilts permute under even vertex relabellings") {
    const std::array<std::array<int, 4>, 3> evens{{{1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}}};
    for (int k = 0; k < 100; ++k) {
        TetAngles a = random_compact_angles(rng);
        auto t = tilts(TetCombinatorics{}, a, HoroRadii{});
        for (const auto& p : evens) {
            TetAngles ap = relabel(a, p);
            auto tp = tilts(TetCombinatorics{}, ap, HoroRadii{});
            for (int v = 0; v < 4; ++v) CHECK(tp[p[v]] == doctest::Approx(t[v]));
        }
    }
}

TEST_CASE("gram reconstruction classifies vertices") {
    auto rep = gram_oracle(TetCombinatorics{}, all_equal(pi() / 6));
    for (auto k : rep.kind) CHECK(k == VertexKind::UltraIdeal);
    CHECK(rep.max_internal_delta < 1e-9);
    CHECK(rep.max_boundary_delta < 1e-9);

    auto rep2 = gram_oracle(all_ideal(), all_equal(pi() / 3));
    for (auto k : rep2.kind) CHECK(k == VertexKind::Ideal);

    // all right angles violate the vertex-sum conditions; the Gram matrix is
    // the identity and has no Lorentz signature
    CHECK_THROWS_AS(gram_lift(all_equal(pi() / 2)), SingularGram);
}

TEST_CASE("gram oracle agrees with closed-form lengths on random moduli") {
    for (int k = 0; k < 1000; ++k) {
        TetAngles a = random_compact_angles(rng);
        auto rep = gram_oracle(TetCombinatorics{}, a);
        CHECK(rep.max_internal_delta < 1e-8);
        CHECK(rep.max_boundary_delta < 1e-8);
    }
}

TEST_CASE("d_theta vanishes exactly at ideal angle sums") {
    // both directions on random samples and constructed near-misses
    for (int k = 0; k < 2000; ++k) {
        TetAngles a = random_valid_angles(rng, 0x01);
        CHECK(std::abs(d_theta(a, 0)) < 1e-9);  // sum is pi exactly
        TetAngles b = random_compact_angles(rng);
        if (std::abs(b.vertex_sum(0) - pi()) > 1e-4) CHECK(std::abs(d_theta(b, 0)) > 1e-9);
    }
    // constructed: perturb an ideal triple by +-delta
    for (double delta : {1e-6, 1e-4, 1e-2}) {
        TetAngles a = all_equal(pi() / 3);
        a[edge_index(0, 1)] += delta;
        CHECK(std::abs(d_theta(a, 0)) > 1e-9);
        a[edge_index(0, 1)] -= 2 * delta;
        CHECK(std::abs(d_theta(a, 0)) > 1e-9);
    }
}

TEST_CASE("tilt oracle equivalence") {
    // regular ideal and the compact regular case
    auto t = tilt_oracle(all_ideal(), all_equal(pi() / 3), HoroRadii::all(1.0));
    for (double v : t) CHECK(v == doctest::Approx(-0.5));
    auto t6 = tilt_oracle(TetCombinatorics{}, all_equal(pi() / 6), HoroRadii{});
    auto t6f = tilts(TetCombinatorics{}, all_equal(pi() / 6), HoroRadii{});
    for (int v = 0; v < 4; ++v) CHECK(t6[v] == doctest::Approx(t6f[v]).epsilon(1e-9));

    // 10^3 random valid moduli with random ideal sets and radii in [0.1, 10]
    std::array<std::uint8_t, 5> masks{0x00, 0x01, 0x03, 0x07, 0x0f};
    for (int k = 0; k < 1000; ++k) {
        std::uint8_t mask = masks[k % masks.size()];
        TetCombinatorics comb;
        comb.ideal_mask = mask;
        TetAngles a = random_valid_angles(rng, mask);
        HoroRadii r = random_radii(rng, mask);
        auto formula = tilts(comb, a, r);
        auto oracle = tilt_oracle(comb, a, r);
        double scale = 1.0;
        for (int v = 0; v < 4; ++v) scale = std::max(scale, std::abs(formula[v]));
        for (int v = 0; v < 4; ++v) CHECK(std::abs(formula[v] - oracle[v]) < 1e-8 * scale);
    }
}
