#pragma once

// Random valid-moduli generators shared by the property tests and the
// acceptance suite.

#include <random>

#include "trunckit/tetshape.hpp"

namespace trunckit_test {

using trunckit::TetAngles;
using trunckit::TetCombinatorics;

// Always-valid compact moduli: all four vertex sums stay below 3 < pi.
inline TetAngles random_compact_angles(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(0.05, 1.0);
    TetAngles a;
    for (int e = 0; e < 6; ++e) a[e] = d(rng);
    return a;
}

// Valid moduli for a given ideal mask: ideal vertex sums are projected onto
// pi exactly, non-ideal sums stay below pi - margin. Rejection + linear
// least-squares correction on the (at most 4) sum constraints.
inline TetAngles random_valid_angles(std::mt19937_64& rng, std::uint8_t ideal_mask,
                                     double margin = 0.05) {
    using namespace trunckit;
    std::uniform_real_distribution<double> d(0.2, 0.95);
    for (int attempt = 0; attempt < 400; ++attempt) {
        TetAngles a;
        for (int e = 0; e < 6; ++e) a[e] = d(rng);
        // constraint rows: sum over edges at ideal v equals pi
        std::vector<int> ideal_vs;
        for (int v = 0; v < 4; ++v)
            if ((ideal_mask >> v) & 1) ideal_vs.push_back(v);
        const int k = static_cast<int>(ideal_vs.size());
        if (k > 0) {
            // x' = x + A^T (A A^T)^{-1} (b - A x), A in {0,1}^{k x 6}
            double A[4][6] = {};
            double rhs[4];
            for (int i = 0; i < k; ++i) {
                for (int e : edges_at_vertex(ideal_vs[i])) A[i][e] = 1.0;
                rhs[i] = pi() - a.vertex_sum(ideal_vs[i]);
            }
            double M[4][5];
            for (int i = 0; i < k; ++i) {
                for (int j = 0; j < k; ++j) {
                    double s = 0;
                    for (int e = 0; e < 6; ++e) s += A[i][e] * A[j][e];
                    M[i][j] = s;
                }
                M[i][k] = rhs[i];
            }
            // Gaussian elimination on the k x k system
            for (int c = 0; c < k; ++c) {
                int p = c;
                for (int r = c + 1; r < k; ++r)
                    if (std::abs(M[r][c]) > std::abs(M[p][c])) p = r;
                for (int j = 0; j <= k; ++j) std::swap(M[c][j], M[p][j]);
                for (int r = 0; r < k; ++r) {
                    if (r == c || M[c][c] == 0) continue;
                    double f = M[r][c] / M[c][c];
                    for (int j = 0; j <= k; ++j) M[r][j] -= f * M[c][j];
                }
            }
            bool ok = true;
            double y[4];
            for (int i = 0; i < k; ++i) {
                if (std::abs(M[i][i]) < 1e-12) ok = false;
                else y[i] = M[i][k] / M[i][i];
            }
            if (!ok) continue;
            for (int e = 0; e < 6; ++e) {
                double corr = 0;
                for (int i = 0; i < k; ++i) corr += A[i][e] * y[i];
                a[e] += corr;
            }
        }
        bool ok = true;
        for (int e = 0; e < 6; ++e) ok &= a[e] > 0.03 && a[e] < pi() - 0.03;
        for (int v = 0; v < 4; ++v) {
            double s = a.vertex_sum(v);
            if ((ideal_mask >> v) & 1)
                ok &= std::abs(s - pi()) < 1e-12;
            else
                ok &= s < pi() - margin;
        }
        if (ok) return a;
    }
    throw std::runtime_error("random_valid_angles: rejection sampling failed");
}

inline trunckit::HoroRadii random_radii(std::mt19937_64& rng, std::uint8_t ideal_mask) {
    std::uniform_real_distribution<double> d(std::log(0.1), std::log(10.0));
    trunckit::HoroRadii r;
    for (int v = 0; v < 4; ++v)
        if ((ideal_mask >> v) & 1) r.r[v] = std::exp(d(rng));
    return r;
}

}  // namespace trunckit_test
