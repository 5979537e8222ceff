#include "trunckit/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

namespace trunckit {

const char* solve_status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Solved: return "solved";
        case SolveStatus::NoConvergence: return "no-convergence";
        case SolveStatus::LeftDomain: return "left-domain";
    }
    return "?";
}

namespace {

double sup(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double norm2(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

std::vector<double> start_vector(const ResidualSystem& sys, int seed, double margin) {
    // all free angles equal; each non-ideal vertex sum starts at 0.9*pi
    std::vector<double> x(sys.unknowns(), 0.9 * pi() / 3.0);
    if (seed > 0) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
        std::uniform_real_distribution<double> pert(-0.2, 0.2);
        for (double& v : x) v *= 1.0 + pert(rng);
    }
    // repair: scale each tetrahedron's angles below the vertex-sum ceiling
    for (int t = 0; t < sys.tri.size(); ++t) {
        double worst = 0;
        TetAngles a = sys.tet_angles(t, x);
        for (int v = 0; v < 4; ++v)
            if (!sys.tri.tets[t].comb.ideal(v)) worst = std::max(worst, a.vertex_sum(v));
        if (worst >= 0.95 * pi()) {
            double s = 0.9 * pi() / worst;
            for (int e = 0; e < 6; ++e) {
                int u = sys.unknown_of[t][e];
                if (u >= 0) x[u] *= s;
            }
        }
    }
    for (double& v : x) v = std::clamp(v, margin, pi() - margin);
    return x;
}

SolveOutcome solve_from(const ResidualSystem& sys, const SolverConfig& cfg, int seed) {
    const int n = sys.unknowns();
    const int m = sys.equations();
    SolveOutcome out;
    out.seed_used = seed;
    std::vector<double> x = start_vector(sys, seed, cfg.angle_margin);

    auto project = [&](std::vector<double>& v) {
        for (double& a : v) a = std::clamp(a, cfg.angle_margin, pi() - cfg.angle_margin);
    };

    std::vector<double> r = evaluate(sys, x);
    double f = norm2(r);
    double lambda = cfg.lambda_init;
    out.trace.push_back({0, sup(r), lambda});

    int iter = 0;
    for (; iter < cfg.max_iters; ++iter) {
        if (sup(r) < cfg.residual_tol) break;
        std::vector<double> Jv = jacobian(sys, x);
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            J(Jv.data(), m, n);
        Eigen::Map<const Eigen::VectorXd> rv(r.data(), m);
        Eigen::MatrixXd A = J.transpose() * J;
        Eigen::VectorXd g = J.transpose() * rv;

        bool accepted = false;
        while (lambda <= cfg.lambda_max) {
            Eigen::MatrixXd M = A;
            for (int i = 0; i < n; ++i) M(i, i) += lambda * std::max(A(i, i), 1e-12);
            Eigen::VectorXd delta = M.ldlt().solve(-g);
            std::vector<double> trial(n);
            // halve steps that leave the valid region
            double scale = 1.0;
            bool domain_ok = false;
            for (int h = 0; h < 40; ++h) {
                for (int i = 0; i < n; ++i) trial[i] = x[i] + scale * delta[i];
                project(trial);
                if (in_valid_domain(sys, trial, cfg.angle_margin)) {
                    domain_ok = true;
                    break;
                }
                scale *= 0.5;
            }
            if (domain_ok) {
                std::vector<double> rt = evaluate(sys, trial);
                double ft = norm2(rt);
                if (ft < f) {
                    x = std::move(trial);
                    r = std::move(rt);
                    f = ft;
                    lambda = std::max(lambda / cfg.lambda_shrink, 1e-14);
                    accepted = true;
                    break;
                }
            }
            lambda *= cfg.lambda_grow;
        }
        out.trace.push_back({iter + 1, sup(r), lambda});
        if (!accepted) break;  // stalled
    }

    out.angles = x;
    out.residual_norm = sup(r);
    out.iterations = iter;
    if (out.residual_norm < cfg.residual_tol && in_valid_domain(sys, x, cfg.angle_margin / 2)) {
        out.status = SolveStatus::Solved;
    } else {
        bool pinned = false;
        for (double v : x)
            pinned |= (v <= 2 * cfg.angle_margin) || (v >= pi() - 2 * cfg.angle_margin);
        out.status = pinned ? SolveStatus::LeftDomain : SolveStatus::NoConvergence;
    }
    return out;
}

}  // namespace

SolveOutcome solve(const ResidualSystem& sys, const SolverConfig& cfg) {
    SolveOutcome best;
    bool have = false;
    for (int seed = 0; seed < std::max(1, cfg.retry_seeds); ++seed) {
        SolveOutcome o = solve_from(sys, cfg, seed);
        if (o.status == SolveStatus::Solved) return o;
        if (!have || o.residual_norm < best.residual_norm) {
            best = o;
            have = true;
        }
    }
    return best;
}

SolveOutcome solve(const Triangulation& tri, const SolverConfig& cfg) {
    return solve(assemble(tri), cfg);
}

CertifyReport certify(const Triangulation& tri, const std::vector<double>& x) {
    AssembleOptions opts;
    opts.drop_redundant = false;
    ResidualSystem full = assemble(tri, opts);
    std::vector<double> r = evaluate(full, x);
    CertifyReport rep;
    for (std::size_t i = 0; i < r.size(); ++i) {
        std::string key = residual_kind_name(full.residuals[i].kind);
        double v = std::abs(r[i]);
        auto [it, fresh] = rep.max_residual_by_class.emplace(key, v);
        if (!fresh) it->second = std::max(it->second, v);
        rep.worst = std::max(rep.worst, v);
    }
    rep.angles_valid = true;
    for (int t = 0; t < tri.size(); ++t) {
        TetAngles a = full.tet_angles(t, x);
        if (!validate_angles(tri.tets[t].comb, a).valid()) rep.angles_valid = false;
    }
    return rep;
}

}  // namespace trunckit
