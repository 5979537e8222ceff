#pragma once

#include <map>
#include <string>

#include "trunckit/equations.hpp"

namespace trunckit {

struct SolverConfig {
    int max_iters = 200;
    double residual_tol = 1e-10;
    double angle_margin = 1e-8;  // box [margin, pi - margin] for free angles
    int retry_seeds = 16;
    double lambda_init = 1e-3;
    double lambda_shrink = 3.0;
    double lambda_grow = 4.0;
    double lambda_max = 1e12;
};

enum class SolveStatus : std::uint8_t { Solved, NoConvergence, LeftDomain };

const char* solve_status_name(SolveStatus s);

struct IterationRecord {
    int iter = 0;
    double residual_norm = 0.0;  // sup norm
    double lambda = 0.0;
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::NoConvergence;
    std::vector<double> angles;
    double residual_norm = 0.0;
    std::vector<IterationRecord> trace;
    int seed_used = 0;
    int iterations = 0;
};

// Least-squares Levenberg-Marquardt on the residual system. The system is
// overdetermined on purpose; uniqueness of the geometric solution makes the
// global minimum zero, so Solved outcomes carry THE hyperbolic structure.
SolveOutcome solve(const ResidualSystem& sys, const SolverConfig& cfg = {});
SolveOutcome solve(const Triangulation& tri, const SolverConfig& cfg = {});

struct CertifyReport {
    std::map<std::string, double> max_residual_by_class;  // includes dropped classes
    bool angles_valid = false;  // per-tet moduli validity constraints
    double worst = 0.0;

    bool pass(double tol) const { return angles_valid && worst < tol; }
};

// Re-evaluates every condition class on the full (unreduced) system plus
// the per-tetrahedron moduli constraints.
CertifyReport certify(const Triangulation& tri, const std::vector<double>& x);

}  // namespace trunckit
