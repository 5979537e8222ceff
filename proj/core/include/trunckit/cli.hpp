#pragma once

#include <string>

#include "trunckit/canonical.hpp"
#include "trunckit/io.hpp"

namespace trunckit {

// Exit codes shared by all commands: 0 success (canonical for canonize),
// 1 subdivision of the canonical decomposition, 2 validation failure,
// 3 no convergence, 4 stuck, 5 parse error.
struct CommandResult {
    int exit_code = 0;
    std::string report;  // text or JSON, ends with a newline
};

struct SolveFlags {
    double tol = 1e-10;
    int max_iters = 200;
    int seeds = 16;
    bool verify_only = false;
    bool json = false;
    bool timing = false;
    std::string output;  // write the solved file here when non-empty
};

struct CanonizeFlags {
    long max_moves = -1;
    double tilt_eps = 1e-9;
    std::string perturb_move;  // "T:F": apply a scripted geometric 2-3 first
    bool json = false;
    bool timing = false;
    std::string output;
    SolveFlags solve;  // used when the input has no angles block
};

struct TiltFlags {
    bool json = false;
};

CommandResult cmd_validate(const std::string& path);
CommandResult cmd_solve(const std::string& path, const SolveFlags& flags);
CommandResult cmd_canonize(const std::string& path, const CanonizeFlags& flags);
CommandResult cmd_tilts(const std::string& path, const TiltFlags& flags);
CommandResult cmd_isosig(const std::string& path);

}  // namespace trunckit
