#include <CLI11.hpp>
#include <cstdio>

#include "trunckit/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"trunckit: hyperbolic structures with geodesic boundary from partially "
                 "truncated triangulations"};
    app.require_subcommand(1);

    std::string path;

    auto* validate = app.add_subcommand("validate", "structural and Euler-characteristic checks");
    validate->add_option("file", path, "triangulation file")->required();

    trunckit::SolveFlags sflags;
    auto* solve = app.add_subcommand("solve", "solve the consistency and completeness equations");
    solve->add_option("file", path, "triangulation file")->required();
    solve->add_option("--tol", sflags.tol, "residual sup-norm tolerance");
    solve->add_option("--max-iters", sflags.max_iters, "Levenberg-Marquardt iteration cap");
    solve->add_option("--seeds", sflags.seeds, "number of perturbed restarts");
    solve->add_flag("--verify-only", sflags.verify_only, "only certify the stored angles");
    solve->add_flag("--json", sflags.json, "machine-readable report");
    solve->add_flag("--timing", sflags.timing, "include timing in the report");
    solve->add_option("-o,--output", sflags.output, "write the solved file here");

    trunckit::CanonizeFlags cflags;
    auto* canonize = app.add_subcommand("canonize", "flip to the Kojima canonical decomposition");
    canonize->add_option("file", path, "triangulation file")->required();
    canonize->add_option("--max-moves", cflags.max_moves, "move cap (default 10 n^3)");
    canonize->add_option("--tilt-eps", cflags.tilt_eps, "flat-face threshold on normalized tilts");
    canonize->add_option("--perturb-move", cflags.perturb_move,
                         "apply a scripted geometric 2-3 move at T:F before canonizing");
    canonize->add_flag("--json", cflags.json, "machine-readable report");
    canonize->add_flag("--timing", cflags.timing, "include timing in the report");
    canonize->add_option("-o,--output", cflags.output, "write the canonical triangulation here");
    canonize->add_option("--tol", cflags.solve.tol, "solver tolerance when solving first");
    canonize->add_option("--max-iters", cflags.solve.max_iters, "solver iteration cap");
    canonize->add_option("--seeds", cflags.solve.seeds, "solver restarts");

    trunckit::TiltFlags tflags;
    auto* tilts = app.add_subcommand("tilts", "per-face tilt table of a solved triangulation");
    tilts->add_option("file", path, "triangulation file")->required();
    tilts->add_flag("--json", tflags.json, "machine-readable table");

    auto* isosig = app.add_subcommand("isosig", "canonical isomorphism label");
    isosig->add_option("file", path, "triangulation file")->required();

    CLI11_PARSE(app, argc, argv);

    trunckit::CommandResult res;
    try {
        if (validate->parsed()) res = trunckit::cmd_validate(path);
        if (solve->parsed()) res = trunckit::cmd_solve(path, sflags);
        if (canonize->parsed()) res = trunckit::cmd_canonize(path, cflags);
        if (tilts->parsed()) res = trunckit::cmd_tilts(path, tflags);
        if (isosig->parsed()) res = trunckit::cmd_isosig(path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    std::fputs(res.report.c_str(), stdout);
    return res.exit_code;
}
