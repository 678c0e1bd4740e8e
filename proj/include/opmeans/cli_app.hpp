// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "opmeans/solver.hpp"

namespace opmeans {

/// Everything that determines a run's output, echoed verbatim into every
/// output document so a result is reproducible from the document alone.
/// Identical manifests produce identical outputs.
struct RunManifest {
    std::string command;
    std::vector<std::string> inputs; // measure / suite files, in flag order
    std::string recipe;              // recipe spec or metric, when the command takes one
    SolverConfig solver;
    std::uint64_t seed = 0;
    std::string out; // empty = stdout

    [[nodiscard]] nlohmann::ordered_json to_json() const;
};

/// Entry point behind main(). Parses flags, dispatches the subcommand and
/// maps failures to exit codes — 0 success, 1 property failures (verify),
/// 2 no convergence, 3 bad input — writing a machine-readable JSON object
/// describing any failure to stderr.
int run_cli(int argc, const char* const* argv);

} // namespace opmeans
