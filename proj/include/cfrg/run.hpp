#pragma once

#include <iosfwd>
#include <string>

#include "cfrg/config.hpp"

namespace cfrg {

struct RunOptions {
    /// Empty disables file output.
    std::string out_dir;
    int threads = 1;
    bool verbose = false;
};

/// Dispatches one CLI command and returns the process exit code:
/// 0 success, 2 invalid input or refused solve, 3 convergence failure,
/// 4 expectation mismatch, 5 I/O failure, 1 internal error.
int run_command(const std::string& command, const RunConfig& cfg, const RunOptions& opt,
                std::ostream& out, std::ostream& err);

} // namespace cfrg
