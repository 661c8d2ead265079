#pragma once

namespace warpgeo::cli {

/// Entry point of the warpgeo command-line tool.
/// Exit codes: 0 success, 2 argument or domain errors, 3 numerical
/// non-convergence or non-finite output.
int run(int argc, const char* const* argv);

}  // namespace warpgeo::cli
