/**
 * cli.hpp — command-line surface: gen-dataset, train, eval, simulate,
 * compare. Every artifact-producing command writes a run manifest next to
 * its output. Exit codes: 0 success, 2 usage, 3 config, 4 data, 5 numeric.
 */

#pragma once

namespace dm::cli {

inline constexpr const char* kToolVersion = "deepmobility 1.0.0";

int dispatch(int argc, const char* const* argv);

}  // namespace dm::cli
