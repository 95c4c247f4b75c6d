#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aiscene::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

/// Runs one subcommand (split, gen-synth, pools, augment, train-ssl,
/// train-sup, eval, stats, export-ply). Errors are reported on `err` and
/// mapped to ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace aiscene::cli
