#pragma once

namespace curvforge {

enum ExitCode : int { exit_pass = 0, exit_input_error = 1, exit_verification_failed = 2 };

/// Entry point of the curvforge executable. Diagnostics go to stderr;
/// report.json and fields.csv go to the --out directory.
int run_cli(int argc, char** argv);

} // namespace curvforge
