#pragma once

namespace degwave {

/// Parse arguments, run the requested subcommand, map thrown errors to the
/// documented exit codes (1 usage, 2 hypothesis refusal, 3 inadmissible
/// lambda, 4 numerical failure).
int run_cli(int argc, const char* const* argv);

}  // namespace degwave
