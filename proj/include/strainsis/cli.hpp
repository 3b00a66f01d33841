#pragma once

namespace strainsis::cli {

/// Subcommand dispatcher behind the strainsis binary. Exit codes: 0 success,
/// 1 validation failure, 2 solver nonconvergence (a report is still written
/// when possible), 64 usage errors.
int run_cli(int argc, const char* const* argv);

} // namespace strainsis::cli
