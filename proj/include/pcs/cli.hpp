#pragma once

namespace pcs {

/// Command line driver. Subcommands: resolve | semistable | hodge |
/// invariant | bar-demo | integrate-demo. Returns the process exit code:
/// 0 success, 2 unreadable or invalid input, 3 infeasible contact data,
/// 1 any other failure.
int run_cli(int argc, char** argv);

}  // namespace pcs
