#pragma once

namespace chdbc {

// Entry point behind the chdbc binary. Subcommands: simulate, stationary,
// verify, sweep. Returns 0 on success, 1 on failed verification or a stalled
// solve, 2 on usage/config errors.
int cli_main(int argc, char** argv);

}  // namespace chdbc
