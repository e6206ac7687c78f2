#pragma once

namespace hedge {

// argv-style entry point for the `hedgekit` tool. Returns the process exit
// code: 0 success, 2 configuration/usage error, 3 data error, 4 training
// failure, 1 anything else.
int run_cli(int argc, const char* const* argv);

}  // namespace hedge
