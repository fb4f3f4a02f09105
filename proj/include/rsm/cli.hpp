#pragma once

namespace rsm {

/// Entry point of the `rsm` tool. Returns 0 on success, 1 on usage errors
/// and 2 on runtime errors.
int run_cli(int argc, const char* const* argv);

}  // namespace rsm
