#pragma once

#include <ostream>

namespace amwu::harness {

/// Subcommands run, compare, avoidance, spectra and presets.
/// Returns 0 on success, 1 on usage errors and 2 on runtime failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace amwu::harness
