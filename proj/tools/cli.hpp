#pragma once

#include <iosfwd>

namespace halfq::cli {

/// Runs the halfq command line. Usage errors return 2, verification
/// failures 1, success 0.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace halfq::cli
