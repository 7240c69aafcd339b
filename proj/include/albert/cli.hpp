// Command-line driver. All I/O goes through the caller's streams so tests can
// capture output byte for byte.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace albert {

// args excludes the program name. Exit codes: 0 success; 1 user error (bad
// flags, unreadable file, parse or type error); 2 contract failure during
// run/simulate (the payload is printed); 3 internal invariant breach —
// including a fuzz run that finds a disagreement.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace albert
