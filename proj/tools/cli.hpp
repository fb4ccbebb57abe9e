#pragma once

#include <ostream>

namespace nbcover::cli {

// Exit codes: 0 covered/success, 1 not covered, 2 input or usage error, 3 inconclusive.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nbcover::cli
