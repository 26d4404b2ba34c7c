#pragma once

#include <ostream>

namespace hdp {

// Exit codes: 0 success, 1 a check failed or a density row was rejected,
// 2 usage or configuration error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hdp
