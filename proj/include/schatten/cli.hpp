#pragma once

#include <ostream>

namespace schatten::cli {

/// Exit codes: 0 success, 1 validation error or bad usage, 2 numeric failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace schatten::cli
