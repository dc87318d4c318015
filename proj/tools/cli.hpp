#pragma once

#include <iosfwd>

namespace bngnn::cli {

// Parses argv and runs one subcommand; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bngnn::cli
