#pragma once

// Command-line front end: one subcommand per library operation.

#include <iosfwd>
#include <string>
#include <vector>

namespace snowflake::cli {

/// Exit codes: 0 success, 2 invalid input or usage, 1 internal error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Names of all subcommands, in help order.
std::vector<std::string> subcommand_names();

}  // namespace snowflake::cli
