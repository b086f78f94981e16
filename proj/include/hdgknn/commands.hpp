#pragma once

// The `hdgknn` command line: gen, build, validate, query and bench.
// Exit codes: 0 success, 1 file or validation failure, 2 usage error.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdgknn {

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "x1,...,xd".
std::vector<double> parse_point(const std::string& text);

}  // namespace hdgknn
