// Command-line front end. run_cli is the whole program minus process setup, so
// tests can drive it in-process.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gaugecert {

namespace exit_code {
inline constexpr int kYes = 0;
inline constexpr int kNo = 1;  // also: a recovery bound was violated
inline constexpr int kUnknown = 2;
inline constexpr int kInputError = 3;  // usage, parse or validation error
inline constexpr int kLimitExceeded = 4;  // enumeration cap or simplex iteration guard
inline constexpr int kMaxIter = 5;
inline constexpr int kInfeasible = 6;
inline constexpr int kInternalError = 7;
}  // namespace exit_code

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gaugecert
