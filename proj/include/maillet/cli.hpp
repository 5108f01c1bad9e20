#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace maillet {

// Exit codes returned by dispatch.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// Runs one subcommand. args excludes the program name. The JSON report goes
// to out, diagnostics to err; bulk rows go to the --csv path when given.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace maillet
