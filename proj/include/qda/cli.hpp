#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qda {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitBudget = 3;

// Runs one subcommand. args excludes the program name. Results go to `out`
// unless --out names a file; diagnostics and usage go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Parses a flat key=value config file; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text);

// Re-emits CSV text as a JSON array of objects keyed by the header.
std::string csv_to_json(const std::string& csv);

}  // namespace qda
