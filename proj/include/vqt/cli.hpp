#pragma once

#include <iosfwd>

namespace vqt {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

/// Entry point of the `vqt` tool. Subcommands: `bases gen`, `simulate`,
/// `reconstruct`, `witness`, `experiment <fig1|fig2|fig3|fig4|custom>`.
/// Normal output goes to `out`, diagnostics and help-on-error to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vqt
