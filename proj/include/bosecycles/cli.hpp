#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bosecycles {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

/// Entry point of the `bosecycles` tool.  Subcommands: spectrum, scan, mu,
/// bounds, sample, merger, gain, oracle, wavefn.
///
/// Options come from the command line and from `--config FILE` (`key = value`
/// lines, keys are long option names); command-line values win.  Data goes to
/// `--out`, else to $BOSECYCLES_OUT_DIR/<subcommand>.<csv|json>, else to `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bosecycles
