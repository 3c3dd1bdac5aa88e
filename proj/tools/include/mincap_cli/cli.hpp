#pragma once

#include <iosfwd>

namespace mincap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitAuditFailed = 2;

/// Runs one command line. Human summaries go to `out` (or the JSON document
/// with --json), diagnostics to `err`; machine outputs land in --out.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mincap::cli
