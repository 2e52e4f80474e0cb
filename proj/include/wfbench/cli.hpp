#pragma once

namespace wfbench::cli {

/// Entry point behind the wfbench executable. Exit codes: 0 success,
/// 1 failed check (--require-perfect with violations, verify mismatch),
/// 2 usage error, 3 I/O or format error.
int run(int argc, const char* const* argv);

}  // namespace wfbench::cli
