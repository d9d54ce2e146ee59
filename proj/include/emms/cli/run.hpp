#pragma once

namespace emms::cli {

// Full command-line entry point. Returns the process exit code:
// 0 success, 2 usage error, 3 numerical failure, 4 search not converged.
int run(int argc, const char* const* argv);

} // namespace emms::cli
