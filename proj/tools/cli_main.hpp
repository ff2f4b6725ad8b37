#pragma once

namespace stabsens_cli {

/// Entry point of the stabsens command-line tool.
/// Exit codes: 0 success, 1 usage/input error, 2 numerical failure.
int cli_main(int argc, const char* const* argv);

}  // namespace stabsens_cli
