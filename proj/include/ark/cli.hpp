#pragma once

namespace ark {

/// Entry point of the `ark` command line tool. Exit codes: 0 success,
/// 1 configuration or usage error, 2 numerical failure.
int cli_main(int argc, char** argv);

}  // namespace ark
