#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace signet::app {

/// Exit codes: 0 success, 1 usage or config error, 2 data error, 3 internal error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// SIGNET_WORKERS if set to a positive integer, otherwise the hardware thread count.
int default_workers();

}  // namespace signet::app
