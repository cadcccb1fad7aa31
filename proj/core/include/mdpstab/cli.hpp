#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mdpstab {

/// Command-line front end. Exit codes: 0 success, 1 negative answer
/// (check/zero-var No), 2 usage error, 3 model or input error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mdpstab
