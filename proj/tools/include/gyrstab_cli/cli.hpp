#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gyrstab::cli {

// Exit codes: 0 success, 1 domain failure, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gyrstab::cli
