#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qattract {

/// Exit codes: 0 pass, 1 usage or config error, 2 mathematical failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace qattract
