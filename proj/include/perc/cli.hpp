#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace perc {
namespace cli {

// Runs one CLI command. Exit codes: 0 success, 2 parameter error,
// 3 validation failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cli
}  // namespace perc
