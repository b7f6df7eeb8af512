#pragma once

#include <string>
#include <vector>

namespace vasc {

/// Exit codes: 0 ran (possibly with warnings), 2 input contract violation,
/// 3 invalid config, 1 anything else.
int run_cli(const std::vector<std::string>& args);

}  // namespace vasc
