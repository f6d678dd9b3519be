#pragma once

#include <string>
#include <vector>

namespace catune {

// Exit codes: 0 success, 2 usage, 3 config, 4 I/O, 5 numeric/contract,
// 6 non-convergence.
int dispatch(const std::vector<std::string>& args);
int dispatch(int argc, const char* const* argv);

}  // namespace catune
