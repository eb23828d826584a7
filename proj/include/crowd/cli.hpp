#pragma once

#include <string>
#include <vector>

namespace crowd {

// Entry point shared by the binary and the CLI tests. args excludes argv[0].
int run_cli(const std::vector<std::string>& args);

}  // namespace crowd
