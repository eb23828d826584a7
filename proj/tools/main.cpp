#include <string>
#include <vector>

#include "crowd/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return crowd::run_cli(args);
}
