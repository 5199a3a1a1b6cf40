#include <vector>

#include "swipt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return swipt::run_cli(args);
}
