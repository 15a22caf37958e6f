#include <string>
#include <vector>

#include "ctr/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ctr::run_command(args);
}
