#include <string>
#include <vector>

#include "certmenu/runner.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return certmenu::run_command(args);
}
