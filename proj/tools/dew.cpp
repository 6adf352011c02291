#include <string>
#include <vector>

#include "dew/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dew::run(std::move(args));
}
