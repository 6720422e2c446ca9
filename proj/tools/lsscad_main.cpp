#include <string>
#include <vector>

#include "lsscad/cli.hpp"

int main(int argc, char** argv) {
  return lsscad::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
