// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "rcl/commands.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return rcl::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
