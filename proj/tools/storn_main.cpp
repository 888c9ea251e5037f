#include <iostream>

#include "storn/cli.hpp"

int main(int argc, char** argv) {
  return storn::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
